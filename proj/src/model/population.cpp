#include "npmix/model/population.hpp"

#include "npmix/error.hpp"

#include <cmath>
#include <vector>

namespace npmix {

double pop_log_cond_mgf(const MixtureModel& model, double t, std::span<const double> x) {
  std::vector<double> terms(model.J());
  for (std::size_t j = 0; j < model.J(); ++j) {
    const auto& c = model.component(j);
    terms[j] = std::log(model.weight(j, x)) + t * c.regression.value(x) + c.error->log_mgf(t);
  }
  return logsumexp(terms);
}

ScaledComplex pop_cond_cf_scaled(const MixtureModel& model, double s, std::span<const double> x) {
  std::vector<std::complex<double>> terms(model.J());
  for (std::size_t j = 0; j < model.J(); ++j) {
    const auto& c = model.component(j);
    terms[j] = std::log(model.weight(j, x)) + std::complex<double>(0.0, s * c.regression.value(x)) + c.error->log_cf(s);
  }
  return sum_exp(terms);
}

std::complex<double> pop_cond_cf(const MixtureModel& model, double s, std::span<const double> x) {
  return pop_cond_cf_scaled(model, s, x).value();
}

double pop_cond_cdf(const MixtureModel& model, double z, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < model.J(); ++j) {
    const auto& c = model.component(j);
    acc += model.weight(j, x) * c.error->cdf(z - c.regression.value(x));
  }
  return acc;
}

double pop_cond_mean(const MixtureModel& model, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < model.J(); ++j) acc += model.weight(j, x) * model.m(j, x);
  return acc;
}

double pop_cond_m2(const MixtureModel& model, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < model.J(); ++j) {
    const double m = model.m(j, x);
    acc += model.weight(j, x) * (m * m + model.component(j).error->variance());
  }
  return acc;
}

double pop_log_R(const MixtureModel& model, double t, std::span<const double> x, std::span<const double> x0) {
  return pop_log_cond_mgf(model, t, x) - pop_log_cond_mgf(model, t, x0);
}

double pop_R(const MixtureModel& model, double t, std::span<const double> x, std::span<const double> x0) {
  return std::exp(pop_log_R(model, t, x, x0));
}

std::complex<double> pop_rho(const MixtureModel& model, double s, std::span<const double> x, std::span<const double> x0) {
  const ScaledComplex num = pop_cond_cf_scaled(model, s, x);
  const ScaledComplex den = pop_cond_cf_scaled(model, s, x0);
  if (!(std::abs(den.mantissa) > kCfFloor))
    fail(ErrorKind::DegenerateDenominator, "characteristic function at x0 vanishes at s=" + std::to_string(s));
  return num.mantissa / den.mantissa * std::exp(num.log_scale - den.log_scale);
}

hp::Real pop_log_cond_mgf_hp(const MixtureModel& model, const hp::Real& t, std::span<const double> x, const hp::Real& x1) {
  if (!model.constant_weights()) fail(ErrorKind::DomainError, "extended-precision MGF requires constant weights");
  std::vector<hp::Real> terms(model.J());
  for (std::size_t j = 0; j < model.J(); ++j) {
    const auto& c = model.component(j);
    terms[j] = log(hp::Real(model.weights()[j])) + t * c.regression.value_hp(x, x1) + c.error->log_mgf_hp(t);
  }
  return hp::logsumexp(terms);
}

}  // namespace npmix
