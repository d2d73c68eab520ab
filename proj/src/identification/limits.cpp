#include "npmix/identification/limits.hpp"

#include "npmix/error.hpp"
#include "npmix/estimators/estimators.hpp"
#include "npmix/model/population.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace npmix {

bool LimitProbe::stable(double rel_tol) const {
  return std::isfinite(limit) && residual <= rel_tol * std::max(1.0, std::abs(limit));
}

double mgf_secant(const MixtureModel& model, double t, std::span<const double> x, std::span<const double> x0) {
  const double half = 0.5 * t;
  return (pop_log_R(model, t, x, x0) - pop_log_R(model, half, x, x0)) / half;
}

LimitProbe slope_limit_mgf(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, int direction,
                           const ProbeSettings& probe) {
  if (!(probe.T > 0.0)) fail(ErrorKind::DomainError, "probe base T must be positive");
  if (direction != 1 && direction != -1) fail(ErrorKind::DomainError, "direction must be +1 or -1");
  LimitProbe p;
  for (double m : {1.0, 2.0, 4.0}) {
    const double t = direction * m * probe.T;
    p.args.push_back(t);
    p.values.push_back(mgf_secant(model, t, x, x0));
  }
  p.limit = p.values[2];
  p.residual = std::abs(p.values[2] - p.values[1]);
  return p;
}

SlopeLimits slope_limits_mgf(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, const ProbeSettings& probe) {
  return {slope_limit_mgf(model, x, x0, 1, probe), slope_limit_mgf(model, x, x0, -1, probe)};
}

double cf_increment(const MixtureModel& model, double s, double a, std::span<const double> x, std::span<const double> x0) {
  const PopulationSource src(model, {x0.begin(), x0.end()}, {x.begin(), x.end()});
  return nabla_from(src, s, a).value;
}

LimitProbe slope_limit_cf(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, const ProbeSettings& probe) {
  if (!(probe.S > 0.0) || !(probe.a > 0.0)) fail(ErrorKind::DomainError, "CF probe needs S > 0 and a > 0");
  LimitProbe p;
  if (std::equal(x.begin(), x.end(), x0.begin(), x0.end())) {
    p.args = {probe.S / 4, probe.S / 2, probe.S};
    p.values = {0.0, 0.0, 0.0};
    p.limit = 0.0;
    p.residual = 0.0;
    return p;
  }
  for (double m : {0.25, 0.5, 1.0}) {
    p.args.push_back(m * probe.S);
    p.values.push_back(cf_increment(model, m * probe.S, probe.a, x, x0));
  }
  p.limit = p.values[2];
  const int w = std::max(2, probe.window);
  double lo = p.limit, hi = p.limit;
  for (int i = 0; i < w; ++i) {
    const double s = probe.S * (0.5 + 0.5 * i / (w - 1));
    const double v = cf_increment(model, s, probe.a, x, x0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  p.residual = hi - lo;
  if (std::abs(probe.a * p.limit) > std::numbers::pi - kBranchMargin)
    fail(ErrorKind::BranchAmbiguity, "|a * CF slope| too close to pi; reduce a");
  return p;
}

double rho_modulus_deviation(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, double lo, double hi,
                             int window) {
  double dev = 0.0;
  const int w = std::max(2, window);
  for (int i = 0; i < w; ++i) {
    const double s = lo + (hi - lo) * i / (w - 1);
    const ScaledComplex num = pop_cond_cf_scaled(model, s, x);
    const ScaledComplex den = pop_cond_cf_scaled(model, s, x0);
    if (!(std::abs(den.mantissa) > kCfFloor)) return std::numeric_limits<double>::infinity();
    const double log_mod = num.log_abs() - den.log_abs();
    dev = std::max(dev, std::abs(std::exp(log_mod) - 1.0));
  }
  return dev;
}

LambdaCProbe lambda_c_limit(double mean_diff, double L_plus, double L_minus, std::span<const double> c_seq) {
  if (c_seq.size() < 2) fail(ErrorKind::ConfigError, "c_seq needs at least two entries");
  LambdaCProbe p;
  for (double c : c_seq) {
    p.c.push_back(c);
    p.values.push_back((mean_diff - (1.0 + c) * L_minus) / (L_plus - (1.0 + c) * L_minus));
  }
  const std::size_t n = p.values.size();
  // c * lambda_c tends to a nonzero constant when the limit does not exist
  const double scaled_last = p.c[n - 1] * p.values[n - 1];
  const double scaled_prev = p.c[n - 2] * p.values[n - 2];
  const double jump = std::abs(p.values[n - 1] - p.values[n - 2]);
  if (std::abs(scaled_last) > 1e-8 && std::abs(scaled_last - scaled_prev) <= 1e-2 * std::abs(scaled_last) &&
      jump > 1.0) {
    p.diverges = true;
    return p;
  }
  // Neville extrapolation of the polynomial in c to c = 0
  std::vector<double> row = p.values;
  double before_last = row.back();
  for (std::size_t level = 1; level < n; ++level) {
    std::vector<double> next(row.size() - 1);
    for (std::size_t i = level; i < n; ++i) {
      const double ci = p.c[i], cj = p.c[i - level];
      next[i - level] = (cj * row[i - level + 1] - ci * row[i - level]) / (cj - ci);
    }
    before_last = row.back();
    row = std::move(next);
  }
  p.limit = row.back();
  p.residual = std::abs(p.limit - before_last);
  return p;
}

LambdaCProbe lambda_c_limit(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, const ProbeSettings& probe) {
  const SlopeLimits L = slope_limits_mgf(model, x, x0, probe);
  const double mean_diff = pop_cond_mean(model, x) - pop_cond_mean(model, x0);
  return lambda_c_limit(mean_diff, L.plus.limit, L.minus.limit, probe.c_seq);
}

}  // namespace npmix
