#include "npmix/estimators/estimators.hpp"

#include "npmix/error.hpp"
#include "npmix/model/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace npmix {

SampleSource::SampleSource(const ObservationView& data, std::span<const double> x0, std::span<const double> x1,
                           const TuningSchedule& tuning, KernelFamily family) {
  tuning.validate(data.k());
  for (auto x : {x0, x1}) {
    mgf_.emplace_back(data, x, KernelSpec{family, tuning.h_n});
    cf_.emplace_back(data, x, KernelSpec{family, tuning.b_n});
    mom_.emplace_back(data, x, KernelSpec{family, tuning.d_n});
    cdfw_.emplace_back(data, x, KernelSpec::quartic(tuning.c_n));
  }
  for (int p = 0; p < 2; ++p) cdf_.emplace_back(cdfw_[p], data.z());
  const auto z = data.z();
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  range_ = {*lo, *hi};
}

double SampleSource::log_mgf(int point, double t) const { return mgf_[point].log_mgf(t).value; }

ScaledComplex SampleSource::cf(int point, double s) const { return {cf_[point].cf(s).value, 0.0}; }

double SampleSource::mean(int point) const { return mom_[point].mean().value; }

double SampleSource::m2(int point) const { return mom_[point].m2().value; }

double SampleSource::cdf(int point, double z) const { return cdf_[point](z); }

PopulationSource::PopulationSource(const MixtureModel& model, std::vector<double> x0, std::vector<double> x1)
    : model_(model), x0_(std::move(x0)), x1_(std::move(x1)) {}

double PopulationSource::log_mgf(int point, double t) const { return pop_log_cond_mgf(model_, t, at(point)); }

ScaledComplex PopulationSource::cf(int point, double s) const { return pop_cond_cf_scaled(model_, s, at(point)); }

double PopulationSource::mean(int point) const { return pop_cond_mean(model_, at(point)); }

double PopulationSource::m2(int point) const { return pop_cond_m2(model_, at(point)); }

double PopulationSource::cdf(int point, double z) const { return pop_cond_cdf(model_, z, at(point)); }

double delta_from(const TransformSource& src, double t) {
  if (!(t != 0.0)) fail(ErrorKind::DomainError, "MGF argument must be nonzero");
  return (src.log_mgf(1, t) - src.log_mgf(0, t)) / t;
}

NablaResult nabla_from(const TransformSource& src, double s, double a) {
  if (!(a > 0.0)) fail(ErrorKind::DomainError, "CF increment a must be positive");
  const ScaledComplex n0 = src.cf(1, s + a), d0 = src.cf(0, s + a);
  const ScaledComplex n1 = src.cf(1, s), d1 = src.cf(0, s);
  if (!(std::abs(d0.mantissa) > kCfFloor) || !(std::abs(d1.mantissa) > kCfFloor) || !(std::abs(n1.mantissa) > kCfFloor))
    fail(ErrorKind::DegenerateDenominator, "characteristic function modulus below floor");
  // ratio = [phi1(s+a)/phi0(s+a)] / [phi1(s)/phi0(s)], scales combined in logs
  const std::complex<double> mant = (n0.mantissa / d0.mantissa) / (n1.mantissa / d1.mantissa);
  const double log_scale = (n0.log_scale - d0.log_scale) - (n1.log_scale - d1.log_scale);
  NablaResult r;
  r.value = std::arg(mant) / a;
  r.noise = std::abs(std::log(std::abs(mant)) + log_scale) / a;
  r.branch_ok = std::abs(a * r.value) <= std::numbers::pi - kBranchMargin;
  return r;
}

LambdaResult lambda_from(const TransformSource& src, double delta, double nabla, bool clamp) {
  const double sep = delta - nabla;
  if (!(std::abs(sep) >= kSeparationFloor)) fail(ErrorKind::ParallelSlopes, "|Delta - Nabla| below separation floor");
  LambdaResult r;
  r.value = (src.mean(1) - src.mean(0) - nabla) / sep;
  if (clamp && (r.value < kLambdaMin || r.value > kLambdaMax)) {
    r.value = std::clamp(r.value, kLambdaMin, kLambdaMax);
    r.clamped = true;
  }
  return r;
}

Levels levels_from(const TransformSource& src, double delta, double nabla, double lambda) {
  Levels lv;
  const double e0 = src.mean(0);
  lv.C = 0.5 * (src.m2(0) - src.m2(1) + lambda * delta * delta + (1.0 - lambda) * nabla * nabla);
  if (lambda == 1.0) {
    lv.m1_x0 = e0;
    lv.m2_x0 = std::numeric_limits<double>::quiet_NaN();
    return lv;
  }
  const double det = nabla - delta;
  if (!(std::abs(det) >= kSeparationFloor)) fail(ErrorKind::ParallelSlopes, "level system singular: Delta equals Nabla");
  // [C; E] = [[-Delta, -Nabla], [1, 1]] [lambda m1; (1-lambda) m2]
  const double u = (lv.C + nabla * e0) / det;
  const double v = e0 - u;
  lv.m1_x0 = u / lambda;
  lv.m2_x0 = v / (1.0 - lambda);
  return lv;
}

SeriesSetup series_setup(double delta, double nabla, double lambda, double m1_x0, double m2_x0) {
  SeriesSetup s;
  double d = delta - nabla;
  if (!(std::abs(d) >= kSeparationFloor)) fail(ErrorKind::ParallelSlopes, "|Delta - Nabla| below separation floor");
  s.params.lambda = lambda;
  if (d > 0.0) {
    s.params.delta = d;
    s.params.m1_x1 = m1_x0 + delta;
    s.params.g_x0 = m1_x0 - m2_x0;
    s.params.m2_x0 = m2_x0;
  } else {
    // roles of the points exchanged: new x0 = old x1
    s.swapped = true;
    s.params.delta = -d;
    s.params.m1_x1 = m1_x0;
    s.params.g_x0 = (m1_x0 + delta) - (m2_x0 + nabla);
    s.params.m2_x0 = m2_x0 + nabla;
  }
  return s;
}

double f2_series(const TransformSource& src, const SeriesParams& sp, double z, int p) {
  if (!(sp.delta > 0.0)) fail(ErrorKind::DomainError, "series needs a positive slope gap");
  if (sp.lambda >= 1.0) fail(ErrorKind::DomainError, "series needs lambda < 1");
  double acc = 0.0;
  for (int j = 0; j <= p; ++j) {
    const double shift = z + j * sp.delta;
    acc += src.cdf(1, shift + sp.m1_x1 - sp.g_x0) - src.cdf(0, shift + sp.m2_x0);
  }
  return 1.0 - acc / (1.0 - sp.lambda);
}

double f1_from(const TransformSource& src, const SeriesParams& sp, double m1_x0, double m2_x0, double z, int p) {
  if (!(sp.lambda > 0.0)) fail(ErrorKind::DomainError, "F1 needs lambda > 0");
  return (src.cdf(0, z + m1_x0) - (1.0 - sp.lambda) * f2_series(src, sp, z + m1_x0 - m2_x0, p)) / sp.lambda;
}

double estimate_delta(const ObservationView& data, std::span<const double> x0, std::span<const double> x1, const TuningSchedule& tuning,
                      KernelFamily family) {
  if (std::equal(x0.begin(), x0.end(), x1.begin(), x1.end())) return 0.0;
  double zmax = 0.0;
  for (double v : data.z()) zmax = std::max(zmax, std::abs(v));
  if (tuning.t_n * zmax > 700.0) fail(ErrorKind::OverflowBudget, "t_n * max|z| exceeds 700");
  const KernelSpec k{family, tuning.h_n};
  const double l1 = KernelWindow(data, x1, k).log_mgf(tuning.t_n).value;
  const double l0 = KernelWindow(data, x0, k).log_mgf(tuning.t_n).value;
  return (l1 - l0) / tuning.t_n;
}

NablaResult estimate_nabla(const ObservationView& data, std::span<const double> x0, std::span<const double> x1,
                           const TuningSchedule& tuning, KernelFamily family) {
  if (std::equal(x0.begin(), x0.end(), x1.begin(), x1.end())) return {};
  const SampleSource src(data, x0, x1, tuning, family);
  NablaResult r = nabla_from(src, tuning.s_n, tuning.a_n);
  if (!r.branch_ok) fail(ErrorKind::BranchAmbiguity, "|a_n * Nabla| too close to pi");
  return r;
}

LambdaResult estimate_lambda(const ObservationView& data, std::span<const double> x0, std::span<const double> x1, const SlopeEstimate& slopes,
                             const TuningSchedule& tuning, KernelFamily family) {
  const SampleSource src(data, x0, x1, tuning, family);
  return lambda_from(src, slopes.delta_hat, slopes.nabla_hat);
}

Levels estimate_levels(const ObservationView& data, std::span<const double> x0, std::span<const double> x1, const SlopeEstimate& slopes,
                       double lambda_hat, const TuningSchedule& tuning, KernelFamily family) {
  const SampleSource src(data, x0, x1, tuning, family);
  return levels_from(src, slopes.delta_hat, slopes.nabla_hat, lambda_hat);
}

}  // namespace npmix
