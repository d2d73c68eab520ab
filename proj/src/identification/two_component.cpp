#include "npmix/identification/two_component.hpp"

#include "npmix/error.hpp"
#include "npmix/estimators/estimators.hpp"
#include "npmix/model/population.hpp"

#include <cmath>
#include <limits>

namespace npmix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool lambda_one(const LambdaCProbe& p, double tol) {
  return !p.diverges && std::isfinite(p.limit) && std::abs(p.limit - 1.0) <= tol;
}

}  // namespace

bool TwoComponentRecovery::has_second() const { return std::isfinite(m2_x0); }

double relative_det2(double a, double b, double c, double d) {
  const double n1 = std::hypot(a, b), n2 = std::hypot(c, d);
  if (n1 == 0.0 || n2 == 0.0) return 0.0;
  return (a * d - b * c) / (n1 * n2);
}

TwoComponentRecovery recover_two_component(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                           std::span<const double> t_grid, const ProbeSettings& probe, std::span<const double> z_grid,
                                           int series_terms) {
  if (!model.constant_weights()) fail(ErrorKind::DomainError, "fixed-weight recovery needs constant weights");
  if (std::equal(x.begin(), x.end(), x0.begin(), x0.end())) fail(ErrorKind::DomainError, "x must differ from x0");
  const double tol = probe.rel_tol;
  TwoComponentRecovery r;
  const double mean_diff = pop_cond_mean(model, x) - pop_cond_mean(model, x0);

  const SlopeLimits L = slope_limits_mgf(model, x, x0, probe);
  const bool two_sided = L.plus.stable(tol) && L.minus.stable(tol) &&
                         std::abs(L.plus.limit - L.minus.limit) > tol * std::max(1.0, std::abs(L.plus.limit));
  r.slope1 = L.plus.limit;
  if (two_sided) {
    r.route = "two-sided-mgf";
    r.slope2 = L.minus.limit;
    const LambdaCProbe lc = lambda_c_limit(mean_diff, L.plus.limit, L.minus.limit, probe.c_seq);
    r.lambda = lc.limit;
  } else {
    double cf_limit = kNaN;
    bool cf_ok = false;
    try {
      const LimitProbe cf = slope_limit_cf(model, x, x0, probe);
      cf_limit = cf.limit;
      cf_ok = cf.stable(tol);
    } catch (const Error&) {
    }
    if (cf_ok && std::abs(L.plus.limit - cf_limit) > tol * std::max(1.0, std::abs(L.plus.limit))) {
      r.route = "mgf-cf";
      r.slope2 = cf_limit;
      const LambdaCProbe ld = lambda_c_limit(mean_diff, L.plus.limit, cf_limit, probe.c_seq);
      r.lambda = ld.limit;
    } else {
      const LambdaCProbe lc = lambda_c_limit(mean_diff, L.plus.limit, L.minus.limit, probe.c_seq);
      if (!lambda_one(lc, tol)) fail(ErrorKind::DomainError, "no identifying condition holds at this pair of points");
      r.route = "degenerate";
      r.lambda = 1.0;
      r.slope2 = kNaN;
    }
  }

  const PopulationSource src(model, {x0.begin(), x0.end()}, {x.begin(), x.end()});
  if (r.lambda == 1.0) {
    r.m1_x0 = src.mean(0);
    r.m2_x0 = kNaN;
    r.C = 0.5 * (src.m2(0) - src.m2(1) + r.slope1 * r.slope1);
  } else {
    const Levels lv = levels_from(src, r.slope1, r.slope2, r.lambda);
    r.C = lv.C;
    r.m1_x0 = lv.m1_x0;
    r.m2_x0 = lv.m2_x0;
  }

  for (double t : t_grid) {
    r.t_grid.push_back(t);
    const double Mx = std::exp(pop_log_cond_mgf(model, t, x));
    const double M0 = std::exp(pop_log_cond_mgf(model, t, x0));
    if (!r.has_second()) {
      r.M1.push_back(M0 * std::exp(-t * r.m1_x0));
      r.M2.push_back(kNaN);
      continue;
    }
    // [M(t|x); M(t|x0)] = E diag(lambda, 1-lambda) [M1; M2]
    const double a = std::exp(t * (r.m1_x0 + r.slope1)), b = std::exp(t * (r.m2_x0 + r.slope2));
    const double c = std::exp(t * r.m1_x0), d = std::exp(t * r.m2_x0);
    if (std::abs(relative_det2(a, b, c, d)) < kDetFloor) {
      r.skipped_t.push_back(t);
      r.M1.push_back(kNaN);
      r.M2.push_back(kNaN);
      continue;
    }
    const double det = a * d - b * c;
    r.M1.push_back((d * Mx - b * M0) / det / r.lambda);
    r.M2.push_back((a * M0 - c * Mx) / det / (1.0 - r.lambda));
  }

  if (!z_grid.empty() && r.has_second()) {
    const SeriesSetup setup = series_setup(r.slope1, r.slope2, r.lambda, r.m1_x0, r.m2_x0);
    const SwappedSource swapped(src);
    const TransformSource& s = setup.swapped ? static_cast<const TransformSource&>(swapped) : src;
    const double m2b = setup.params.m2_x0, m1b = setup.params.g_x0 + m2b;
    r.series_terms = series_terms;
    for (double z : z_grid) {
      r.z_grid.push_back(z);
      r.F2.push_back(f2_series(s, setup.params, z, series_terms));
      r.F1.push_back(f1_from(s, setup.params, m1b, m2b, z, series_terms));
    }
  }
  return r;
}

}  // namespace npmix
