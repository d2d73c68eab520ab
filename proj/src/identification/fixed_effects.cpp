#include "npmix/identification/fixed_effects.hpp"

#include "npmix/error.hpp"
#include "npmix/model/population.hpp"

#include <cmath>
#include <limits>

namespace npmix {

double fe_K_at(const MixtureModel& model, double t, std::span<const double> x, std::span<const double> x0, double L) {
  return std::exp(pop_log_R(model, t, x, x0) - t * L);
}

FeKLimits fe_K_functions(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, const ProbeSettings& probe) {
  FeKLimits k;
  k.slopes = slope_limits_mgf(model, x, x0, probe);
  for (int dir : {1, -1}) {
    LimitProbe& p = dir > 0 ? k.plus : k.minus;
    const double L = dir > 0 ? k.slopes.plus.limit : k.slopes.minus.limit;
    for (double m : {1.0, 2.0, 4.0}) {
      const double t = dir * m * probe.T;
      p.args.push_back(t);
      p.values.push_back(fe_K_at(model, t, x, x0, L));
    }
    p.limit = p.values[2];
    p.residual = std::abs(p.values[2] - p.values[1]);
  }
  return k;
}

FeRecovery fe_recover(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, std::span<const double> t_grid,
                      const ProbeSettings& probe) {
  if (model.J() != 2) fail(ErrorKind::DomainError, "fixed-effects recovery needs two components");
  if (std::equal(x.begin(), x.end(), x0.begin(), x0.end())) fail(ErrorKind::DomainError, "x must differ from x0");
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  const double tol = probe.rel_tol;
  FeRecovery r;
  r.K = fe_K_functions(model, x, x0, probe);
  const double Kp = r.K.plus.limit, Km = r.K.minus.limit;

  if (std::abs(Kp - 1.0) <= tol && std::abs(Km - 1.0) <= tol) {
    if (!model.constant_weights()) fail(ErrorKind::SingularSystem, "K limits equal 1 but the weights vary; pair system degenerate");
    r.fixed_weight_fallback = true;
    r.fallback = recover_two_component(model, x, x0, t_grid, probe);
    const auto& f = *r.fallback;
    r.lambda_x = r.lambda_x0 = f.lambda;
    r.slope1 = f.slope1;
    r.slope2 = f.slope2;
    r.m1_x0 = f.m1_x0;
    r.m2_x0 = f.m2_x0;
    r.t_grid = f.t_grid;
    r.M1 = f.M1;
    r.M2 = f.M2;
    r.skipped_t = f.skipped_t;
    return r;
  }
  if (std::abs(Kp - Km) <= tol) fail(ErrorKind::SingularSystem, "K_{+inf} equals K_{-inf}; weights not separable");

  // K+ = lambda(x)/lambda(x0), K- = (1-lambda(x))/(1-lambda(x0))
  r.lambda_x0 = (1.0 - Km) / (Kp - Km);
  r.lambda_x = Kp * r.lambda_x0;
  r.slope1 = r.K.slopes.plus.limit;
  r.slope2 = r.K.slopes.minus.limit;

  // c = m1(x0) - m2(x0) from the mean difference, then the unit-determinant
  // system [[1, -1], [lambda0, 1 - lambda0]] (m1, m2) = (c, E[z|x0])
  const double e0 = pop_cond_mean(model, x0), e1 = pop_cond_mean(model, x);
  const double denom = r.lambda_x - r.lambda_x0;
  if (std::abs(denom) <= tol * tol) fail(ErrorKind::SingularSystem, "lambda(x) equals lambda(x0); level system singular");
  const double c = (e1 - e0 - r.lambda_x * (r.slope1 - r.slope2) - r.slope2) / denom;
  r.m2_x0 = e0 - r.lambda_x0 * c;
  r.m1_x0 = r.m2_x0 + c;

  for (double t : t_grid) {
    r.t_grid.push_back(t);
    const double Mx = std::exp(pop_log_cond_mgf(model, t, x));
    const double M0 = std::exp(pop_log_cond_mgf(model, t, x0));
    const double a = r.lambda_x * std::exp(t * (r.m1_x0 + r.slope1)), b = (1.0 - r.lambda_x) * std::exp(t * (r.m2_x0 + r.slope2));
    const double cc = r.lambda_x0 * std::exp(t * r.m1_x0), d = (1.0 - r.lambda_x0) * std::exp(t * r.m2_x0);
    if (std::abs(relative_det2(a, b, cc, d)) < kDetFloor) {
      r.skipped_t.push_back(t);
      r.M1.push_back(kNaN);
      r.M2.push_back(kNaN);
      continue;
    }
    const double det = a * d - b * cc;
    r.M1.push_back((d * Mx - b * M0) / det);
    r.M2.push_back((a * M0 - cc * Mx) / det);
  }
  return r;
}

}  // namespace npmix
