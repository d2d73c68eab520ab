#pragma once

#include "npmix/identification/limits.hpp"
#include "npmix/identification/two_component.hpp"

#include <optional>
#include <vector>

namespace npmix {

// K_{+inf,t}(x) = R(t, x) exp(-t L), with L the slope limit in the matching direction.
double fe_K_at(const MixtureModel& model, double t, std::span<const double> x, std::span<const double> x0, double L);

struct FeKLimits {
  SlopeLimits slopes;
  LimitProbe plus;   // K_{+inf,t} on t = T, 2T, 4T
  LimitProbe minus;  // K_{-inf,t} on t = -T, -2T, -4T
};

FeKLimits fe_K_functions(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, const ProbeSettings& probe = {});

struct FeRecovery {
  FeKLimits K;
  bool fixed_weight_fallback = false;
  double lambda_x = 0.0;   // weight of the component dominating at t -> +inf
  double lambda_x0 = 0.0;
  double slope1 = 0.0;     // m1(x) - m1(x0)
  double slope2 = 0.0;
  double m1_x0 = 0.0;
  double m2_x0 = 0.0;
  std::vector<double> t_grid;
  std::vector<double> M1, M2;  // NaN at skipped t
  std::vector<double> skipped_t;
  std::optional<TwoComponentRecovery> fallback;
};

// Solves K_{+inf} = lambda(x)/lambda(x0), K_{-inf} = (1-lambda(x))/(1-lambda(x0))
// for both weights, then the levels through the unit-determinant system and
// the component MGFs on t_grid. Constant weights (K = 1 on both sides) fall
// back to the fixed-weight recovery; K_{+inf} = K_{-inf} != 1 throws
// SingularSystem.
FeRecovery fe_recover(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, std::span<const double> t_grid,
                      const ProbeSettings& probe = {});

}  // namespace npmix
