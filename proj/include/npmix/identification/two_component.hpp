#pragma once

#include "npmix/identification/limits.hpp"

#include <string>
#include <vector>

namespace npmix {

// Relative determinant floor for the small linear systems.
inline constexpr double kDetFloor = 1e-10;

struct TwoComponentRecovery {
  std::string route;   // "two-sided-mgf", "mgf-cf" or "degenerate"
  double lambda = 1.0; // weight of component 1 (dominant as t -> +inf)
  double slope1 = 0.0; // m1(x) - m1(x0)
  double slope2 = 0.0; // m2(x) - m2(x0); NaN when absent
  double C = 0.0;
  double m1_x0 = 0.0;
  double m2_x0 = 0.0;  // NaN when absent
  std::vector<double> t_grid;
  std::vector<double> M1, M2;  // recovered component MGFs, NaN at skipped t
  std::vector<double> skipped_t;
  // Component CDFs from the series identity, when z_grid is given and a
  // second component exists.
  std::vector<double> z_grid, F1, F2;
  int series_terms = 0;

  bool has_second() const;
};

// Row-normalized determinant of a 2x2 system.
double relative_det2(double a, double b, double c, double d);

// Full population recovery at (x0, x). The route is the first identifying
// condition that holds: two-sided MGF limits, then MGF versus CF limits,
// then the degenerate lambda = 1 signature.
TwoComponentRecovery recover_two_component(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                           std::span<const double> t_grid, const ProbeSettings& probe = {},
                                           std::span<const double> z_grid = {}, int series_terms = 200);

}  // namespace npmix
