#pragma once

#include "npmix/estimators/estimators.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace npmix {

struct MixtureFit {
  std::vector<double> x0, x1;
  SlopeEstimate slopes;
  double lambda_hat = 0.0;
  bool lambda_clamped = false;
  double C_hat = 0.0;
  double m1_hat_x0 = 0.0;
  double m2_hat_x0 = 0.0;
  bool swapped = false;  // series evaluated with the points exchanged
  int p_n = 0;
  std::vector<double> z_grid;
  std::vector<double> F1_raw, F2_raw;
  std::vector<double> F1_proj, F2_proj;  // empty unless projected
  std::vector<std::string> warnings;

  bool projected() const { return !F1_proj.empty(); }
};

struct FitOptions {
  KernelFamily family = KernelFamily::Gaussian;
  bool project = false;
  double grid_tolerance = 0.05;  // raw F values outside [-tol, 1+tol] raise a warning
};

// Component 1 is the one extracted by the MGF route.
MixtureFit fit_mixture(const ObservationView& data, std::span<const double> x0, std::span<const double> x1, const TuningSchedule& tuning,
                       std::span<const double> z_grid, const FitOptions& opts = {});

// Series stages on a partially filled fit (slopes, lambda and levels set).
std::vector<double> estimate_F2(const ObservationView& data, const MixtureFit& fit, std::span<const double> z_grid,
                                const TuningSchedule& tuning, KernelFamily family = KernelFamily::Gaussian);
std::vector<double> estimate_F1(const ObservationView& data, const MixtureFit& fit, std::span<const double> z_grid,
                                const TuningSchedule& tuning, KernelFamily family = KernelFamily::Gaussian);

// Scalars as `key,value` lines, a blank line, then `z,F1_raw,F1_proj,F2_raw,F2_proj`.
void write_fit_csv(const MixtureFit& fit, std::ostream& out);
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

}  // namespace npmix
