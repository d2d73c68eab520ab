#pragma once

#include "npmix/model/mixture.hpp"

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace npmix {

// Values of a t -> infinity functional on a geometric argument grid.
struct LimitProbe {
  std::vector<double> args;
  std::vector<double> values;
  double limit = std::numeric_limits<double>::quiet_NaN();
  // |value(4T) - value(2T)| for grid probes, the spread over the last
  // window for oscillation probes.
  double residual = std::numeric_limits<double>::infinity();

  bool stable(double rel_tol) const;
};

struct ProbeSettings {
  double T = 10.0;        // MGF probe base, grid {T, 2T, 4T}
  double S = 30.0;        // CF probe top, grid {S/4, S/2, S}
  double a = 0.1;         // CF increment
  int window = 33;        // CF samples per oscillation window
  double rel_tol = 1e-3;  // verdict threshold
  std::vector<double> c_seq{1e-1, 1e-2, 1e-3, 1e-4};
};

struct SlopeLimits {
  LimitProbe plus;   // t -> +infinity
  LimitProbe minus;  // t -> -infinity
};

// Slope of log R(t, x) = log M(t|x) - log M(t|x0) between t/2 and t. The
// secant form removes the constant log-weight ratio that appears when the
// weights depend on x; for constant weights it has the same limit as
// (1/t) log R.
double mgf_secant(const MixtureModel& model, double t, std::span<const double> x, std::span<const double> x0);

SlopeLimits slope_limits_mgf(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                             const ProbeSettings& probe = {});
// One direction only (+1 or -1).
LimitProbe slope_limit_mgf(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, int direction,
                           const ProbeSettings& probe = {});

// (-i/a) Log(rho(x, s+a) / rho(x, s)) at one s.
double cf_increment(const MixtureModel& model, double s, double a, std::span<const double> x, std::span<const double> x0);

// CF slope limit; the residual is the spread of the increment over s in
// [S/2, S]. Throws BranchAmbiguity if |a * limit| is within 0.1 of pi.
LimitProbe slope_limit_cf(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                          const ProbeSettings& probe = {});

// max | |rho(x, s)| - 1 | over a window of s values in [lo, hi].
double rho_modulus_deviation(const MixtureModel& model, std::span<const double> x, std::span<const double> x0, double lo, double hi,
                             int window);

struct LambdaCProbe {
  std::vector<double> c;
  std::vector<double> values;
  double limit = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::infinity();
  bool diverges = false;  // |lambda_c| grows like 1/c
};

// lambda_c = (E[z|x] - E[z|x0] - (1+c) L_minus) / (L_plus - (1+c) L_minus)
// along c_seq, extrapolated to c -> 0 by Richardson steps in c.
LambdaCProbe lambda_c_limit(double mean_diff, double L_plus, double L_minus, std::span<const double> c_seq);
LambdaCProbe lambda_c_limit(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                            const ProbeSettings& probe = {});

}  // namespace npmix
