#pragma once

#include "npmix/estimators/source.hpp"

#include <span>
#include <string>
#include <vector>

namespace npmix {

struct NablaResult {
  double value = 0.0;
  bool branch_ok = true;
  // |log|ratio|| / a: the imaginary residue of the log-increment, which
  // vanishes in the limit; used as a noise scale.
  double noise = 0.0;
};

struct SlopeEstimate {
  double delta_hat = 0.0;
  double nabla_hat = 0.0;
  bool branch_ok = true;
  double nabla_noise = 0.0;
  double cf_modulus_x0 = 0.0;  // min |phi(.|x0)| over the two CF arguments
  double cf_modulus_x1 = 0.0;
};

struct LambdaResult {
  double value = 0.0;
  bool clamped = false;
};

struct Levels {
  double C = 0.0;
  double m1_x0 = 0.0;
  double m2_x0 = 0.0;  // NaN when the second component is absent
};

// Inputs of the component-CDF series, all at the (possibly swapped) pair.
struct SeriesParams {
  double lambda = 0.5;
  double delta = 0.0;   // Delta - Nabla, must be positive
  double m1_x1 = 0.0;   // m1 at point 1
  double g_x0 = 0.0;    // m1(x0) - m2(x0)
  double m2_x0 = 0.0;
};

inline constexpr double kSeparationFloor = 1e-3;
inline constexpr double kLambdaMin = 0.001;
inline constexpr double kLambdaMax = 0.999;
inline constexpr double kBranchMargin = 0.1;

// Formulas on a transform source.
double delta_from(const TransformSource& src, double t);
NablaResult nabla_from(const TransformSource& src, double s, double a);
LambdaResult lambda_from(const TransformSource& src, double delta, double nabla, bool clamp = true);
Levels levels_from(const TransformSource& src, double delta, double nabla, double lambda);
// F2(z) = 1 - 1/(1-lambda) sum_{j<=p} [F(z + j delta + m1(x1) - g(x0) | x1) - F(z + j delta + m2(x0) | x0)]
double f2_series(const TransformSource& src, const SeriesParams& sp, double z, int p);
// F1(z) = (1/lambda) [F(z + m1(x0) | x0) - (1 - lambda) F2(z + m1(x0) - m2(x0))]
double f1_from(const TransformSource& src, const SeriesParams& sp, double m1_x0, double m2_x0, double z, int p);
// Series inputs with the swap rule applied when Delta - Nabla < 0.
struct SeriesSetup {
  SeriesParams params;
  bool swapped = false;
};
SeriesSetup series_setup(double delta, double nabla, double lambda, double m1_x0, double m2_x0);

// Sample estimators.
double estimate_delta(const ObservationView& data, std::span<const double> x0, std::span<const double> x1, const TuningSchedule& tuning,
                      KernelFamily family = KernelFamily::Gaussian);
NablaResult estimate_nabla(const ObservationView& data, std::span<const double> x0, std::span<const double> x1,
                           const TuningSchedule& tuning, KernelFamily family = KernelFamily::Gaussian);
LambdaResult estimate_lambda(const ObservationView& data, std::span<const double> x0, std::span<const double> x1, const SlopeEstimate& slopes,
                             const TuningSchedule& tuning, KernelFamily family = KernelFamily::Gaussian);
Levels estimate_levels(const ObservationView& data, std::span<const double> x0, std::span<const double> x1, const SlopeEstimate& slopes,
                       double lambda_hat, const TuningSchedule& tuning, KernelFamily family = KernelFamily::Gaussian);

// Isotonic (PAVA) fit followed by clipping to [0, 1].
std::vector<double> monotone_projection(std::span<const double> values);

}  // namespace npmix
