#pragma once

#include "npmix/hp.hpp"
#include "npmix/model/mixture.hpp"
#include "npmix/model/special.hpp"

#include <complex>
#include <span>

namespace npmix {

// Exact population functionals of a mixture model at a covariate point.

// log M(t|x) by log-sum-exp across components.
double pop_log_cond_mgf(const MixtureModel& model, double t, std::span<const double> x);

std::complex<double> pop_cond_cf(const MixtureModel& model, double s, std::span<const double> x);
// Same transform with the dominant component's scale factored out.
ScaledComplex pop_cond_cf_scaled(const MixtureModel& model, double s, std::span<const double> x);

double pop_cond_cdf(const MixtureModel& model, double z, std::span<const double> x);
double pop_cond_mean(const MixtureModel& model, std::span<const double> x);
double pop_cond_m2(const MixtureModel& model, std::span<const double> x);

// log R(t,x) = log M(t|x) - log M(t|x0).
double pop_log_R(const MixtureModel& model, double t, std::span<const double> x, std::span<const double> x0);
double pop_R(const MixtureModel& model, double t, std::span<const double> x, std::span<const double> x0);

// rho(x,s) = phi(s|x) / phi(s|x0). Throws DegenerateDenominator when the
// denominator cancels below 1e-300 relative to its dominant term.
std::complex<double> pop_rho(const MixtureModel& model, double s, std::span<const double> x, std::span<const double> x0);

// log M(t|x) in extended precision with the first covariate replaced by x1.
// Requires constant weights and polynomial regressions.
hp::Real pop_log_cond_mgf_hp(const MixtureModel& model, const hp::Real& t, std::span<const double> x, const hp::Real& x1);

inline constexpr double kCfFloor = 1e-300;

}  // namespace npmix
