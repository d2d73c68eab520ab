#pragma once

#include <complex>
#include <span>

namespace npmix {

double logsumexp(std::span<const double> v);

// log of the standard normal CDF, accurate deep in the lower tail.
double log_ndtr(double x);

double ndtr(double x);

// Dawson's integral exp(-x^2) * int_0^x exp(u^2) du.
double dawson(double x);

// Complex number stored as mantissa * exp(log_scale) so that moduli far
// below the double range survive ratios.
struct ScaledComplex {
  std::complex<double> mantissa{1.0, 0.0};
  double log_scale = 0.0;

  std::complex<double> value() const;
  double log_abs() const;
};

// Sum of exp(terms[i]) for complex log-terms, scaled by the largest real part.
ScaledComplex sum_exp(std::span<const std::complex<double>> terms);

}  // namespace npmix
