#include "npmix/model/special.hpp"

#include <gsl/gsl_sf_dawson.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace npmix {

double logsumexp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(v.begin(), v.end());
  if (std::isinf(top)) return top;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - top);
  return top + std::log(acc);
}

double ndtr(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_ndtr(double x) {
  if (x > -20.0) return std::log(ndtr(x));
  // asymptotic expansion of erfc for large negative arguments
  const double x2 = x * x;
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) / x2;
    series += term;
  }
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double dawson(double x) { return gsl_sf_dawson(x); }

std::complex<double> ScaledComplex::value() const { return mantissa * std::exp(log_scale); }

double ScaledComplex::log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }

ScaledComplex sum_exp(std::span<const std::complex<double>> terms) {
  ScaledComplex out;
  if (terms.empty()) {
    out.mantissa = 0.0;
    return out;
  }
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) top = std::max(top, t.real());
  std::complex<double> acc = 0.0;
  if (std::isinf(top)) {
    out.mantissa = 0.0;
    out.log_scale = 0.0;
    return out;
  }
  for (const auto& t : terms) acc += std::exp(t - top);
  out.mantissa = acc;
  out.log_scale = top;
  return out;
}

}  // namespace npmix
