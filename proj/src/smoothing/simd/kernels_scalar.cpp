#include "npmix/smoothing/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace npmix::simd {

namespace {

void gaussian_log_weights(std::span<const double> x, double center, double inv_h, std::span<double> lw) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = (x[i] - center) * inv_h;
    lw[i] += -0.5 * u * u;
  }
}

void quartic_weights(std::span<const double> x, double center, double inv_h, std::span<double> w) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = (x[i] - center) * inv_h;
    const double v = 1.0 - 4.0 * u * u;
    w[i] *= std::abs(u) <= 0.5 ? 1.875 * v * v : 0.0;
  }
}

void exp_shift(std::span<const double> lw, double shift, std::span<double> w) {
  for (std::size_t i = 0; i < lw.size(); ++i) w[i] = std::exp(lw[i] - shift);
}

double lse_affine(std::span<const double> z, std::span<const double> lw, double t) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i) top = std::max(top, t * z[i] + lw[i]);
  if (std::isinf(top)) return top;
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) acc += std::exp(t * z[i] + lw[i] - top);
  return top + std::log(acc);
}

Moments weighted_moments(std::span<const double> w, std::span<const double> z, double ref) {
  Moments m;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = z[i] - ref;
    m.sw += w[i];
    m.swd += w[i] * d;
    m.swd2 += w[i] * d * d;
    m.sw2 += w[i] * w[i];
  }
  return m;
}

CisSums weighted_cis(std::span<const double> w, std::span<const double> z, double s) {
  CisSums c;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double a = s * z[i];
    c.sw += w[i];
    c.scos += w[i] * std::cos(a);
    c.ssin += w[i] * std::sin(a);
  }
  return c;
}

double weighted_indicator(std::span<const double> w, std::span<const double> z, double threshold) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (z[i] <= threshold) acc += w[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",          gaussian_log_weights, quartic_weights, exp_shift, lse_affine,
                                 weighted_moments, weighted_cis,         weighted_indicator};
  return table;
}

}  // namespace npmix::simd
