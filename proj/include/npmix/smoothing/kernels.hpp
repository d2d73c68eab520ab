#pragma once

#include <span>
#include <string_view>

namespace npmix::simd {

// Weighted sums of deviations d = z - ref.
struct Moments {
  double sw = 0.0;
  double swd = 0.0;
  double swd2 = 0.0;
  double sw2 = 0.0;
};

struct CisSums {
  double sw = 0.0;
  double scos = 0.0;
  double ssin = 0.0;
};

// Inner loops of the smoothers. Every entry has a scalar reference
// implementation and an AVX2+FMA variant with the same contract.
struct KernelTable {
  std::string_view name;
  // lw[i] += -0.5 * ((x[i] - center) * inv_h)^2
  void (*gaussian_log_weights)(std::span<const double> x, double center, double inv_h, std::span<double> lw);
  // w[i] *= 15/8 (1 - 4u^2)^2 for |u| <= 1/2 and 0 otherwise, u = (x[i] - center) * inv_h
  void (*quartic_weights)(std::span<const double> x, double center, double inv_h, std::span<double> w);
  // w[i] = exp(lw[i] - shift); requires lw[i] - shift <= 709
  void (*exp_shift)(std::span<const double> lw, double shift, std::span<double> w);
  // log sum_i exp(t z[i] + lw[i])
  double (*lse_affine)(std::span<const double> z, std::span<const double> lw, double t);
  Moments (*weighted_moments)(std::span<const double> w, std::span<const double> z, double ref);
  CisSums (*weighted_cis)(std::span<const double> w, std::span<const double> z, double s);
  // sum_i w[i] [z[i] <= threshold]
  double (*weighted_indicator)(std::span<const double> w, std::span<const double> z, double threshold);
};

enum class KernelMode { Auto, Scalar, Avx2 };

const KernelTable& scalar_kernels();
// nullptr when the CPU lacks AVX2 or FMA.
const KernelTable* avx2_kernels();
bool cpu_has_avx2();

// Active table; Auto picks AVX2 when available. The NPMIX_SIMD environment
// variable ("scalar" or "avx2") overrides the initial mode.
const KernelTable& active_kernels();
void set_kernel_mode(KernelMode mode);
KernelMode kernel_mode();

}  // namespace npmix::simd
