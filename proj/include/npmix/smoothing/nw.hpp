#pragma once

#include "npmix/dgp/dataset.hpp"

#include <complex>
#include <span>
#include <vector>

namespace npmix {

enum class KernelFamily { Gaussian, QuarticCompact };

// Product kernel with per-coordinate bandwidths. The quartic kernel is
// 15/8 (1 - 4u^2)^2 on [-1/2, 1/2].
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  std::vector<double> bandwidth;

  static KernelSpec gaussian(std::vector<double> h) { return {KernelFamily::Gaussian, std::move(h)}; }
  static KernelSpec quartic(std::vector<double> h) { return {KernelFamily::QuarticCompact, std::move(h)}; }

  // Normalized univariate profile k(u).
  double profile(double u) const;
  void validate(std::size_t k) const;
};

template <class T>
struct NWEstimate {
  T value{};
  double denominator_mass = 0.0;  // sum of kernel weights / (n prod h)
  double effective_count = 0.0;   // Kish: (sum w)^2 / sum w^2
};

inline constexpr double kMassFloor = 1e-12;

// Kernel weights of every observation at a target point. Construction
// throws EmptyWindow when the denominator mass falls below kMassFloor.
class KernelWindow {
 public:
  KernelWindow(const ObservationView& data, std::span<const double> x, const KernelSpec& kernel);

  double denominator_mass() const { return mass_; }
  double effective_count() const { return effective_; }
  // Weights scaled so the largest is 1.
  std::span<const double> weights() const { return w_; }

  NWEstimate<double> log_mgf(double t) const;
  NWEstimate<std::complex<double>> cf(double s) const;
  NWEstimate<double> mean() const;
  NWEstimate<double> m2() const;
  NWEstimate<double> cdf(double z) const;

 private:
  template <class T>
  NWEstimate<T> wrap(T v) const {
    return {v, mass_, effective_};
  }

  ObservationView data_;
  KernelFamily family_;
  std::vector<double> lw_;  // log weights up to a constant (gaussian only)
  std::vector<double> w_;
  double mass_ = 0.0;
  double effective_ = 0.0;
  double ref_ = 0.0;
};

NWEstimate<double> nw_cond_mgf(const ObservationView& data, std::span<const double> x, double t, const KernelSpec& kernel);
NWEstimate<std::complex<double>> nw_cond_cf(const ObservationView& data, std::span<const double> x, double s,
                                            const KernelSpec& kernel);
NWEstimate<double> nw_cond_mean(const ObservationView& data, std::span<const double> x, const KernelSpec& kernel);
NWEstimate<double> nw_cond_m2(const ObservationView& data, std::span<const double> x, const KernelSpec& kernel);
// Requires the compact quartic kernel.
NWEstimate<double> nw_cond_cdf(const ObservationView& data, std::span<const double> x, double z, const KernelSpec& kernel);

// Sorted cumulative weights for many CDF queries at one target point.
class WeightedCdf {
 public:
  explicit WeightedCdf(const KernelWindow& window, std::span<const double> z);

  double operator()(double z) const;
  double min_z() const { return z_.empty() ? 0.0 : z_.front(); }
  double max_z() const { return z_.empty() ? 0.0 : z_.back(); }

 private:
  std::vector<double> z_;
  std::vector<double> cum_;
};

// sd(x_d) * n^(-1/(k+4)) per coordinate.
std::vector<double> rule_of_thumb_bandwidth(const ObservationView& data);

}  // namespace npmix
