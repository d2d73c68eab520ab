#include "npmix/smoothing/nw.hpp"

#include "npmix/error.hpp"
#include "npmix/smoothing/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace npmix {

double KernelSpec::profile(double u) const {
  if (family == KernelFamily::Gaussian) return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  if (std::abs(u) > 0.5) return 0.0;
  const double v = 1.0 - 4.0 * u * u;
  return 1.875 * v * v;
}

void KernelSpec::validate(std::size_t k) const {
  if (bandwidth.size() != k)
    fail(ErrorKind::DomainError, "kernel has " + std::to_string(bandwidth.size()) + " bandwidths for " + std::to_string(k) + " covariates");
  for (double h : bandwidth)
    if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::DomainError, "bandwidths must be positive and finite");
}

KernelWindow::KernelWindow(const ObservationView& data, std::span<const double> x, const KernelSpec& kernel)
    : data_(data), family_(kernel.family) {
  const std::size_t n = data.n();
  const std::size_t k = data.k();
  if (n == 0) fail(ErrorKind::EmptyWindow, "dataset is empty");
  if (x.size() != k) fail(ErrorKind::DomainError, "target point has wrong dimension");
  kernel.validate(k);
  const auto& simd = simd::active_kernels();
  double log_norm = -std::log(static_cast<double>(n));
  for (double h : kernel.bandwidth) log_norm -= std::log(h);
  w_.assign(n, 1.0);
  double shift = 0.0;
  if (family_ == KernelFamily::Gaussian) {
    lw_.assign(n, 0.0);
    for (std::size_t d = 0; d < k; ++d) simd.gaussian_log_weights(data.column(d), x[d], 1.0 / kernel.bandwidth[d], lw_);
    shift = *std::max_element(lw_.begin(), lw_.end());
    simd.exp_shift(lw_, shift, w_);
    log_norm -= 0.5 * static_cast<double>(k) * std::log(2.0 * std::numbers::pi);
  } else {
    for (std::size_t d = 0; d < k; ++d) simd.quartic_weights(data.column(d), x[d], 1.0 / kernel.bandwidth[d], w_);
  }
  const simd::Moments mo = simd.weighted_moments(w_, data.z(), 0.0);
  mass_ = mo.sw > 0.0 ? std::exp(std::log(mo.sw) + shift + log_norm) : 0.0;
  if (!(mass_ >= kMassFloor)) fail(ErrorKind::EmptyWindow, "kernel denominator mass below 1e-12 at target point");
  effective_ = mo.sw * mo.sw / mo.sw2;
  const auto it = std::max_element(w_.begin(), w_.end());
  ref_ = data.z()[static_cast<std::size_t>(it - w_.begin())];
}

NWEstimate<double> KernelWindow::log_mgf(double t) const {
  if (t == 0.0) return wrap(0.0);
  const auto& simd = simd::active_kernels();
  if (family_ == KernelFamily::Gaussian) return wrap(simd.lse_affine(data_.z(), lw_, t) - simd.lse_affine(data_.z(), lw_, 0.0));
  std::vector<double> lw(w_.size());
  for (std::size_t i = 0; i < w_.size(); ++i) lw[i] = w_[i] > 0.0 ? std::log(w_[i]) : -std::numeric_limits<double>::infinity();
  return wrap(simd.lse_affine(data_.z(), lw, t) - simd.lse_affine(data_.z(), lw, 0.0));
}

NWEstimate<std::complex<double>> KernelWindow::cf(double s) const {
  const simd::CisSums c = simd::active_kernels().weighted_cis(w_, data_.z(), s);
  return wrap(std::complex<double>(c.scos / c.sw, c.ssin / c.sw));
}

NWEstimate<double> KernelWindow::mean() const {
  const simd::Moments m = simd::active_kernels().weighted_moments(w_, data_.z(), ref_);
  return wrap(ref_ + m.swd / m.sw);
}

NWEstimate<double> KernelWindow::m2() const {
  const simd::Moments m = simd::active_kernels().weighted_moments(w_, data_.z(), ref_);
  return wrap(ref_ * ref_ + 2.0 * ref_ * (m.swd / m.sw) + m.swd2 / m.sw);
}

NWEstimate<double> KernelWindow::cdf(double z) const {
  const auto& simd = simd::active_kernels();
  const double num = simd.weighted_indicator(w_, data_.z(), z);
  const double den = simd.weighted_indicator(w_, data_.z(), std::numeric_limits<double>::infinity());
  return wrap(num / den);
}

NWEstimate<double> nw_cond_mgf(const ObservationView& data, std::span<const double> x, double t, const KernelSpec& kernel) {
  return KernelWindow(data, x, kernel).log_mgf(t);
}

NWEstimate<std::complex<double>> nw_cond_cf(const ObservationView& data, std::span<const double> x, double s,
                                            const KernelSpec& kernel) {
  return KernelWindow(data, x, kernel).cf(s);
}

NWEstimate<double> nw_cond_mean(const ObservationView& data, std::span<const double> x, const KernelSpec& kernel) {
  return KernelWindow(data, x, kernel).mean();
}

NWEstimate<double> nw_cond_m2(const ObservationView& data, std::span<const double> x, const KernelSpec& kernel) {
  return KernelWindow(data, x, kernel).m2();
}

NWEstimate<double> nw_cond_cdf(const ObservationView& data, std::span<const double> x, double z, const KernelSpec& kernel) {
  if (kernel.family != KernelFamily::QuarticCompact) fail(ErrorKind::DomainError, "conditional CDF requires the compact quartic kernel");
  return KernelWindow(data, x, kernel).cdf(z);
}

WeightedCdf::WeightedCdf(const KernelWindow& window, std::span<const double> z) {
  const auto w = window.weights();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
  z_.reserve(idx.size());
  cum_.reserve(idx.size());
  double acc = 0.0;
  for (std::size_t i : idx) {
    acc += w[i];
    z_.push_back(z[i]);
    cum_.push_back(acc);
  }
}

double WeightedCdf::operator()(double z) const {
  if (z_.empty()) return 0.0;
  const auto it = std::upper_bound(z_.begin(), z_.end(), z);
  if (it == z_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - z_.begin()) - 1] / cum_.back();
}

std::vector<double> rule_of_thumb_bandwidth(const ObservationView& data) {
  const double n = static_cast<double>(data.n());
  if (data.n() < 2) fail(ErrorKind::DomainError, "bandwidth rule needs at least two observations");
  std::vector<double> h(data.k());
  for (std::size_t d = 0; d < data.k(); ++d) {
    const auto col = data.column(d);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    h[d] = (sd > 0.0 ? sd : 1.0) * std::pow(n, -1.0 / (static_cast<double>(data.k()) + 4.0));
  }
  return h;
}

}  // namespace npmix
