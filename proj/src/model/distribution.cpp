#include "npmix/model/distribution.hpp"

#include "npmix/error.hpp"
#include "npmix/model/special.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace npmix {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

hp::Real log_ndtr_hp(const hp::Real& x) {
  const hp::Real r = erfc(-x / sqrt(hp::Real(2)));
  return log(r / 2);
}

}  // namespace

double ErrorDistribution::log_mgf(double t) const {
  if (!mgf_domain().contains(t)) fail(ErrorKind::DomainError, "t=" + fmt(t) + " outside MGF domain of " + describe());
  if (t == 0.0) return 0.0;
  return do_log_mgf(t);
}

hp::Real ErrorDistribution::log_mgf_hp(const hp::Real& t) const {
  const double td = hp::to_double(t);
  if (!mgf_domain().contains(td)) fail(ErrorKind::DomainError, "t=" + fmt(td) + " outside MGF domain of " + describe());
  if (t == 0) return hp::Real(0);
  return do_log_mgf_hp(t);
}

GaussianError::GaussianError(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorKind::ConfigError, "gaussian sigma must be positive, got " + fmt(sigma));
}

std::string GaussianError::describe() const { return "gaussian(sigma=" + fmt(sigma_) + ")"; }

double GaussianError::cdf(double e) const { return ndtr(e / sigma_); }

double GaussianError::do_log_mgf(double t) const { return 0.5 * sigma_ * sigma_ * t * t; }

hp::Real GaussianError::do_log_mgf_hp(const hp::Real& t) const {
  const hp::Real s(sigma_);
  return s * s * t * t / 2;
}

std::complex<double> GaussianError::log_cf(double s) const { return {-0.5 * sigma_ * sigma_ * s * s, 0.0}; }

double GaussianError::sample(Stream& rng) const { return sigma_ * rng.normal(); }

SplitNormalError::SplitNormalError(double sigma_left, double sigma_right) : left_(sigma_left), right_(sigma_right) {
  if (!(left_ > 0.0) || !(right_ > 0.0) || !std::isfinite(left_) || !std::isfinite(right_))
    fail(ErrorKind::ConfigError, "split_normal scales must be positive");
  shift_ = std::sqrt(2.0 / std::numbers::pi) * (right_ - left_);
}

std::string SplitNormalError::describe() const {
  return "split_normal(sigma_left=" + fmt(left_) + ", sigma_right=" + fmt(right_) + ")";
}

double SplitNormalError::cdf(double e) const {
  const double u = e + shift_;
  const double total = left_ + right_;
  if (u < 0.0) return 2.0 * left_ / total * ndtr(u / left_);
  return left_ / total + 2.0 * right_ / total * (ndtr(u / right_) - 0.5);
}

double SplitNormalError::do_log_mgf(double t) const {
  const double total = left_ + right_;
  const double parts[2] = {
      std::log(2.0 * right_ / total) + 0.5 * right_ * right_ * t * t + log_ndtr(right_ * t),
      std::log(2.0 * left_ / total) + 0.5 * left_ * left_ * t * t + log_ndtr(-left_ * t),
  };
  return logsumexp(parts) - shift_ * t;
}

hp::Real SplitNormalError::do_log_mgf_hp(const hp::Real& t) const {
  const hp::Real l(left_);
  const hp::Real r(right_);
  const hp::Real total = l + r;
  const hp::Real parts[2] = {
      log(2 * r / total) + r * r * t * t / 2 + log_ndtr_hp(r * t),
      log(2 * l / total) + l * l * t * t / 2 + log_ndtr_hp(-l * t),
  };
  const hp::Real shift = sqrt(2 / hp::pi()) * (r - l);
  return hp::logsumexp(parts) - shift * t;
}

std::complex<double> SplitNormalError::log_cf(double s) const {
  const double total = left_ + right_;
  const double re = (right_ * std::exp(-0.5 * right_ * right_ * s * s) + left_ * std::exp(-0.5 * left_ * left_ * s * s)) / total;
  const double im = 2.0 / std::sqrt(std::numbers::pi) *
                    (right_ * dawson(right_ * s / std::numbers::sqrt2) - left_ * dawson(left_ * s / std::numbers::sqrt2)) / total;
  return std::log(std::complex<double>(re, im)) - std::complex<double>(0.0, shift_ * s);
}

double SplitNormalError::variance() const {
  const double d = right_ - left_;
  return (1.0 - 2.0 / std::numbers::pi) * d * d + left_ * right_;
}

double SplitNormalError::sample(Stream& rng) const {
  const double side = rng.uniform();
  const double mag = std::abs(rng.normal());
  const double u = side < left_ / (left_ + right_) ? -left_ * mag : right_ * mag;
  return u - shift_;
}

ErrorPtr make_gaussian(double sigma) { return std::make_shared<GaussianError>(sigma); }

ErrorPtr make_split_normal(double sigma_left, double sigma_right) {
  return std::make_shared<SplitNormalError>(sigma_left, sigma_right);
}

}  // namespace npmix
