#pragma once

#include "npmix/hp.hpp"
#include "npmix/rng.hpp"

#include <complex>
#include <limits>
#include <memory>
#include <string>

namespace npmix {

struct MgfDomain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double t) const { return t >= lo && t <= hi; }
};

// Centered error law of one mixture component.
class ErrorDistribution {
 public:
  virtual ~ErrorDistribution() = default;

  virtual std::string describe() const = 0;
  virtual double cdf(double e) const = 0;
  virtual MgfDomain mgf_domain() const = 0;
  // log M(t); throws DomainError outside mgf_domain().
  double log_mgf(double t) const;
  hp::Real log_mgf_hp(const hp::Real& t) const;
  // Principal-value free log of the characteristic function; only its
  // exponential is meaningful.
  virtual std::complex<double> log_cf(double s) const = 0;
  std::complex<double> cf(double s) const { return std::exp(log_cf(s)); }
  virtual double variance() const = 0;
  double mean() const { return 0.0; }
  virtual double sample(Stream& rng) const = 0;

 protected:
  virtual double do_log_mgf(double t) const = 0;
  virtual hp::Real do_log_mgf_hp(const hp::Real& t) const = 0;
};

using ErrorPtr = std::shared_ptr<const ErrorDistribution>;

class GaussianError final : public ErrorDistribution {
 public:
  explicit GaussianError(double sigma);

  double sigma() const { return sigma_; }
  std::string describe() const override;
  double cdf(double e) const override;
  MgfDomain mgf_domain() const override { return {}; }
  std::complex<double> log_cf(double s) const override;
  double variance() const override { return sigma_ * sigma_; }
  double sample(Stream& rng) const override;

 protected:
  double do_log_mgf(double t) const override;
  hp::Real do_log_mgf_hp(const hp::Real& t) const override;

 private:
  double sigma_;
};

// Split normal: half-normal scale sigma_left below the mode and
// sigma_right above it, shifted to mean zero. Its MGF is entire.
class SplitNormalError final : public ErrorDistribution {
 public:
  SplitNormalError(double sigma_left, double sigma_right);

  double sigma_left() const { return left_; }
  double sigma_right() const { return right_; }
  // Mean of the uncentered law (the shift applied).
  double shift() const { return shift_; }
  std::string describe() const override;
  double cdf(double e) const override;
  MgfDomain mgf_domain() const override { return {}; }
  std::complex<double> log_cf(double s) const override;
  double variance() const override;
  double sample(Stream& rng) const override;

 protected:
  double do_log_mgf(double t) const override;
  hp::Real do_log_mgf_hp(const hp::Real& t) const override;

 private:
  double left_;
  double right_;
  double shift_;
};

ErrorPtr make_gaussian(double sigma);
ErrorPtr make_split_normal(double sigma_left, double sigma_right);

}  // namespace npmix
