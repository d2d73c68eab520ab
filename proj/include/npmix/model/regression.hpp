#pragma once

#include "npmix/hp.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace npmix {

struct Monomial {
  double coef = 0.0;
  std::vector<int> powers;  // one exponent per covariate
};

// m_j : R^k -> R. Polynomials carry an exact extended-precision form and
// exact derivatives along the first covariate; custom callables do not.
class RegressionFunction {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

  static RegressionFunction polynomial(std::size_t dim, std::vector<Monomial> terms);
  // c[0] + c[1] x + c[2] x^2 + ... in one covariate.
  static RegressionFunction univariate(std::vector<double> coefficients);
  static RegressionFunction custom(std::size_t dim, ValueFn value, GradientFn gradient = {}, std::string label = "custom");

  std::size_t dim() const { return dim_; }
  double value(std::span<const double> x) const;
  bool has_gradient() const;
  std::vector<double> gradient(std::span<const double> x) const;
  bool is_polynomial() const { return polynomial_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  // Value with the first coordinate replaced by an extended-precision x1.
  hp::Real value_hp(std::span<const double> x, const hp::Real& x1) const;
  // Taylor coefficients in h of m(x1 + h, x2, ...), orders 0..order.
  std::vector<hp::Real> x1_taylor_hp(std::span<const double> x, const hp::Real& x1, int order) const;

  std::string describe() const;

 private:
  std::size_t dim_ = 1;
  bool polynomial_ = false;
  std::vector<Monomial> terms_;
  ValueFn value_fn_;
  GradientFn gradient_fn_;
  std::string label_;
};

}  // namespace npmix
