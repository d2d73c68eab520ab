#include "npmix/model/regression.hpp"

#include "npmix/error.hpp"

#include <cmath>
#include <sstream>

namespace npmix {

namespace {

double ipow(double base, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= base;
  return r;
}

hp::Real ipow(const hp::Real& base, int p) {
  hp::Real r = 1;
  for (int i = 0; i < p; ++i) r *= base;
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_dim(std::size_t dim, std::span<const double> x) {
  if (x.size() != dim)
    fail(ErrorKind::DomainError, "regression expects " + std::to_string(dim) + " covariates, got " + std::to_string(x.size()));
}

}  // namespace

RegressionFunction RegressionFunction::polynomial(std::size_t dim, std::vector<Monomial> terms) {
  if (dim == 0) fail(ErrorKind::ConfigError, "covariate dimension must be positive");
  for (const auto& t : terms) {
    if (t.powers.size() != dim) fail(ErrorKind::ConfigError, "monomial exponent list length differs from covariate dimension");
    for (int p : t.powers)
      if (p < 0) fail(ErrorKind::ConfigError, "monomial exponents must be nonnegative");
    if (!std::isfinite(t.coef)) fail(ErrorKind::ConfigError, "monomial coefficient must be finite");
  }
  RegressionFunction f;
  f.dim_ = dim;
  f.polynomial_ = true;
  f.terms_ = std::move(terms);
  f.label_ = "polynomial";
  return f;
}

RegressionFunction RegressionFunction::univariate(std::vector<double> coefficients) {
  std::vector<Monomial> terms;
  for (std::size_t i = 0; i < coefficients.size(); ++i) terms.push_back({coefficients[i], {static_cast<int>(i)}});
  return polynomial(1, std::move(terms));
}

RegressionFunction RegressionFunction::custom(std::size_t dim, ValueFn value, GradientFn gradient, std::string label) {
  if (!value) fail(ErrorKind::ConfigError, "custom regression requires a value function");
  RegressionFunction f;
  f.dim_ = dim;
  f.value_fn_ = std::move(value);
  f.gradient_fn_ = std::move(gradient);
  f.label_ = std::move(label);
  return f;
}

double RegressionFunction::value(std::span<const double> x) const {
  check_dim(dim_, x);
  if (!polynomial_) return value_fn_(x);
  double acc = 0.0;
  for (const auto& t : terms_) {
    double v = t.coef;
    for (std::size_t i = 0; i < dim_; ++i) v *= ipow(x[i], t.powers[i]);
    acc += v;
  }
  return acc;
}

bool RegressionFunction::has_gradient() const { return polynomial_ || static_cast<bool>(gradient_fn_); }

std::vector<double> RegressionFunction::gradient(std::span<const double> x) const {
  check_dim(dim_, x);
  if (!polynomial_) {
    if (!gradient_fn_) fail(ErrorKind::DomainError, "regression '" + label_ + "' has no gradient");
    return gradient_fn_(x);
  }
  std::vector<double> g(dim_, 0.0);
  for (const auto& t : terms_) {
    for (std::size_t d = 0; d < dim_; ++d) {
      if (t.powers[d] == 0) continue;
      double v = t.coef * t.powers[d];
      for (std::size_t i = 0; i < dim_; ++i) v *= ipow(x[i], i == d ? t.powers[i] - 1 : t.powers[i]);
      g[d] += v;
    }
  }
  return g;
}

hp::Real RegressionFunction::value_hp(std::span<const double> x, const hp::Real& x1) const {
  check_dim(dim_, x);
  if (!polynomial_) fail(ErrorKind::DomainError, "regression '" + label_ + "' has no extended-precision form");
  hp::Real acc = 0;
  for (const auto& t : terms_) {
    hp::Real v(t.coef);
    v *= ipow(x1, t.powers[0]);
    for (std::size_t i = 1; i < dim_; ++i) v *= ipow(x[i], t.powers[i]);
    acc += v;
  }
  return acc;
}

std::vector<hp::Real> RegressionFunction::x1_taylor_hp(std::span<const double> x, const hp::Real& x1, int order) const {
  check_dim(dim_, x);
  if (!polynomial_) fail(ErrorKind::DomainError, "regression '" + label_ + "' has no exact derivatives");
  std::vector<hp::Real> c(order + 1, hp::Real(0));
  for (const auto& t : terms_) {
    double rest = t.coef;
    for (std::size_t i = 1; i < dim_; ++i) rest *= ipow(x[i], t.powers[i]);
    const int p = t.powers[0];
    for (int r = 0; r <= std::min(order, p); ++r) c[r] += hp::Real(rest) * binomial(p, r) * ipow(x1, p - r);
  }
  return c;
}

std::string RegressionFunction::describe() const {
  if (!polynomial_) return label_;
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& t : terms_) {
    os << (first ? "" : " + ") << t.coef;
    for (std::size_t i = 0; i < dim_; ++i)
      if (t.powers[i] > 0) os << "*x" << (i + 1) << (t.powers[i] > 1 ? "^" + std::to_string(t.powers[i]) : "");
    first = false;
  }
  return first ? "0" : os.str();
}

}  // namespace npmix
