#include "npmix/identification/jet.hpp"

#include "npmix/error.hpp"

#include <algorithm>

namespace npmix {

Jet Jet::constant(const hp::Real& v, int order) {
  std::vector<hp::Real> c(order + 1, hp::Real(0));
  c[0] = v;
  return Jet(std::move(c));
}

Jet Jet::truncated(int order) const {
  if (order > this->order()) fail(ErrorKind::DomainError, "jet truncation above available order");
  return Jet(std::vector<hp::Real>(c_.begin(), c_.begin() + order + 1));
}

Jet Jet::derivative() const {
  if (order() < 1) fail(ErrorKind::DomainError, "derivative of an order-0 jet");
  std::vector<hp::Real> d(order());
  for (int n = 0; n < order(); ++n) d[n] = c_[n + 1] * (n + 1);
  return Jet(std::move(d));
}

Jet operator+(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  std::vector<hp::Real> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = a.c_[i] + b.c_[i];
  return Jet(std::move(c));
}

Jet operator-(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  std::vector<hp::Real> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = a.c_[i] - b.c_[i];
  return Jet(std::move(c));
}

Jet operator*(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  std::vector<hp::Real> c(n + 1, hp::Real(0));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= i; ++j) c[i] += a.c_[j] * b.c_[i - j];
  return Jet(std::move(c));
}

Jet operator/(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  if (b.c_[0] == 0) fail(ErrorKind::DegenerateDenominator, "jet division by a vanishing value");
  std::vector<hp::Real> q(n + 1);
  for (int i = 0; i <= n; ++i) {
    hp::Real acc = a.c_[i];
    for (int j = 1; j <= i; ++j) acc -= b.c_[j] * q[i - j];
    q[i] = acc / b.c_[0];
  }
  return Jet(std::move(q));
}

Jet operator*(const hp::Real& s, const Jet& a) {
  std::vector<hp::Real> c(a.c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = s * a.c_[i];
  return Jet(std::move(c));
}

Jet exp(const Jet& a) {
  // n g_n = sum_{j=1}^n j f_j g_{n-j}
  const int n = a.order();
  std::vector<hp::Real> g(n + 1, hp::Real(0));
  g[0] = exp(a.c_[0]);
  for (int i = 1; i <= n; ++i) {
    hp::Real acc = 0;
    for (int j = 1; j <= i; ++j) acc += j * a.c_[j] * g[i - j];
    g[i] = acc / i;
  }
  return Jet(std::move(g));
}

}  // namespace npmix
