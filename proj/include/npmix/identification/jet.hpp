#pragma once

#include "npmix/hp.hpp"

#include <cstddef>
#include <vector>

namespace npmix {

// Truncated Taylor series c[0] + c[1] h + ... + c[n] h^n about a point.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::vector<hp::Real> coefficients) : c_(std::move(coefficients)) {}
  static Jet constant(const hp::Real& v, int order);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const hp::Real& operator[](std::size_t i) const { return c_[i]; }
  hp::Real& operator[](std::size_t i) { return c_[i]; }
  const hp::Real& value() const { return c_.front(); }
  const std::vector<hp::Real>& coefficients() const { return c_; }

  // Both operands are truncated to the lower order.
  Jet truncated(int order) const;
  Jet derivative() const;

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator*(const hp::Real& s, const Jet& a);
  friend Jet exp(const Jet& a);

 private:
  std::vector<hp::Real> c_;
};

}  // namespace npmix
