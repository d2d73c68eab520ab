#include "npmix/hp.hpp"

#include <algorithm>
#include <limits>

namespace npmix::hp {

Real logsumexp(std::span<const Real> v) {
  if (v.empty()) return -std::numeric_limits<Real>::infinity();
  Real top = *std::max_element(v.begin(), v.end());
  if (boost::multiprecision::isinf(top)) return top;
  Real acc = 0;
  for (const Real& x : v) acc += exp(x - top);
  return top + log(acc);
}

Real to_real(double v) { return Real(v); }

double to_double(const Real& v) { return v.convert_to<double>(); }

}  // namespace npmix::hp
