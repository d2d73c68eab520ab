#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <span>
#include <vector>

namespace npmix::hp {

// Extended precision used by the population oracle when nested
// differentiation of observables would cancel catastrophically in double.
inline constexpr unsigned kDigits = 128;

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<kDigits>,
                                           boost::multiprecision::et_off>;

inline Real epsilon() { return std::numeric_limits<Real>::epsilon(); }

inline Real pi() { return boost::math::constants::pi<Real>(); }

// log(sum exp(v_i)); -inf for an empty input.
Real logsumexp(std::span<const Real> v);

Real to_real(double v);
double to_double(const Real& v);

}  // namespace npmix::hp
