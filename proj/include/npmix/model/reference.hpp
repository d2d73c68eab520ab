#pragma once

#include "npmix/model/mixture.hpp"

namespace npmix::reference {

// Reference models used by tests, the acceptance suite and example configs.

// lambda=0.6, m1=1+2x, m2=-1+x, e1~N(0,1.5^2), e2~N(0,0.5^2).
MixtureModel gm1();
// Same regressions, e1 = split normal (0.5, 1.0), e2 = -e1, lambda=0.7.
MixtureModel sk1();
// sk1 errors and regressions with lambda(x) = 0.5 + 0.2 x.
MixtureModel fe_sk1();
// lambda=(0.5,0.3,0.2), m=(3+x, 0.3x^2, -3+2x), N(0,1) errors.
MixtureModel gm3();
// One component: m1=1+2x, N(0,1.5^2).
MixtureModel degenerate();
// Two identical N(0,1) errors, m1=1+2x, m2=-1+x, lambda=0.5.
MixtureModel identical_components();
// Two components with constant weight: gm1 regressions, sk1 errors, lambda=0.6.
MixtureModel constant_weight_skew();

}  // namespace npmix::reference
