#include "npmix/model/reference.hpp"

namespace npmix::reference {

namespace {

RegressionFunction line(double a, double b) { return RegressionFunction::univariate({a, b}); }

}  // namespace

MixtureModel gm1() {
  return MixtureModel({0.6, 0.4}, {{line(1.0, 2.0), make_gaussian(1.5)}, {line(-1.0, 1.0), make_gaussian(0.5)}});
}

MixtureModel sk1() {
  return MixtureModel({0.7, 0.3}, {{line(1.0, 2.0), make_split_normal(0.5, 1.0)}, {line(-1.0, 1.0), make_split_normal(1.0, 0.5)}});
}

MixtureModel fe_sk1() {
  return MixtureModel(WeightFunction::linear(0.5, {0.2}),
                      {{line(1.0, 2.0), make_split_normal(0.5, 1.0)}, {line(-1.0, 1.0), make_split_normal(1.0, 0.5)}});
}

MixtureModel gm3() {
  return MixtureModel({0.5, 0.3, 0.2}, {{line(3.0, 1.0), make_gaussian(1.0)},
                                        {RegressionFunction::univariate({0.0, 0.0, 0.3}), make_gaussian(1.0)},
                                        {line(-3.0, 2.0), make_gaussian(1.0)}});
}

MixtureModel degenerate() { return MixtureModel({1.0}, {{line(1.0, 2.0), make_gaussian(1.5)}}); }

MixtureModel identical_components() {
  return MixtureModel({0.5, 0.5}, {{line(1.0, 2.0), make_gaussian(1.0)}, {line(-1.0, 1.0), make_gaussian(1.0)}});
}

MixtureModel constant_weight_skew() {
  return MixtureModel({0.6, 0.4}, {{line(1.0, 2.0), make_split_normal(0.5, 1.0)}, {line(-1.0, 1.0), make_split_normal(1.0, 0.5)}});
}

}  // namespace npmix::reference
