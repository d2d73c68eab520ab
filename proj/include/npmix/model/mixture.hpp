#pragma once

#include "npmix/model/distribution.hpp"
#include "npmix/model/regression.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace npmix {

// x-dependent weight of the first component in a two-component model.
class WeightFunction {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  static WeightFunction linear(double intercept, std::vector<double> slopes);
  static WeightFunction logistic(double intercept, std::vector<double> slopes);
  static WeightFunction custom(Fn fn, std::string label);

  double operator()(std::span<const double> x) const { return fn_(x); }
  const std::string& describe() const { return label_; }

 private:
  Fn fn_;
  std::string label_;
};

struct Component {
  RegressionFunction regression;
  ErrorPtr error;
};

class MixtureModel {
 public:
  MixtureModel(std::vector<double> weights, std::vector<Component> components);
  // Two-component model with weight lambda(x) on the first component.
  MixtureModel(WeightFunction weight, std::vector<Component> components);

  std::size_t J() const { return components_.size(); }
  std::size_t dim() const { return dim_; }
  bool constant_weights() const { return constant_; }
  const std::vector<double>& weights() const;
  // lambda_j(x); throws DomainError when an x-dependent weight leaves (0, 1].
  double weight(std::size_t j, std::span<const double> x) const;
  const Component& component(std::size_t j) const { return components_.at(j); }
  double m(std::size_t j, std::span<const double> x) const { return components_.at(j).regression.value(x); }

  // Same model with components listed in the given order.
  MixtureModel permuted(const std::vector<std::size_t>& order) const;

  std::string describe() const;

 private:
  void validate_components();

  std::vector<Component> components_;
  std::vector<double> weights_;
  WeightFunction weight_fn_;
  bool constant_ = true;
  bool weight_swapped_ = false;
  std::size_t dim_ = 1;
};

}  // namespace npmix
