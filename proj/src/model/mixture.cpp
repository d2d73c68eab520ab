#include "npmix/model/mixture.hpp"

#include "npmix/error.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace npmix {

WeightFunction WeightFunction::linear(double intercept, std::vector<double> slopes) {
  std::ostringstream os;
  os.precision(17);
  os << "linear(" << intercept;
  for (double s : slopes) os << ", " << s;
  os << ")";
  WeightFunction w;
  w.label_ = os.str();
  w.fn_ = [intercept, slopes](std::span<const double> x) {
    double v = intercept;
    for (std::size_t i = 0; i < slopes.size() && i < x.size(); ++i) v += slopes[i] * x[i];
    return v;
  };
  return w;
}

WeightFunction WeightFunction::logistic(double intercept, std::vector<double> slopes) {
  WeightFunction lin = linear(intercept, slopes);
  WeightFunction w;
  w.label_ = "logistic" + lin.label_.substr(6);
  w.fn_ = [lin](std::span<const double> x) { return 1.0 / (1.0 + std::exp(-lin(x))); };
  return w;
}

WeightFunction WeightFunction::custom(Fn fn, std::string label) {
  if (!fn) fail(ErrorKind::ConfigError, "custom weight function is empty");
  WeightFunction w;
  w.fn_ = std::move(fn);
  w.label_ = std::move(label);
  return w;
}

MixtureModel::MixtureModel(std::vector<double> weights, std::vector<Component> components)
    : components_(std::move(components)), weights_(std::move(weights)) {
  validate_components();
  if (weights_.size() != components_.size())
    fail(ErrorKind::ConfigError, "weights has " + std::to_string(weights_.size()) + " entries but there are " +
                                     std::to_string(components_.size()) + " components");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorKind::ConfigError, "weights must be strictly positive");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "weights must sum to 1, got " << total;
    fail(ErrorKind::ConfigError, os.str());
  }
}

MixtureModel::MixtureModel(WeightFunction weight, std::vector<Component> components)
    : components_(std::move(components)), weight_fn_(std::move(weight)), constant_(false) {
  validate_components();
  if (components_.size() != 2) fail(ErrorKind::ConfigError, "x-dependent weights require exactly two components");
}

void MixtureModel::validate_components() {
  if (components_.empty()) fail(ErrorKind::ConfigError, "model needs at least one component");
  dim_ = components_.front().regression.dim();
  for (const auto& c : components_) {
    if (!c.error) fail(ErrorKind::ConfigError, "component without error distribution");
    if (c.regression.dim() != dim_) fail(ErrorKind::ConfigError, "components disagree on covariate dimension");
  }
}

const std::vector<double>& MixtureModel::weights() const {
  if (!constant_) fail(ErrorKind::DomainError, "model has x-dependent weights");
  return weights_;
}

double MixtureModel::weight(std::size_t j, std::span<const double> x) const {
  if (constant_) return weights_.at(j);
  double l = weight_fn_(x);
  if (!(l > 0.0 && l <= 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "weight function " << weight_fn_.describe() << " evaluates to " << l << " outside (0, 1]";
    fail(ErrorKind::DomainError, os.str());
  }
  if (weight_swapped_) l = 1.0 - l;
  return j == 0 ? l : 1.0 - l;
}

MixtureModel MixtureModel::permuted(const std::vector<std::size_t>& order) const {
  if (order.size() != J()) fail(ErrorKind::DomainError, "permutation length differs from J");
  std::vector<bool> seen(J(), false);
  for (std::size_t i : order) {
    if (i >= J() || seen[i]) fail(ErrorKind::DomainError, "invalid permutation");
    seen[i] = true;
  }
  MixtureModel out = *this;
  for (std::size_t i = 0; i < J(); ++i) out.components_[i] = components_[order[i]];
  if (constant_) {
    for (std::size_t i = 0; i < J(); ++i) out.weights_[i] = weights_[order[i]];
  } else if (order[0] == 1) {
    out.weight_swapped_ = !weight_swapped_;
  }
  return out;
}

std::string MixtureModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "J=" << J() << ", k=" << dim_ << ", weights=";
  if (constant_) {
    for (std::size_t j = 0; j < J(); ++j) os << (j ? "/" : "") << weights_[j];
  } else {
    os << (weight_swapped_ ? "1-" : "") << weight_fn_.describe();
  }
  for (std::size_t j = 0; j < J(); ++j)
    os << "; m" << (j + 1) << "=" << components_[j].regression.describe() << ", e" << (j + 1) << "="
       << components_[j].error->describe();
  return os.str();
}

}  // namespace npmix
