#pragma once

#include "npmix/dgp/dataset.hpp"
#include "npmix/estimators/tuning.hpp"
#include "npmix/model/mixture.hpp"
#include "npmix/model/special.hpp"
#include "npmix/smoothing/nw.hpp"

#include <complex>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace npmix {

// Conditional transforms at two evaluation points, point 0 = x0 and
// point 1 = x1. The estimator formulas only see this interface, so the
// same code runs on kernel estimates and on exact population values.
class TransformSource {
 public:
  virtual ~TransformSource() = default;

  virtual double log_mgf(int point, double t) const = 0;
  virtual ScaledComplex cf(int point, double s) const = 0;
  virtual double mean(int point) const = 0;
  virtual double m2(int point) const = 0;
  virtual double cdf(int point, double z) const = 0;
  // Observed outcome range, when the source is a sample.
  virtual std::optional<std::pair<double, double>> support() const { return std::nullopt; }
};

// Kernel estimates from a dataset. Windows are built once per point.
class SampleSource final : public TransformSource {
 public:
  SampleSource(const ObservationView& data, std::span<const double> x0, std::span<const double> x1, const TuningSchedule& tuning,
               KernelFamily family = KernelFamily::Gaussian);

  double log_mgf(int point, double t) const override;
  ScaledComplex cf(int point, double s) const override;
  double mean(int point) const override;
  double m2(int point) const override;
  double cdf(int point, double z) const override;
  std::optional<std::pair<double, double>> support() const override { return range_; }

  const KernelWindow& mgf_window(int point) const { return mgf_[point]; }
  const KernelWindow& cf_window(int point) const { return cf_[point]; }
  const KernelWindow& moment_window(int point) const { return mom_[point]; }
  const KernelWindow& cdf_window(int point) const { return cdfw_[point]; }

 private:
  std::vector<KernelWindow> mgf_, cf_, mom_, cdfw_;
  std::vector<WeightedCdf> cdf_;
  std::pair<double, double> range_;
};

class PopulationSource final : public TransformSource {
 public:
  PopulationSource(MixtureModel&&, std::vector<double>, std::vector<double>) = delete;
  PopulationSource(const MixtureModel& model, std::vector<double> x0, std::vector<double> x1);

  double log_mgf(int point, double t) const override;
  ScaledComplex cf(int point, double s) const override;
  double mean(int point) const override;
  double m2(int point) const override;
  double cdf(int point, double z) const override;

 private:
  const std::vector<double>& at(int point) const { return point == 0 ? x0_ : x1_; }

  const MixtureModel& model_;
  std::vector<double> x0_, x1_;
};

// Exchanges the roles of the two points.
class SwappedSource final : public TransformSource {
 public:
  explicit SwappedSource(const TransformSource& inner) : inner_(inner) {}

  double log_mgf(int point, double t) const override { return inner_.log_mgf(1 - point, t); }
  ScaledComplex cf(int point, double s) const override { return inner_.cf(1 - point, s); }
  double mean(int point) const override { return inner_.mean(1 - point); }
  double m2(int point) const override { return inner_.m2(1 - point); }
  double cdf(int point, double z) const override { return inner_.cdf(1 - point, z); }
  std::optional<std::pair<double, double>> support() const override { return inner_.support(); }

 private:
  const TransformSource& inner_;
};

}  // namespace npmix
