#pragma once

#include "npmix/dgp/simulate.hpp"
#include "npmix/estimators/fit.hpp"
#include "npmix/estimators/tuning.hpp"
#include "npmix/identification/report.hpp"
#include "npmix/model/mixture.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace npmix {

inline constexpr int kConfigVersion = 1;

struct ZGridSpec {
  double lo = -4.0;
  double hi = 4.0;
  std::size_t points = 41;
};

MixtureModel default_model();

struct ExperimentConfig {
  std::string model_name;  // reference name or "custom"
  MixtureModel model = default_model();
  CovariateLaw covariates = UniformLaw{{-1.0}, {1.5}};
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::vector<std::size_t> n_grid{2000, 8000, 32000};
  std::size_t replications = 100;
  ScheduleOptions tuning;
  KernelFamily kernel = KernelFamily::Gaussian;
  std::vector<double> x0{0.0};
  std::vector<double> x1{0.5};
  std::vector<std::vector<double>> points;
  std::optional<ZGridSpec> z_grid;
  // z values at which montecarlo also scores F1 and F2
  std::vector<double> mc_z;
  DiagnoseOptions diagnose;
};

// Built-in model by name: gm1, sk1, fe_sk1, gm3, degenerate,
// identical_components, constant_weight_skew.
MixtureModel reference_model(const std::string& name);

// Parses a config document; every object rejects unknown keys. Throws
// ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

}  // namespace npmix
