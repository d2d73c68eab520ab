#pragma once

#include "npmix/dgp/dataset.hpp"
#include "npmix/model/mixture.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace npmix {

struct UniformLaw {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct GaussianLaw {
  std::vector<double> mean;
  std::vector<double> sd;
};

// Row i takes grid point i mod size.
struct GridLaw {
  std::vector<std::vector<double>> points;
};

using CovariateLaw = std::variant<UniformLaw, GaussianLaw, GridLaw>;

struct SimulationDesign {
  std::size_t n = 1;
  CovariateLaw law = UniformLaw{{0.0}, {1.0}};
  std::uint64_t seed = 0;
  bool record_labels = true;
};

// Dimension of a covariate law; throws ConfigError on invalid parameters.
std::size_t validate_law(const CovariateLaw& law);

// Rows are generated from per-row streams keyed on (seed, row), so the output
// does not depend on `threads`.
Dataset simulate(const MixtureModel& model, const SimulationDesign& design, unsigned threads = 1);

}  // namespace npmix
