#pragma once

#include "npmix/identification/limits.hpp"

#include <optional>
#include <string>
#include <vector>

namespace npmix {

enum class Verdict { Holds, Fails, Indeterminate };

std::string to_string(Verdict v);

struct Evidence {
  std::string name;
  double value = 0.0;
};

struct ConditionVerdict {
  std::string condition_id;  // Cond1, Cond2, Cond3, Cond4-FE
  Verdict holds = Verdict::Indeterminate;
  std::string clause;        // which clause decided, empty if none
  double tolerance = 0.0;
  std::vector<Evidence> evidence;
  std::vector<std::string> notes;
  // Cond2 only: direct check of |phi1/phi2| -> 0 or infinity on the
  // component characteristic functions.
  std::optional<Verdict> component_ratio_check;
  std::optional<bool> cross_check_agrees;

  double evidence_value(const std::string& name) const;
};

// Two-sided MGF slope limits differ, or lambda_c -> 1.
ConditionVerdict check_condition1(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                  const ProbeSettings& probe = {});
// |rho(x, s)| -> 1 with a constant Log-increment; cross-checked against the
// component CF ratio for two-component models.
ConditionVerdict check_condition2(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                  const ProbeSettings& probe = {});
// One-sided MGF slope limit differs from the CF slope limit, or lambda_delta -> 1.
// The MGF side is +infinity when every error MGF exists on [0, inf), else -infinity.
ConditionVerdict check_condition3(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                  const ProbeSettings& probe = {});
// Two-sided MGF slope limits differ, or K_{+inf,t}(x) = 1 at every probed t.
ConditionVerdict check_condition4_fe(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                     const ProbeSettings& probe = {});

// K_{+inf,t} probe points and the exactness tolerance of the K = 1 clause.
inline constexpr double kUnitKTolerance = 1e-12;
std::vector<double> unit_k_probe_grid(const ProbeSettings& probe);

}  // namespace npmix
