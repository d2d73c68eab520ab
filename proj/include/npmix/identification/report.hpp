#pragma once

#include "npmix/identification/conditions.hpp"
#include "npmix/identification/fixed_effects.hpp"
#include "npmix/identification/general_j.hpp"
#include "npmix/identification/two_component.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace npmix {

struct DiagnoseOptions {
  std::vector<double> x0{0.0};
  std::vector<double> x{0.5};
  std::vector<double> t_grid{0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
  std::vector<double> z_grid;
  ProbeSettings probe;
  bool detect_j = false;
  int j_max = kMaxNestingDepth;
  // evaluation points for the J >= 3 recovery
  std::vector<std::vector<double>> points;
  GeneralJSettings general;
};

struct DiagnosisReport {
  std::string model;
  std::size_t J = 0;
  bool constant_weights = true;
  std::vector<ConditionVerdict> verdicts;
  std::optional<TwoComponentRecovery> two_component;
  std::optional<FeRecovery> fixed_effects;
  std::optional<JIdentificationResult> general;
  std::optional<DetectJResult> detected;
  std::vector<std::string> notes;
};

// Runs the checkers and recoveries that apply to the model. Numeric
// failures of a recovery are recorded as notes; invalid inputs still throw.
DiagnosisReport diagnose(const MixtureModel& model, const DiagnoseOptions& opts);

nlohmann::json to_json(const ConditionVerdict& v);
nlohmann::json to_json(const TwoComponentRecovery& r);
nlohmann::json to_json(const FeRecovery& r);
nlohmann::json to_json(const JIdentificationResult& r);
nlohmann::json to_json(const DetectJResult& r);
nlohmann::json to_json(const DiagnosisReport& r, const DiagnoseOptions& opts);

// condition,verdict,name,value
void write_evidence_csv(std::ostream& os, const DiagnosisReport& r);

}  // namespace npmix
