#include "npmix/identification/report.hpp"

#include "npmix/error.hpp"

#include <cmath>
#include <cstdio>

namespace npmix {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double d : v) out.push_back(number(d));
  return out;
}

json matrix(const std::vector<std::vector<double>>& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(numbers(row));
  return out;
}

json probe(const LimitProbe& p) {
  return {{"args", numbers(p.args)}, {"values", numbers(p.values)}, {"limit", number(p.limit)}, {"residual", number(p.residual)}};
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json to_json(const ConditionVerdict& v) {
  json ev = json::object();
  for (const auto& e : v.evidence) ev[e.name] = number(e.value);
  json out{{"condition", v.condition_id},
           {"verdict", to_string(v.holds)},
           {"clause", v.clause},
           {"tolerance", v.tolerance},
           {"evidence", ev},
           {"notes", v.notes}};
  if (v.component_ratio_check) out["component_ratio_check"] = to_string(*v.component_ratio_check);
  if (v.cross_check_agrees) out["cross_check_agrees"] = *v.cross_check_agrees;
  return out;
}

json to_json(const TwoComponentRecovery& r) {
  json out{{"route", r.route},       {"lambda", number(r.lambda)}, {"slope1", number(r.slope1)}, {"slope2", number(r.slope2)},
           {"C", number(r.C)},       {"m1_x0", number(r.m1_x0)},   {"m2_x0", number(r.m2_x0)},   {"t_grid", numbers(r.t_grid)},
           {"M1", numbers(r.M1)},    {"M2", numbers(r.M2)},        {"skipped_t", numbers(r.skipped_t)}};
  if (!r.z_grid.empty())
    out["series"] = {{"terms", r.series_terms}, {"z", numbers(r.z_grid)}, {"F1", numbers(r.F1)}, {"F2", numbers(r.F2)}};
  return out;
}

json to_json(const FeRecovery& r) {
  json out{{"K_plus", probe(r.K.plus)},
           {"K_minus", probe(r.K.minus)},
           {"fixed_weight_fallback", r.fixed_weight_fallback},
           {"lambda_x", number(r.lambda_x)},
           {"lambda_x0", number(r.lambda_x0)},
           {"slope1", number(r.slope1)},
           {"slope2", number(r.slope2)},
           {"m1_x0", number(r.m1_x0)},
           {"m2_x0", number(r.m2_x0)},
           {"t_grid", numbers(r.t_grid)},
           {"M1", numbers(r.M1)},
           {"M2", numbers(r.M2)},
           {"skipped_t", numbers(r.skipped_t)}};
  if (r.fallback) out["fallback"] = to_json(*r.fallback);
  return out;
}

json to_json(const JIdentificationResult& r) {
  return {{"J", r.J},
          {"x0", numbers(r.x0)},
          {"points", matrix(r.points)},
          {"slopes", matrix(r.slopes)},
          {"slopes_injected", r.slopes_injected},
          {"lambda", numbers(r.lambda)},
          {"levels", numbers(r.levels)},
          {"det_A", number(r.det_A)},
          {"det_B", number(r.det_B)},
          {"t_grid", numbers(r.t_grid)},
          {"M", matrix(r.M)},
          {"det_D", numbers(r.det_D)},
          {"skipped_t", numbers(r.skipped_t)}};
}

json to_json(const DetectJResult& r) {
  return {{"J", r.J}, {"saturated", r.saturated}, {"nu", matrix(r.nu)}, {"warnings", r.warnings}};
}

json to_json(const DiagnosisReport& r, const DiagnoseOptions& opts) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
  json out{{"report", "npmix-diagnosis"},
           {"version", 1},
           {"model", r.model},
           {"J", r.J},
           {"constant_weights", r.constant_weights},
           {"x0", numbers(opts.x0)},
           {"x", numbers(opts.x)},
           {"verdicts", verdicts},
           {"notes", r.notes}};
  if (r.two_component) out["two_component"] = to_json(*r.two_component);
  if (r.fixed_effects) out["fixed_effects"] = to_json(*r.fixed_effects);
  if (r.general) out["general_j"] = to_json(*r.general);
  if (r.detected) out["detect_j"] = to_json(*r.detected);
  return out;
}

void write_evidence_csv(std::ostream& os, const DiagnosisReport& r) {
  os << "condition,verdict,name,value\n";
  for (const auto& v : r.verdicts)
    for (const auto& e : v.evidence) os << v.condition_id << ',' << to_string(v.holds) << ',' << e.name << ',' << csv_number(e.value) << '\n';
}

DiagnosisReport diagnose(const MixtureModel& model, const DiagnoseOptions& opts) {
  DiagnosisReport r;
  r.model = model.describe();
  r.J = model.J();
  r.constant_weights = model.constant_weights();
  auto note = [&](const std::string& what, const Error& e) { r.notes.push_back(what + ": " + e.what()); };

  if (model.J() <= 2) {
    if (model.constant_weights()) {
      r.verdicts.push_back(check_condition1(model, opts.x, opts.x0, opts.probe));
      r.verdicts.push_back(check_condition2(model, opts.x, opts.x0, opts.probe));
      r.verdicts.push_back(check_condition3(model, opts.x, opts.x0, opts.probe));
      try {
        r.two_component = recover_two_component(model, opts.x, opts.x0, opts.t_grid, opts.probe, opts.z_grid);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        note("two-component recovery", e);
      }
    } else {
      r.verdicts.push_back(check_condition4_fe(model, opts.x, opts.x0, opts.probe));
      try {
        r.fixed_effects = fe_recover(model, opts.x, opts.x0, opts.t_grid, opts.probe);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularSystem) throw;
        note("fixed-effects recovery indeterminate", e);
      }
    }
  } else if (!opts.points.empty()) {
    try {
      r.general = recover_J_parameters(model, opts.x0, opts.points, opts.t_grid, opts.general);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularSystem && e.kind() != ErrorKind::IllConditioned) throw;
      note("general recovery", e);
    }
  } else {
    r.notes.push_back("J >= 3: no evaluation points given, parameter recovery skipped");
  }

  if (opts.detect_j) {
    if (!model.constant_weights()) {
      r.notes.push_back("J detection needs constant weights; skipped");
    } else {
      r.detected = detect_J(model, opts.x0, opts.x, opts.j_max, opts.general);
    }
  }
  return r;
}

}  // namespace npmix
