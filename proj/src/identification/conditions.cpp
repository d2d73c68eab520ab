#include "npmix/identification/conditions.hpp"

#include "npmix/error.hpp"
#include "npmix/identification/fixed_effects.hpp"
#include "npmix/model/population.hpp"

#include <algorithm>
#include <cmath>

namespace npmix {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

double ConditionVerdict::evidence_value(const std::string& name) const {
  for (const auto& e : evidence)
    if (e.name == name) return e.value;
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

double scale_of(double v) { return std::max(1.0, std::abs(v)); }

void add_probe(ConditionVerdict& v, const std::string& prefix, const LimitProbe& p) {
  for (std::size_t i = 0; i < p.args.size(); ++i)
    v.evidence.push_back({prefix + "(" + std::to_string(p.args[i]) + ")", p.values[i]});
  v.evidence.push_back({prefix + ".limit", p.limit});
  v.evidence.push_back({prefix + ".residual", p.residual});
}

void add_lambda(ConditionVerdict& v, const std::string& prefix, const LambdaCProbe& p) {
  for (std::size_t i = 0; i < p.c.size(); ++i) v.evidence.push_back({prefix + "(" + std::to_string(p.c[i]) + ")", p.values[i]});
  v.evidence.push_back({prefix + ".limit", p.limit});
  v.evidence.push_back({prefix + ".residual", p.residual});
  v.evidence.push_back({prefix + ".diverges", p.diverges ? 1.0 : 0.0});
}

bool lambda_is_one(const LambdaCProbe& p, double tol) {
  return !p.diverges && std::isfinite(p.limit) && p.residual <= tol && std::abs(p.limit - 1.0) <= tol;
}

// Both two-sided MGF clauses share this first branch.
bool two_sided_clause(ConditionVerdict& v, const SlopeLimits& L, double tol, bool& stable) {
  add_probe(v, "mgf_slope_plus", L.plus);
  add_probe(v, "mgf_slope_minus", L.minus);
  stable = L.plus.stable(tol) && L.minus.stable(tol);
  const double gap = std::abs(L.plus.limit - L.minus.limit);
  v.evidence.push_back({"two_sided_gap", gap});
  if (stable && gap > tol * scale_of(L.plus.limit)) {
    v.holds = Verdict::Holds;
    v.clause = "two-sided MGF limits differ";
    return true;
  }
  return false;
}

int mgf_side(const MixtureModel& model) {
  bool plus = true, minus = true;
  for (std::size_t j = 0; j < model.J(); ++j) {
    const MgfDomain d = model.component(j).error->mgf_domain();
    plus = plus && std::isinf(d.hi) && d.hi > 0;
    minus = minus && std::isinf(d.lo) && d.lo < 0;
  }
  if (plus) return 1;
  if (minus) return -1;
  return 0;
}

}  // namespace

std::vector<double> unit_k_probe_grid(const ProbeSettings& probe) {
  return {-probe.T, -probe.T / 2, -1.0, -0.5, 0.5, 1.0, probe.T / 2, probe.T};
}

ConditionVerdict check_condition1(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                  const ProbeSettings& probe) {
  ConditionVerdict v;
  v.condition_id = "Cond1";
  v.tolerance = probe.rel_tol;
  try {
    const SlopeLimits L = slope_limits_mgf(model, x, x0, probe);
    bool stable = false;
    if (two_sided_clause(v, L, probe.rel_tol, stable)) return v;
    const double mean_diff = pop_cond_mean(model, x) - pop_cond_mean(model, x0);
    const LambdaCProbe lc = lambda_c_limit(mean_diff, L.plus.limit, L.minus.limit, probe.c_seq);
    add_lambda(v, "lambda_c", lc);
    if (lambda_is_one(lc, probe.rel_tol)) {
      v.holds = Verdict::Holds;
      v.clause = "lambda_c -> 1";
    } else if (stable) {
      v.holds = Verdict::Fails;
      if (lc.diverges) v.notes.push_back("lambda_c diverges as c -> 0");
    }
  } catch (const Error& e) {
    v.holds = Verdict::Indeterminate;
    v.notes.push_back(e.what());
  }
  return v;
}

ConditionVerdict check_condition2(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                  const ProbeSettings& probe) {
  ConditionVerdict v;
  v.condition_id = "Cond2";
  v.tolerance = probe.rel_tol;
  const double tol = probe.rel_tol;
  try {
    const double dev_lo = rho_modulus_deviation(model, x, x0, probe.S / 4, probe.S / 2, probe.window);
    const double dev_hi = rho_modulus_deviation(model, x, x0, probe.S / 2, probe.S, probe.window);
    v.evidence.push_back({"rho_modulus_dev_low", dev_lo});
    v.evidence.push_back({"rho_modulus_dev_high", dev_hi});
    bool cf_stable = false;
    try {
      const LimitProbe cf = slope_limit_cf(model, x, x0, probe);
      add_probe(v, "cf_slope", cf);
      cf_stable = cf.stable(tol);
    } catch (const Error& e) {
      v.notes.push_back(e.what());
    }
    if (dev_hi <= tol && cf_stable) {
      v.holds = Verdict::Holds;
      v.clause = "|rho| -> 1 and constant Log-increment";
    } else if (dev_hi > 10.0 * tol && dev_hi >= 0.5 * dev_lo) {
      v.holds = Verdict::Fails;
      v.notes.push_back("|rho| does not approach 1");
    } else if (dev_hi <= tol && !cf_stable) {
      v.holds = Verdict::Fails;
      v.notes.push_back("Log-increment does not settle");
    }
  } catch (const Error& e) {
    v.notes.push_back(e.what());
  }

  if (model.J() == 2) {
    // |phi1/phi2| -> 0 or infinity on the component characteristic functions
    const auto& e1 = *model.component(0).error;
    const auto& e2 = *model.component(1).error;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    const int w = std::max(2, probe.window);
    for (int i = 0; i < w; ++i) {
      const double s = probe.S * (0.5 + 0.5 * i / (w - 1));
      const double r = std::abs(e1.log_cf(s).real() - e2.log_cf(s).real());
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    v.evidence.push_back({"component_log_ratio_min", lo});
    v.evidence.push_back({"component_log_ratio_max", hi});
    Verdict direct = Verdict::Indeterminate;
    if (lo > 20.0) direct = Verdict::Holds;
    else if (hi <= tol) direct = Verdict::Fails;
    v.component_ratio_check = direct;
    if (direct != Verdict::Indeterminate && v.holds != Verdict::Indeterminate) v.cross_check_agrees = (direct == v.holds);
  } else {
    v.notes.push_back("component ratio check needs two components");
  }
  return v;
}

ConditionVerdict check_condition3(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                  const ProbeSettings& probe) {
  ConditionVerdict v;
  v.condition_id = "Cond3";
  v.tolerance = probe.rel_tol;
  const double tol = probe.rel_tol;
  const int side = mgf_side(model);
  if (side == 0) {
    v.notes.push_back("no error MGF exists on a half line");
    return v;
  }
  v.evidence.push_back({"mgf_side", static_cast<double>(side)});
  try {
    const LimitProbe mgf = slope_limit_mgf(model, x, x0, side, probe);
    add_probe(v, "mgf_slope", mgf);
    const LimitProbe cf = slope_limit_cf(model, x, x0, probe);
    add_probe(v, "cf_slope", cf);
    if (!mgf.stable(tol) || !cf.stable(tol)) {
      v.notes.push_back("slope limits do not settle");
      return v;
    }
    const double gap = std::abs(mgf.limit - cf.limit);
    v.evidence.push_back({"mgf_cf_gap", gap});
    if (gap > tol * scale_of(mgf.limit)) {
      v.holds = Verdict::Holds;
      v.clause = "MGF limit differs from CF limit";
      return v;
    }
    const double mean_diff = pop_cond_mean(model, x) - pop_cond_mean(model, x0);
    const LambdaCProbe ld = lambda_c_limit(mean_diff, mgf.limit, cf.limit, probe.c_seq);
    add_lambda(v, "lambda_delta", ld);
    if (lambda_is_one(ld, tol)) {
      v.holds = Verdict::Holds;
      v.clause = "lambda_delta -> 1";
    } else {
      v.holds = Verdict::Fails;
    }
  } catch (const Error& e) {
    v.holds = Verdict::Indeterminate;
    v.notes.push_back(e.what());
  }
  return v;
}

ConditionVerdict check_condition4_fe(const MixtureModel& model, std::span<const double> x, std::span<const double> x0,
                                     const ProbeSettings& probe) {
  ConditionVerdict v;
  v.condition_id = "Cond4-FE";
  v.tolerance = probe.rel_tol;
  try {
    const SlopeLimits L = slope_limits_mgf(model, x, x0, probe);
    bool stable = false;
    if (two_sided_clause(v, L, probe.rel_tol, stable)) return v;
    double worst = 0.0;
    for (double t : unit_k_probe_grid(probe)) {
      const double k = fe_K_at(model, t, x, x0, L.plus.limit);
      v.evidence.push_back({"K_plus_t(" + std::to_string(t) + ")", k});
      worst = std::max(worst, std::abs(k - 1.0));
    }
    v.evidence.push_back({"K_plus_t.max_dev", worst});
    if (worst <= kUnitKTolerance) {
      v.holds = Verdict::Holds;
      v.clause = "K_{+inf,t} = 1 at every probed t";
    } else if (stable) {
      v.holds = Verdict::Fails;
    }
  } catch (const Error& e) {
    v.holds = Verdict::Indeterminate;
    v.notes.push_back(e.what());
  }
  return v;
}

}  // namespace npmix
