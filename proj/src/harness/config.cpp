#include "npmix/harness/config.hpp"

#include "npmix/error.hpp"
#include "npmix/model/reference.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace npmix {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& msg) { fail(ErrorKind::ConfigError, path + ": " + msg); }

// Object reader that tracks consumed keys so leftovers can be reported.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }
  const json& get(const std::string& key) {
    if (!has(key)) bad(at(key), "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number()) bad(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(at(key), "expected a finite number");
    return d;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
  std::optional<double> opt_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  std::uint64_t count(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) bad(at(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) bad(at(key), "expected true or false");
    return v.get<bool>();
  }
  std::string text(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) bad(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) { return number_list(get(key), at(key)); }

  static std::vector<double> number_list(const json& v, const std::string& path) {
    if (!v.is_array()) bad(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) bad(path + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) bad(at(key), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

ErrorPtr parse_error(const json& j, const std::string& path) {
  Fields f(j, path);
  const std::string family = f.text("family");
  ErrorPtr out;
  try {
    if (family == "gaussian") {
      out = make_gaussian(f.number("sigma"));
    } else if (family == "split_normal") {
      out = make_split_normal(f.number("sigma_left"), f.number("sigma_right"));
    } else {
      bad(f.at("family"), "unknown error family '" + family + "' (gaussian, split_normal)");
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ConfigError || std::string(e.what()).find(path) != std::string::npos) throw;
    bad(path, e.what());
  }
  f.finish();
  return out;
}

RegressionFunction parse_regression(const json& j, const std::string& path) {
  if (j.is_array()) {
    const auto c = Fields::number_list(j, path);
    if (c.empty()) bad(path, "coefficient list is empty");
    return RegressionFunction::univariate(c);
  }
  Fields f(j, path);
  const std::size_t dim = f.count("dim");
  if (dim == 0) bad(f.at("dim"), "must be positive");
  const json& terms = f.get("terms");
  if (!terms.is_array() || terms.empty()) bad(f.at("terms"), "expected a non-empty array");
  std::vector<Monomial> mono;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Fields t(terms[i], f.at("terms") + "[" + std::to_string(i) + "]");
    Monomial m;
    m.coef = t.number("coef");
    for (double p : t.numbers("powers")) {
      if (p < 0 || p != std::floor(p)) bad(t.at("powers"), "powers must be non-negative integers");
      m.powers.push_back(static_cast<int>(p));
    }
    if (m.powers.size() != dim) bad(t.at("powers"), "expected one power per covariate");
    t.finish();
    mono.push_back(std::move(m));
  }
  f.finish();
  return RegressionFunction::polynomial(dim, std::move(mono));
}

MixtureModel parse_model(const json& j, std::string& name) {
  if (j.is_string()) {
    name = j.get<std::string>();
    return reference_model(name);
  }
  name = "custom";
  Fields f(j, "model");
  const json& comps = f.get("components");
  if (!comps.is_array() || comps.empty()) bad("model.components", "expected a non-empty array");
  std::vector<Component> components;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string p = "model.components[" + std::to_string(i) + "]";
    Fields c(comps[i], p);
    Component comp{parse_regression(c.get("regression"), c.at("regression")), parse_error(c.get("error"), c.at("error"))};
    c.finish();
    components.push_back(std::move(comp));
  }
  const std::size_t dim = components.front().regression.dim();
  for (std::size_t i = 1; i < components.size(); ++i)
    if (components[i].regression.dim() != dim)
      bad("model.components[" + std::to_string(i) + "].regression", "covariate dimension differs from component 0");

  const bool has_w = f.has("weights"), has_fn = f.has("weight_function");
  if (has_w == has_fn) bad("model", "give exactly one of weights or weight_function");
  if (has_w) {
    const auto w = f.numbers("weights");
    if (w.size() != components.size())
      bad("model.weights", "has " + std::to_string(w.size()) + " entries for " + std::to_string(components.size()) + " components");
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!(w[i] > 0.0)) bad("model.weights[" + std::to_string(i) + "]", "must be strictly positive");
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "must sum to 1, got " << total;
      bad("model.weights", os.str());
    }
    f.finish();
    return MixtureModel(w, std::move(components));
  }
  Fields w(f.get("weight_function"), "model.weight_function");
  const std::string type = w.text("type");
  const double intercept = w.number("intercept");
  const auto slopes = w.numbers("slopes");
  if (slopes.size() != dim) bad(w.at("slopes"), "expected one slope per covariate");
  w.finish();
  f.finish();
  if (components.size() != 2) bad("model.weight_function", "x-dependent weights require exactly two components");
  if (type == "linear") return MixtureModel(WeightFunction::linear(intercept, slopes), std::move(components));
  if (type == "logistic") return MixtureModel(WeightFunction::logistic(intercept, slopes), std::move(components));
  bad("model.weight_function.type", "unknown type '" + type + "' (linear, logistic)");
}

CovariateLaw parse_law(const json& j) {
  Fields f(j, "covariates");
  const std::string law = f.text("law");
  CovariateLaw out;
  if (law == "uniform") {
    out = UniformLaw{f.numbers("lo"), f.numbers("hi")};
  } else if (law == "gaussian") {
    out = GaussianLaw{f.numbers("mean"), f.numbers("sd")};
  } else if (law == "grid") {
    const json& pts = f.get("points");
    if (!pts.is_array() || pts.empty()) bad("covariates.points", "expected a non-empty array");
    GridLaw g;
    for (std::size_t i = 0; i < pts.size(); ++i) g.points.push_back(Fields::number_list(pts[i], "covariates.points[" + std::to_string(i) + "]"));
    out = g;
  } else {
    bad("covariates.law", "unknown law '" + law + "' (uniform, gaussian, grid)");
  }
  f.finish();
  try {
    validate_law(out);
  } catch (const Error& e) {
    bad("covariates", e.what());
  }
  return out;
}

ScheduleOptions parse_tuning(const json& j) {
  Fields f(j, "tuning");
  ScheduleOptions o;
  o.epsilon = f.number("epsilon", o.epsilon);
  o.beta = f.number("beta", o.beta);
  o.c_t = f.opt_number("c_t");
  o.c_s = f.opt_number("c_s");
  o.a = f.number("a", o.a);
  o.shrink_a = f.boolean("shrink_a", o.shrink_a);
  o.bandwidth_scale = f.number("bandwidth_scale", o.bandwidth_scale);
  o.t_n = f.opt_number("t_n");
  o.s_n = f.opt_number("s_n");
  o.a_n = f.opt_number("a_n");
  if (f.has("p_n")) o.p_n = static_cast<int>(f.count("p_n"));
  for (const char* key : {"h_n", "b_n", "c_n", "d_n"}) {
    if (!f.has(key)) continue;
    auto v = f.numbers(key);
    if (std::string(key) == "h_n") o.h_n = v;
    if (std::string(key) == "b_n") o.b_n = v;
    if (std::string(key) == "c_n") o.c_n = v;
    if (std::string(key) == "d_n") o.d_n = v;
  }
  f.finish();
  if (!(o.epsilon > 0.0 && o.beta > 0.0)) bad("tuning", "epsilon and beta must be positive");
  if (o.c_t && !(*o.c_t > 0.0)) bad("tuning.c_t", "must be positive");
  if (o.c_s && !(*o.c_s > 0.0)) bad("tuning.c_s", "must be positive");
  if (!(o.a > 0.0)) bad("tuning.a", "must be positive");
  if (!(o.bandwidth_scale > 0.0)) bad("tuning.bandwidth_scale", "must be positive");
  return o;
}

std::vector<double> positive_grid(Fields& f, const std::string& key) {
  auto v = f.numbers(key);
  if (v.empty()) bad(f.at(key), "must not be empty");
  return v;
}

void parse_diagnose(const json& j, DiagnoseOptions& d) {
  Fields f(j, "diagnose");
  if (f.has("t_grid")) d.t_grid = positive_grid(f, "t_grid");
  if (f.has("probe")) {
    Fields p(f.get("probe"), "diagnose.probe");
    d.probe.T = p.number("T", d.probe.T);
    d.probe.S = p.number("S", d.probe.S);
    d.probe.a = p.number("a", d.probe.a);
    d.probe.rel_tol = p.number("rel_tol", d.probe.rel_tol);
    if (p.has("window")) d.probe.window = static_cast<int>(p.count("window"));
    if (p.has("c_seq")) d.probe.c_seq = p.numbers("c_seq");
    p.finish();
    if (!(d.probe.T > 0 && d.probe.S > 0 && d.probe.a > 0 && d.probe.rel_tol > 0 && d.probe.window >= 3))
      bad("diagnose.probe", "T, S, a, rel_tol must be positive and window at least 3");
  }
  if (f.has("j_max")) {
    d.j_max = static_cast<int>(f.count("j_max"));
    if (d.j_max < 1 || d.j_max > kMaxNestingDepth) bad(f.at("j_max"), "must lie in 1..4");
  }
  if (f.has("zero_tol")) d.general.zero_tol = f.number("zero_tol");
  d.detect_j = f.boolean("detect_j", d.detect_j);
  f.finish();
}

}  // namespace

MixtureModel default_model() { return reference::gm1(); }

MixtureModel reference_model(const std::string& name) {
  if (name == "gm1") return reference::gm1();
  if (name == "sk1") return reference::sk1();
  if (name == "fe_sk1") return reference::fe_sk1();
  if (name == "gm3") return reference::gm3();
  if (name == "degenerate") return reference::degenerate();
  if (name == "identical_components") return reference::identical_components();
  if (name == "constant_weight_skew") return reference::constant_weight_skew();
  fail(ErrorKind::ConfigError, "model: unknown reference model '" + name + "'");
}

ExperimentConfig parse_config(const json& doc) {
  Fields f(doc, "");
  {
    const json& v = f.get("npmix_config");
    if (!v.is_number_integer() || v.get<int>() != kConfigVersion)
      bad("npmix_config", "unsupported config version, expected " + std::to_string(kConfigVersion));
  }
  ExperimentConfig c;
  c.model = parse_model(f.get("model"), c.model_name);
  const std::size_t k = c.model.dim();
  if (f.has("covariates")) {
    c.covariates = parse_law(f.get("covariates"));
  } else if (k != 1) {
    bad("covariates", "required when the model has more than one covariate");
  }
  if (validate_law(c.covariates) != k) bad("covariates", "dimension differs from the model's covariate dimension");
  if (f.has("n")) {
    c.n = f.count("n");
    if (c.n == 0) bad("n", "must be positive");
  }
  if (f.has("seed")) c.seed = f.count("seed");
  if (f.has("design")) {
    Fields d(f.get("design"), "design");
    if (d.has("n_grid")) {
      c.n_grid.clear();
      for (double v : d.numbers("n_grid")) {
        if (!(v >= 1) || v != std::floor(v)) bad("design.n_grid", "entries must be positive integers");
        c.n_grid.push_back(static_cast<std::size_t>(v));
      }
      if (c.n_grid.empty()) bad("design.n_grid", "must not be empty");
      for (std::size_t i = 1; i < c.n_grid.size(); ++i)
        if (c.n_grid[i] <= c.n_grid[i - 1]) bad("design.n_grid", "must be strictly increasing");
    }
    if (d.has("replications")) {
      c.replications = d.count("replications");
      if (c.replications < 1) bad("design.replications", "must be at least 1");
    }
    d.finish();
  }
  if (f.has("tuning")) c.tuning = parse_tuning(f.get("tuning"));
  if (f.has("kernel")) {
    const std::string kname = f.text("kernel");
    if (kname == "gaussian") c.kernel = KernelFamily::Gaussian;
    else if (kname == "quartic") c.kernel = KernelFamily::QuarticCompact;
    else bad("kernel", "unknown kernel '" + kname + "' (gaussian, quartic)");
  }
  auto point = [&](const std::string& key, std::vector<double>& dst) {
    if (!f.has(key)) {
      if (k != 1) bad(key, "required when the model has more than one covariate");
      return;
    }
    dst = f.numbers(key);
    if (dst.size() != k) bad(key, "expected " + std::to_string(k) + " coordinates");
  };
  point("x0", c.x0);
  point("x1", c.x1);
  if (c.x0 == c.x1) bad("x1", "must differ from x0");
  if (f.has("points")) {
    const json& pts = f.get("points");
    if (!pts.is_array()) bad("points", "expected an array of points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto p = Fields::number_list(pts[i], "points[" + std::to_string(i) + "]");
      if (p.size() != k) bad("points[" + std::to_string(i) + "]", "expected " + std::to_string(k) + " coordinates");
      c.points.push_back(std::move(p));
    }
  }
  if (f.has("z_grid")) {
    Fields z(f.get("z_grid"), "z_grid");
    ZGridSpec g;
    g.lo = z.number("lo");
    g.hi = z.number("hi");
    g.points = z.count("points");
    z.finish();
    if (!(g.hi > g.lo) || g.points < 2) bad("z_grid", "needs hi > lo and at least 2 points");
    c.z_grid = g;
  }
  if (f.has("mc_z")) c.mc_z = f.numbers("mc_z");
  c.diagnose.x0 = c.x0;
  c.diagnose.x = c.x1;
  c.diagnose.points = c.points;
  if (f.has("diagnose")) parse_diagnose(f.get("diagnose"), c.diagnose);
  if (c.z_grid) c.diagnose.z_grid = linear_grid(c.z_grid->lo, c.z_grid->hi, c.z_grid->points);
  f.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace npmix
