#include <doctest.h>

#include "npmix/dgp/simulate.hpp"
#include "npmix/error.hpp"
#include "npmix/estimators/estimators.hpp"
#include "npmix/harness/commands.hpp"
#include "npmix/harness/config.hpp"
#include "npmix/harness/montecarlo.hpp"
#include "npmix/model/reference.hpp"
#include "npmix/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

using namespace npmix;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("npmix_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void put(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

json gm1_config() {
  return json{{"npmix_config", 1}, {"model", "gm1"}, {"seed", 7}, {"n", 100}, {"x0", {0.0}}, {"x1", {0.5}}};
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.what();
  }
  return "";
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "npmix");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::map<std::string, std::string> fit_scalars(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line) && !line.empty()) {
    const auto c = line.find(',');
    out[line.substr(0, c)] = line.substr(c + 1);
  }
  return out;
}

ReplicationRecord record(std::size_t n, std::size_t rep, std::vector<double> values, std::string status = "ok") {
  ReplicationRecord r;
  r.n = n;
  r.rep = rep;
  r.values = std::move(values);
  r.status = std::move(status);
  return r;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(gm1_config());
  CHECK(c.model_name == "gm1");
  CHECK(c.n == 100);
  CHECK(c.seed == 7);
  CHECK(c.model.J() == 2);
  CHECK(c.n_grid == std::vector<std::size_t>{2000, 8000, 32000});
  CHECK(c.replications == 100);

  json custom = gm1_config();
  custom["model"] = json{{"components",
                          {{{"regression", {{"dim", 1}, {"terms", {{{"coef", 1.0}, {"powers", {0}}}, {{"coef", 2.0}, {"powers", {1}}}}}}},
                            {"error", {{"family", "gaussian"}, {"sigma", 1.5}}}},
                           {{"regression", {{"dim", 1}, {"terms", {{{"coef", -1.0}, {"powers", {0}}}}}}},
                            {"error", {{"family", "split_normal"}, {"sigma_left", 0.5}, {"sigma_right", 1.0}}}}}},
                         {"weights", {0.4, 0.6}}};
  const auto m = parse_config(custom).model;
  CHECK(m.J() == 2);
  CHECK(m.m(0, std::vector<double>{0.5}) == 2.0);
  CHECK(m.weight(1, std::vector<double>{0.0}) == 0.6);

  custom["model"]["weights"] = {0.4, 0.5};
  const std::string msg = config_error(custom);
  CHECK(msg.find("model.weights: must sum to 1, got 0.9") != std::string::npos);
}

TEST_CASE("config errors name the field") {
  auto with = [](const std::string& key, json v) {
    json j = gm1_config();
    j[key] = std::move(v);
    return j;
  };
  CHECK(config_error(with("colour", 1)).find("colour: unknown field") != std::string::npos);
  CHECK(config_error(with("npmix_config", 2)).find("npmix_config") != std::string::npos);
  CHECK(config_error(with("model", "gm9")).find("model") != std::string::npos);
  CHECK(config_error(with("design", json{{"n_grid", {8000, 2000}}})).find("design.n_grid: must be strictly increasing") != std::string::npos);
  CHECK(config_error(with("design", json{{"replications", 0}})).find("design.replications") != std::string::npos);
  CHECK(config_error(with("design", json{{"reps", 3}})).find("design.reps: unknown field") != std::string::npos);
  CHECK(config_error(with("tuning", json{{"c_t", -1.0}})).find("tuning.c_t") != std::string::npos);
  CHECK(config_error(with("x0", {0.0, 1.0})).find("x0: expected 1 coordinates") != std::string::npos);
  CHECK(config_error(with("x1", {0.0})).find("x1: must differ from x0") != std::string::npos);
  CHECK(config_error(with("covariates", json{{"law", "uniform"}, {"lo", {1.0}}, {"hi", {0.0}}})).find("covariates") != std::string::npos);
  CHECK(config_error(with("kernel", "epanechnikov")).find("kernel") != std::string::npos);
  json nested = gm1_config();
  nested["diagnose"] = json{{"probe", {{"T", 10.0}, {"extra", 1}}}};
  CHECK(config_error(nested).find("diagnose.probe.extra: unknown field") != std::string::npos);
  CHECK(config_error(json::array()).find("expected an object") != std::string::npos);
}

TEST_CASE("reference models by name") {
  for (const char* n : {"gm1", "sk1", "fe_sk1", "gm3", "degenerate", "identical_components", "constant_weight_skew"})
    CHECK_NOTHROW(reference_model(n));
  CHECK(reference_model("gm3").J() == 3);
  CHECK(!reference_model("fe_sk1").constant_weights());
}

TEST_CASE("simulate writes identical bytes for a seed") {
  TempDir dir;
  put(dir.file("c.json"), gm1_config().dump());
  CommandOptions o;
  o.config = dir.file("c.json");
  o.out = dir.file("a");
  cmd_simulate(o);
  o.out = dir.file("b");
  o.threads = 4;
  cmd_simulate(o);
  const std::string a = slurp(dir.file("a/data.csv")), b = slurp(dir.file("b/data.csv"));
  CHECK(a == b);
  CHECK(std::count(a.begin(), a.end(), '\n') == 101);
  CHECK(a.rfind("x1,z,label\n", 0) == 0);
  o.seed = 8;
  o.out = dir.file("c");
  cmd_simulate(o);
  CHECK(slurp(dir.file("c/data.csv")) != a);
}

TEST_CASE("simulate draws fixed-effects labels with x-dependent weights") {
  TempDir dir;
  json j = gm1_config();
  j["model"] = "fe_sk1";
  j["n"] = 20000;
  j["covariates"] = json{{"law", "grid"}, {"points", {{-1.0}, {1.0}}}};
  put(dir.file("c.json"), j.dump());
  CommandOptions o;
  o.config = dir.file("c.json");
  o.out = dir.path.string();
  cmd_simulate(o);
  const Dataset d = read_csv(dir.file("data.csv"));
  const auto v = d.observations();
  double lo = 0, hi = 0, nlo = 0, nhi = 0;
  for (std::size_t i = 0; i < d.n(); ++i) {
    const bool one = d.latent_labels()[i] == 1;
    if (v.x(i, 0) < 0) lo += one, ++nlo;
    else hi += one, ++nhi;
  }
  // lambda(-1) = 0.3, lambda(1) = 0.7; 0.02 is about 6 standard errors
  CHECK(std::abs(lo / nlo - 0.3) < 0.02);
  CHECK(std::abs(hi / nhi - 0.7) < 0.02);
}

TEST_CASE("estimate on the two-point toy") {
  TempDir dir;
  put(dir.file("d.csv"), "x1,z\n0,0\n0.5,1\n");
  json j = gm1_config();
  j["tuning"] = json{{"h_n", {0.1}}, {"t_n", 2.0}};
  put(dir.file("c.json"), j.dump());
  const int rc = cli({"estimate", "--config", dir.file("c.json"), "--data", dir.file("d.csv"), "--out", dir.path.string()});
  // delta is exact here; the series stage has no spread to work with
  CHECK(rc == kExitNumeric);
  TuningSchedule tun = default_schedule(read_csv(dir.file("d.csv")).observations(), parse_config(j).tuning);
  CHECK(std::abs(estimate_delta(read_csv(dir.file("d.csv")).observations(), std::vector<double>{0.0}, std::vector<double>{0.5}, tun) - 1.0) <
        1.4e-5);
}

TEST_CASE("estimate on a GM1 sample") {
  TempDir dir;
  json j = gm1_config();
  j["n"] = 8000;
  j["tuning"] = json{{"c_t", 1.0 / 1.5}, {"c_s", 2.0}};
  j["z_grid"] = json{{"lo", -2.0}, {"hi", 2.0}, {"points", 5}};
  put(dir.file("c.json"), j.dump());
  REQUIRE(cli({"simulate", "--config", dir.file("c.json"), "--out", dir.path.string()}) == kExitOk);
  REQUIRE(cli({"estimate", "--config", dir.file("c.json"), "--data", dir.file("data.csv"), "--out", dir.path.string(), "--project"}) ==
          kExitOk);
  const std::string text = slurp(dir.file("fit.csv"));
  const auto s = fit_scalars(text);
  CHECK(std::abs(std::stod(s.at("delta_hat")) - 1.0) < 0.3);
  CHECK(std::abs(std::stod(s.at("lambda_hat")) - 0.6) < 0.35);
  CHECK(text.find("z,F1_raw,F1_proj,F2_raw,F2_proj\n") != std::string::npos);
  std::istringstream in(text.substr(text.find("z,F1_raw")));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(rows == 5);
  CHECK(fs::exists(dir.file("warnings.txt")));
}

TEST_CASE("exit codes") {
  TempDir dir;
  put(dir.file("c.json"), gm1_config().dump());
  CHECK(cli({}) == kExitConfig);
  CHECK(cli({"simulate"}) == kExitConfig);
  CHECK(cli({"simulate", "--config", dir.file("missing.json")}) == kExitIo);
  put(dir.file("bad.json"), "{ not json");
  CHECK(cli({"simulate", "--config", dir.file("bad.json")}) == kExitConfig);
  json w = gm1_config();
  w["model"] = "nope";
  put(dir.file("w.json"), w.dump());
  CHECK(cli({"diagnose", "--config", dir.file("w.json"), "--out", dir.path.string()}) == kExitConfig);

  // data with two covariates against a one-covariate model
  put(dir.file("k2.csv"), "x1,x2,z\n0,0,1\n1,1,2\n");
  CHECK(cli({"estimate", "--config", dir.file("c.json"), "--data", dir.file("k2.csv"), "--out", dir.path.string()}) == kExitConfig);
  CHECK(cli({"estimate", "--config", dir.file("c.json"), "--data", dir.file("nothing.csv"), "--out", dir.path.string()}) == kExitIo);

  // every observation far from x0: the kernel window is empty
  put(dir.file("far.csv"), "x1,z\n40,1\n40.1,2\n40.2,0\n40.3,1\n");
  CHECK(cli({"estimate", "--config", dir.file("c.json"), "--data", dir.file("far.csv"), "--out", dir.path.string()}) == kExitNumeric);

  CHECK(exit_code_for(ErrorKind::SeriesBudget) == kExitNumeric);
  CHECK(exit_code_for(ErrorKind::IoError) == kExitIo);
  CHECK(exit_code_for(ErrorKind::ConfigError) == kExitConfig);
}

TEST_CASE("diagnose writes verdicts and evidence") {
  TempDir dir;
  put(dir.file("c.json"), gm1_config().dump());
  REQUIRE(cli({"diagnose", "--config", dir.file("c.json"), "--out", dir.path.string()}) == kExitOk);
  const json r = json::parse(slurp(dir.file("report.json")));
  std::map<std::string, std::string> v;
  for (const auto& e : r["verdicts"]) v[e["condition"]] = e["verdict"];
  CHECK(v["Cond1"] == "fails");
  CHECK(v["Cond3"] == "holds");
  CHECK(slurp(dir.file("evidence.csv")).find("Cond3,holds,") != std::string::npos);

  json d = gm1_config();
  d["model"] = "degenerate";
  put(dir.file("d.json"), d.dump());
  REQUIRE(cli({"diagnose", "--config", dir.file("d.json"), "--out", dir.file("deg")}) == kExitOk);
  const json rd = json::parse(slurp(dir.file("deg/report.json")));
  bool seen = false;
  for (const auto& e : rd["verdicts"]) {
    if (e["condition"] != "Cond1") continue;
    CHECK(e["verdict"] == "holds");
    for (const auto& [name, value] : e["evidence"].items())
      if (name.rfind("lambda_c(", 0) == 0) {
        seen = true;
        CHECK(std::abs(value.get<double>() - 1.0) < 1e-9);
      }
  }
  CHECK(seen);

  json g = gm1_config();
  g["model"] = "gm3";
  g["x0"] = {1.0};
  g["x1"] = {1.1};
  g["points"] = {{1.1}, {0.8}};
  put(dir.file("g.json"), g.dump());
  REQUIRE(cli({"diagnose", "--config", dir.file("g.json"), "--out", dir.file("gm3"), "--detect-j"}) == kExitOk);
  const json rg = json::parse(slurp(dir.file("gm3/report.json")));
  CHECK(rg["detect_j"]["J"] == 3);
}

TEST_CASE("one-replication report") {
  json j = gm1_config();
  j["design"] = json{{"n_grid", {2000}}, {"replications", 1}};
  j["mc_z"] = {0.0};
  const auto cfg = parse_config(j);
  const auto r = run_montecarlo(cfg);
  CHECK(r.estimands == std::vector<std::string>{"delta", "nabla", "lambda", "m1_x0", "m2_x0", "F1@0", "F2@0"});
  CHECK(r.rows.size() == r.estimands.size());
  CHECK(r.replications.size() == 1);
  for (const auto& row : r.rows) CHECK(row.count + row.failures == 1);
  CHECK(r.truth[0] == 1.0);
  CHECK(r.truth[1] == 0.5);
  CHECK(r.truth[2] == 0.6);
  CHECK(r.truth[5] == 0.5);
  std::ostringstream os;
  write_rates_csv(os, r);
  CHECK(os.str().rfind("estimand,n,statistic,value\ndelta,2000,bias,", 0) == 0);
  CHECK(os.str().find("delta,all,truth,1\n") != std::string::npos);
}

TEST_CASE("aggregation is an exact recomputation") {
  const Truth truth{{"a", "b"}, {1.0, -2.0}};
  std::vector<ReplicationRecord> recs{record(10, 0, {1.5, -2.0}), record(10, 1, {0.0, -1.0}), record(10, 2, {2.0, -2.5}),
                                      record(20, 0, {1.1, -2.1}), record(20, 1, {0.8, -1.7}),
                                      record(20, 2, {std::nan(""), std::nan("")}, "SeriesBudget")};
  const auto full = aggregate(truth, {10, 20}, recs);
  const auto& a10 = full.row("a", 10);
  CHECK(a10.count == 3);
  CHECK(std::abs(a10.bias - (0.5 - 1.0 + 1.0) / 3) < 1e-15);
  CHECK(std::abs(a10.rmse - std::sqrt((0.25 + 1.0 + 1.0) / 3)) < 1e-15);
  CHECK(a10.median_abs_error == 1.0);
  CHECK(full.row("a", 20).failures == 1);
  CHECK(full.row("a", 20).count == 2);
  const double r10 = a10.rmse, r20 = full.row("a", 20).rmse;
  CHECK(std::abs(full.slope("a") - (std::log(r20) - std::log(r10)) / std::log(2.0)) < 1e-12);

  // dropping any one replication changes only its own cell
  for (std::size_t drop = 0; drop < recs.size(); ++drop) {
    auto fewer = recs;
    fewer.erase(fewer.begin() + static_cast<long>(drop));
    const auto r = aggregate(truth, {10, 20}, fewer);
    for (const char* e : {"a", "b"}) {
      const std::size_t e_idx = std::string(e) == "a" ? 0 : 1;
      for (std::size_t n : {10u, 20u}) {
        std::vector<double> err;
        std::size_t fails = 0;
        for (const auto& rec : fewer)
          if (rec.n == n) {
            if (rec.status != "ok") ++fails;
            else err.push_back(rec.values[e_idx] - truth.values[e_idx]);
          }
        double s = 0, q = 0;
        for (double d : err) s += d, q += d * d;
        const auto& row = r.row(e, n);
        CHECK(row.count == err.size());
        CHECK(row.failures == fails);
        CHECK(std::abs(row.bias - s / err.size()) < 1e-15);
        CHECK(std::abs(row.rmse - std::sqrt(q / err.size())) < 1e-15);
      }
    }
  }
}

TEST_CASE("montecarlo is independent of threads") {
  json j = gm1_config();
  j["design"] = json{{"n_grid", {500, 1000}}, {"replications", 3}};
  const auto cfg = parse_config(j);
  auto text = [&](unsigned threads) {
    std::ostringstream a, b;
    const auto r = run_montecarlo(cfg, threads);
    write_rates_csv(a, r);
    write_replications_csv(b, r);
    return a.str() + b.str();
  };
  const std::string one = text(1);
  CHECK(one == text(3));
  // replication r at size index i uses split(split(seed, r), i)
  const auto r = run_montecarlo(cfg, 2);
  CHECK(r.replications[1].seed == Stream::split_key(Stream::split_key(7, 1), 0));
  CHECK(r.replications[3].seed == Stream::split_key(Stream::split_key(7, 0), 1));
  const auto again = run_replication(cfg, 1000, 0, r.replications[3].seed);
  CHECK(again.values.size() == r.replications[3].values.size());
  for (std::size_t i = 0; i < again.values.size(); ++i)
    CHECK((again.values[i] == r.replications[3].values[i] || (std::isnan(again.values[i]) && std::isnan(r.replications[3].values[i]))));
}

TEST_CASE("cli binary output does not depend on threads") {
  const char* bin = std::getenv("NPMIX_CLI");
  if (bin == nullptr) {
    MESSAGE("NPMIX_CLI not set; subprocess check skipped");
    return;
  }
  TempDir dir;
  put(dir.file("c.json"), gm1_config().dump());
  for (const char* t : {"1", "8"}) {
    const std::string cmd = std::string(bin) + " simulate --config " + dir.file("c.json") + " --out " + dir.file(t) + " --threads " + t + " > /dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
  }
  CHECK(slurp(dir.file("1/data.csv")) == slurp(dir.file("8/data.csv")));
  const std::string bad = std::string(bin) + " simulate --config " + dir.file("none.json") + " 2> /dev/null";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == kExitIo);
}
