#include "npmix/harness/commands.hpp"

#include "npmix/dgp/simulate.hpp"
#include "npmix/error.hpp"
#include "npmix/estimators/fit.hpp"
#include "npmix/harness/montecarlo.hpp"
#include "npmix/identification/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace npmix {

namespace {

namespace fs = std::filesystem;

ExperimentConfig config_for(const CommandOptions& opts) {
  if (opts.config.empty()) fail(ErrorKind::ConfigError, "--config is required");
  ExperimentConfig cfg = load_config(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

std::string out_path(const CommandOptions& opts, const std::string& name) {
  std::error_code ec;
  fs::create_directories(opts.out, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create output directory " + opts.out + ": " + ec.message());
  return (fs::path(opts.out) / name).string();
}

template <class Fn>
std::string write_file(const CommandOptions& opts, const std::string& name, Fn&& body) {
  const std::string path = out_path(opts, name);
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  body(os);
  os.flush();
  if (!os) fail(ErrorKind::IoError, "write to " + path + " failed");
  return path;
}

}  // namespace

std::vector<std::string> cmd_simulate(const CommandOptions& opts) {
  const ExperimentConfig cfg = config_for(opts);
  SimulationDesign design;
  design.n = cfg.n;
  design.law = cfg.covariates;
  design.seed = cfg.seed;
  const Dataset data = simulate(cfg.model, design, opts.threads);
  return {write_file(opts, "data.csv", [&](std::ostream& os) { write_csv(data, os); })};
}

std::vector<std::string> cmd_estimate(const CommandOptions& opts) {
  const ExperimentConfig cfg = config_for(opts);
  if (opts.data.empty()) fail(ErrorKind::ConfigError, "--data is required for estimate");
  const Dataset data = read_csv(opts.data);
  if (data.k() != cfg.model.dim())
    fail(ErrorKind::ConfigError, "data file has " + std::to_string(data.k()) + " covariates but the config model has " +
                                     std::to_string(cfg.model.dim()));
  const auto view = data.observations();
  const TuningSchedule tuning = default_schedule(view, cfg.tuning);
  const ZGridSpec g = cfg.z_grid.value_or(ZGridSpec{});
  FitOptions fo;
  fo.family = cfg.kernel;
  fo.project = opts.project;
  const MixtureFit fit = fit_mixture(view, cfg.x0, cfg.x1, tuning, linear_grid(g.lo, g.hi, g.points), fo);
  std::vector<std::string> out;
  out.push_back(write_file(opts, "fit.csv", [&](std::ostream& os) { write_fit_csv(fit, os); }));
  out.push_back(write_file(opts, "warnings.txt", [&](std::ostream& os) {
    for (const auto& w : fit.warnings) os << w << '\n';
  }));
  return out;
}

std::vector<std::string> cmd_diagnose(const CommandOptions& opts) {
  const ExperimentConfig cfg = config_for(opts);
  DiagnoseOptions d = cfg.diagnose;
  d.detect_j = d.detect_j || opts.detect_j;
  const DiagnosisReport r = diagnose(cfg.model, d);
  std::vector<std::string> out;
  out.push_back(write_file(opts, "report.json", [&](std::ostream& os) { os << to_json(r, d).dump(2) << '\n'; }));
  out.push_back(write_file(opts, "evidence.csv", [&](std::ostream& os) { write_evidence_csv(os, r); }));
  return out;
}

std::vector<std::string> cmd_montecarlo(const CommandOptions& opts) {
  const ExperimentConfig cfg = config_for(opts);
  const RateReport report = run_montecarlo(cfg, opts.threads);
  std::vector<std::string> out;
  out.push_back(write_file(opts, "rates.csv", [&](std::ostream& os) { write_rates_csv(os, report); }));
  out.push_back(write_file(opts, "replications.csv", [&](std::ostream& os) { write_replications_csv(os, report); }));
  return out;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
      return kExitConfig;
    case ErrorKind::IoError:
      return kExitIo;
    default:
      return kExitNumeric;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Nonparametric finite mixture regression: identification oracle and estimator"};
  app.require_subcommand(1);
  CommandOptions opts;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON config file")->required();
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  };
  CLI::App* simulate = app.add_subcommand("simulate", "draw a dataset from the config model");
  common(simulate);
  CLI::App* estimate = app.add_subcommand("estimate", "fit the two-component estimator to a dataset");
  common(estimate);
  estimate->add_option("--data", opts.data, "dataset CSV")->required();
  estimate->add_flag("--project", opts.project, "monotone projection of the component CDFs");
  CLI::App* diagnose = app.add_subcommand("diagnose", "identification verdicts and population recovery");
  common(diagnose);
  diagnose->add_flag("--detect-j", opts.detect_j, "estimate the number of components");
  CLI::App* montecarlo = app.add_subcommand("montecarlo", "replicated estimation across sample sizes");
  common(montecarlo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  for (CLI::App* sub : {simulate, estimate, diagnose, montecarlo})
    if (sub->count("--seed")) opts.seed = seed;

  try {
    std::vector<std::string> written;
    if (*simulate) written = cmd_simulate(opts);
    else if (*estimate) written = cmd_estimate(opts);
    else if (*diagnose) written = cmd_diagnose(opts);
    else written = cmd_montecarlo(opts);
    for (const auto& p : written) std::cout << p << '\n';
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace npmix
