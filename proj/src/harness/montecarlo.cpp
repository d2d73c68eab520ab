#include "npmix/harness/montecarlo.hpp"

#include "npmix/dgp/simulate.hpp"
#include "npmix/error.hpp"
#include "npmix/estimators/fit.hpp"
#include "npmix/identification/general_j.hpp"
#include "npmix/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace npmix {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

const RateRow& RateReport::row(const std::string& estimand, std::size_t n) const {
  for (const auto& r : rows)
    if (r.estimand == estimand && r.n == n) return r;
  fail(ErrorKind::DomainError, "no rate row for " + estimand + " at n=" + std::to_string(n));
}

double RateReport::slope(const std::string& estimand) const {
  for (std::size_t i = 0; i < estimands.size(); ++i)
    if (estimands[i] == estimand) return loglog_slope[i];
  fail(ErrorKind::DomainError, "unknown estimand " + estimand);
}

Truth population_truth(const ExperimentConfig& cfg) {
  const MixtureModel& m = cfg.model;
  if (m.J() != 2 || !m.constant_weights())
    fail(ErrorKind::ConfigError, "model: the estimator needs two components with constant weights");
  const auto order = dominance_order(m, cfg.x0);
  const std::size_t c1 = order[0], c2 = order[1];
  Truth t;
  t.estimands = {"delta", "nabla", "lambda", "m1_x0", "m2_x0"};
  t.values = {m.m(c1, cfg.x1) - m.m(c1, cfg.x0), m.m(c2, cfg.x1) - m.m(c2, cfg.x0), m.weight(c1, cfg.x0), m.m(c1, cfg.x0),
              m.m(c2, cfg.x0)};
  for (double z : cfg.mc_z) {
    t.estimands.push_back("F1@" + format_double(z));
    t.values.push_back(m.component(c1).error->cdf(z));
  }
  for (double z : cfg.mc_z) {
    t.estimands.push_back("F2@" + format_double(z));
    t.values.push_back(m.component(c2).error->cdf(z));
  }
  return t;
}

ReplicationRecord run_replication(const ExperimentConfig& cfg, std::size_t n, std::size_t rep, std::uint64_t seed) {
  ReplicationRecord r;
  r.n = n;
  r.rep = rep;
  r.seed = seed;
  const std::size_t count = 5 + 2 * cfg.mc_z.size();
  try {
    SimulationDesign design;
    design.n = n;
    design.law = cfg.covariates;
    design.seed = seed;
    design.record_labels = false;
    const Dataset data = simulate(cfg.model, design, 1);
    const auto view = data.observations();
    const TuningSchedule tuning = default_schedule(view, cfg.tuning);
    FitOptions opts;
    opts.family = cfg.kernel;
    const MixtureFit fit = fit_mixture(view, cfg.x0, cfg.x1, tuning, cfg.mc_z, opts);
    r.values = {fit.slopes.delta_hat, fit.slopes.nabla_hat, fit.lambda_hat, fit.m1_hat_x0, fit.m2_hat_x0};
    r.values.insert(r.values.end(), fit.F1_raw.begin(), fit.F1_raw.end());
    r.values.insert(r.values.end(), fit.F2_raw.begin(), fit.F2_raw.end());
  } catch (const Error& e) {
    r.status = std::string(to_string(e.kind()));
    r.message = e.what();
    r.values.assign(count, kNaN);
  }
  return r;
}

RateReport aggregate(const Truth& truth, const std::vector<std::size_t>& n_grid, std::vector<ReplicationRecord> records) {
  RateReport out;
  out.estimands = truth.estimands;
  out.truth = truth.values;
  out.n_grid = n_grid;
  for (std::size_t e = 0; e < truth.estimands.size(); ++e) {
    std::vector<double> xs, ys;
    for (std::size_t n : n_grid) {
      RateRow row;
      row.estimand = truth.estimands[e];
      row.n = n;
      std::vector<double> err;
      for (const auto& r : records) {
        if (r.n != n) continue;
        if (r.status != "ok" || !std::isfinite(r.values.at(e))) {
          ++row.failures;
          continue;
        }
        err.push_back(r.values[e] - truth.values[e]);
      }
      row.count = err.size();
      if (err.empty()) {
        row.bias = row.median_abs_error = row.rmse = kNaN;
      } else {
        double sum = 0.0, sq = 0.0;
        std::vector<double> abs_err;
        for (double d : err) {
          sum += d;
          sq += d * d;
          abs_err.push_back(std::abs(d));
        }
        row.bias = sum / err.size();
        row.rmse = std::sqrt(sq / err.size());
        row.median_abs_error = median(abs_err);
        if (row.rmse > 0.0) {
          xs.push_back(std::log(static_cast<double>(n)));
          ys.push_back(std::log(row.rmse));
        }
      }
      out.rows.push_back(row);
    }
    double slope = kNaN;
    if (xs.size() >= 2) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
      }
      mx /= xs.size();
      my /= ys.size();
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      slope = sxy / sxx;
    }
    out.loglog_slope.push_back(slope);
  }
  out.replications = std::move(records);
  return out;
}

RateReport run_montecarlo(const ExperimentConfig& cfg, unsigned threads) {
  const Truth truth = population_truth(cfg);
  const std::size_t reps = cfg.replications, sizes = cfg.n_grid.size();
  std::vector<ReplicationRecord> records(reps * sizes);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < records.size(); task = next++) {
      const std::size_t rep = task / sizes, i = task % sizes;
      const std::uint64_t seed = Stream::split_key(Stream::split_key(cfg.seed, rep), i);
      records[task] = run_replication(cfg, cfg.n_grid[i], rep, seed);
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(records.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  // n-major order for the replication table
  std::vector<ReplicationRecord> ordered;
  ordered.reserve(records.size());
  for (std::size_t i = 0; i < sizes; ++i)
    for (std::size_t rep = 0; rep < reps; ++rep) ordered.push_back(std::move(records[rep * sizes + i]));
  return aggregate(truth, cfg.n_grid, std::move(ordered));
}

void write_rates_csv(std::ostream& os, const RateReport& report) {
  os << "estimand,n,statistic,value\n";
  for (const auto& r : report.rows) {
    const std::string head = r.estimand + "," + std::to_string(r.n) + ",";
    os << head << "bias," << csv_cell(r.bias) << '\n';
    os << head << "median_abs_error," << csv_cell(r.median_abs_error) << '\n';
    os << head << "rmse," << csv_cell(r.rmse) << '\n';
    os << head << "replications," << r.count << '\n';
    os << head << "failures," << r.failures << '\n';
  }
  for (std::size_t e = 0; e < report.estimands.size(); ++e) {
    os << report.estimands[e] << ",all,truth," << csv_cell(report.truth[e]) << '\n';
    os << report.estimands[e] << ",all,loglog_rmse_slope," << csv_cell(report.loglog_slope[e]) << '\n';
  }
}

void write_replications_csv(std::ostream& os, const RateReport& report) {
  os << "n,rep,seed,status";
  for (const auto& e : report.estimands) os << ',' << e;
  os << ",message\n";
  for (const auto& r : report.replications) {
    os << r.n << ',' << r.rep << ',' << r.seed << ',' << r.status;
    for (double v : r.values) os << ',' << csv_cell(v);
    os << ',' << csv_text(r.message) << '\n';
  }
}

}  // namespace npmix
