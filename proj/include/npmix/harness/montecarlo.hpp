#pragma once

#include "npmix/harness/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace npmix {

struct ReplicationRecord {
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or the error kind
  std::string message;
  std::vector<double> values;  // one per estimand, NaN on failure
};

struct RateRow {
  std::string estimand;
  std::size_t n = 0;
  std::size_t count = 0;     // successful replications
  std::size_t failures = 0;
  double bias = 0.0;
  double median_abs_error = 0.0;
  double rmse = 0.0;
};

struct RateReport {
  std::vector<std::string> estimands;
  std::vector<double> truth;
  std::vector<std::size_t> n_grid;
  std::vector<RateRow> rows;           // estimand-major, n ascending
  std::vector<double> loglog_slope;    // least-squares slope of log RMSE on log n
  std::vector<ReplicationRecord> replications;

  const RateRow& row(const std::string& estimand, std::size_t n) const;
  double slope(const std::string& estimand) const;
};

struct Truth {
  std::vector<std::string> estimands;
  std::vector<double> values;
};

// delta, nabla, lambda, m1_x0, m2_x0, then F1@z and F2@z for each mc_z;
// component 1 dominates M(t|x0) as t -> +infinity.
Truth population_truth(const ExperimentConfig& cfg);

// Per-replication values for one simulated sample.
ReplicationRecord run_replication(const ExperimentConfig& cfg, std::size_t n, std::size_t rep, std::uint64_t seed);

// Replication r uses the stream key split(seed, r); sample size index i
// within it uses split(key, i). Results do not depend on `threads`.
RateReport run_montecarlo(const ExperimentConfig& cfg, unsigned threads = 1);

// Statistics from a fixed set of replication records.
RateReport aggregate(const Truth& truth, const std::vector<std::size_t>& n_grid, std::vector<ReplicationRecord> records);

// estimand,n,statistic,value
void write_rates_csv(std::ostream& os, const RateReport& report);
// n,rep,seed,status,<estimands...>,message
void write_replications_csv(std::ostream& os, const RateReport& report);

}  // namespace npmix
