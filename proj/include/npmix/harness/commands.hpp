#pragma once

#include "npmix/error.hpp"
#include "npmix/harness/config.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace npmix {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitIo = 4 };

struct CommandOptions {
  std::string config;
  std::string data;              // estimate only
  std::string out = ".";         // output directory
  std::optional<std::uint64_t> seed;
  bool project = false;
  bool detect_j = false;
  unsigned threads = 1;
};

// Each command writes fixed file names under opts.out and returns their paths.
// simulate:   data.csv
// estimate:   fit.csv, warnings.txt
// diagnose:   report.json, evidence.csv
// montecarlo: rates.csv, replications.csv
std::vector<std::string> cmd_simulate(const CommandOptions& opts);
std::vector<std::string> cmd_estimate(const CommandOptions& opts);
std::vector<std::string> cmd_diagnose(const CommandOptions& opts);
std::vector<std::string> cmd_montecarlo(const CommandOptions& opts);

int exit_code_for(ErrorKind kind);

// Parses argv and dispatches; errors are reported on stderr and mapped to
// exit codes.
int run_cli(int argc, char** argv);

}  // namespace npmix
