#pragma once

#include "npmix/dgp/dataset.hpp"

#include <optional>
#include <vector>

namespace npmix {

// Bandwidths and divergence sequences for one sample size.
struct TuningSchedule {
  std::vector<double> h_n;  // MGF regressions
  std::vector<double> b_n;  // CF regressions
  std::vector<double> c_n;  // CDF regressions (compact kernel)
  std::vector<double> d_n;  // mean and second-moment regressions
  double t_n = 1.0;         // MGF argument
  double s_n = 1.0;         // CF argument
  double a_n = 0.1;         // CF increment
  int p_n = 0;              // series truncation
  std::vector<double> c_seq{1e-1, 1e-2, 1e-3, 1e-4};
  double series_slack = -1.0;  // < 0: data range span

  void validate(std::size_t k) const;
};

struct ScheduleOptions {
  double epsilon = 0.1;
  double beta = 0.1;
  std::optional<double> c_t;  // default 1 / sd(z)
  std::optional<double> c_s;  // default 1 / sd(z)
  double a = 0.1;
  bool shrink_a = false;      // a_n = a / sqrt(log n)
  double bandwidth_scale = 1.0;
  std::optional<std::vector<double>> h_n, b_n, c_n, d_n;
  std::optional<double> t_n, s_n, a_n;
  std::optional<int> p_n;
};

// h_n = n^(-1/(k+4)+eps), b_n = n^(-1/(k+4)+beta), t_n = c_t sqrt(eps log n),
// s_n = c_s sqrt(beta log n), p_n = ceil(2 log n); c_n and d_n follow the
// rule of thumb. Explicit overrides in `opts` win.
TuningSchedule default_schedule(const ObservationView& data, const ScheduleOptions& opts = {});

}  // namespace npmix
