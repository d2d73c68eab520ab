#include "npmix/estimators/tuning.hpp"

#include "npmix/error.hpp"
#include "npmix/smoothing/nw.hpp"

#include <cmath>
#include <numeric>

namespace npmix {

void TuningSchedule::validate(std::size_t k) const {
  auto check_bw = [k](const std::vector<double>& h, const char* name) {
    if (h.size() != k) fail(ErrorKind::ConfigError, std::string(name) + " needs one bandwidth per covariate");
    for (double v : h)
      if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::ConfigError, std::string(name) + " bandwidths must be positive");
  };
  check_bw(h_n, "h_n");
  check_bw(b_n, "b_n");
  check_bw(c_n, "c_n");
  check_bw(d_n, "d_n");
  if (!(a_n > 0.0)) fail(ErrorKind::ConfigError, "a_n must be positive");
  if (!(t_n > 0.0) || !(s_n > 0.0)) fail(ErrorKind::ConfigError, "t_n and s_n must be positive");
  if (p_n < 0) fail(ErrorKind::ConfigError, "p_n must be nonnegative");
  for (std::size_t i = 0; i < c_seq.size(); ++i) {
    if (!(c_seq[i] > 0.0)) fail(ErrorKind::ConfigError, "c_seq entries must be positive");
    if (i > 0 && !(c_seq[i] < c_seq[i - 1])) fail(ErrorKind::ConfigError, "c_seq must be decreasing");
  }
}

TuningSchedule default_schedule(const ObservationView& data, const ScheduleOptions& opts) {
  const std::size_t k = data.k();
  if (data.n() < 2) fail(ErrorKind::DomainError, "schedule needs at least two observations");
  const double n = static_cast<double>(data.n());
  const double logn = std::log(n);
  const auto z = data.z();
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  const double sd_z = std::sqrt(ss / (n - 1.0));
  const double inv_sd = sd_z > 0.0 ? 1.0 / sd_z : 1.0;

  TuningSchedule s;
  const double base = -1.0 / (static_cast<double>(k) + 4.0);
  s.h_n = opts.h_n.value_or(std::vector<double>(k, opts.bandwidth_scale * std::pow(n, base + opts.epsilon)));
  s.b_n = opts.b_n.value_or(std::vector<double>(k, opts.bandwidth_scale * std::pow(n, base + opts.beta)));
  const auto rot = rule_of_thumb_bandwidth(data);
  s.c_n = opts.c_n.value_or(rot);
  s.d_n = opts.d_n.value_or(rot);
  s.t_n = opts.t_n.value_or(opts.c_t.value_or(inv_sd) * std::sqrt(opts.epsilon * logn));
  s.s_n = opts.s_n.value_or(opts.c_s.value_or(inv_sd) * std::sqrt(opts.beta * logn));
  s.a_n = opts.a_n.value_or(opts.shrink_a ? opts.a / std::sqrt(logn) : opts.a);
  s.p_n = opts.p_n.value_or(static_cast<int>(std::ceil(2.0 * logn)));
  s.validate(k);
  return s;
}

}  // namespace npmix
