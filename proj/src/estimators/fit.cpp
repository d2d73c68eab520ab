#include "npmix/estimators/fit.hpp"

#include "npmix/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace npmix {

namespace {

bool same_point(std::span<const double> a, std::span<const double> b) { return std::equal(a.begin(), a.end(), b.begin(), b.end()); }

void check_overflow(const ObservationView& data, double t) {
  double zmax = 0.0;
  for (double v : data.z()) zmax = std::max(zmax, std::abs(v));
  if (t * zmax > 700.0) fail(ErrorKind::OverflowBudget, "t_n * max|z| exceeds 700");
}

struct SeriesFrame {
  SeriesSetup setup;
  double m1, m2;  // levels at the series base point
};

SeriesFrame frame_of(const MixtureFit& fit) {
  SeriesFrame f{series_setup(fit.slopes.delta_hat, fit.slopes.nabla_hat, fit.lambda_hat, fit.m1_hat_x0, fit.m2_hat_x0), 0.0, 0.0};
  f.m2 = f.setup.params.m2_x0;
  f.m1 = f.setup.params.g_x0 + f.m2;
  return f;
}

void check_budget(const TransformSource& src, const SeriesParams& sp, std::span<const double> z_grid, double slack_cfg, int p) {
  const auto range = src.support();
  if (!range || z_grid.empty()) return;
  const double slack = slack_cfg < 0.0 ? range->second - range->first : slack_cfg;
  const double zmax = *std::max_element(z_grid.begin(), z_grid.end());
  const double reach = zmax + p * sp.delta + std::max(sp.m1_x1 - sp.g_x0, sp.m2_x0);
  if (reach > range->second + slack)
    fail(ErrorKind::SeriesBudget, "series arguments reach " + format_double(reach) + ", beyond data maximum " +
                                      format_double(range->second) + " plus slack " + format_double(slack));
}

std::vector<double> f2_grid(const TransformSource& base, const SeriesFrame& f, std::span<const double> z_grid, int p) {
  const SwappedSource swapped(base);
  const TransformSource& src = f.setup.swapped ? static_cast<const TransformSource&>(swapped) : base;
  std::vector<double> out;
  out.reserve(z_grid.size());
  for (double z : z_grid) out.push_back(f2_series(src, f.setup.params, z, p));
  return out;
}

std::vector<double> f1_grid(const TransformSource& base, const SeriesFrame& f, std::span<const double> z_grid, int p) {
  const SwappedSource swapped(base);
  const TransformSource& src = f.setup.swapped ? static_cast<const TransformSource&>(swapped) : base;
  std::vector<double> out;
  out.reserve(z_grid.size());
  for (double z : z_grid) out.push_back(f1_from(src, f.setup.params, f.m1, f.m2, z, p));
  return out;
}

}  // namespace

std::vector<double> estimate_F2(const ObservationView& data, const MixtureFit& fit, std::span<const double> z_grid,
                                const TuningSchedule& tuning, KernelFamily family) {
  const SampleSource src(data, fit.x0, fit.x1, tuning, family);
  const SeriesFrame f = frame_of(fit);
  check_budget(src, f.setup.params, z_grid, tuning.series_slack, tuning.p_n);
  return f2_grid(src, f, z_grid, tuning.p_n);
}

std::vector<double> estimate_F1(const ObservationView& data, const MixtureFit& fit, std::span<const double> z_grid,
                                const TuningSchedule& tuning, KernelFamily family) {
  const SampleSource src(data, fit.x0, fit.x1, tuning, family);
  const SeriesFrame f = frame_of(fit);
  check_budget(src, f.setup.params, z_grid, tuning.series_slack, tuning.p_n);
  return f1_grid(src, f, z_grid, tuning.p_n);
}

MixtureFit fit_mixture(const ObservationView& data, std::span<const double> x0, std::span<const double> x1, const TuningSchedule& tuning,
                       std::span<const double> z_grid, const FitOptions& opts) {
  if (x0.size() != data.k() || x1.size() != data.k()) fail(ErrorKind::DomainError, "evaluation points must match the covariate dimension");
  if (same_point(x0, x1)) fail(ErrorKind::DomainError, "x1 must differ from x0");
  tuning.validate(data.k());
  check_overflow(data, tuning.t_n);

  MixtureFit fit;
  fit.x0.assign(x0.begin(), x0.end());
  fit.x1.assign(x1.begin(), x1.end());
  fit.p_n = tuning.p_n;
  fit.z_grid.assign(z_grid.begin(), z_grid.end());

  const SampleSource src(data, x0, x1, tuning, opts.family);
  for (int p = 0; p < 2; ++p) {
    if (src.mgf_window(p).effective_count() < 10.0)
      fit.warnings.push_back("few effective observations in the MGF window at point " + std::to_string(p));
  }

  fit.slopes.delta_hat = delta_from(src, tuning.t_n);
  const NablaResult nb = nabla_from(src, tuning.s_n, tuning.a_n);
  fit.slopes.nabla_hat = nb.value;
  fit.slopes.branch_ok = nb.branch_ok;
  fit.slopes.nabla_noise = nb.noise;
  for (int p = 0; p < 2; ++p) {
    const double m = std::min(std::abs(src.cf(p, tuning.s_n).value()), std::abs(src.cf(p, tuning.s_n + tuning.a_n).value()));
    (p == 0 ? fit.slopes.cf_modulus_x0 : fit.slopes.cf_modulus_x1) = m;
  }
  if (!nb.branch_ok) fail(ErrorKind::BranchAmbiguity, "|a_n * Nabla| = " + format_double(std::abs(tuning.a_n * nb.value)) + " too close to pi");

  const double sep = std::abs(fit.slopes.delta_hat - fit.slopes.nabla_hat);
  if (sep < 10.0 * kSeparationFloor) fit.warnings.push_back("near-parallel slopes: |Delta - Nabla| = " + format_double(sep));

  const LambdaResult lr = lambda_from(src, fit.slopes.delta_hat, fit.slopes.nabla_hat);
  fit.lambda_hat = lr.value;
  fit.lambda_clamped = lr.clamped;
  if (lr.clamped) fit.warnings.push_back("lambda clamped to " + format_double(lr.value));

  const Levels lv = levels_from(src, fit.slopes.delta_hat, fit.slopes.nabla_hat, fit.lambda_hat);
  fit.C_hat = lv.C;
  fit.m1_hat_x0 = lv.m1_x0;
  fit.m2_hat_x0 = lv.m2_x0;

  const SeriesFrame f = frame_of(fit);
  fit.swapped = f.setup.swapped;
  if (fit.swapped) fit.warnings.push_back("Delta - Nabla < 0: series evaluated with x0 and x1 exchanged");
  check_budget(src, f.setup.params, z_grid, tuning.series_slack, tuning.p_n);
  fit.F2_raw = f2_grid(src, f, z_grid, tuning.p_n);
  fit.F1_raw = f1_grid(src, f, z_grid, tuning.p_n);
  if (fit.lambda_clamped && fit.lambda_hat <= kLambdaMin) fit.warnings.push_back("F1 amplified by 1/lambda at the clamp floor");

  auto out_of_range = [&](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [&](double u) { return !(u >= -opts.grid_tolerance && u <= 1.0 + opts.grid_tolerance); });
  };
  if (out_of_range(fit.F1_raw)) fit.warnings.push_back("raw F1 leaves [0, 1] beyond tolerance");
  if (out_of_range(fit.F2_raw)) fit.warnings.push_back("raw F2 leaves [0, 1] beyond tolerance");

  if (opts.project) {
    fit.F1_proj = monotone_projection(fit.F1_raw);
    fit.F2_proj = monotone_projection(fit.F2_raw);
  }
  return fit;
}

void write_fit_csv(const MixtureFit& fit, std::ostream& out) {
  auto point = [](const std::vector<double>& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ";" : "") + format_double(x[i]);
    return s;
  };
  out << "key,value\n";
  out << "x0," << point(fit.x0) << "\n";
  out << "x1," << point(fit.x1) << "\n";
  out << "delta_hat," << format_double(fit.slopes.delta_hat) << "\n";
  out << "nabla_hat," << format_double(fit.slopes.nabla_hat) << "\n";
  out << "branch_ok," << (fit.slopes.branch_ok ? 1 : 0) << "\n";
  out << "nabla_noise," << format_double(fit.slopes.nabla_noise) << "\n";
  out << "lambda_hat," << format_double(fit.lambda_hat) << "\n";
  out << "lambda_clamped," << (fit.lambda_clamped ? 1 : 0) << "\n";
  out << "C_hat," << format_double(fit.C_hat) << "\n";
  out << "m1_hat_x0," << format_double(fit.m1_hat_x0) << "\n";
  out << "m2_hat_x0," << format_double(fit.m2_hat_x0) << "\n";
  out << "swapped," << (fit.swapped ? 1 : 0) << "\n";
  out << "p_n," << fit.p_n << "\n";
  out << "warnings," << fit.warnings.size() << "\n";
  out << "\n";
  out << "z,F1_raw,F1_proj,F2_raw,F2_proj\n";
  for (std::size_t i = 0; i < fit.z_grid.size(); ++i) {
    out << format_double(fit.z_grid[i]) << ',' << format_double(fit.F1_raw[i]) << ','
        << (fit.projected() ? format_double(fit.F1_proj[i]) : std::string()) << ',' << format_double(fit.F2_raw[i]) << ','
        << (fit.projected() ? format_double(fit.F2_proj[i]) : std::string()) << '\n';
  }
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) fail(ErrorKind::ConfigError, "grid needs at least two points and hi > lo");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

}  // namespace npmix
