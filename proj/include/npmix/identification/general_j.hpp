#pragma once

#include "npmix/hp.hpp"
#include "npmix/identification/jet.hpp"
#include "npmix/model/mixture.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace npmix {

inline constexpr int kMaxNestingDepth = 4;

struct GeneralJSettings {
  std::vector<double> level1_t{20, 40, 80, 160};
  std::vector<double> t_ladder{1.25, 2.5, 5, 10, 20, 40};
  int level1_nodes = 24;
  int nodes = 14;
  // x step h = h_scale (1 + |y|) / max(1, t / 10), halved x_levels - 1 times
  double h_scale = 1e-3;
  int x_levels = 6;
  // t step for the t-derivative: t_step * t, halved t_levels - 1 times
  double t_step = 0.125;
  int t_levels = 3;
  double snr_min = 1e4;
  double zero_tol = 1e-6;
  std::vector<double> detect_t{0.5, 1.0, 2.0};
};

// s(y) = m(y) - m(x_b) along the first covariate, held as a Chebyshev
// interpolant in extended precision.
class SlopeField {
 public:
  SlopeField() = default;
  // node_values at nodes(lo, hi, n).
  SlopeField(double lo, double hi, std::vector<hp::Real> node_values);
  static SlopeField from_function(double lo, double hi, int n, const std::function<hp::Real(const hp::Real&)>& f);
  static std::vector<hp::Real> nodes(double lo, double hi, int n);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int size() const { return static_cast<int>(coef_.front().size()); }
  hp::Real value(const hp::Real& y) const;
  // Taylor coefficients of s(y + h) in h.
  Jet jet(const hp::Real& y, int order) const;

  double t_used = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::infinity();

 private:
  double lo_ = 0.0, hi_ = 0.0;
  // coef_[d]: Chebyshev coefficients of the d-th derivative in u
  std::vector<std::vector<hp::Real>> coef_;
};

// m_j(y) - m_j(x_b) from the model's regression function.
SlopeField exact_slope_field(const MixtureModel& model, std::size_t j, std::span<const double> x_b, double lo, double hi, int n);

// Components sorted by dominance of M(t|x) as t -> +infinity.
std::vector<std::size_t> dominance_order(const MixtureModel& model, std::span<const double> x);

struct QValue {
  hp::Real value = 0;
  hp::Real noise = 0;
  hp::Real previous = 0;  // G_{k-1}, the function differentiated last
};

// Nested x-differentiation of t -> M(t|x) along the first covariate. Slope
// fields are recovered level by level; Q_k needs fields 1..k-1.
class QRecursion {
 public:
  QRecursion(const MixtureModel& model, std::span<const double> x_a, std::span<const double> x_b, GeneralJSettings settings = {});

  int levels() const { return static_cast<int>(fields_.size()); }
  const SlopeField& field(int k) const { return fields_.at(k - 1); }
  const GeneralJSettings& settings() const { return settings_; }
  double a() const { return x_a_[0]; }
  double b() const { return x_b_[0]; }
  // Interval holding every field of level >= 2.
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  // Replaces the recovered fields, e.g. by exact ones.
  void set_fields(std::vector<SlopeField> fields) { fields_ = std::move(fields); }
  // Recovers the next slope field. Throws IllConditioned when no t on the
  // ladder yields a signal above the differencing noise.
  const SlopeField& recover_next();

  // Q_1 = M(t|y).
  QValue Q(int k, double t, const hp::Real& y) const;

 private:
  hp::Real log_mgf(const hp::Real& t, const hp::Real& y) const;
  // Taylor jets of G_1 about y: best estimate and the previous Richardson
  // diagonal.
  std::pair<Jet, Jet> g1_jets(double t, const hp::Real& y, int order) const;
  Jet q_from_g1(const Jet& g1, int k, double t, const hp::Real& y, hp::Real* previous) const;
  SlopeField recover_level1() const;
  SlopeField recover_level(int k) const;
  SlopeField recover_level_derivative(int k) const;
  SlopeField recover_level_affine(int k) const;
  // Q_k at each point; clears *valid when a value is below the noise.
  std::vector<hp::Real> q_row(int k, double t, const std::vector<hp::Real>& pts, bool* valid) const;

  const MixtureModel& model_;
  std::vector<double> x_a_, x_b_;
  GeneralJSettings settings_;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<SlopeField> fields_;
};

// R_k^j(t, y) for 2 <= k <= j <= fields.size(), from slope fields 1..m.
// Entry [k][j]; other entries are NaN.
std::vector<std::vector<double>> r_factor_table(std::span<const SlopeField> fields, double t, double y);

struct QTableEntry {
  double value = 0.0;     // may overflow for large t
  double log_abs = 0.0;
  double rel_noise = 0.0;
};

struct QTable {
  std::vector<double> t_grid;
  // q[k-1][i] = Q_k(x_a, t_i)
  std::vector<std::vector<QTableEntry>> q;
  std::vector<double> field_residuals;
};

QTable q_recursion(const MixtureModel& model, std::span<const double> x_a, std::span<const double> x_b, int k_max,
                   std::span<const double> t_grid, const GeneralJSettings& settings = {});

struct SlopeRecoveryJ {
  // m_k(x_a) - m_k(x_b), components in dominance order
  std::vector<double> slopes;
  std::vector<double> residuals;
  std::vector<double> t_used;
};

SlopeRecoveryJ slope_recovery_J(const MixtureModel& model, std::span<const double> x_a, std::span<const double> x_b, int J,
                                const GeneralJSettings& settings = {});

struct JIdentificationResult {
  int J = 0;
  std::vector<double> x0;
  std::vector<std::vector<double>> points;
  // slopes[i][j] = m_j(x0) - m_j(X_i)
  std::vector<std::vector<double>> slopes;
  bool slopes_injected = false;
  std::vector<double> lambda;
  std::vector<double> levels;  // m_j(x0)
  double det_A = 0.0;          // row-normalized
  double det_B = 0.0;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> M;  // M[j][i] = M_j(t_i)
  std::vector<double> det_D;
  std::vector<double> skipped_t;
};

// J = points.size() + 1. slopes, when given, replace the recovered slope
// matrix.
JIdentificationResult recover_J_parameters(const MixtureModel& model, std::span<const double> x0,
                                           const std::vector<std::vector<double>>& points, std::span<const double> t_grid,
                                           const GeneralJSettings& settings = {},
                                           std::optional<std::vector<std::vector<double>>> slopes = std::nullopt);

struct DetectJResult {
  int J = 0;
  bool saturated = false;
  // nu[j-2][i] = |Q_j(x_a, t_i)| / (t_i |G_{j-1}(x_a, t_i)|)
  std::vector<std::vector<double>> nu;
  std::vector<std::string> warnings;
};

DetectJResult detect_J(const MixtureModel& model, std::span<const double> x_a, std::span<const double> x_b, int j_max,
                       const GeneralJSettings& settings = {});

}  // namespace npmix
