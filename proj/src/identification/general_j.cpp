#include "npmix/identification/general_j.hpp"

#include "npmix/error.hpp"
#include "npmix/identification/two_component.hpp"
#include "npmix/model/population.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace npmix {

namespace {

using hp::Real;

double dbl(const Real& v) { return hp::to_double(v); }

Real hp_abs(const Real& v) { return v < 0 ? Real(-v) : v; }

// Richardson extrapolation of an O(h^2) sequence with h halved per row.
// Returns the final diagonal and the one before it.
std::pair<Real, Real> richardson(std::vector<Real> row) {
  const std::size_t n = row.size();
  std::vector<std::vector<Real>> table(n);
  for (std::size_t l = 0; l < n; ++l) {
    table[l].resize(l + 1);
    table[l][0] = row[l];
    Real f = 1;
    for (std::size_t p = 1; p <= l; ++p) {
      f *= 4;
      table[l][p] = (f * table[l][p - 1] - table[l - 1][p - 1]) / (f - 1);
    }
  }
  if (n == 1) return {table[0][0], table[0][0]};
  return {table[n - 1][n - 1], table[n - 2][n - 2]};
}

// R[h][j] for 2 <= h <= j <= m from slope jets S[1..m] (S[0] unused).
std::vector<std::vector<Jet>> r_jets(const std::vector<Jet>& S, const Real& t) {
  const std::size_t m = S.size() - 1;
  std::vector<std::vector<Jet>> R(m + 1, std::vector<Jet>(m + 1));
  if (m < 2) return R;
  for (std::size_t j = 2; j <= m; ++j) R[2][j] = t * (S[j] - S[1]).derivative();
  for (std::size_t h = 2; h < m; ++h) {
    for (std::size_t j = h + 1; j <= m; ++j) {
      const Jet ratio = R[h][j] / R[h][h];
      R[h + 1][j] = ratio.derivative() + t * (ratio * (S[j] - S[h]).derivative());
    }
  }
  return R;
}

std::vector<Jet> slope_jets(std::span<const SlopeField> fields, const Real& y, int order) {
  std::vector<Jet> S(fields.size() + 1);
  for (std::size_t j = 0; j < fields.size(); ++j) S[j + 1] = fields[j].jet(y, order);
  return S;
}

double row_normalized_det(const Eigen::MatrixXd& m) {
  double norms = 1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) norms *= m.row(i).norm();
  if (norms == 0.0) return 0.0;
  return m.determinant() / norms;
}

std::string format_det(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

// SlopeField

std::vector<Real> SlopeField::nodes(double lo, double hi, int n) {
  std::vector<Real> y(n);
  const Real mid = (Real(lo) + Real(hi)) / 2, half = (Real(hi) - Real(lo)) / 2;
  for (int i = 0; i < n; ++i) y[i] = mid + half * cos(hp::pi() * (i + Real(0.5)) / n);
  return y;
}

SlopeField::SlopeField(double lo, double hi, std::vector<Real> v) : lo_(lo), hi_(hi) {
  const int n = static_cast<int>(v.size());
  if (n < 2 || !(hi > lo)) fail(ErrorKind::DomainError, "slope field needs two nodes on a proper interval");
  std::vector<Real> c(n, Real(0));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) c[k] += v[i] * cos(hp::pi() * k * (i + Real(0.5)) / n);
    c[k] *= Real(2) / n;
  }
  coef_.push_back(std::move(c));
  for (int d = 1; d < kMaxNestingDepth; ++d) {
    const auto& f = coef_.back();
    std::vector<Real> g(n + 1, Real(0));
    for (int k = n - 1; k >= 1; --k) g[k - 1] = g[k + 1] + 2 * k * f[k];
    g.resize(n);
    coef_.push_back(std::move(g));
  }
}

SlopeField SlopeField::from_function(double lo, double hi, int n, const std::function<Real(const Real&)>& f) {
  std::vector<Real> v;
  for (const auto& y : nodes(lo, hi, n)) v.push_back(f(y));
  return SlopeField(lo, hi, std::move(v));
}

namespace {

Real clenshaw(const std::vector<Real>& c, const Real& u) {
  Real b1 = 0, b2 = 0;
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    Real b0 = 2 * u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c[0] / 2;
}

}  // namespace

Real SlopeField::value(const Real& y) const {
  const Real u = (2 * y - Real(lo_) - Real(hi_)) / (Real(hi_) - Real(lo_));
  return clenshaw(coef_[0], u);
}

Jet SlopeField::jet(const Real& y, int order) const {
  if (order >= static_cast<int>(coef_.size())) fail(ErrorKind::DomainError, "slope field jet order above the nesting cap");
  const Real scale = Real(2) / (Real(hi_) - Real(lo_));
  const Real u = (2 * y - Real(lo_) - Real(hi_)) / (Real(hi_) - Real(lo_));
  std::vector<Real> c(order + 1);
  Real f = 1, fact = 1;
  for (int d = 0; d <= order; ++d) {
    if (d > 0) {
      f *= scale;
      fact *= d;
    }
    c[d] = clenshaw(coef_[d], u) * f / fact;
  }
  return Jet(std::move(c));
}

SlopeField exact_slope_field(const MixtureModel& model, std::size_t j, std::span<const double> x_b, double lo, double hi, int n) {
  const auto& reg = model.component(j).regression;
  const Real base = reg.value_hp(x_b, Real(x_b[0]));
  return SlopeField::from_function(lo, hi, n, [&](const Real& y) { return reg.value_hp(x_b, y) - base; });
}

std::vector<std::size_t> dominance_order(const MixtureModel& model, std::span<const double> x) {
  const double t = 50.0;
  std::vector<double> key(model.J());
  for (std::size_t j = 0; j < model.J(); ++j)
    key[j] = model.m(j, x) + model.component(j).error->log_mgf(t) / t + std::log(model.weight(j, x)) / t;
  std::vector<std::size_t> order(model.J());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return order;
}

// QRecursion

QRecursion::QRecursion(const MixtureModel& model, std::span<const double> x_a, std::span<const double> x_b, GeneralJSettings settings)
    : model_(model), x_a_(x_a.begin(), x_a.end()), x_b_(x_b.begin(), x_b.end()), settings_(std::move(settings)) {
  if (x_a_.size() != model.dim() || x_b_.size() != model.dim()) fail(ErrorKind::DomainError, "covariate dimension mismatch");
  for (std::size_t i = 1; i < x_a_.size(); ++i)
    if (x_a_[i] != x_b_[i]) fail(ErrorKind::DomainError, "x_a and x_b must differ in the first covariate only");
  if (x_a_[0] == x_b_[0]) fail(ErrorKind::DomainError, "x_a equals x_b");
  if (!model.constant_weights()) fail(ErrorKind::DomainError, "nested differentiation needs constant weights");
  for (std::size_t j = 0; j < model.J(); ++j)
    if (!model.component(j).regression.is_polynomial())
      fail(ErrorKind::DomainError, "nested differentiation needs polynomial regressions");
  const double lo0 = std::min(x_a_[0], x_b_[0]), hi0 = std::max(x_a_[0], x_b_[0]);
  const double r = 0.05 * (hi0 - lo0);
  lo_ = lo0 - r;
  hi_ = hi0 + r;
}

Real QRecursion::log_mgf(const Real& t, const Real& y) const { return pop_log_cond_mgf_hp(model_, t, x_a_, y); }

std::pair<Jet, Jet> QRecursion::g1_jets(double t, const Real& y, int order) const {
  if (order < 1 || order > 3) fail(ErrorKind::DomainError, "G_1 jet order must lie in 1..3");
  const Real tt(t);
  const SlopeField& s1 = fields_.front();
  const Real c0 = log_mgf(tt, y) - tt * s1.value(y);
  auto f = [&](const Real& yy) { return exp(log_mgf(tt, yy) - tt * s1.value(yy) - c0); };
  const Real f0 = 1;
  Real h = Real(settings_.h_scale) * (1 + hp_abs(y)) / std::max(1.0, t / 10.0);
  std::vector<std::vector<Real>> rows(order + 1);
  for (int l = 0; l < settings_.x_levels; ++l, h /= 2) {
    const Real fp = f(y + h), fm = f(y - h);
    rows[1].push_back((fp - fm) / (2 * h));
    if (order >= 2) rows[2].push_back((fp - 2 * f0 + fm) / (h * h));
    if (order >= 3) {
      const Real fp2 = f(y + 2 * h), fm2 = f(y - 2 * h);
      rows[3].push_back((fp2 - 2 * fp + 2 * fm - fm2) / (2 * h * h * h));
    }
  }
  const Real scale = exp(c0);
  std::vector<Real> best(order + 1), prev(order + 1);
  best[0] = prev[0] = scale;
  Real fact = 1;
  for (int d = 1; d <= order; ++d) {
    fact *= d;
    const auto [b, p] = richardson(rows[d]);
    best[d] = scale * b / fact;
    prev[d] = scale * p / fact;
  }
  return {Jet(std::move(best)), Jet(std::move(prev))};
}

Jet QRecursion::q_from_g1(const Jet& g1, int k, double t, const Real& y, Real* previous) const {
  const int K = k - 1;
  const Real tt(t);
  const auto S = slope_jets(std::span(fields_).first(k - 1), y, K);
  const auto R = r_jets(S, tt);
  Jet Q = g1.derivative();
  Real prev = g1.value();
  for (int h = 2; h <= k - 1; ++h) {
    const Jet P = exp(-tt * (S[h] - S[h - 1])) / R[h][h];
    const Jet G = P * Q;
    prev = G.value();
    Q = G.derivative();
  }
  if (previous) *previous = prev;
  return Q;
}

QValue QRecursion::Q(int k, double t, const Real& y) const {
  if (k < 1 || k > kMaxNestingDepth) fail(ErrorKind::DomainError, "Q_k is supported for k in 1..4");
  QValue out;
  if (k == 1) {
    out.value = exp(log_mgf(Real(t), y));
    out.previous = out.value;
    return out;
  }
  if (levels() < k - 1) fail(ErrorKind::DomainError, "Q_k needs slope fields 1..k-1");
  const auto [best, alt] = g1_jets(t, y, k - 1);
  Real prev;
  out.value = q_from_g1(best, k, t, y, &prev).value();
  out.previous = prev;
  out.noise = hp_abs(out.value - q_from_g1(alt, k, t, y, nullptr).value());
  return out;
}

SlopeField QRecursion::recover_level1() const {
  const auto& s = settings_;
  const double span = std::max(std::abs(lo_), std::abs(hi_));
  const double r1 = 4.0 * s.h_scale * (1.0 + span);
  const double lo1 = lo_ - r1, hi1 = hi_ + r1;
  const auto ys = SlopeField::nodes(lo1, hi1, s.level1_nodes);
  const Real yb(b());
  std::vector<std::vector<Real>> e;
  for (double t : s.level1_t) {
    const Real tt(t);
    const Real lb = log_mgf(tt, yb);
    std::vector<Real> v;
    for (const auto& y : ys) v.push_back((log_mgf(tt, y) - lb) / tt);
    e.push_back(std::move(v));
  }
  std::size_t pick = e.size() - 1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < e.size(); ++i) {
    double res = 0.0;
    for (std::size_t n = 0; n < ys.size(); ++n) res = std::max(res, dbl(hp_abs(e[i][n] - e[i - 1][n])));
    if (res < best) {
      best = res;
      pick = i;
    }
  }
  SlopeField field(lo1, hi1, e[pick]);
  field.t_used = s.level1_t[pick];
  field.residual = best;
  return field;
}

std::vector<Real> QRecursion::q_row(int k, double t, const std::vector<Real>& pts, bool* valid) const {
  std::vector<Real> out(pts.size());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const auto [best, alt] = g1_jets(t, pts[p], k - 1);
    const Real q = q_from_g1(best, k, t, pts[p], nullptr).value();
    const Real noise = hp_abs(q - q_from_g1(alt, k, t, pts[p], nullptr).value());
    if (q == 0 || hp_abs(q) < Real(settings_.snr_min) * noise) *valid = false;
    out[p] = q;
  }
  return out;
}

// Slope differences from d/dt log(Q_k(y,t) / Q_k(x_b,t)) on the t ladder,
// keeping the ladder point whose neighbours agree best.
SlopeField QRecursion::recover_level_derivative(int k) const {
  const auto& s = settings_;
  const auto ys = SlopeField::nodes(lo_, hi_, s.nodes);
  std::vector<Real> pts = ys;
  pts.push_back(Real(b()));
  const std::size_t n = ys.size();
  const SlopeField& lower = fields_[k - 2];

  std::vector<bool> ok(s.t_ladder.size(), true);
  std::vector<std::vector<Real>> e(s.t_ladder.size());
  for (std::size_t ti = 0; ti < s.t_ladder.size(); ++ti) {
    const double t = s.t_ladder[ti];
    std::vector<std::vector<Real>> rows(n);
    double d = t * s.t_step;
    bool valid = true;
    for (int l = 0; l < s.t_levels && valid; ++l, d /= 2) {
      const auto qp = q_row(k, t + d, pts, &valid);
      const auto qm = q_row(k, t - d, pts, &valid);
      if (!valid) break;
      for (std::size_t i = 0; i < n; ++i)
        rows[i].push_back((log(hp_abs(qp[i] / qp[n])) - log(hp_abs(qm[i] / qm[n]))) / (2 * Real(d)));
    }
    ok[ti] = valid;
    if (!valid) continue;
    for (std::size_t i = 0; i < n; ++i) e[ti].push_back(lower.value(ys[i]) + richardson(rows[i]).first);
  }
  if (std::none_of(ok.begin(), ok.end(), [](bool v) { return v; })) {
    std::ostringstream os;
    os << "no t on the ladder gives Q_" << k << " above the differencing noise";
    fail(ErrorKind::IllConditioned, os.str());
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pair(s.t_ladder.size(), inf);
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!ok[i] || !ok[i - 1]) continue;
    double r = 0.0;
    for (std::size_t p = 0; p < n; ++p) r = std::max(r, dbl(hp_abs(e[i][p] - e[i - 1][p])));
    pair[i] = r;
  }
  std::size_t pick = 0;
  while (!ok[pick]) ++pick;
  double best = inf;
  for (std::size_t i = 1; i < pair.size(); ++i) {
    if (pair[i] < best) {
      best = pair[i];
      pick = i;
    }
  }
  if (std::isfinite(best) && pick >= 2 && pick + 1 < pair.size()) {
    // residuals rising past the pick point to errors growing with t
    if (std::isfinite(pair[pick - 1]) && std::isfinite(pair[pick + 1]) && pair[pick - 1] < pair[pick + 1]) pick = pick - 1;
  }
  SlopeField field(lo_, hi_, e[pick]);
  field.t_used = s.t_ladder[pick];
  field.residual = best;
  return field;
}

namespace {

struct AffineFit {
  std::vector<double> u, alpha, beta;
  double alpha_b = 0.0;
  double residual = std::numeric_limits<double>::infinity();
};

// Fits F[i][l] = t_l u_i + log|alpha_i + t_l| - log|alpha_b + t_l| + beta_i
// by damped Gauss-Newton.
AffineFit fit_affine(const std::vector<std::vector<double>>& F, const std::vector<double>& t, AffineFit start) {
  const int n = static_cast<int>(F.size()), m = static_cast<int>(t.size());
  const int np = 3 * n + 1;
  Eigen::VectorXd p(np);
  for (int i = 0; i < n; ++i) {
    p(i) = start.u[i];
    p(n + i) = start.alpha[i];
    p(2 * n + i) = start.beta[i];
  }
  p(3 * n) = start.alpha_b;
  auto residuals = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    r.resize(n * m);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < m; ++l) {
        const double a = q(n + i) + t[l], ab = q(3 * n) + t[l];
        if (a == 0.0 || ab == 0.0) return false;
        r(i * m + l) = t[l] * q(i) + std::log(std::abs(a)) - std::log(std::abs(ab)) + q(2 * n + i) - F[i][l];
      }
    return r.allFinite();
  };
  Eigen::VectorXd r;
  if (!residuals(p, r)) return start;
  double cost = r.squaredNorm(), mu = 1e-3;
  for (int it = 0; it < 200 && cost > 0.0; ++it) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n * m, np);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < m; ++l) {
        const int row = i * m + l;
        J(row, i) = t[l];
        J(row, n + i) = 1.0 / (p(n + i) + t[l]);
        J(row, 2 * n + i) = 1.0;
        J(row, 3 * n) = -1.0 / (p(3 * n) + t[l]);
      }
    const Eigen::MatrixXd H = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Eigen::MatrixXd Hd = H;
      for (int c = 0; c < np; ++c) Hd(c, c) += mu * std::max(H(c, c), 1e-300);
      const Eigen::VectorXd step = Hd.ldlt().solve(-g);
      Eigen::VectorXd q = p + step, rq;
      if (residuals(q, rq) && rq.squaredNorm() < cost) {
        const double rel = (cost - rq.squaredNorm()) / cost;
        p = q;
        r = rq;
        cost = rq.squaredNorm();
        mu = std::max(mu / 10, 1e-15);
        improved = true;
        if (rel < 1e-14) it = 1 << 20;
      } else {
        mu *= 10;
      }
    }
    if (!improved) break;
  }
  AffineFit out;
  for (int i = 0; i < n; ++i) {
    out.u.push_back(p(i));
    out.alpha.push_back(p(n + i));
    out.beta.push_back(p(2 * n + i));
  }
  out.alpha_b = p(3 * n);
  out.residual = r.cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

// R_3 is affine in t, so log(Q_3(y,t) / Q_3(x_b,t)) = t u(y) plus a known
// rational shape; fitting it over the ladder avoids differentiating the
// field under construction.
SlopeField QRecursion::recover_level_affine(int k) const {
  const auto& s = settings_;
  const auto ys = SlopeField::nodes(lo_, hi_, s.nodes);
  std::vector<Real> pts = ys;
  pts.push_back(Real(b()));
  const std::size_t n = ys.size();
  const SlopeField& lower = fields_[k - 2];

  std::vector<double> tv;
  std::vector<std::vector<double>> F(n);
  for (double t : s.t_ladder) {
    bool valid = true;
    const auto q = q_row(k, t, pts, &valid);
    if (!valid) continue;
    tv.push_back(t);
    for (std::size_t i = 0; i < n; ++i) F[i].push_back(dbl(log(hp_abs(q[i] / q[n]))));
  }
  if (tv.size() < 4) {
    std::ostringstream os;
    os << "fewer than four t on the ladder give Q_" << k << " above the differencing noise";
    fail(ErrorKind::IllConditioned, os.str());
  }

  // starting point: secant slopes and the R_3 shape they imply
  AffineFit start;
  std::vector<Real> guess(n);
  for (std::size_t i = 0; i < n; ++i) {
    start.u.push_back((F[i][3] - F[i][2]) / (tv[3] - tv[2]));
    guess[i] = lower.value(ys[i]) + Real(start.u.back());
  }
  std::vector<SlopeField> fs(fields_.begin(), fields_.begin() + (k - 1));
  fs.emplace_back(lo_, hi_, guess);
  auto alpha_at = [&](const Real& y) {
    const auto S = slope_jets(fs, y, k - 1);
    const double r1 = dbl(r_jets(S, Real(1))[k][k].value()), r2 = dbl(r_jets(S, Real(2))[k][k].value());
    const double B = r2 - r1, A = r1 - B;
    return (B != 0.0 && std::isfinite(A / B)) ? A / B : 1.0;
  };
  start.alpha_b = alpha_at(pts[n]);
  for (std::size_t i = 0; i < n; ++i) {
    start.alpha.push_back(alpha_at(ys[i]));
    double acc = 0.0;
    for (std::size_t l = 0; l < tv.size(); ++l)
      acc += F[i][l] - tv[l] * start.u[i] - std::log(std::abs((start.alpha[i] + tv[l]) / (start.alpha_b + tv[l])));
    start.beta.push_back(acc / tv.size());
  }

  // longest ladder prefix that the shape still fits
  double scale = 1.0;
  for (const auto& row : F)
    for (double v : row) scale = std::max(scale, std::abs(v));
  AffineFit chosen;
  std::size_t used = 0;
  double floor = std::numeric_limits<double>::infinity();
  std::vector<AffineFit> fits;
  for (std::size_t m = 4; m <= tv.size(); ++m) {
    std::vector<std::vector<double>> Fm(n);
    for (std::size_t i = 0; i < n; ++i) Fm[i].assign(F[i].begin(), F[i].begin() + m);
    fits.push_back(fit_affine(Fm, std::vector<double>(tv.begin(), tv.begin() + m), fits.empty() ? start : fits.back()));
    floor = std::min(floor, fits.back().residual);
  }
  const double tol = std::max(1e-12 * scale, 10.0 * floor);
  for (std::size_t m = 4; m <= tv.size(); ++m) {
    if (fits[m - 4].residual <= tol) {
      chosen = fits[m - 4];
      used = m;
    }
  }
  if (used == 0) fail(ErrorKind::IllConditioned, "ladder values do not fit the affine R_3 shape");

  std::vector<Real> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = lower.value(ys[i]) + Real(chosen.u[i]);
  SlopeField field(lo_, hi_, e);
  field.t_used = tv[used - 1];
  field.residual = chosen.residual;
  return field;
}

SlopeField QRecursion::recover_level(int k) const {
  return k == 3 ? recover_level_affine(k) : recover_level_derivative(k);
}

const SlopeField& QRecursion::recover_next() {
  const int k = levels() + 1;
  if (k > kMaxNestingDepth) fail(ErrorKind::DomainError, "nesting depth is capped at 4");
  fields_.push_back(k == 1 ? recover_level1() : recover_level(k));
  return fields_.back();
}

std::vector<std::vector<double>> r_factor_table(std::span<const SlopeField> fields, double t, double y) {
  const std::size_t m = fields.size();
  std::vector<std::vector<double>> out(m + 1, std::vector<double>(m + 1, std::numeric_limits<double>::quiet_NaN()));
  if (m < 2) return out;
  const auto S = slope_jets(fields, Real(y), static_cast<int>(m) - 1);
  const auto R = r_jets(S, Real(t));
  for (std::size_t h = 2; h <= m; ++h)
    for (std::size_t j = h; j <= m; ++j) out[h][j] = dbl(R[h][j].value());
  return out;
}

QTable q_recursion(const MixtureModel& model, std::span<const double> x_a, std::span<const double> x_b, int k_max,
                   std::span<const double> t_grid, const GeneralJSettings& settings) {
  if (k_max < 1 || k_max > kMaxNestingDepth) fail(ErrorKind::DomainError, "k_max must lie in 1..4");
  QRecursion rec(model, x_a, x_b, settings);
  QTable out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  const Real ya(x_a[0]);
  for (int k = 1; k <= k_max; ++k) {
    while (rec.levels() < k - 1) out.field_residuals.push_back(rec.recover_next().residual);
    std::vector<QTableEntry> row;
    for (double t : t_grid) {
      const QValue q = rec.Q(k, t, ya);
      QTableEntry e;
      e.value = dbl(q.value);
      e.log_abs = q.value == 0 ? -std::numeric_limits<double>::infinity() : dbl(log(hp_abs(q.value)));
      e.rel_noise = q.value == 0 ? std::numeric_limits<double>::infinity() : dbl(q.noise / hp_abs(q.value));
      row.push_back(e);
    }
    out.q.push_back(std::move(row));
  }
  return out;
}

SlopeRecoveryJ slope_recovery_J(const MixtureModel& model, std::span<const double> x_a, std::span<const double> x_b, int J,
                                const GeneralJSettings& settings) {
  if (J < 1 || J > kMaxNestingDepth) fail(ErrorKind::DomainError, "J must lie in 1..4");
  SlopeRecoveryJ out;
  if (std::equal(x_a.begin(), x_a.end(), x_b.begin(), x_b.end())) {
    out.slopes.assign(J, 0.0);
    out.residuals.assign(J, 0.0);
    out.t_used.assign(J, std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  QRecursion rec(model, x_a, x_b, settings);
  const Real ya(x_a[0]);
  for (int k = 1; k <= J; ++k) {
    const SlopeField& f = rec.recover_next();
    out.slopes.push_back(dbl(f.value(ya)));
    out.residuals.push_back(f.residual);
    out.t_used.push_back(f.t_used);
  }
  return out;
}

JIdentificationResult recover_J_parameters(const MixtureModel& model, std::span<const double> x0,
                                           const std::vector<std::vector<double>>& points, std::span<const double> t_grid,
                                           const GeneralJSettings& settings,
                                           std::optional<std::vector<std::vector<double>>> slopes) {
  const int J = static_cast<int>(points.size()) + 1;
  if (J < 2 || J > kMaxNestingDepth) fail(ErrorKind::DomainError, "recover_J_parameters needs 1..3 points");
  JIdentificationResult out;
  out.J = J;
  out.x0.assign(x0.begin(), x0.end());
  out.points = points;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  if (slopes) {
    if (slopes->size() != points.size()) fail(ErrorKind::DomainError, "one slope row per point is required");
    for (const auto& row : *slopes)
      if (static_cast<int>(row.size()) != J) fail(ErrorKind::DomainError, "one slope per component is required");
    out.slopes = *slopes;
    out.slopes_injected = true;
  } else {
    for (const auto& p : points) out.slopes.push_back(slope_recovery_J(model, x0, p, J, settings).slopes);
  }
  const auto& D = out.slopes;
  const int P = J - 1;

  const double e0 = pop_cond_mean(model, x0);
  Eigen::MatrixXd A(P, P);
  Eigen::VectorXd rhs(P);
  for (int i = 0; i < P; ++i) {
    for (int j = 0; j < P; ++j) A(i, j) = D[i][j] - D[i][J - 1];
    rhs(i) = (e0 - pop_cond_mean(model, points[i])) - D[i][J - 1];
  }
  out.det_A = row_normalized_det(A);
  if (!(std::abs(out.det_A) >= kDetFloor))
    fail(ErrorKind::SingularSystem, "slope-difference matrix is singular, relative det " + format_det(out.det_A));
  const Eigen::VectorXd lam = A.partialPivLu().solve(rhs);
  out.lambda.assign(lam.data(), lam.data() + P);
  out.lambda.push_back(1.0 - lam.sum());

  const double s0 = pop_cond_m2(model, x0);
  Eigen::MatrixXd B(J, J);
  Eigen::VectorXd c(J);
  for (int k = 0; k < P; ++k) {
    double acc = s0 - pop_cond_m2(model, points[k]);
    for (int j = 0; j < J; ++j) {
      acc += out.lambda[j] * D[k][j] * D[k][j];
      B(k, j) = D[k][j];
    }
    c(k) = 0.5 * acc;
  }
  B.row(P).setOnes();
  c(P) = e0;
  out.det_B = row_normalized_det(B);
  if (!(std::abs(out.det_B) >= kDetFloor))
    fail(ErrorKind::SingularSystem, "level system is singular, relative det " + format_det(out.det_B));
  const Eigen::VectorXd w = B.partialPivLu().solve(c);
  for (int j = 0; j < J; ++j) out.levels.push_back(w(j) / out.lambda[j]);

  // M(t|c_i) = sum_j lambda_j e^{t m_j(c_i)} M_j(t), c = (x0, X)
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.M.assign(J, std::vector<double>(t_grid.size(), nan));
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    Eigen::MatrixXd Dm(J, J);
    Eigen::VectorXd y(J);
    for (int i = 0; i < J; ++i) {
      std::vector<double> mi(J);
      for (int j = 0; j < J; ++j) mi[j] = i == 0 ? out.levels[j] : out.levels[j] - D[i - 1][j];
      const double top = t * *std::max_element(mi.begin(), mi.end(), [&](double a, double b) { return t * a < t * b; });
      for (int j = 0; j < J; ++j) Dm(i, j) = std::exp(t * mi[j] - top);
      y(i) = std::exp(pop_log_cond_mgf(model, t, i == 0 ? x0 : std::span<const double>(points[i - 1])) - top);
    }
    const double det = row_normalized_det(Dm);
    out.det_D.push_back(det);
    if (!(std::abs(det) >= kDetFloor)) {
      out.skipped_t.push_back(t);
      continue;
    }
    const Eigen::VectorXd v = Dm.partialPivLu().solve(y);
    for (int j = 0; j < J; ++j) out.M[j][ti] = v(j) / out.lambda[j];
  }
  // fill skipped points by linear interpolation between neighbours
  for (int j = 0; j < J; ++j) {
    auto& row = out.M[j];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!std::isnan(row[i])) continue;
      std::size_t l = i, r = i;
      while (l > 0 && std::isnan(row[l])) --l;
      while (r + 1 < row.size() && std::isnan(row[r])) ++r;
      if (std::isnan(row[l]) || std::isnan(row[r])) continue;
      const double w8 = (t_grid[i] - t_grid[l]) / (t_grid[r] - t_grid[l]);
      row[i] = (1 - w8) * row[l] + w8 * row[r];
    }
  }
  return out;
}

DetectJResult detect_J(const MixtureModel& model, std::span<const double> x_a, std::span<const double> x_b, int j_max,
                       const GeneralJSettings& settings) {
  if (j_max < 1 || j_max > kMaxNestingDepth) fail(ErrorKind::DomainError, "j_max must lie in 1..4");
  DetectJResult out;
  if (j_max == 1) {
    out.J = 1;
    out.saturated = true;
    out.warnings.push_back("j_max = 1: Q_1 never vanishes");
    return out;
  }
  QRecursion rec(model, x_a, x_b, settings);
  const Real ya(x_a[0]);
  for (int j = 2; j <= j_max; ++j) {
    try {
      while (rec.levels() < j - 1) rec.recover_next();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IllConditioned) throw;
      out.J = j - 1;
      out.warnings.push_back(std::string("level ") + std::to_string(j - 1) + " slope field not recoverable: " + e.what());
      return out;
    }
    std::vector<double> nu;
    bool vanishes = true;
    for (double t : settings.detect_t) {
      const QValue q = rec.Q(j, t, ya);
      const double v = dbl(hp_abs(q.value) / (t * hp_abs(q.previous)));
      nu.push_back(v);
      if (v > settings.zero_tol && hp_abs(q.value) > 10 * q.noise) vanishes = false;
    }
    out.nu.push_back(std::move(nu));
    if (vanishes) {
      out.J = j - 1;
      return out;
    }
  }
  out.J = j_max;
  out.saturated = true;
  out.warnings.push_back("Q_j nonzero up to j_max; J may be larger");
  return out;
}

}  // namespace npmix
