#include <doctest.h>

#include "npmix/error.hpp"
#include "npmix/model/population.hpp"
#include "npmix/model/reference.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

using namespace npmix;

namespace {

double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Split normal density with mode at -shift, for quadrature oracles.
struct SplitNormalOracle {
  double sl, sr;
  double shift() const { return std::sqrt(2.0 / std::numbers::pi) * (sr - sl); }
  double density(double e) const {
    const double u = e + shift();
    const double s = u < 0 ? sl : sr;
    return 2.0 / (std::sqrt(2.0 * std::numbers::pi) * (sl + sr)) * std::exp(-0.5 * u * u / (s * s));
  }
  // Simpson on [-L, L] around the mode.
  template <class F>
  double integrate(F f) const {
    const double L = 14.0 * std::max(sl, sr);
    const int n = 40000;
    const double a = -shift() - L, h = 2.0 * L / n;
    double acc = f(a) * density(a) + f(a + n * h) * density(a + n * h);
    for (int i = 1; i < n; ++i) {
      const double e = a + i * h;
      acc += (i % 2 ? 4.0 : 2.0) * f(e) * density(e);
    }
    return acc * h / 3.0;
  }
};

std::vector<double> pt(double v) { return {v}; }

}  // namespace

TEST_CASE("gaussian error transforms") {
  const auto e = make_gaussian(1.5);
  CHECK(e->log_mgf(0.0) == 0.0);
  CHECK(std::abs(e->log_mgf(2.0) - 0.5 * 2.25 * 4.0) < 1e-14);
  CHECK(std::abs(e->cf(0.0) - std::complex<double>(1.0, 0.0)) == 0.0);
  CHECK(std::abs(e->cf(1.0).real() - std::exp(-1.125)) < 1e-15);
  CHECK(std::abs(e->cdf(1.5) - Phi(1.0)) < 1e-15);
  CHECK(e->variance() == 2.25);
}

TEST_CASE("split normal against quadrature") {
  for (auto [sl, sr] : {std::pair{0.5, 1.0}, std::pair{1.0, 0.5}, std::pair{0.3, 2.0}}) {
    const SplitNormalOracle o{sl, sr};
    const auto e = make_split_normal(sl, sr);
    CHECK(std::abs(o.integrate([](double) { return 1.0; }) - 1.0) < 1e-10);
    CHECK(std::abs(o.integrate([](double u) { return u; })) < 1e-10);
    CHECK(std::abs(e->variance() - o.integrate([](double u) { return u * u; })) < 1e-9);
    for (double t : {-2.0, -0.5, 0.7, 1.5}) {
      const double m = o.integrate([t](double u) { return std::exp(t * u); });
      CHECK(std::abs(e->log_mgf(t) - std::log(m)) < 1e-9);
    }
    for (double s : {0.3, 1.0, 2.5}) {
      const double re = o.integrate([s](double u) { return std::cos(s * u); });
      const double im = o.integrate([s](double u) { return std::sin(s * u); });
      CHECK(std::abs(e->cf(s) - std::complex<double>(re, im)) < 1e-9);
    }
    double prev = 0.0;
    for (double z = -6.0; z <= 6.0; z += 0.25) {
      const double c = e->cdf(z);
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(e->cdf(-60.0) < 1e-15);
    CHECK(e->cdf(60.0) > 1.0 - 1e-15);
  }
}

TEST_CASE("error distribution invariants") {
  for (const auto& e : {make_gaussian(0.3), make_gaussian(2.0), make_split_normal(0.5, 1.0), make_split_normal(2.0, 0.4)}) {
    CHECK(e->log_mgf(0.0) == 0.0);
    CHECK(e->cf(0.0) == std::complex<double>(1.0, 0.0));
    CHECK(e->mean() == 0.0);
    for (double s = 0.0; s < 50.0; s += 0.37) CHECK(std::abs(e->cf(s)) <= 1.0 + 1e-15);
  }
}

TEST_CASE("GM1 population functionals") {
  const auto m = reference::gm1();
  const auto x = pt(0.0);
  const double mgf = 0.6 * std::exp(1.0 + 1.125) + 0.4 * std::exp(-1.0 + 0.125);
  CHECK(std::abs(std::exp(pop_log_cond_mgf(m, 1.0, x)) - mgf) < 1e-12);
  CHECK(std::abs(mgf - 5.19048) < 1e-5);
  CHECK(pop_log_cond_mgf(m, 0.0, x) == 0.0);

  const std::complex<double> I(0.0, 1.0);
  const auto cf = 0.6 * std::exp(I) * std::exp(-1.125) + 0.4 * std::exp(-I) * std::exp(-0.125);
  CHECK(std::abs(pop_cond_cf(m, 1.0, x) - cf) < 1e-14);
  CHECK(pop_cond_cf(m, 0.0, x) == std::complex<double>(1.0, 0.0));

  CHECK(std::abs(pop_cond_cdf(m, 50.0, x) - 1.0) < 1e-12);
  CHECK(std::abs(pop_cond_cdf(m, 1.0, x) - (0.3 + 0.4 * Phi(4.0))) < 1e-14);
  CHECK(std::abs(pop_cond_cdf(m, 1.0, x) - 0.69999) < 1e-5);
  CHECK(std::abs(pop_cond_mean(m, x) - 0.2) < 1e-15);
  CHECK(std::abs(pop_cond_m2(m, x) - 2.45) < 1e-14);
}

TEST_CASE("ratio functions") {
  const auto m = reference::gm1();
  const auto x0 = pt(0.0), x = pt(0.5);
  CHECK(pop_R(m, 3.0, x0, x0) == 1.0);
  CHECK(pop_rho(m, 3.0, x0, x0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(pop_log_R(m, 10.0, x, x0) / 10.0 - 1.0) < 1e-6);
  // large t stays finite in log form
  CHECK(std::isfinite(pop_log_R(m, 200.0, x, x0)));
  CHECK(std::abs(pop_log_R(m, 200.0, x, x0) / 200.0 - 1.0) < 1e-12);

  const auto d = reference::degenerate();
  for (double t : {-7.0, -0.3, 0.5, 4.0, 25.0}) CHECK(std::abs(pop_log_R(d, t, x, x0) / t - 1.0) < 1e-12);
}

TEST_CASE("degenerate model reduces to one component") {
  const auto d = reference::degenerate();
  for (double xv : {-1.0, 0.0, 0.7}) {
    const auto x = pt(xv);
    const double m1 = 1.0 + 2.0 * xv;
    CHECK(std::abs(pop_cond_mean(d, x) - m1) < 1e-14);
    for (double t : {-2.0, 0.5, 3.0}) CHECK(std::abs(pop_log_cond_mgf(d, t, x) - (t * m1 + 0.5 * 2.25 * t * t)) < 1e-12);
    CHECK(std::abs(pop_cond_cdf(d, m1, x) - 0.5) < 1e-15);
  }
}

TEST_CASE("identical components collapse in the CF") {
  // same errors and regressions: phi = e^{i s m1} phi1
  const MixtureModel m({0.3, 0.7}, {Component{RegressionFunction::univariate({1.0, 2.0}), make_gaussian(1.0)},
                                    Component{RegressionFunction::univariate({1.0, 2.0}), make_gaussian(1.0)}});
  const std::complex<double> I(0.0, 1.0);
  for (double s : {0.4, 1.3, 3.0}) {
    const auto x = pt(0.25);
    CHECK(std::abs(pop_cond_cf(m, s, x) - std::exp(I * s * 1.5) * std::exp(-0.5 * s * s)) < 1e-14);
  }
}

TEST_CASE("label swap invariance") {
  for (const auto& m : {reference::gm1(), reference::sk1(), reference::gm3(), reference::constant_weight_skew()}) {
    std::vector<std::size_t> order(m.J());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = order.size() - 1 - j;
    const auto p = m.permuted(order);
    for (double xv : {-0.8, 0.0, 0.9}) {
      const auto x = pt(xv);
      for (double t : {-1.5, 0.4, 2.0}) CHECK(std::abs(pop_log_cond_mgf(m, t, x) - pop_log_cond_mgf(p, t, x)) < 1e-12);
      for (double s : {0.5, 2.0}) CHECK(std::abs(pop_cond_cf(m, s, x) - pop_cond_cf(p, s, x)) < 1e-12);
      for (double z : {-1.0, 0.5, 2.0}) CHECK(std::abs(pop_cond_cdf(m, z, x) - pop_cond_cdf(p, z, x)) < 1e-12);
      CHECK(std::abs(pop_cond_mean(m, x) - pop_cond_mean(p, x)) < 1e-12);
    }
  }
  const auto fe = reference::fe_sk1();
  const auto p = fe.permuted({1, 0});
  for (double xv : {-0.5, 0.3}) {
    const auto x = pt(xv);
    CHECK(std::abs(pop_log_cond_mgf(fe, 1.2, x) - pop_log_cond_mgf(p, 1.2, x)) < 1e-12);
    CHECK(std::abs(pop_cond_cdf(fe, 0.4, x) - pop_cond_cdf(p, 0.4, x)) < 1e-12);
  }
}

TEST_CASE("mean is the MGF derivative at zero") {
  for (const auto& m : {reference::gm1(), reference::sk1(), reference::fe_sk1(), reference::gm3(), reference::degenerate()}) {
    for (double xv : {-0.7, 0.0, 1.1}) {
      const auto x = pt(xv);
      const double h = 1e-5;
      const double d = (std::exp(pop_log_cond_mgf(m, h, x)) - std::exp(pop_log_cond_mgf(m, -h, x))) / (2 * h);
      CHECK(std::abs(d - pop_cond_mean(m, x)) < 1e-6);
    }
  }
}

TEST_CASE("population CDF is monotone") {
  for (const auto& m : {reference::gm1(), reference::sk1(), reference::fe_sk1(), reference::gm3()}) {
    const auto x = pt(0.3);
    double prev = 0.0;
    for (double z = -12.0; z <= 12.0; z += 0.05) {
      const double c = pop_cond_cdf(m, z, x);
      CHECK(c >= prev);
      CHECK(c <= 1.0);
      prev = c;
    }
  }
}

TEST_CASE("regression gradient matches finite differences") {
  const auto r = RegressionFunction::polynomial(2, {{1.5, {2, 1}}, {-0.3, {0, 3}}, {2.0, {1, 0}}, {0.7, {0, 0}}});
  for (auto p : {std::vector<double>{0.3, -1.2}, std::vector<double>{-2.0, 0.5}, std::vector<double>{1.1, 1.7}}) {
    const auto g = r.gradient(p);
    for (std::size_t d = 0; d < 2; ++d) {
      const double h = 1e-6;
      auto a = p, b = p;
      a[d] += h;
      b[d] -= h;
      const double fd = (r.value(a) - r.value(b)) / (2 * h);
      CHECK(std::abs(fd - g[d]) <= 1e-6 * std::max(1.0, std::abs(g[d])));
    }
    const auto tay = r.x1_taylor_hp(p, hp::to_real(p[0]), 3);
    CHECK(std::abs(hp::to_double(tay[0]) - r.value(p)) < 1e-14);
    CHECK(std::abs(hp::to_double(tay[1]) - g[0]) < 1e-13);
  }
}

TEST_CASE("extended precision MGF agrees with double") {
  for (const auto& m : {reference::gm1(), reference::gm3(), reference::sk1()}) {
    for (double t : {-3.0, 0.5, 4.0}) {
      const auto x = pt(0.4);
      const double hpv = hp::to_double(pop_log_cond_mgf_hp(m, hp::to_real(t), x, hp::to_real(0.4)));
      CHECK(std::abs(hpv - pop_log_cond_mgf(m, t, x)) < 1e-12 * std::max(1.0, std::abs(hpv)));
    }
  }
}

TEST_CASE("model validation") {
  const auto r = RegressionFunction::univariate({0.0, 1.0});
  auto err = [](auto&& f) -> std::optional<ErrorKind> {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return std::nullopt;
  };
  CHECK(err([&] { MixtureModel({0.5, 0.4}, {Component{r, make_gaussian(1)}, Component{r, make_gaussian(1)}}); }) == ErrorKind::ConfigError);
  CHECK(err([&] { MixtureModel({1.2, -0.2}, {Component{r, make_gaussian(1)}, Component{r, make_gaussian(1)}}); }) == ErrorKind::ConfigError);
  CHECK(err([&] { MixtureModel({1.0}, {Component{r, make_gaussian(1)}, Component{r, make_gaussian(1)}}); }) == ErrorKind::ConfigError);
  const MixtureModel fe(WeightFunction::linear(0.5, {0.2}), {Component{r, make_gaussian(1)}, Component{r, make_gaussian(2)}});
  CHECK(err([&] { fe.weight(0, std::vector<double>{5.0}); }) == ErrorKind::DomainError);
  CHECK(std::abs(fe.weight(0, std::vector<double>{1.0}) - 0.7) < 1e-15);
  CHECK(std::abs(fe.weight(1, std::vector<double>{1.0}) - 0.3) < 1e-15);
}
