#include <doctest.h>

#include "npmix/dgp/simulate.hpp"
#include "npmix/error.hpp"
#include "npmix/estimators/fit.hpp"
#include "npmix/model/population.hpp"
#include "npmix/model/reference.hpp"
#include "npmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

using namespace npmix;

namespace {

double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

const std::vector<double> X0{0.0}, X1{0.5};

template <class F>
std::optional<ErrorKind> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

TuningSchedule toy_schedule(double h, double t) {
  TuningSchedule s;
  s.h_n = s.b_n = s.c_n = s.d_n = {h};
  s.t_n = t;
  s.s_n = 1.0;
  s.a_n = 0.1;
  s.p_n = 10;
  return s;
}

// c_t = 1/sigma_1 and c_s = 2, as in configs/gm1.json
TuningSchedule gm1_schedule(const Dataset& d) {
  ScheduleOptions o;
  o.c_t = 1.0 / 1.5;
  o.c_s = 2.0;
  return default_schedule(d.observations(), o);
}

}  // namespace

TEST_CASE("delta on the two-point toy") {
  const Dataset d(1, {0.0, 0.5}, {0.0, 1.0});
  const auto tun = toy_schedule(0.1, 2.0);
  const double w = std::exp(-12.5);
  // log M1 - log M0 from the hand weights at both points
  const double l1 = std::log((w + std::exp(2.0)) / (1 + w));
  const double l0 = std::log((1 + w * std::exp(2.0)) / (1 + w));
  const double dh = estimate_delta(d.observations(), X0, X1, tun);
  CHECK(std::abs(dh - (l1 - l0) / 2.0) < 1e-13);
  // the x0 window carries e^{-12.5} of the far point, so Delta is 1 - 1.35e-5
  CHECK(std::abs(dh - 1.0) < 1.4e-5);
  CHECK(estimate_delta(d.observations(), X0, X0, tun) == 0.0);
  const auto nb = estimate_nabla(d.observations(), X0, X0, tun);
  CHECK(nb.value == 0.0);
}

TEST_CASE("overflow budget") {
  const Dataset d(1, {0.0, 0.5}, {0.0, 1000.0});
  CHECK(error_of([&] { estimate_delta(d.observations(), X0, X1, toy_schedule(0.1, 1.0)); }) == ErrorKind::OverflowBudget);
}

TEST_CASE("population plug-in reproduces GM1") {
  const auto m = reference::gm1();
  const PopulationSource src(m, X0, X1);
  CHECK(std::abs(delta_from(src, 10.0) - 1.0) < 1e-6);
  const auto nb = nabla_from(src, 15.0, 0.1);
  CHECK(std::abs(nb.value - 0.5) < 1e-6);
  CHECK(nb.branch_ok);

  const auto lr = lambda_from(src, 1.0, 0.5);
  CHECK(std::abs(lr.value - 0.6) < 1e-14);
  CHECK(!lr.clamped);
  const auto lv = levels_from(src, 1.0, 0.5, 0.6);
  CHECK(std::abs(lv.C + 0.4) < 1e-13);
  CHECK(std::abs(lv.m1_x0 - 1.0) < 1e-12);
  CHECK(std::abs(lv.m2_x0 + 1.0) < 1e-12);

  const auto ss = series_setup(1.0, 0.5, 0.6, 1.0, -1.0);
  CHECK(!ss.swapped);
  CHECK(std::abs(f2_series(src, ss.params, 0.0, 200) - 0.5) < 1e-8);
  CHECK(std::abs(f2_series(src, ss.params, -10.0, 200)) < 1e-12);
  for (double z = -3.0; z <= 3.0; z += 0.15) {
    CHECK(std::abs(f2_series(src, ss.params, z, 200) - Phi(z / 0.5)) < 1e-8);
    CHECK(std::abs(f1_from(src, ss.params, 1.0, -1.0, z, 200) - Phi(z / 1.5)) < 1e-8);
  }
  CHECK(std::abs(f1_from(src, ss.params, 1.0, -1.0, 10.0, 200) - 1.0) < 1e-8);
}

TEST_CASE("series truncation decays geometrically") {
  const auto m = reference::gm1();
  const PopulationSource src(m, X0, X1);
  const auto ss = series_setup(1.0, 0.5, 0.6, 1.0, -1.0);
  auto sup_err = [&](int p) {
    double e = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double z = -4.0 + 0.2 * i;
      e = std::max(e, std::abs(f2_series(src, ss.params, z, p) - Phi(z / 0.5)));
    }
    return e;
  };
  // the tail terms switch off once z + p delta clears the support; from
  // there on each extra term must at least halve the error
  double prev = sup_err(8);
  int prev_p = 8;
  CHECK(prev > 1e-2);
  for (int p : {9, 10, 11, 12, 13, 14, 25, 50, 100, 200}) {
    const double e = sup_err(p);
    CHECK(e <= std::max(prev * std::pow(2.0, -(p - prev_p)), 1e-14));
    prev = e;
    prev_p = p;
  }
  CHECK(sup_err(200) <= 1e-8);
}

TEST_CASE("swapped series when the slope gap is negative") {
  // relabel GM1 so that the MGF-dominant component carries the smaller slope
  const auto m = reference::gm1();
  const std::vector<double> a{0.5}, b{0.0};
  const PopulationSource src(m, a, b);
  const double delta = delta_from(src, 10.0);
  const double nabla = nabla_from(src, 15.0, 0.1).value;
  CHECK(std::abs(delta + 1.0) < 1e-6);
  CHECK(std::abs(nabla + 0.5) < 1e-6);
  const double lam = lambda_from(src, delta, nabla).value;
  CHECK(std::abs(lam - 0.6) < 1e-5);
  const auto lv = levels_from(src, delta, nabla, lam);
  CHECK(std::abs(lv.m1_x0 - 2.0) < 1e-4);
  CHECK(std::abs(lv.m2_x0 + 0.5) < 1e-4);
  const auto ss = series_setup(-1.0, -0.5, 0.6, 2.0, -0.5);
  REQUIRE(ss.swapped);
  const SwappedSource sw(src);
  for (double z : {-1.0, 0.0, 0.7}) CHECK(std::abs(f2_series(sw, ss.params, z, 200) - Phi(z / 0.5)) < 1e-8);
}

TEST_CASE("label swap maps slopes to their negatives") {
  for (const auto& m : {reference::gm1(), reference::constant_weight_skew()}) {
    const PopulationSource fwd(m, X0, X1), bwd(m, X1, X0);
    const double d = delta_from(fwd, 12.0), db = delta_from(bwd, 12.0);
    const double n = nabla_from(fwd, 15.0, 0.1).value, nbv = nabla_from(bwd, 15.0, 0.1).value;
    CHECK(std::abs(d + db) < 1e-10);
    CHECK(std::abs(n + nbv) < 1e-10);
    CHECK(std::abs(lambda_from(fwd, d, n).value - lambda_from(bwd, db, nbv).value) < 1e-10);
  }
}

TEST_CASE("lambda clamp and separation floor") {
  const auto m = reference::gm1();
  const PopulationSource src(m, X0, X1);
  // mean difference equals nabla: raw value 0
  const double md = pop_cond_mean(m, X1) - pop_cond_mean(m, X0);
  const auto r = lambda_from(src, 2.0, md);
  CHECK(r.clamped);
  CHECK(r.value == kLambdaMin);
  CHECK(error_of([&] { lambda_from(src, 0.5, 0.5 + 1e-4); }) == ErrorKind::ParallelSlopes);
  CHECK(error_of([&] { levels_from(src, 0.5, 0.5 + 1e-4, 0.5); }) == ErrorKind::ParallelSlopes);
  CHECK(error_of([&] { series_setup(0.5, 0.5, 0.5, 0, 0); }) == ErrorKind::ParallelSlopes);
}

TEST_CASE("degenerate levels use the single mean") {
  const auto m = reference::degenerate();
  const PopulationSource src(m, X0, X1);
  const auto lv = levels_from(src, 1.0, 0.0, 1.0);
  CHECK(lv.m1_x0 == pop_cond_mean(m, X0));
  CHECK(std::isnan(lv.m2_x0));
}

TEST_CASE("branch safety on the principal log") {
  const auto m = reference::gm1();
  const auto d = simulate(m, {8000, UniformLaw{{-1.0}, {1.5}}, 31, false});
  const auto tun = gm1_schedule(d);
  const SampleSource src(d.observations(), X0, X1, tun);
  const auto full = nabla_from(src, tun.s_n, tun.a_n);
  REQUIRE(full.branch_ok);
  const auto half = nabla_from(src, tun.s_n, tun.a_n / 2);
  CHECK(std::abs(full.value - half.value) < 2.0 * std::max(full.noise, half.noise));

  // population: both increments see the same slope
  const PopulationSource pop(m, X0, X1);
  const auto p1 = nabla_from(pop, 15.0, 0.1), p2 = nabla_from(pop, 15.0, 0.05);
  CHECK(std::abs(p1.value - p2.value) <= 2.0 * std::max(p1.noise, p2.noise) + 1e-9);

  // a large increment wraps the argument
  const auto wrap = nabla_from(pop, 15.0, 6.2);
  CHECK(!wrap.branch_ok);
}

TEST_CASE("property: estimator invariants over random datasets") {
  Stream rng(0xa11ce);
  const auto m = reference::gm1();
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 200 + rng.next_u64() % 1800;
    const double lo = -1.0 - rng.uniform(), hi = 1.0 + rng.uniform();
    const auto d = simulate(m, {n, UniformLaw{{lo}, {hi}}, rng.next_u64(), false});
    const auto v = d.observations();
    const auto tun = gm1_schedule(d);
    const SampleSource src(v, X0, X1, tun);
    for (int p = 0; p < 2; ++p) {
      CHECK(src.log_mgf(p, 0.0) == 0.0);
      CHECK(src.cf(p, 0.0).value() == std::complex<double>(1.0, 0.0));
      for (double s : {0.5, tun.s_n, tun.s_n + tun.a_n, 25.0}) CHECK(std::abs(src.cf(p, s).value()) <= 1.0 + 1e-12);
    }
    const auto z = linear_grid(-3.0, 3.0, 41);
    std::vector<double> raw(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) raw[i] = src.cdf(0, z[i]) - 0.2 * std::sin(3 * z[i]) * rng.uniform();
    const auto proj = monotone_projection(raw);
    for (std::size_t i = 0; i < proj.size(); ++i) {
      CHECK(proj[i] >= 0.0);
      CHECK(proj[i] <= 1.0);
      if (i) CHECK(proj[i - 1] <= proj[i]);
    }
    CHECK(monotone_projection(proj) == proj);
    double prev = 0.0;
    for (double zz : z) {
      const double c = src.cdf(1, zz);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("monotone projection") {
  const std::vector<double> v{0.1, 0.3, 0.2, 0.5, -0.2, 1.4, 0.9};
  const auto p = monotone_projection(v);
  CHECK(p == monotone_projection(p));
  CHECK(p.front() == doctest::Approx(0.1));
  for (std::size_t i = 1; i <= 4; ++i) CHECK(p[i] == doctest::Approx(0.2));
  CHECK(p[5] == 1.0);
  CHECK(p[6] == 1.0);
  // order preserving: pointwise smaller input gives smaller output
  std::vector<double> w = v;
  for (double& x : w) x -= 0.05;
  const auto q = monotone_projection(w);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(q[i] <= p[i]);
}

TEST_CASE("default schedule") {
  const auto d = simulate(reference::gm1(), {1000, UniformLaw{{-1.0}, {1.0}}, 1, false});
  const auto s = default_schedule(d.observations());
  const double n = 1000.0;
  CHECK(std::abs(s.h_n[0] - std::pow(n, -0.2 + 0.1)) < 1e-14);
  CHECK(std::abs(s.b_n[0] - std::pow(n, -0.2 + 0.1)) < 1e-14);
  CHECK(s.p_n == static_cast<int>(std::ceil(2 * std::log(n))));
  CHECK(s.a_n == 0.1);
  ScheduleOptions o;
  o.c_t = 2.0;
  o.shrink_a = true;
  o.p_n = 7;
  const auto s2 = default_schedule(d.observations(), o);
  CHECK(std::abs(s2.t_n - 2.0 * std::sqrt(0.1 * std::log(n))) < 1e-14);
  CHECK(std::abs(s2.a_n - 0.1 / std::sqrt(std::log(n))) < 1e-15);
  CHECK(s2.p_n == 7);
  TuningSchedule bad = s;
  bad.c_seq = {0.1, 0.2};
  CHECK(error_of([&] { bad.validate(1); }) == ErrorKind::ConfigError);
}

TEST_CASE("GM1 fit near the truth") {
  const auto d = simulate(reference::gm1(), {32000, UniformLaw{{-1.0}, {1.5}}, 12, false});
  const auto fit = fit_mixture(d.observations(), X0, X1, gm1_schedule(d), linear_grid(-3.0, 3.0, 41));
  // bands from a 40-seed pilot at n = 32000
  CHECK(std::abs(fit.slopes.delta_hat - 1.0) < 0.15);
  CHECK(std::abs(fit.slopes.nabla_hat - 0.5) < 0.2);
  CHECK(std::abs(fit.lambda_hat - 0.6) < 0.25);
  CHECK(fit.slopes.branch_ok);
  CHECK(!fit.swapped);
}

TEST_CASE("component CDF errors shrink with n") {
  // median sup-errors over 40 seeds; pilot medians are about
  // F1 0.51/0.32/0.18 and F2 1.0/0.74/0.46 at n = 2000/8000/32000
  const auto z = linear_grid(-3.0, 3.0, 41);
  FitOptions o;
  o.project = true;
  std::vector<double> med1, med2, medm1;
  for (std::size_t n : {2000u, 8000u, 32000u}) {
    std::vector<double> e1, e2, em1;
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
      const auto d = simulate(reference::gm1(), {n, UniformLaw{{-1.0}, {1.5}}, seed, false});
      try {
        const auto fit = fit_mixture(d.observations(), X0, X1, gm1_schedule(d), z, o);
        double a = 0, b = 0;
        for (std::size_t i = 0; i < z.size(); ++i) {
          a = std::max(a, std::abs(fit.F1_proj[i] - Phi(z[i] / 1.5)));
          b = std::max(b, std::abs(fit.F2_proj[i] - Phi(z[i] / 0.5)));
          if (i) CHECK(fit.F2_proj[i - 1] <= fit.F2_proj[i]);
        }
        e1.push_back(a);
        e2.push_back(b);
        em1.push_back(std::abs(fit.m1_hat_x0 - 1.0));
      } catch (const Error& e) {
        // counted as a maximal error
        CHECK(e.kind() == ErrorKind::SeriesBudget);
        e1.push_back(1.0);
        e2.push_back(1.0);
        em1.push_back(1e300);
      }
    }
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };
    med1.push_back(median(e1));
    med2.push_back(median(e2));
    medm1.push_back(median(em1));
  }
  CHECK(med1[0] > med1[1]);
  CHECK(med1[1] > med1[2]);
  CHECK(med2[1] > med2[2]);
  CHECK(med2[0] >= med2[1]);
  CHECK(medm1[0] > medm1[1]);
  CHECK(medm1[1] > medm1[2]);
  CHECK(med1[2] < 0.25);
  CHECK(med2[2] < 0.55);
  CHECK(medm1[2] < 0.3);
}

TEST_CASE("fit preconditions and degenerate data") {
  const auto d = simulate(reference::degenerate(), {4000, UniformLaw{{-1.0}, {1.5}}, 2, false});
  const auto z = linear_grid(-2.0, 2.0, 9);
  CHECK(error_of([&] { fit_mixture(d.observations(), X0, X0, gm1_schedule(d), z); }) == ErrorKind::DomainError);
  // one component: the MGF and CF routes see the same slope
  for (std::uint64_t seed = 2; seed < 8; ++seed) {
    const auto dd = simulate(reference::degenerate(), {20000, UniformLaw{{-1.0}, {1.5}}, seed, false});
    const auto tun = default_schedule(dd.observations());
    const auto e = error_of([&] {
      const auto fit = fit_mixture(dd.observations(), X0, X1, tun, z);
      CHECK(std::abs(fit.slopes.delta_hat - fit.slopes.nabla_hat) < 0.05);
      CHECK(!fit.warnings.empty());
    });
    if (e) CHECK((*e == ErrorKind::ParallelSlopes || *e == ErrorKind::SeriesBudget));
  }
}

TEST_CASE("series budget") {
  const auto d = simulate(reference::gm1(), {3000, UniformLaw{{-1.0}, {1.5}}, 4, false});
  auto tun = gm1_schedule(d);
  tun.p_n = 100000;
  tun.series_slack = 0.0;
  const auto z = linear_grid(-1.0, 1.0, 5);
  CHECK(error_of([&] { fit_mixture(d.observations(), X0, X1, tun, z); }) == ErrorKind::SeriesBudget);
}

TEST_CASE("fit csv layout") {
  const auto d = simulate(reference::gm1(), {3000, UniformLaw{{-1.0}, {1.5}}, 4, false});
  const auto fit = fit_mixture(d.observations(), X0, X1, gm1_schedule(d), linear_grid(-1.0, 1.0, 3));
  std::ostringstream os;
  write_fit_csv(fit, os);
  const auto s = os.str();
  CHECK(s.rfind("key,value\nx0,0\nx1,0.5\n", 0) == 0);
  CHECK(s.find("\n\nz,F1_raw,F1_proj,F2_raw,F2_proj\n-1,") != std::string::npos);
}
