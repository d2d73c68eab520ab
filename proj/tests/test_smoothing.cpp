#include <doctest.h>

#include "npmix/dgp/simulate.hpp"
#include "npmix/error.hpp"
#include "npmix/model/population.hpp"
#include "npmix/model/reference.hpp"
#include "npmix/rng.hpp"
#include "npmix/smoothing/nw.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace npmix;

namespace {

Dataset two_points() { return Dataset(1, {0.0, 0.5}, {0.0, 1.0}); }

// Random dataset with heavy-ish outcomes and clustered covariates.
Dataset random_dataset(Stream& rng) {
  const std::size_t n = 20 + rng.next_u64() % 400;
  const double scale = std::exp(3.0 * rng.uniform() - 1.0);
  std::vector<double> x(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform() < 0.3 ? std::floor(4 * rng.uniform()) / 4 : 2 * rng.uniform() - 1;
    z[i] = scale * (rng.uniform() < 0.5 ? rng.normal() : 3.0 * rng.uniform() - 1.0);
  }
  return Dataset(1, std::move(x), std::move(z));
}

const std::vector<double> x0{0.0}, xh{0.5};

}  // namespace

TEST_CASE("two-point hand weights") {
  const auto d = two_points();
  const auto v = d.observations();
  const auto g = KernelSpec::gaussian({0.1});
  const double w = std::exp(-12.5);
  const double exact = std::log((w * 1.0 + std::exp(2.0)) / (1.0 + w));
  const auto est = nw_cond_mgf(v, xh, 2.0, g);
  CHECK(std::abs(est.value - exact) < 1e-13);
  CHECK(std::abs(est.value - 2.0) < 1e-5);
  CHECK(std::abs(nw_cond_mean(v, x0, g).value - w / (1 + w)) < 1e-15);
  CHECK(std::abs(nw_cond_mean(v, x0, g).value) < 1e-5);

  const auto q = KernelSpec::quartic({0.5});
  CHECK(std::abs(nw_cond_cdf(v, x0, 0.5, q).value - 1.0) < 1e-15);
}

TEST_CASE("denominator mass and Kish count") {
  const auto d = two_points();
  const auto g = KernelSpec::gaussian({0.1});
  const auto est = nw_cond_mean(d.observations(), std::vector<double>{0.25}, g);
  // equal weights phi(2.5)/h each
  const double k = std::exp(-0.5 * 6.25) / std::sqrt(2 * std::numbers::pi);
  CHECK(std::abs(est.denominator_mass - 2 * k / (2 * 0.1)) < 1e-14);
  CHECK(std::abs(est.effective_count - 2.0) < 1e-12);
  CHECK(std::abs(est.value - 0.5) < 1e-15);
}

TEST_CASE("single observation") {
  const Dataset d(1, {0.3}, {1.7});
  const auto v = d.observations();
  const auto g = KernelSpec::gaussian({0.2});
  for (double s : {0.5, 2.0, 11.0}) {
    const auto c = nw_cond_cf(v, std::vector<double>{0.3}, s, g).value;
    CHECK(std::abs(c - std::exp(std::complex<double>(0.0, s * 1.7))) < 1e-14);
  }
}

TEST_CASE("constant outcomes") {
  const double c = -2.75;
  const Dataset d(1, {0.1, 0.4, -0.3, 0.2}, {c, c, c, c});
  const auto v = d.observations();
  const auto g = KernelSpec::gaussian({0.3});
  CHECK(nw_cond_mean(v, x0, g).value == c);
  CHECK(nw_cond_m2(v, x0, g).value == c * c);
}

TEST_CASE("cdf tails") {
  const auto d = simulate(reference::gm1(), {500, UniformLaw{{-1.0}, {1.0}}, 3, false});
  const auto v = d.observations();
  const auto q = KernelSpec::quartic({0.8});
  double lo = 1e300, hi = -1e300;
  for (double z : v.z()) lo = std::min(lo, z), hi = std::max(hi, z);
  CHECK(nw_cond_cdf(v, x0, lo - 1e-9, q).value == 0.0);
  CHECK(nw_cond_cdf(v, x0, hi, q).value == 1.0);
}

TEST_CASE("GM1 sample near population transforms") {
  const auto m = reference::gm1();
  const auto d = simulate(m, {20000, UniformLaw{{-1.0}, {1.5}}, 17, false});
  const auto v = d.observations();
  const auto g = KernelSpec::gaussian({0.08});
  // bands from pilot runs across seeds
  CHECK(std::abs(std::exp(nw_cond_mgf(v, x0, 1.0, g).value) - 5.19048) < 0.5);
  CHECK(std::abs(nw_cond_cf(v, x0, 1.0, g).value - pop_cond_cf(m, 1.0, x0)) < 0.05);
  CHECK(std::abs(nw_cond_mean(v, x0, g).value - 0.2) < 0.1);
  CHECK(std::abs(nw_cond_m2(v, x0, g).value - 2.45) < 0.25);
  CHECK(std::abs(nw_cond_cdf(v, x0, 1.0, KernelSpec::quartic({0.3})).value - 0.69999) < 0.04);
}

TEST_CASE("property: normalization, modulus, monotonicity, equivariance") {
  Stream rng(0x5eed);
  const auto g = KernelSpec::gaussian({0.35});
  const auto q = KernelSpec::quartic({0.9});
  for (int rep = 0; rep < 200; ++rep) {
    const auto d = random_dataset(rng);
    const auto v = d.observations();
    const std::vector<double> x{2 * rng.uniform() - 1};
    CHECK(nw_cond_mgf(v, x, 0.0, g).value == 0.0);
    CHECK(nw_cond_cf(v, x, 0.0, g).value == std::complex<double>(1.0, 0.0));
    for (int i = 0; i < 5; ++i) {
      const double s = 30.0 * rng.uniform();
      CHECK(std::abs(nw_cond_cf(v, x, s, g).value) <= 1.0 + 1e-12);
    }
    double prev = 0.0;
    for (double z = -15.0; z <= 15.0; z += 0.5) {
      const double c = nw_cond_cdf(v, x, z, q).value;
      CHECK(c >= prev);
      CHECK(c <= 1.0);
      prev = c;
    }
    const double shift = 5.0 * rng.uniform() - 2.5;
    std::vector<double> zs(v.z().begin(), v.z().end());
    for (double& z : zs) z += shift;
    std::vector<double> xs(v.column(0).begin(), v.column(0).end());
    const Dataset shifted(1, xs, zs);
    for (double t : {-1.3, 0.7, 2.0}) {
      const double a = nw_cond_mgf(v, x, t, g).value;
      const double b = nw_cond_mgf(shifted.observations(), x, t, g).value;
      CHECK(std::abs(b - a - t * shift) < 1e-10 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("large arguments stay in log domain") {
  const auto d = simulate(reference::gm1(), {2000, UniformLaw{{-1.0}, {1.0}}, 8, false});
  const auto g = KernelSpec::gaussian({0.2});
  const double v = nw_cond_mgf(d.observations(), x0, 150.0, g).value;
  CHECK(std::isfinite(v));
  CHECK(v > 100.0);
}

TEST_CASE("empty window") {
  const Dataset d(1, {0.0, 0.1}, {1.0, 2.0});
  const auto v = d.observations();
  auto kind = [&](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  const std::vector<double> far{50.0};
  CHECK(kind([&] { nw_cond_mean(v, far, KernelSpec::gaussian({0.1})); }) == ErrorKind::EmptyWindow);
  CHECK(kind([&] { nw_cond_cdf(v, std::vector<double>{3.0}, 0.0, KernelSpec::quartic({1.0})); }) == ErrorKind::EmptyWindow);
  CHECK(kind([&] { nw_cond_cdf(v, x0, 0.0, KernelSpec::gaussian({1.0})); }) == ErrorKind::DomainError);
}

TEST_CASE("kernel profiles integrate to one") {
  for (const auto& k : {KernelSpec::gaussian({1.0}), KernelSpec::quartic({1.0})}) {
    double s = 0.0, s1 = 0.0;
    const int n = 200000;
    const double L = 10.0, h = 2 * L / n;
    for (int i = 0; i < n; ++i) {
      const double u = -L + (i + 0.5) * h;
      s += k.profile(u) * h;
      s1 += u * k.profile(u) * h;
    }
    CHECK(std::abs(s - 1.0) < 1e-9);
    CHECK(std::abs(s1) < 1e-12);
  }
  const auto q = KernelSpec::quartic({1.0});
  CHECK(q.profile(0.5000001) == 0.0);
  CHECK(q.profile(-0.6) == 0.0);
  CHECK(q.profile(0.0) == 15.0 / 8.0);
}

TEST_CASE("weighted cdf matches direct evaluation") {
  const auto d = simulate(reference::sk1(), {3000, UniformLaw{{-1.0}, {1.0}}, 21, false});
  const auto v = d.observations();
  const auto q = KernelSpec::quartic({0.4});
  const KernelWindow w(v, x0, q);
  const WeightedCdf F(w, v.z());
  for (double z = -4.0; z <= 4.0; z += 0.37) CHECK(std::abs(F(z) - nw_cond_cdf(v, x0, z, q).value) < 1e-12);
}

TEST_CASE("rule of thumb bandwidth") {
  const Dataset d(1, {0.0, 1.0, 2.0, 3.0}, {0, 0, 0, 0});
  const auto h = rule_of_thumb_bandwidth(d.observations());
  const double sd = std::sqrt(5.0 / 3.0);
  CHECK(std::abs(h[0] - sd * std::pow(4.0, -0.2)) < 1e-14);
}

TEST_CASE("two covariates use a product kernel") {
  const Dataset d(2, {0.0, 1.0, 0.0, 0.0}, {1.0, 5.0});
  const auto g = KernelSpec::gaussian({1.0, 0.5});
  const double w1 = std::exp(-0.5);
  const double mean = nw_cond_mean(d.observations(), std::vector<double>{0.0, 0.0}, g).value;
  CHECK(std::abs(mean - (1.0 + 5.0 * w1) / (1.0 + w1)) < 1e-14);
}
