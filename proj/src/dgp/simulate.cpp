#include "npmix/dgp/simulate.hpp"

#include "npmix/error.hpp"
#include "npmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace npmix {

namespace {

struct LawDim {
  std::size_t operator()(const UniformLaw& u) const {
    if (u.lo.empty() || u.lo.size() != u.hi.size()) fail(ErrorKind::ConfigError, "uniform law: lo and hi must have equal nonzero length");
    for (std::size_t d = 0; d < u.lo.size(); ++d)
      if (!(u.lo[d] < u.hi[d]) || !std::isfinite(u.lo[d]) || !std::isfinite(u.hi[d]))
        fail(ErrorKind::ConfigError, "uniform law: need lo < hi in coordinate " + std::to_string(d + 1));
    return u.lo.size();
  }
  std::size_t operator()(const GaussianLaw& g) const {
    if (g.mean.empty() || g.mean.size() != g.sd.size()) fail(ErrorKind::ConfigError, "gaussian law: mean and sd must have equal nonzero length");
    for (double s : g.sd)
      if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorKind::ConfigError, "gaussian law: sd must be positive");
    return g.mean.size();
  }
  std::size_t operator()(const GridLaw& g) const {
    if (g.points.empty()) fail(ErrorKind::ConfigError, "grid law: no points");
    const std::size_t k = g.points.front().size();
    if (k == 0) fail(ErrorKind::ConfigError, "grid law: empty point");
    for (const auto& p : g.points) {
      if (p.size() != k) fail(ErrorKind::ConfigError, "grid law: points differ in dimension");
      for (double v : p)
        if (!std::isfinite(v)) fail(ErrorKind::ConfigError, "grid law: non-finite coordinate");
    }
    return k;
  }
};

void draw_x(const CovariateLaw& law, std::size_t row, Stream& rng, double* x, std::size_t k) {
  if (const auto* u = std::get_if<UniformLaw>(&law)) {
    for (std::size_t d = 0; d < k; ++d) x[d] = u->lo[d] + (u->hi[d] - u->lo[d]) * rng.uniform();
  } else if (const auto* g = std::get_if<GaussianLaw>(&law)) {
    for (std::size_t d = 0; d < k; ++d) x[d] = g->mean[d] + g->sd[d] * rng.normal();
  } else {
    const auto& p = std::get<GridLaw>(law).points[row % std::get<GridLaw>(law).points.size()];
    std::copy(p.begin(), p.end(), x);
  }
}

}  // namespace

std::size_t validate_law(const CovariateLaw& law) { return std::visit(LawDim{}, law); }

Dataset simulate(const MixtureModel& model, const SimulationDesign& design, unsigned threads) {
  if (design.n == 0) fail(ErrorKind::ConfigError, "design.n must be at least 1");
  const std::size_t k = validate_law(design.law);
  if (k != model.dim())
    fail(ErrorKind::ConfigError, "covariate law has dimension " + std::to_string(k) + " but model expects " + std::to_string(model.dim()));
  const std::size_t n = design.n;
  std::vector<double> x(n * k);
  std::vector<double> z(n);
  std::vector<int> labels(n);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(k);
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng = Stream::derive(design.seed, i);
      draw_x(design.law, i, rng, row.data(), k);
      const double u = rng.uniform();
      std::size_t j = 0;
      double acc = model.weight(0, row);
      while (j + 1 < model.J() && u >= acc) {
        ++j;
        acc += model.weight(j, row);
      }
      const auto& c = model.component(j);
      z[i] = c.regression.value(row) + c.error->sample(rng);
      labels[i] = static_cast<int>(j + 1);
      for (std::size_t d = 0; d < k; ++d) x[d * n + i] = row[d];
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>((n + 1023) / 1024)));
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(n, w * chunk);
      const std::size_t e = std::min(n, b + chunk);
      pool.emplace_back([&, w, b, e] {
        try {
          work(b, e);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  Dataset out(k, std::move(x), std::move(z), design.record_labels ? std::move(labels) : std::vector<int>{});
  out.seed = design.seed;
  out.provenance = "simulate(seed=" + std::to_string(design.seed) + ", n=" + std::to_string(n) + ")";
  return out;
}

}  // namespace npmix
