#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "fracmle/fbm.hpp"
#include "fracmle/frac_ops.hpp"
#include "fracmle/rng.hpp"
#include "oracle_values.hpp"

using namespace fracmle;

namespace {

double rel(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

double gfun(double u) { return u + 0.3 * u * u; }

}  // namespace

TEST_CASE("fractional integral of monomials") {
  Grid g(512, 1.0 / 512.0);
  for (double a : {0.2, 0.5, 0.8}) {
    CAPTURE(a);
    std::vector<double> one(g.n + 1, 1.0), lin(g.n + 1);
    for (std::size_t i = 0; i <= g.n; ++i) lin[i] = g.node(i);
    auto i_one = fracops::rl_integral(a, g, one);
    auto i_lin = fracops::rl_integral(a, g, lin);
    // product integration is exact on piecewise linear inputs
    for (std::size_t i : {std::size_t(1), g.n / 2, g.n}) {
      double t = g.node(i);
      CHECK(rel(i_one[i], std::pow(t, a) / std::tgamma(1.0 + a)) < 1e-12);
      CHECK(rel(i_lin[i], std::pow(t, 1.0 + a) / std::tgamma(2.0 + a)) < 1e-12);
    }
    // quadratic input picks up the curvature error, second order in dt
    std::vector<double> sq(g.n + 1);
    for (std::size_t i = 0; i <= g.n; ++i) sq[i] = g.node(i) * g.node(i);
    auto i_sq = fracops::rl_integral(a, g, sq);
    double want = 2.0 / std::tgamma(3.0 + a);
    CHECK(rel(i_sq[g.n], want) < 1e-5);
  }
}

TEST_CASE("fractional derivative of monomials") {
  Grid g(1024, 1.0 / 1024.0);
  for (double a : {0.3, 0.6}) {
    CAPTURE(a);
    std::vector<double> lin(g.n + 1);
    for (std::size_t i = 0; i <= g.n; ++i) lin[i] = g.node(i);
    auto d_lin = fracops::rl_derivative(a, g, lin);
    for (std::size_t i : {g.n / 2, g.n}) {
      double t = g.node(i);
      double want = std::pow(t, 1.0 - a) / std::tgamma(2.0 - a);
      CHECK(rel(d_lin[i], want) < 1e-2);
    }
  }
}

TEST_CASE("derivative undoes the integral of matching order") {
  Grid g(512, 1.0 / 512.0);
  std::vector<double> f(g.n + 1);
  for (std::size_t i = 0; i <= g.n; ++i) f[i] = gfun(g.node(i));
  for (double a : {0.25, 0.7}) {
    auto round = fracops::rl_derivative(a, g, fracops::rl_integral(a, g, f));
    CAPTURE(a);
    for (std::size_t i : {g.n / 4, g.n / 2, g.n}) {
      CHECK(rel(round[i], f[i]) < 5e-3);
    }
  }
}

TEST_CASE("fast convolution matches the direct form") {
  CounterRng rng(606);
  for (auto [na, nb] : {std::pair<std::size_t, std::size_t>{1, 1},
                        {7, 3},
                        {64, 64},
                        {129, 255},
                        {1000, 17}}) {
    auto a = rng.gauss_vector(na, 0);
    auto b = rng.gauss_vector(nb, 4096);
    auto d = fracops::convolve_direct(a, b);
    auto f = fracops::convolve_fast(a, b);
    REQUIRE(d.size() == na + nb - 1);
    REQUIRE(f.size() == d.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      worst = std::max(worst, std::abs(d[i] - f[i]));
    CAPTURE(na);
    CAPTURE(nb);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("power kernel lag weights start from the gamma scale") {
  double dt = 0.01;
  for (double order : {0.3, 0.8, 1.2}) {
    auto w = fracops::frac_weights(order, 16, dt);
    REQUIRE(w.size() == 16);
    CHECK(rel(w[0], std::tgamma(order) * std::pow(dt, order)) < 1e-13);
    for (std::size_t k = 1; k < 16; ++k) {
      double want =
          w[k - 1] * (static_cast<double>(k) - 1.0 + order) / static_cast<double>(k);
      CHECK(rel(w[k], want) < 1e-13);
    }
  }
}

TEST_CASE("complementary order weights compose to plain summation") {
  double dt = 0.125;
  std::size_t n = 64;
  for (double a : {0.2, 0.5, 0.8}) {
    auto wa = fracops::frac_weights(a, n, dt);
    auto wb = fracops::frac_weights(1.0 - a, n, dt);
    auto composed = fracops::convolve_direct(wa, wb);
    // (1-z)^{-a} (1-z)^{-(1-a)} = (1-z)^{-1}: every lag carries the same mass
    double want = std::tgamma(a) * std::tgamma(1.0 - a) * dt;
    CAPTURE(a);
    for (std::size_t k = 0; k < n; ++k) CHECK(rel(composed[k], want) < 1e-12);
  }
}

TEST_CASE("row weights match the frozen pins") {
  for (const auto& pin : oracle::kRowWeight) {
    fracops::WhiteningRow w(pin.H);
    CAPTURE(pin.H);
    CAPTURE(pin.t);
    CAPTURE(pin.u);
    CHECK(rel(w.weight(pin.t, pin.u), pin.value) < 2e-13);
  }
}

TEST_CASE("row integrals match the frozen pins") {
  for (const auto& pin : oracle::kRowIntegral) {
    fracops::WhiteningRow w(pin.H);
    CAPTURE(pin.H);
    CAPTURE(pin.t);
    CHECK(rel(w.row_integral(pin.t), pin.value) < 2e-12);
  }
}

TEST_CASE("row cell masses partition the row integral") {
  for (double H : {0.3, 0.7}) {
    fracops::WhiteningRow w(H);
    double t = 2.0;
    double acc = 0.0;
    std::size_t m = 16;
    for (std::size_t j = 0; j < m; ++j) {
      double u0 = t * static_cast<double>(j) / static_cast<double>(m);
      double u1 = t * static_cast<double>(j + 1) / static_cast<double>(m);
      acc += w.cell_mass(t, u0, u1);
    }
    CAPTURE(H);
    CHECK(rel(acc, w.row_integral(t)) < 1e-11);
    // one interior cell against adaptive quadrature
    double want = special::integrate01([&](double x, double) {
      return 0.25 * w.weight(t, 0.5 + 0.25 * x);
    });
    CHECK(rel(w.cell_mass(t, 0.5, 0.75), want) < 1e-9);
  }
}

TEST_CASE("whitening is the identity at the brownian point") {
  Grid g(128, 1.0 / 128.0);
  CounterRng rng(707);
  auto dx = rng.gauss_vector(g.n, 0);
  fracops::WhiteningRow w(0.5);
  CHECK(w.weight(1.0, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
  auto z = w.whiten(g, dx);
  REQUIRE(z.size() == g.n + 1);
  double acc = 0.0;
  for (std::size_t i = 1; i <= g.n; ++i) {
    acc += dx[i - 1];
    CHECK(std::abs(z[i] - acc) < 1e-12);
  }
}

TEST_CASE("whitening returns the driver of a synthesized path") {
  for (double H : {0.3, 0.7}) {
    Grid g(256, 1.0 / 256.0);
    CounterRng rng(808);
    auto p = fbm::sample_volterra(H, g, rng, 0);
    fracops::WhiteningRow w(H);
    auto z = w.whiten(g, increments(p.values));
    double acc = 0.0, sup = 0.0, gap = 0.0, head_gap = 0.0;
    for (std::size_t i = 1; i <= g.n; ++i) {
      acc += p.driver[i - 1];
      sup = std::max(sup, std::abs(acc));
      gap = std::max(gap, std::abs(z[i] - acc));
      if (i <= 128) head_gap = std::max(head_gap, std::abs(z[i] - acc));
    }
    CAPTURE(H);
    // the leading block inverts the synthesis masses directly
    CHECK(head_gap < 1e-8);
    CHECK(gap / sup < 0.05);
  }
}

TEST_CASE("weighting measure cells") {
  double t = 2.0;
  auto cells = fracops::mu_weights(0.3, t, 64);
  REQUIRE(cells.size() == 64);
  double acc = 0.0;
  for (double c : cells) {
    CHECK(c > 0.0);
    acc += c;
  }
  CHECK(rel(acc, t * 4.7507506949421837) < 1e-11);
  CHECK_THROWS_AS(fracops::mu_weights(0.5, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(fracops::mu_weights(0.7, 1.0, 8), std::invalid_argument);
}

TEST_CASE("quadrature plan converges to the frozen deterministic values") {
  // the plan is a discretization, so pin errors shrink with the grid; at
  // n=2048 the worst row sits near 5e-5 and each doubling cuts it in half
  for (std::size_t n : {1024u, 2048u}) {
    Grid g(n, 1.0 / static_cast<double>(n));
    std::vector<double> gn(n + 1);
    for (std::size_t i = 0; i <= n; ++i) gn[i] = gfun(g.node(i));
    for (const auto& pin : oracle::kQDeterministic) {
      fracops::QPlan plan(pin.H, g);
      auto q = plan.apply(gn);
      std::size_t i = pin.t == 0.5 ? n / 2 : n;
      CAPTURE(n);
      CAPTURE(pin.H);
      CAPTURE(pin.t);
      CHECK(rel(q[i], pin.value) < (n == 2048 ? 1e-4 : 2e-4));
    }
  }
  // refinement ratio on the slowest row, about n^{-1.1}
  Grid g1(1024, 1.0 / 1024.0), g2(2048, 1.0 / 2048.0);
  std::vector<double> a(g1.n + 1), b(g2.n + 1);
  for (std::size_t i = 0; i <= g1.n; ++i) a[i] = gfun(g1.node(i));
  for (std::size_t i = 0; i <= g2.n; ++i) b[i] = gfun(g2.node(i));
  double pin = 1.3301582013598597;
  double e1 = rel(fracops::QPlan(0.3, g1).apply(a)[g1.n], pin);
  double e2 = rel(fracops::QPlan(0.3, g2).apply(b)[g2.n], pin);
  CHECK(e2 < 0.7 * e1);
}

TEST_CASE("quadrature plan shape and linearity") {
  Grid g(32, 0.125);
  fracops::QPlan plan(0.3, g);
  CHECK(plan.hurst() == 0.3);
  CHECK(plan.row(0).size() == 0);  // nothing feeds the t=0 node
  for (std::size_t i : {std::size_t(5), std::size_t(32)})
    CHECK(plan.row(i).size() == i + 1);
  CHECK_THROWS_AS(plan.row(33), std::invalid_argument);

  CounterRng rng(909);
  auto f1 = rng.gauss_vector(33, 0);
  auto f2 = rng.gauss_vector(33, 64);
  std::vector<double> mix(33);
  for (std::size_t i = 0; i < 33; ++i) mix[i] = 2.0 * f1[i] - 0.5 * f2[i];
  auto q1 = plan.apply(f1);
  auto q2 = plan.apply(f2);
  auto qm = plan.apply(mix);
  for (std::size_t i = 0; i <= 32; ++i)
    CHECK(std::abs(qm[i] - (2.0 * q1[i] - 0.5 * q2[i])) < 1e-12);
}

TEST_CASE("quadrature plan disk cache round trip") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "fracmle_plan_cache_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Grid g(24, 0.25);
  fracops::QPlan built(0.35, g);
  REQUIRE(built.save(dir.string()));
  auto loaded = fracops::QPlan::load_or_build(0.35, g, dir.string());
  for (std::size_t i = 0; i <= g.n; ++i) {
    REQUIRE(loaded->row(i).size() == built.row(i).size());
    for (std::size_t k = 0; k < built.row(i).size(); ++k)
      CHECK(loaded->row(i)[k] == built.row(i)[k]);
  }
  // a different grid must not be served from the same entry
  Grid g2(24, 0.5);
  auto other = fracops::QPlan::load_or_build(0.35, g2, dir.string());
  CHECK(other->grid().dt == 0.5);
  fs::remove_all(dir);
}

TEST_CASE("plan cache directory comes from the environment") {
  setenv("FRACMLE_PLAN_CACHE", "/tmp/fracmle_env_probe", 1);
  CHECK(fracops::default_plan_cache_dir() == "/tmp/fracmle_env_probe");
  unsetenv("FRACMLE_PLAN_CACHE");
  CHECK(fracops::default_plan_cache_dir().empty());
}
