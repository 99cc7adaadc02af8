#include <doctest.h>

#include <cmath>

#include "fracmle/drift.hpp"
#include "fracmle/fbm.hpp"
#include "fracmle/sde.hpp"

using namespace fracmle;

namespace {

double numeric_db(const sde::DriftModel& m, double x, double h = 1e-6) {
  return (m.b(x + h) - m.b(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("drift registry serves the presets") {
  const auto& reg = sde::drift_registry();
  CHECK(reg.count("linear") == 1);
  CHECK(reg.count("logcosh") == 1);
  CHECK(reg.count("capped_power") == 1);
  CHECK_THROWS_AS(sde::drift_by_name("cubic"), std::invalid_argument);
}

TEST_CASE("linear drift model") {
  auto m = sde::make_linear();
  CHECK(m.is_linear);
  CHECK(m.b(2.5) == 2.5);
  CHECK(m.b(-1.0) == -1.0);
  CHECK(m.db(4.0) == 1.0);
  CHECK(m.d2b(4.0) == 0.0);
  CHECK(m.gamma_known);
  CHECK(m.gamma == 0.0);
  CHECK(m.slope_lower > 0.0);
}

TEST_CASE("logcosh drift model") {
  auto m = sde::drift_by_name("logcosh");
  CHECK(m.b(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  for (double x : {-3.0, -0.7, 0.4, 2.2}) {
    CAPTURE(x);
    CHECK(m.db(x) == doctest::Approx(numeric_db(m, x)).epsilon(1e-7));
    double dd = (m.db(x + 1e-5) - m.db(x - 1e-5)) / 2e-5;
    CHECK(m.d2b(x) == doctest::Approx(dd).epsilon(1e-5));
  }
  // slope pinched between 1/2 and 3/2
  CHECK(m.db(-30.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(m.db(30.0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(m.slope_lower == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("capped power drift model") {
  auto m = sde::make_capped_power(1.0, 1.0, 0.5);
  CHECK(m.b(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.b(0.25) == doctest::Approx(1.75).epsilon(1e-14));
  CHECK(m.b(4.0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(m.b(-0.25) == doctest::Approx(1.25).epsilon(1e-14));
  // derivative agrees with a finite difference away from the kink and cap
  for (double x : {0.3, 0.7, -0.4, 2.0}) {
    CAPTURE(x);
    CHECK(m.db(x) == doctest::Approx(numeric_db(m, x)).epsilon(1e-6));
  }
}

TEST_CASE("custom drift wraps the supplied callables") {
  auto m = sde::make_custom([](double x) { return std::sin(x); },
                            [](double x) { return std::cos(x); },
                            [](double x) { return -std::sin(x); }, 1.0, 1.0);
  CHECK(m.b(0.5) == doctest::Approx(std::sin(0.5)).epsilon(1e-14));
  CHECK(m.db(0.5) == doctest::Approx(std::cos(0.5)).epsilon(1e-14));
}

TEST_CASE("euler is the left point recursion") {
  Grid g(128, 1.0 / 32.0);
  CounterRng rng(21);
  auto noise = fbm::sample_volterra(0.5, g, rng, 0);
  auto drift = sde::make_linear();
  double theta = -0.7;
  auto x = sde::euler(drift, theta, noise);
  REQUIRE(x.size() == g.n + 1);
  double cur = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    cur += theta * drift.b(cur) * g.dt + (noise.values[i + 1] - noise.values[i]);
    CHECK(x[i + 1] == doctest::Approx(cur).epsilon(1e-12));
  }
}

TEST_CASE("linear solution matches a direct variation of constants sum") {
  Grid g(128, 1.0 / 32.0);
  CounterRng rng(22);
  auto noise = fbm::sample_volterra(0.3, g, rng, 0);
  double theta = -0.8;
  auto x = sde::linear_exact(theta, noise);
  REQUIRE(x.size() == g.n + 1);

  // X_t = B_t + theta int_0^t e^{theta(t-s)} B_s ds, B linear on each cell
  const auto& B = noise.values;
  for (std::size_t i : {std::size_t(1), std::size_t(17), std::size_t(128)}) {
    double ti = g.node(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      double a = ti - g.node(j + 1), b = ti - g.node(j);
      double slope = (B[j + 1] - B[j]) / g.dt;
      double e_b = std::exp(theta * b), e_a = std::exp(theta * a);
      double i0 = (e_b - e_a) / theta;
      double i1 = b * i0 - (e_b * (b / theta - 1.0 / (theta * theta)) -
                            e_a * (a / theta - 1.0 / (theta * theta)));
      acc += B[j] * i0 + slope * i1;
    }
    CAPTURE(i);
    CHECK(x[i] == doctest::Approx(B[i] + theta * acc).epsilon(1e-10));
  }
}

TEST_CASE("euler converges to the linear solution") {
  Grid g(4096, 1.0 / 4096.0);
  CounterRng rng(23);
  auto noise = fbm::sample_volterra(0.7, g, rng, 0);
  double theta = -1.0;
  auto xe = sde::euler(sde::make_linear(), theta, noise);
  auto xl = sde::linear_exact(theta, noise);
  double gap = 0.0;
  for (std::size_t i = 0; i <= g.n; ++i)
    gap = std::max(gap, std::abs(xe[i] - xl[i]));
  CHECK(gap < 5e-3);
}

TEST_CASE("a priori bounds hold on simulated paths") {
  Grid g(512, 1.0 / 128.0);
  CounterRng rng(24);
  for (double H : {0.3, 0.7}) {
    auto noise = fbm::sample_volterra(H, g, rng, 0);
    auto drift = sde::drift_by_name("logcosh");
    auto x = sde::euler(drift, 0.5, noise);
    auto rep = sde::gronwall_check(drift, 0.5, noise, x);
    CAPTURE(H);
    CHECK(rep.sup_ok);
    CHECK(rep.increment_ok);
    CHECK(rep.worst_sup_margin >= 0.0);
    CHECK(rep.worst_increment_margin >= 0.0);
  }
}

TEST_CASE("integer subsampling keeps every block boundary") {
  std::vector<double> x(65);
  for (std::size_t i = 0; i <= 64; ++i) x[i] = static_cast<double>(i);
  auto sub = sde::subsample_integer(x, 8);
  REQUIRE(sub.size() == 9);
  for (std::size_t m = 0; m < 9; ++m)
    CHECK(sub[m] == static_cast<double>(8 * m));
}
