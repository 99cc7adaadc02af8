#include <doctest.h>

#include <cmath>

#include "fracmle/discrete.hpp"
#include "fracmle/fbm.hpp"
#include "fracmle/rng.hpp"
#include "fracmle/sde.hpp"
#include "fracmle/special.hpp"

using namespace fracmle;

TEST_CASE("integer time estimator recovers a noiseless slope exactly") {
  double theta = -0.45;
  std::vector<double> q{0.0, 1.0, -0.8, 2.1, 0.4};
  std::vector<double> z(q.size() + 0, 0.0);
  z.resize(q.size());
  for (std::size_t m = 0; m + 1 < q.size(); ++m)
    z[m + 1] = z[m] + theta * q[m];
  auto r = disc::theta_bar(q, z);
  CHECK(r.theta == doctest::Approx(theta).epsilon(1e-13));
}

TEST_CASE("integer time estimator rejects degenerate inputs") {
  std::vector<double> q(8, 0.0), z(8, 1.0);
  CHECK_THROWS_AS(disc::theta_bar(q, z), est::DegenerateInformation);
  std::vector<double> a{1.0, 2.0}, b{1.0};
  CHECK_THROWS_AS(disc::theta_bar(a, b), std::invalid_argument);
}

TEST_CASE("surrogates at the brownian point reduce to the classical sums") {
  Grid g(40, 1.0);
  CounterRng rng(41);
  auto noise = fbm::sample_volterra(0.5, g, rng, 0);
  disc::DiscreteRecord rec;
  rec.x = noise.values;
  auto drift = sde::drift_by_name("linear");

  auto q = disc::q_check(0.5, rec, drift);
  auto z = disc::z_check(0.5, rec);
  REQUIRE(q.size() == 41);
  CHECK(q[0] == 0.0);
  for (std::size_t n = 1; n <= 40; ++n) {
    CHECK(q[n] == doctest::Approx(drift.b(rec.x[n])).epsilon(1e-13));
    CHECK(z[n] == doctest::Approx(rec.x[n]).epsilon(1e-13));
  }

  auto bar = disc::theta_check(0.5, rec, drift);
  auto classical = disc::classical_discrete_mle(rec.x, drift, 1.0);
  CHECK(bar.theta == doctest::Approx(classical.theta).epsilon(1e-12));
}

TEST_CASE("sub half surrogate matches its defining sum") {
  double H = 0.3;
  disc::DiscreteRecord rec;
  rec.x = {0.0, 0.7, -0.4, 1.1, 0.5};
  auto drift = sde::drift_by_name("linear");
  auto q = disc::q_check(H, rec, drift);
  auto c = special::hurst_constants(H);
  double e = 0.5 - H;
  for (std::size_t n = 1; n <= 4; ++n) {
    double acc = 0.0;
    for (std::size_t j = 1; j < n; ++j)
      acc += std::pow(static_cast<double>(n - j), -0.5 - H) *
             std::pow(static_cast<double>(j), e) * drift.b(rec.x[j]);
    double want = c.kappa * std::pow(static_cast<double>(n), -e) * acc;
    CAPTURE(n);
    CHECK(q[n] == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("classical discrete estimator equals its closed form") {
  std::vector<double> x{0.0, 0.4, 0.1, -0.3, 0.2};
  auto drift = sde::drift_by_name("linear");
  double dt = 0.5;
  double num = 0.0, info = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    num += x[i] * (x[i + 1] - x[i]);
    info += x[i] * x[i] * dt;
  }
  auto r = disc::classical_discrete_mle(x, drift, dt);
  CHECK(r.theta == doctest::Approx(num / info).epsilon(1e-13));
}

TEST_CASE("surrogate estimates stay finite and deterministic") {
  for (double H : {0.3, 0.7}) {
    Grid g(100 * 16, 1.0 / 16.0);
    CounterRng rng(42);
    auto noise = fbm::sample_volterra(H, g, rng, 0);
    auto x = sde::euler(sde::drift_by_name("linear"), -1.0, noise);
    disc::DiscreteRecord rec;
    rec.x = sde::subsample_integer(x, 16);
    REQUIRE(rec.horizon() == 100);
    auto r1 = disc::theta_check(H, rec, sde::drift_by_name("linear"));
    auto r2 = disc::theta_check(H, rec, sde::drift_by_name("linear"));
    CAPTURE(H);
    CHECK(std::isfinite(r1.theta));
    CHECK(r1.theta == r2.theta);
    // N = 100 integer observations put the estimate in the right region
    CHECK(std::abs(r1.theta - (-1.0)) < 0.8);
  }
}

TEST_CASE("bracket diagnostics on a frozen step process vanish") {
  std::size_t npu = 32, N = 16;
  std::vector<double> q(N * npu + 1), z(N * npu + 1);
  for (std::size_t i = 0; i <= N * npu; ++i) {
    q[i] = static_cast<double>(i / npu);  // constant on unit blocks
    z[i] = static_cast<double>(i) / static_cast<double>(npu);
  }
  auto d = disc::bracket_diagnostics(q, z, npu);
  REQUIRE(d.qv_ab.size() == N);
  for (std::size_t n = 0; n < N; ++n) CHECK(std::abs(d.qv_ab[n]) < 1e-12);
}

TEST_CASE("bracket diagnostics on a linear ramp") {
  std::size_t npu = 64, N = 32;
  std::vector<double> q(N * npu + 1), z(N * npu + 1);
  for (std::size_t i = 0; i <= N * npu; ++i) {
    double s = static_cast<double>(i) / static_cast<double>(npu);
    q[i] = s;
    z[i] = s;
  }
  auto d = disc::bracket_diagnostics(q, z, npu);
  // int_m^{m+1} (s-m)^2 ds = 1/3 per unit block
  double want = static_cast<double>(N) / 3.0;
  CHECK(d.qv_ab[N - 1] == doctest::Approx(want).epsilon(0.05));
  // quadratic variation of the frozen process grows like the cube of time
  CHECK(d.qv_b_growth > 2.5);
  CHECK(d.qv_b_growth < 3.5);
  // continuous and frozen numerators against their closed forms
  double tN = static_cast<double>(N);
  CHECK(d.a_num[N - 1] == doctest::Approx(tN * tN / 2.0).epsilon(0.02));
  CHECK(d.b_num[N - 1] == doctest::Approx(tN * (tN - 1.0) / 2.0).epsilon(0.02));
}
