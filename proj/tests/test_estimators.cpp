#include <doctest.h>

#include <cmath>

#include "fracmle/estimators.hpp"
#include "fracmle/fbm.hpp"
#include "fracmle/rng.hpp"
#include "oracle_values.hpp"

using namespace fracmle;

namespace {

double rel(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

double gfun(double u) { return u + 0.3 * u * u; }

}  // namespace

TEST_CASE("left cell values drop the final node") {
  std::vector<double> nodes{1.0, 2.0, 4.0, 8.0};
  auto cells = est::left_cells(nodes);
  REQUIRE(cells.size() == 3);
  CHECK(cells[0] == 1.0);
  CHECK(cells[2] == 4.0);
}

TEST_CASE("z form estimator recovers a noiseless slope exactly") {
  double dt = 0.01, theta = -1.3;
  std::vector<double> q{0.5, -1.2, 2.0, 0.7, -0.3};
  std::vector<double> dz(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) dz[i] = theta * q[i] * dt;
  auto r = est::mle_z_form(q, dz, dt);
  CHECK(r.theta == doctest::Approx(theta).epsilon(1e-13));
  double info = 0.0;
  for (double v : q) info += v * v * dt;
  CHECK(r.information == doctest::Approx(info).epsilon(1e-13));
}

TEST_CASE("w form on negated innovations is the z form") {
  double dt = 0.05;
  CounterRng rng(31);
  auto q = rng.gauss_vector(40, 0);
  auto dz = rng.gauss_vector(40, 64);
  std::vector<double> neg(dz);
  for (double& v : neg) v = -v;
  auto zr = est::mle_z_form(q, dz, dt);
  auto wr = est::mle_w_form(q, neg, dt);
  CHECK(wr.theta == doctest::Approx(zr.theta).epsilon(1e-14));
  CHECK(wr.information == doctest::Approx(zr.information).epsilon(1e-14));
}

TEST_CASE("likelihood peaks at the w form estimate") {
  double dt = 0.02;
  CounterRng rng(32);
  auto q = rng.gauss_vector(60, 0);
  auto dw = rng.gauss_vector(60, 128);
  auto r = est::mle_w_form(q, dw, dt);
  double peak = est::loglikelihood(r.theta, q, dw, dt);
  CHECK(peak > est::loglikelihood(r.theta + 0.1, q, dw, dt));
  CHECK(peak > est::loglikelihood(r.theta - 0.1, q, dw, dt));
}

TEST_CASE("flat drift samples leave the information degenerate") {
  std::vector<double> q(32, 0.0), dz(32, 0.1);
  try {
    est::mle_z_form(q, dz, 0.01);
    FAIL("expected a degenerate information throw");
  } catch (const est::DegenerateInformation& e) {
    CHECK(e.information == 0.0);
  }
}

TEST_CASE("node quadrature route hits the frozen deterministic values") {
  std::size_t n = 2048;
  Grid g(n, 1.0 / static_cast<double>(n));
  std::vector<double> gn(n + 1);
  for (std::size_t i = 0; i <= n; ++i) gn[i] = gfun(g.node(i));
  for (double H : {0.3, 0.7}) {
    auto q = est::compute_Q(H, g, gn);
    for (const auto& pin : oracle::kQDeterministic) {
      if (pin.H != H) continue;
      std::size_t i = pin.t == 0.5 ? n / 2 : n;
      CAPTURE(H);
      CAPTURE(pin.t);
      // discretization error, about 5e-5 for the sub-half rows at this n
      CHECK(rel(q[i], pin.value) < 1e-4);
    }
  }
}

TEST_CASE("convolution route tracks the plan route") {
  std::size_t n = 512;
  Grid g(n, 1.0 / static_cast<double>(n));
  std::vector<double> gn(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    double u = g.node(i);
    gn[i] = std::sin(2.0 * u) + 0.4 * u;
  }
  for (double H : {0.3, 0.7}) {
    auto slow = est::compute_Q(H, g, gn);
    auto fast = est::compute_q_fast(H, g, gn);
    REQUIRE(fast.size() == slow.size());
    double sup = 0.0, gap = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      sup = std::max(sup, std::abs(slow[i]));
      gap = std::max(gap, std::abs(fast[i] - slow[i]));
    }
    CAPTURE(H);
    CHECK(gap / sup < 5e-3);
  }
}

TEST_CASE("linear running sum route degenerates to summation at one half") {
  Grid g(64, 1.0 / 64.0);
  CounterRng rng(33);
  auto dz = rng.gauss_vector(g.n, 0);
  auto q = est::q_linear_from_dz(0.5, g, dz);
  REQUIRE(q.size() == g.n + 1);
  double acc = 0.0;
  for (std::size_t i = 1; i <= g.n; ++i) {
    acc += dz[i - 1];
    CHECK(q[i] == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("kernel transform objects at the brownian point") {
  Grid g(256, 1.0 / 256.0);
  CounterRng rng(34);
  auto p = fbm::sample_volterra(0.5, g, rng, 0);
  auto kb = est::kb_objects(0.5, g, p.values);
  REQUIRE(kb.z.size() == g.n + 1);
  REQUIRE(kb.omega.size() == g.n + 1);
  for (std::size_t i = 0; i <= g.n; ++i) {
    CHECK(std::abs(kb.z[i] - p.values[i]) < 1e-12);
    CHECK(kb.omega[i] == doctest::Approx(g.node(i)).epsilon(1e-13));
  }
  // recovery map is also the identity there
  auto w = est::z_from_kb(0.5, g, kb.z);
  for (std::size_t i = 0; i <= g.n; ++i)
    CHECK(std::abs(w[i] - kb.z[i]) < 1e-12);
}

TEST_CASE("time change is monotone with the right endpoint") {
  Grid g(100, 0.02);
  CounterRng rng(35);
  auto p = fbm::sample_volterra(0.3, g, rng, 0);
  auto kb = est::kb_objects(0.3, g, p.values);
  auto c = special::hurst_constants(0.3);
  double t = g.horizon();
  CHECK(rel(kb.omega[g.n], std::pow(t, 1.4) / c.lambda) < 1e-12);
  for (std::size_t i = 1; i <= g.n; ++i) CHECK(kb.omega[i] > kb.omega[i - 1]);
}

TEST_CASE("kernel transform recovers the driver scale") {
  // theta = 0: the recovered brownian-scale process should shadow the driver
  for (double H : {0.3, 0.7}) {
    Grid g(1024, 1.0 / 1024.0);
    CounterRng rng(36);
    auto p = fbm::sample_volterra(H, g, rng, 0);
    auto kb = est::kb_objects(H, g, p.values);
    auto w = est::z_from_kb(H, g, kb.z);
    double acc = 0.0, sup = 0.0, gap = 0.0;
    for (std::size_t i = 1; i <= g.n; ++i) {
      acc += p.driver[i - 1];
      sup = std::max(sup, std::abs(acc));
      gap = std::max(gap, std::abs(w[i] - acc));
    }
    CAPTURE(H);
    CHECK(gap / sup < 0.15);
  }
}
