#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fracmle/grid.hpp"
#include "fracmle/special.hpp"

namespace fracmle::fracops {

// fractional integral (I^a f)(t) = (1/G(a)) int_0^t (t-s)^{a-1} f(s) ds,
// piecewise-linear product integration, f given at grid nodes
std::vector<double> rl_integral(double alpha, const Grid& g,
                                const std::vector<double>& f);

// fractional derivative of order a in (0,1) as d/dt of I^{1-a} f
std::vector<double> rl_derivative(double alpha, const Grid& g,
                                  const std::vector<double>& f);

std::vector<double> convolve_direct(const std::vector<double>& a,
                                    const std::vector<double>& b);
// fft linear convolution; self-checks against the direct form on a small
// probe once per process
std::vector<double> convolve_fast(const std::vector<double>& a,
                                  const std::vector<double>& b);

// lag weights for convolving against the power kernel (t-s)^{order-1}, from
// the binomial expansion of (1-z)^{-order} scaled by Gamma(order) dt^order;
// rules of complementary order compose to plain summation on the grid, which
// keeps a synthesis pass and its whitening pass consistent at the cell scale
std::vector<double> frac_weights(double order, std::size_t n, double dt);

// Row of inverse-transfer weights w_t(u): applied to increments of the
// observed process they return the underlying Brownian-level process,
//   w_t(u) = (d c)^{-1} u^{1/2-H} [ (1-u/t)^{1/2-H} - (H-1/2) g(u/t) ],
// with g(x) = int_x^1 (1-v)^{1/2-H} v^{-1} dv. Identically 1 at H = 1/2.
class WhiteningRow {
 public:
  explicit WhiteningRow(double H);
  double weight(double t, double u) const;
  // closed form int_0^t w_t(u) du
  double row_integral(double t) const;
  // exact int_{u0}^{u1} w_t(u) du from the incomplete-beta antiderivative;
  // needs 0 <= u0 < u1 <= t
  double cell_mass(double t, double u0, double u1) const;
  // fresh row per node: out[i] = sum_j (row weights at t_i) dx_j
  std::vector<double> whiten(const Grid& g, const std::vector<double>& dx) const;

 private:
  double primitive(double v) const;  // antiderivative of w_t(tv)/t^{1/2-H} in v
  double H_;
  double front_;
  std::unique_ptr<special::InverseKernelProfile> prof_;
  std::unique_ptr<special::BetaHead> head_;  // head integral for cell masses
  double head_full_ = 0.0;                   // complete beta closing head_
};

// Cell masses of the weighting measure with density (r/t)^{1/2-H}(1-r/t)^{-1/2-H}
// on [0,t], m equal cells, exact integrals; only defined for H < 1/2.
// Total mass t B(3/2-H, 1/2-H).
std::vector<double> mu_weights(double H, double t, std::size_t m);

// Lower-triangular quadrature plan taking drift samples g(X) at nodes to the
// process Q at nodes. Rows fold in all normalization so apply() is a plain
// triangular matvec. Cacheable on disk keyed by (H, n, dt).
class QPlan {
 public:
  QPlan(double H, const Grid& g);
  double hurst() const { return H_; }
  const Grid& grid() const { return grid_; }
  std::vector<double> apply(const std::vector<double>& gnodes) const;
  const std::vector<double>& row(std::size_t i) const;

  bool save(const std::string& dir) const;
  static std::unique_ptr<QPlan> load_or_build(double H, const Grid& g,
                                              const std::string& dir);

 private:
  QPlan() = default;
  void build();
  std::string cache_name(const std::string& dir) const;

  double H_ = 0.5;
  Grid grid_;
  std::vector<std::vector<double>> rows_;  // row i has i+1 node weights
};

// directory from the plan cache environment variable, empty if unset
std::string default_plan_cache_dir();

}  // namespace fracmle::fracops
