#pragma once

#include <cstddef>
#include <vector>

#include "fracmle/drift.hpp"
#include "fracmle/estimators.hpp"

namespace fracmle::disc {

// process observed at integer times 0..N
struct DiscreteRecord {
  std::vector<double> x;
  std::size_t horizon() const { return x.empty() ? 0 : x.size() - 1; }
};

// theta_bar = sum_{m<N} Q_m (Z_{m+1}-Z_m) / sum_{m<N} Q_m^2
est::MleResult theta_bar(const std::vector<double>& q_int,
                         const std::vector<double>& z_int);

// Riemann surrogate for Q at integer times from observed drift values,
// sub-half form  Qc_n = kappa n^{H-1/2} sum_{j<n} (n-j)^{-H-1/2} j^{1/2-H} b(X_j),
// super-half form via the local term plus the compensated difference sum
std::vector<double> q_check(double H, const DiscreteRecord& rec,
                            const sde::DriftModel& drift);

// Riemann surrogate for the whitened observation at integer times using
// integer-node inverse-transfer weights; the j = 0 weight is 0 away from
// H = 1/2 and exactly 1 at H = 1/2
std::vector<double> z_check(double H, const DiscreteRecord& rec);

// theta_bar evaluated on the surrogates
est::MleResult theta_check(double H, const DiscreteRecord& rec,
                           const sde::DriftModel& drift);

// classical drift estimator at unit diffusion,
// theta = sum b(X_i)(X_{i+1}-X_i) / sum b(X_i)^2 dt
est::MleResult classical_discrete_mle(const std::vector<double>& x,
                                      const sde::DriftModel& drift, double dt);

// Quadratic-variation diagnostics of the discretization: continuous numerator
// A_n against its piecewise-frozen version B_n on a fine grid,
// <B>_n = sum_{m<n} Q_m^2,  <A-B>_n = int_0^n |Q_s - Q_[s]|^2 ds
struct BracketDiagnostics {
  std::vector<double> a_num;   // A_n, n = 1..N
  std::vector<double> b_num;   // B_n
  std::vector<double> qv_b;    // <B>_n
  std::vector<double> qv_ab;   // <A-B>_n
  std::vector<double> ratio;   // <A-B>_n / <B>_n
  double alpha_hat = 0.0;      // decay exponent of the ratio, last-decade fit
  double qv_b_growth = 0.0;    // log-log growth slope of <B>_n
};

BracketDiagnostics bracket_diagnostics(const std::vector<double>& q_fine,
                                       const std::vector<double>& z_fine,
                                       std::size_t nodes_per_unit);

}  // namespace fracmle::disc
