#pragma once

#include <vector>

#include "fracmle/drift.hpp"
#include "fracmle/fbm.hpp"
#include "fracmle/grid.hpp"

namespace fracmle::sde {

// Euler scheme for X_t = theta int_0^t b(X_s) ds + B_t on the noise grid
std::vector<double> euler(const DriftModel& drift, double theta, const fbm::Path& noise);

// Exact pathwise solution for linear drift: X = B + theta int_0^t e^{theta(t-s)} B_s ds
// with B piecewise linear between nodes; O(n) recursion
std::vector<double> linear_exact(double theta, const fbm::Path& noise);

// a-priori bound sup_{s<=t}|X_s| <= (C|theta| t + sup_{s<=t}|B_s|) e^{C|theta| t}
// checked at every node, and the increment bound
// |X_t - X_s| <= C|theta|(1 + sup|X|)|t-s| + |B_t - B_s| on a coarse stride
struct GronwallReport {
  bool sup_ok = true;
  bool increment_ok = true;
  double worst_sup_margin = 0.0;        // min over nodes of bound - |X|
  double worst_increment_margin = 0.0;  // min over checked pairs
};

GronwallReport gronwall_check(const DriftModel& drift, double theta,
                              const fbm::Path& noise, const std::vector<double>& x,
                              std::size_t stride = 16);

// keep every (nodes_per_unit)-th node: X at integer times 0..N
std::vector<double> subsample_integer(const std::vector<double>& x,
                                      std::size_t nodes_per_unit);

}  // namespace fracmle::sde
