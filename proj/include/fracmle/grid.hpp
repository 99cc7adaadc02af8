#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracmle {

// Uniform grid t_i = i*dt, i = 0..n. Values sampled at nodes, increments on cells.
struct Grid {
  std::size_t n = 0;
  double dt = 0.0;

  Grid() = default;
  Grid(std::size_t n_, double dt_) : n(n_), dt(dt_) {
    if (n_ == 0 || dt_ <= 0.0) throw std::invalid_argument("bad grid");
  }

  double horizon() const { return static_cast<double>(n) * dt; }
  double node(std::size_t i) const { return static_cast<double>(i) * dt; }
  double mid(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dt; }

  std::vector<double> nodes() const {
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = node(i);
    return t;
  }
};

inline std::vector<double> increments(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("need at least two nodes");
  std::vector<double> d(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];
  return d;
}

inline std::vector<double> cumsum_from_zero(const std::vector<double>& d) {
  std::vector<double> x(d.size() + 1, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) x[i + 1] = x[i] + d[i];
  return x;
}

}  // namespace fracmle
