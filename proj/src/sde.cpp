#include "fracmle/sde.hpp"

#include <cmath>
#include <stdexcept>

namespace fracmle::sde {

std::vector<double> euler(const DriftModel& drift, double theta, const fbm::Path& noise) {
  std::size_t n = noise.grid.n;
  if (noise.values.size() != n + 1) throw std::invalid_argument("bad noise path");
  std::vector<double> x(n + 1, 0.0);
  double dt = noise.grid.dt;
  for (std::size_t i = 0; i < n; ++i) {
    double db = noise.values[i + 1] - noise.values[i];
    x[i + 1] = x[i] + theta * drift.b(x[i]) * dt + db;
  }
  return x;
}

namespace {

// phi1 = (e^z - 1)/z, phi2 = (e^z - 1 - z)/z^2, stable near z = 0
double phi1(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-4) return 0.5 + z / 6.0 + z * z / 24.0;
  return (std::expm1(z) - z) / (z * z);
}

}  // namespace

std::vector<double> linear_exact(double theta, const fbm::Path& noise) {
  std::size_t n = noise.grid.n;
  if (noise.values.size() != n + 1) throw std::invalid_argument("bad noise path");
  double dt = noise.grid.dt;
  double z = theta * dt;
  double e = std::exp(z);
  double p1 = phi1(z) * dt;        // int_0^dt e^{theta(dt-u)} du
  double p2 = phi2(z) * dt * dt;   // int_0^dt e^{theta(dt-u)} u du
  std::vector<double> x(n + 1, 0.0);
  double s = 0.0;  // int_0^t e^{theta(t-u)} B_u du
  for (std::size_t i = 0; i < n; ++i) {
    double slope = (noise.values[i + 1] - noise.values[i]) / dt;
    s = e * s + noise.values[i] * p1 + slope * p2;
    x[i + 1] = noise.values[i + 1] + theta * s;
  }
  return x;
}

GronwallReport gronwall_check(const DriftModel& drift, double theta,
                              const fbm::Path& noise, const std::vector<double>& x,
                              std::size_t stride) {
  std::size_t n = noise.grid.n;
  if (x.size() != n + 1) throw std::invalid_argument("bad solution path");
  GronwallReport rep;
  rep.worst_sup_margin = 1e300;
  rep.worst_increment_margin = 1e300;
  double c = drift.growth * std::abs(theta);
  double sup_b = 0.0, sup_x = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    double t = noise.grid.node(i);
    sup_b = std::max(sup_b, std::abs(noise.values[i]));
    sup_x = std::max(sup_x, std::abs(x[i]));
    double bound = (c * t + sup_b) * std::exp(c * t);
    double margin = bound - sup_x;
    rep.worst_sup_margin = std::min(rep.worst_sup_margin, margin);
    if (margin < 0.0) rep.sup_ok = false;
  }
  double whole_sup = sup_x;
  for (std::size_t i = 0; i + stride <= n; i += stride) {
    std::size_t j = i + stride;
    double dtms = noise.grid.node(j) - noise.grid.node(i);
    double bound = c * (1.0 + whole_sup) * dtms +
                   std::abs(noise.values[j] - noise.values[i]);
    // euler transport error accumulates on top of the continuum bound
    double slack = 1e-9 + c * drift.lipschitz * dtms * dtms;
    double margin = bound + slack - std::abs(x[j] - x[i]);
    rep.worst_increment_margin = std::min(rep.worst_increment_margin, margin);
    if (margin < 0.0) rep.increment_ok = false;
  }
  return rep;
}

std::vector<double> subsample_integer(const std::vector<double>& x,
                                      std::size_t nodes_per_unit) {
  if (nodes_per_unit == 0 || (x.size() - 1) % nodes_per_unit != 0)
    throw std::invalid_argument("grid not commensurate with unit spacing");
  std::size_t units = (x.size() - 1) / nodes_per_unit;
  std::vector<double> out(units + 1);
  for (std::size_t k = 0; k <= units; ++k) out[k] = x[k * nodes_per_unit];
  return out;
}

}  // namespace fracmle::sde
