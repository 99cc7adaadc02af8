#include "fracmle/estimators.hpp"

#include <cmath>

#include "fracmle/special.hpp"

namespace fracmle::est {

namespace {
constexpr double kInfoFloor = 1e-12;  // relative to horizon
}

std::vector<double> left_cells(const std::vector<double>& qnodes) {
  if (qnodes.size() < 2) throw std::invalid_argument("need at least two nodes");
  return std::vector<double>(qnodes.begin(), qnodes.end() - 1);
}

static MleResult ito_ratio(const std::vector<double>& q, const std::vector<double>& d,
                           double dt, double sign) {
  if (q.size() != d.size() || q.empty()) throw std::invalid_argument("size mismatch");
  if (dt <= 0.0) throw std::invalid_argument("bad step");
  double num = 0.0, info = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    num += q[i] * d[i];
    info += q[i] * q[i] * dt;
  }
  double horizon = dt * static_cast<double>(q.size());
  if (info < kInfoFloor * horizon) throw DegenerateInformation(info);
  MleResult r;
  r.numerator = sign * num;
  r.information = info;
  r.theta = r.numerator / info;
  return r;
}

MleResult mle_w_form(const std::vector<double>& qcells, const std::vector<double>& dw,
                     double dt) {
  return ito_ratio(qcells, dw, dt, -1.0);
}

MleResult mle_z_form(const std::vector<double>& qcells, const std::vector<double>& dz,
                     double dt) {
  return ito_ratio(qcells, dz, dt, 1.0);
}

double loglikelihood(double theta, const std::vector<double>& qcells,
                     const std::vector<double>& dw, double dt) {
  if (qcells.size() != dw.size() || qcells.empty())
    throw std::invalid_argument("size mismatch");
  double num = 0.0, info = 0.0;
  for (std::size_t i = 0; i < qcells.size(); ++i) {
    num += qcells[i] * dw[i];
    info += qcells[i] * qcells[i] * dt;
  }
  return -theta * num - 0.5 * theta * theta * info;
}

// --- Q from drift samples ---

std::vector<double> compute_Q(double H, const Grid& g, const std::vector<double>& gnodes,
                              const std::string& plan_cache_dir) {
  auto plan = fracops::QPlan::load_or_build(H, g, plan_cache_dir);
  return plan->apply(gnodes);
}

std::vector<double> compute_q_fast(double H, const Grid& g,
                                   const std::vector<double>& gnodes) {
  std::size_t n = g.n;
  if (gnodes.size() != n + 1) throw std::invalid_argument("size mismatch");
  std::vector<double> q(n + 1, 0.0);
  if (H == 0.5) {
    q = gnodes;
    q[0] = 0.0;
    return q;
  }
  auto c = special::hurst_constants(H);
  double dt = g.dt;
  double e = 0.5 - H;
  if (H < 0.5) {
    // Q_s = kappa s^{H-1/2} int_0^s (s-u)^{-1/2-H} u^{1/2-H} g(u) du with the
    // kernel integrated exactly over each cell and u^{1/2-H} g frozen at
    // midpoints; the cell moments depend only on the lag
    std::vector<double> a(n), h(n);
    for (std::size_t m = 1; m <= n; ++m)
      a[m - 1] = (std::pow(static_cast<double>(m) * dt, e) -
                  std::pow(static_cast<double>(m - 1) * dt, e)) /
                 e;
    for (std::size_t j = 0; j < n; ++j)
      h[j] = std::pow(g.mid(j), e) * 0.5 * (gnodes[j] + gnodes[j + 1]);
    auto conv = fracops::convolve_fast(a, h);
    for (std::size_t i = 1; i <= n; ++i)
      q[i] = c.kappa * std::pow(g.node(i), -e) * conv[i - 1];
    return q;
  }
  // H > 1/2: local term plus compensated difference; lag moments for cells at
  // least one step off the diagonal, exact linear moment on the diagonal cell
  std::vector<double> km(n, 0.0), p(n), pg(n);
  for (std::size_t m = 2; m <= n; ++m)
    km[m - 1] = (std::pow(static_cast<double>(m - 1) * dt, e) -
                 std::pow(static_cast<double>(m) * dt, e)) /
                (H - 0.5);
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = std::pow(g.mid(j), e);
    pg[j] = p[j] * 0.5 * (gnodes[j] + gnodes[j + 1]);
  }
  auto conv_p = fracops::convolve_fast(km, p);
  auto conv_pg = fracops::convolve_fast(km, pg);
  double diag_m = std::pow(dt, 1.5 - H) / (1.5 - H);
  for (std::size_t i = 1; i <= n; ++i) {
    double s = g.node(i);
    double gi = gnodes[i];
    double j_int = gi * conv_p[i - 1] - conv_pg[i - 1];
    double slope = (gnodes[i] - gnodes[i - 1]) / dt;
    j_int += slope * std::pow(g.mid(i - 1), e) * diag_m;
    q[i] = c.d * gi * std::pow(s, e) + c.beta_nl * std::pow(s, -e) * j_int;
  }
  return q;
}

std::vector<double> q_linear_from_dz(double H, const Grid& g,
                                     const std::vector<double>& dz) {
  std::size_t n = g.n;
  if (dz.size() != n) throw std::invalid_argument("size mismatch");
  std::vector<double> q(n + 1, 0.0);
  double e = 0.5 - H;
  double s_lo = 0.0, s_hi = 0.0;  // running sums of u^{1/2-H} dz and u^{H-1/2} dz
  for (std::size_t i = 1; i <= n; ++i) {
    double u = g.mid(i - 1);
    s_lo += std::pow(u, e) * dz[i - 1];
    s_hi += std::pow(u, -e) * dz[i - 1];
    double t = g.node(i);
    q[i] = 0.5 * (std::pow(t, -e) * s_lo + std::pow(t, e) * s_hi);
  }
  return q;
}

// --- kernel-transform route ---

KbObjects kb_objects(double H, const Grid& g, const std::vector<double>& x) {
  std::size_t n = g.n;
  if (x.size() != n + 1) throw std::invalid_argument("size mismatch");
  if (n < 2) throw std::invalid_argument("grid too short for rate stencil");
  auto c = special::hurst_constants(H);
  double dt = g.dt;
  double e = 0.5 - H;
  KbObjects kb;
  kb.H = H;
  kb.z.assign(n + 1, 0.0);
  kb.a.assign(n + 1, 0.0);
  kb.q.assign(n + 1, 0.0);
  kb.omega.assign(n + 1, 0.0);
  // kernel k(t,s) = c^{-1} s^{1/2-H} (t-s)^{1/2-H}; averaging each power
  // factor exactly over its cell keeps the lag convolution structure and
  // removes the fixed-fraction midpoint error at the singular edges
  auto cell_avg = [&](double p, std::size_t j) {
    return std::pow(dt, p) *
           (std::pow(static_cast<double>(j + 1), 1.0 + p) -
            std::pow(static_cast<double>(j), 1.0 + p)) /
           (1.0 + p);
  };
  std::vector<double> lag(n), vz(n), vx(n);
  for (std::size_t m = 0; m < n; ++m) lag[m] = cell_avg(e, m);
  for (std::size_t j = 0; j < n; ++j) {
    double w = cell_avg(e, j);
    vz[j] = w * (x[j + 1] - x[j]);
    vx[j] = w * 0.5 * (x[j] + x[j + 1]) * dt;
  }
  auto cz = fracops::convolve_fast(lag, vz);
  auto ca = fracops::convolve_fast(lag, vx);
  double inv_c = 1.0 / c.c_kb;
  for (std::size_t i = 1; i <= n; ++i) {
    kb.z[i] = inv_c * cz[i - 1];
    kb.a[i] = inv_c * ca[i - 1];
    kb.omega[i] = std::pow(g.node(i), 2.0 - 2.0 * H) / c.lambda;
  }
  // q = (dA/dt)/(d omega/dt); second order stencils, analytic omega rate
  auto dadt = [&](std::size_t i) {
    if (i == 0) return (-3.0 * kb.a[0] + 4.0 * kb.a[1] - kb.a[2]) / (2.0 * dt);
    if (i == n) return (3.0 * kb.a[n] - 4.0 * kb.a[n - 1] + kb.a[n - 2]) / (2.0 * dt);
    return (kb.a[i + 1] - kb.a[i - 1]) / (2.0 * dt);
  };
  for (std::size_t i = 1; i <= n; ++i) {
    double rate = (2.0 - 2.0 * H) * std::pow(g.node(i), 1.0 - 2.0 * H) / c.lambda;
    kb.q[i] = dadt(i) / rate;
  }
  return kb;
}

MleResult mle_kb(const KbObjects& kb, const Grid& g) {
  std::size_t n = g.n;
  if (kb.z.size() != n + 1) throw std::invalid_argument("size mismatch");
  double num = 0.0, info = 0.0;
  // backward rate of a keeps the integrand out of the current increment; the
  // centered stencil in kb.q would correlate with dz and bias the sum
  for (std::size_t i = 0; i < n; ++i) {
    double q = i == 0 ? 0.0
                      : (kb.a[i] - kb.a[i - 1]) / (kb.omega[i] - kb.omega[i - 1]);
    num += q * (kb.z[i + 1] - kb.z[i]);
    info += q * q * (kb.omega[i + 1] - kb.omega[i]);
  }
  if (info < kInfoFloor * kb.omega[n]) throw DegenerateInformation(info);
  MleResult r;
  r.numerator = num;
  r.information = info;
  r.theta = num / info;
  return r;
}

std::vector<double> z_from_kb(double H, const Grid& g, const std::vector<double>& zkb) {
  std::size_t n = g.n;
  if (zkb.size() != n + 1) throw std::invalid_argument("size mismatch");
  auto c = special::hurst_constants(H);
  std::vector<double> z(n + 1, 0.0);
  double p = H + 0.5;
  for (std::size_t j = 0; j < n; ++j) {
    // exact cell average of s^{H-1/2}, integrable through s = 0
    double w = std::pow(g.dt, H - 0.5) *
               (std::pow(static_cast<double>(j + 1), p) -
                std::pow(static_cast<double>(j), p)) /
               (p * c.d);
    z[j + 1] = z[j] + w * (zkb[j + 1] - zkb[j]);
  }
  return z;
}

}  // namespace fracmle::est
