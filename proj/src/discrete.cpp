#include "fracmle/discrete.hpp"

#include <cmath>
#include <stdexcept>

#include "fracmle/frac_ops.hpp"
#include "fracmle/special.hpp"
#include "fracmle/stats.hpp"

namespace fracmle::disc {

est::MleResult theta_bar(const std::vector<double>& q_int,
                         const std::vector<double>& z_int) {
  if (q_int.size() != z_int.size() || q_int.size() < 2)
    throw std::invalid_argument("size mismatch");
  std::size_t n = q_int.size() - 1;
  double num = 0.0, info = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    num += q_int[m] * (z_int[m + 1] - z_int[m]);
    info += q_int[m] * q_int[m];
  }
  if (info < 1e-12 * static_cast<double>(n))
    throw est::DegenerateInformation(info);
  est::MleResult r;
  r.numerator = num;
  r.information = info;
  r.theta = num / info;
  return r;
}

std::vector<double> q_check(double H, const DiscreteRecord& rec,
                            const sde::DriftModel& drift) {
  std::size_t N = rec.horizon();
  if (N == 0) throw std::invalid_argument("empty record");
  auto c = special::hurst_constants(H);
  std::vector<double> b(N + 1);
  for (std::size_t j = 0; j <= N; ++j) b[j] = drift.b(rec.x[j]);
  std::vector<double> q(N + 1, 0.0);
  double e = 0.5 - H;
  if (H == 0.5) {
    q = b;
    q[0] = 0.0;
    return q;
  }
  if (H < 0.5) {
    for (std::size_t n = 1; n <= N; ++n) {
      double acc = 0.0;
      for (std::size_t j = 1; j < n; ++j) {
        double nd = static_cast<double>(n - j);
        acc += std::pow(nd, -0.5 - H) * std::pow(static_cast<double>(j), e) * b[j];
      }
      q[n] = c.kappa * std::pow(static_cast<double>(n), -e) * acc;
    }
    return q;
  }
  // H > 1/2: unit-step analogue of the compensated split; kernel mass of each
  // interior step is exact, the final step integrates the linear difference
  double diag_m = 1.0 / (1.5 - H);
  for (std::size_t n = 1; n <= N; ++n) {
    double bn = b[n];
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      double m = static_cast<double>(n - j);
      double w = (std::pow(m - 1.0, e) - std::pow(m, e)) / (H - 0.5);
      double mid = static_cast<double>(j) + 0.5;
      acc += (bn - 0.5 * (b[j] + b[j + 1])) * std::pow(mid, e) * w;
    }
    double slope = bn - b[n - 1];
    acc += slope * std::pow(static_cast<double>(n) - 0.5, e) * diag_m;
    double nd = static_cast<double>(n);
    q[n] = c.d * bn * std::pow(nd, e) + c.beta_nl * std::pow(nd, -e) * acc;
  }
  return q;
}

std::vector<double> z_check(double H, const DiscreteRecord& rec) {
  std::size_t N = rec.horizon();
  if (N == 0) throw std::invalid_argument("empty record");
  std::vector<double> z(N + 1, 0.0);
  if (H == 0.5) {
    for (std::size_t j = 0; j < N; ++j) z[j + 1] = z[j] + (rec.x[j + 1] - rec.x[j]);
    return z;
  }
  fracops::WhiteningRow row(H);
  for (std::size_t n = 1; n <= N; ++n) {
    double acc = 0.0;
    // integer-node weights; the j = 0 weight is taken as 0 away from H = 1/2
    for (std::size_t j = 1; j < n; ++j)
      acc += row.weight(static_cast<double>(n), static_cast<double>(j)) *
             (rec.x[j + 1] - rec.x[j]);
    z[n] = acc;
  }
  return z;
}

est::MleResult theta_check(double H, const DiscreteRecord& rec,
                           const sde::DriftModel& drift) {
  return theta_bar(q_check(H, rec, drift), z_check(H, rec));
}

est::MleResult classical_discrete_mle(const std::vector<double>& x,
                                      const sde::DriftModel& drift, double dt) {
  if (x.size() < 2) throw std::invalid_argument("need at least two observations");
  if (dt <= 0.0) throw std::invalid_argument("bad step");
  double num = 0.0, info = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double bi = drift.b(x[i]);
    num += bi * (x[i + 1] - x[i]);
    info += bi * bi * dt;
  }
  if (info <= 0.0) throw est::DegenerateInformation(info);
  est::MleResult r;
  r.numerator = num;
  r.information = info;
  r.theta = num / info;
  return r;
}

BracketDiagnostics bracket_diagnostics(const std::vector<double>& q_fine,
                                       const std::vector<double>& z_fine,
                                       std::size_t nodes_per_unit) {
  if (q_fine.size() != z_fine.size()) throw std::invalid_argument("size mismatch");
  if (nodes_per_unit < 32)
    throw std::invalid_argument("need at least 32 nodes per unit");
  std::size_t total = q_fine.size() - 1;
  if (total % nodes_per_unit != 0)
    throw std::invalid_argument("grid not commensurate with unit spacing");
  std::size_t N = total / nodes_per_unit;
  if (N < 2) throw std::invalid_argument("need at least two units");
  double dt = 1.0 / static_cast<double>(nodes_per_unit);
  BracketDiagnostics d;
  d.a_num.reserve(N);
  d.b_num.reserve(N);
  d.qv_b.reserve(N);
  d.qv_ab.reserve(N);
  d.ratio.reserve(N);
  double a_acc = 0.0, b_acc = 0.0, qvb_acc = 0.0, qvab_acc = 0.0;
  for (std::size_t m = 0; m < N; ++m) {
    double qm = q_fine[m * nodes_per_unit];
    qvb_acc += qm * qm;
    for (std::size_t k = 0; k < nodes_per_unit; ++k) {
      std::size_t i = m * nodes_per_unit + k;
      double dz = z_fine[i + 1] - z_fine[i];
      a_acc += q_fine[i] * dz;
      b_acc += qm * dz;
      double diff = q_fine[i] - qm;
      qvab_acc += diff * diff * dt;
    }
    d.a_num.push_back(a_acc);
    d.b_num.push_back(b_acc);
    d.qv_b.push_back(qvb_acc);
    d.qv_ab.push_back(qvab_acc);
    d.ratio.push_back(qvb_acc > 0.0 ? qvab_acc / qvb_acc : 0.0);
  }
  // fits over the last decade in n, i.e. n in [N/10, N]
  std::size_t start = N >= 20 ? N / 10 : 1;
  if (start < 1) start = 1;
  std::vector<double> lx, lr, lb;
  for (std::size_t m = start; m < N; ++m) {
    if (d.ratio[m] <= 0.0 || d.qv_b[m] <= 0.0) continue;
    lx.push_back(std::log(static_cast<double>(m + 1)));
    lr.push_back(std::log(d.ratio[m]));
    lb.push_back(std::log(d.qv_b[m]));
  }
  if (lx.size() >= 2) {
    d.alpha_hat = -stats::ols_line(lx, lr).slope;
    d.qv_b_growth = stats::ols_line(lx, lb).slope;
  }
  return d;
}

}  // namespace fracmle::disc
