#include "fracmle/special.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace fracmle::special {

namespace {

constexpr std::size_t kSeriesTerms = 160;

// Coefficients of (1-v)^p = sum_k c_k v^k, c_0 = 1, c_{k+1} = c_k (k-p)/(k+1).
std::vector<double> binomial_coeffs(double p) {
  std::vector<double> c(kSeriesTerms);
  c[0] = 1.0;
  for (std::size_t k = 0; k + 1 < kSeriesTerms; ++k)
    c[k + 1] = c[k] * (static_cast<double>(k) - p) / (static_cast<double>(k) + 1.0);
  return c;
}

// sum_k c_k (up^{e+k+1} - lo^{e+k+1})/(e+k+1) with a log term when e+k+1 = 0.
// Requires up, lo <= 1/2 so the tail decays like 2^{-k}.
double integrate_series(const std::vector<double>& c, double e, double lo, double up) {
  double acc = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    double p = e + static_cast<double>(k) + 1.0;
    double term;
    if (std::abs(p) < 1e-12) {
      term = c[k] * std::log(up / lo);
    } else {
      term = c[k] * (std::pow(up, p) - std::pow(lo, p)) / p;
    }
    acc += term;
    if (k > 8 && std::abs(term) < 1e-17 * (std::abs(acc) + 1e-300)) break;
  }
  return acc;
}

}  // namespace

double beta_fn(double p, double q) {
  if (p <= 0.0 || q <= 0.0) throw std::invalid_argument("beta arguments must be positive");
  return std::exp(std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q));
}

HurstConstants hurst_constants(double H) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("hurst index out of range");
  HurstConstants c;
  c.H = H;
  c.lambda = 2.0 * H * std::tgamma(3.0 - 2.0 * H) * std::tgamma(H + 0.5) /
             std::tgamma(1.5 - H);
  c.d = std::sqrt((2.0 - 2.0 * H) / c.lambda);
  c.eta = std::tgamma(1.5 - H) / std::tgamma(2.0 - 2.0 * H);
  c.c_kb = 2.0 * H * std::tgamma(1.5 - H) * std::tgamma(H + 0.5);
  if (H < 0.5) {
    c.mu_mass = beta_fn(1.5 - H, 0.5 - H);
    c.kappa = c.d / c.mu_mass;
  } else if (H > 0.5) {
    double g = std::tgamma(1.5 - H);
    c.beta_nl = c.d * (H - 0.5) * std::tgamma(2.0 - 2.0 * H) / (g * g);
  }
  return c;
}

// --- series primitives ---

BetaTail::BetaTail(double a, double b) : a_(a), b_(b) {
  if (!(b > -1.0)) throw std::invalid_argument("tail requires b > -1");
  lo_ = binomial_coeffs(b);
  hi_ = binomial_coeffs(a);
  at_half_ = integrate_series(hi_, b_, 0.0, 0.5);
}

double BetaTail::operator()(double x) const {
  if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("tail argument out of range");
  if (x >= 0.5) return integrate_series(hi_, b_, 0.0, 1.0 - x);
  return at_half_ + integrate_series(lo_, a_, x, 0.5);
}

BetaHead::BetaHead(double a, double b) : a_(a), b_(b) {
  if (!(a > -1.0)) throw std::invalid_argument("head requires a > -1");
  lo_ = binomial_coeffs(b);
  hi_ = binomial_coeffs(a);
  at_half_ = integrate_series(lo_, a_, 0.0, 0.5);
}

double BetaHead::operator()(double x) const {
  if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument("head argument out of range");
  if (x <= 0.5) return integrate_series(lo_, a_, 0.0, x);
  return at_half_ + integrate_series(hi_, b_, 1.0 - x, 0.5);
}

// --- tanh-sinh on (0,1) ---

namespace {

double ts_term(const std::function<double(double, double)>& f, double t) {
  const double half_pi = 1.5707963267948966;
  double s = half_pi * std::sinh(t);
  if (std::abs(s) > 350.0) return 0.0;
  double x = 1.0 / (1.0 + std::exp(-2.0 * s));
  double omx = 1.0 / (1.0 + std::exp(2.0 * s));
  double ch = std::cosh(s);
  double term = half_pi * std::cosh(t) / (2.0 * ch * ch) * f(x, omx);
  return std::isfinite(term) ? term : 0.0;
}

}  // namespace

double integrate01(const std::function<double(double, double)>& f, double rel_tol,
                   int max_level) {
  double h = 1.0;
  double prev = 0.0;
  double val = 0.0;
  for (int level = 0; level <= max_level; ++level) {
    double acc = ts_term(f, 0.0);
    // ts_term vanishes once (pi/2) sinh(t) passes 350, so reaching t = 6.5
    // covers the whole transform at every level
    int kmax = static_cast<int>(std::ceil(6.5 / h));
    for (int sign = -1; sign <= 1; sign += 2) {
      for (int k = 1; k <= kmax; ++k) {
        double term = ts_term(f, h * static_cast<double>(k) * sign);
        acc += term;
        if (k > 3 && std::abs(term) < 1e-18 * (std::abs(acc) + 1e-300)) break;
      }
    }
    val = acc * h;
    if (level > 2 && std::abs(val - prev) <= rel_tol * std::abs(val)) return val;
    prev = val;
    h *= 0.5;
  }
  return val;
}

// --- Gauss-Jacobi ---

JacobiRule gauss_jacobi01(std::size_t m, double alpha0, double alpha1) {
  if (m == 0) throw std::invalid_argument("need at least one node");
  if (alpha0 <= -1.0 || alpha1 <= -1.0)
    throw std::invalid_argument("jacobi exponents must exceed -1");
  // standard Jacobi weight (1-x)^A (1+x)^B on [-1,1]; r = (x+1)/2 puts
  // B = alpha0 at r=0 and A = alpha1 at r=1
  double A = alpha1, B = alpha0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                            static_cast<Eigen::Index>(m));
  double apb = A + B;
  for (std::size_t i = 0; i < m; ++i) {
    double n = static_cast<double>(i);
    double diag;
    if (i == 0) {
      diag = (B - A) / (apb + 2.0);
    } else {
      double den = (2.0 * n + apb) * (2.0 * n + apb + 2.0);
      diag = (B * B - A * A) / den;
    }
    J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag;
    if (i + 1 < m) {
      double k = n + 1.0;
      double num = 4.0 * k * (k + A) * (k + B) * (k + apb);
      double den = (2.0 * k + apb) * (2.0 * k + apb) * (2.0 * k + apb + 1.0) *
                   (2.0 * k + apb - 1.0);
      double off = std::sqrt(num / den);
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = off;
      J(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw std::runtime_error("jacobi eigensolve failed");
  double mass = std::pow(2.0, apb + 1.0) * beta_fn(A + 1.0, B + 1.0);
  JacobiRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  double scale = std::pow(2.0, -(apb + 1.0));  // measure change to [0,1]
  for (std::size_t i = 0; i < m; ++i) {
    double x = es.eigenvalues()(static_cast<Eigen::Index>(i));
    double v0 = es.eigenvectors()(0, static_cast<Eigen::Index>(i));
    rule.nodes[i] = 0.5 * (x + 1.0);
    rule.weights[i] = mass * v0 * v0 * scale;
  }
  return rule;
}

}  // namespace fracmle::special
