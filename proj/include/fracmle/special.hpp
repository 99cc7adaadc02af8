#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fracmle::special {

// Normalization constants attached to a Hurst index. All gamma arguments are
// arranged to stay positive on H in (0,1).
struct HurstConstants {
  double H = 0.5;
  double lambda = 1.0;   // 2H G(3-2H) G(H+1/2) / G(3/2-H)
  double d = 1.0;        // sqrt((2-2H)/lambda)
  double eta = 1.0;      // G(3/2-H) / G(2-2H)
  double c_kb = 1.0;     // 2H G(3/2-H) G(H+1/2)
  double kappa = 0.0;    // d / B(3/2-H,1/2-H), only for H < 1/2
  double beta_nl = 0.0;  // d (H-1/2) G(2-2H) / G(3/2-H)^2, only for H > 1/2
  double mu_mass = 0.0;  // B(3/2-H,1/2-H), only for H < 1/2
};

HurstConstants hurst_constants(double H);

double beta_fn(double p, double q);

// T(a,b,x) = int_x^1 v^a (1-v)^b dv for x in (0,1], b > -1.
// Split at 1/2, binomial series on each side; handles a <= -1.
class BetaTail {
 public:
  BetaTail(double a, double b);
  double operator()(double x) const;
  double a() const { return a_; }
  double b() const { return b_; }

 private:
  double a_, b_;
  double at_half_;          // T(a,b,1/2)
  std::vector<double> lo_;  // coefficients of (1-v)^b around v=0
  std::vector<double> hi_;  // coefficients of (1-w)^a around w=0, w=1-v
};

// Hd(a,b,x) = int_0^x v^a (1-v)^b dv for x in [0,1), a > -1.
// Same series layout; handles b <= -1 away from x=1.
class BetaHead {
 public:
  BetaHead(double a, double b);
  double operator()(double x) const;

 private:
  double a_, b_;
  double at_half_;          // Hd(a,b,1/2)
  std::vector<double> lo_;
  std::vector<double> hi_;
};

// g(x) = int_x^1 (1-u)^{1/2-H} u^{-1} du, the inner profile of the inverse
// transfer weights. Equals T(-1, 1/2-H, x).
class InverseKernelProfile {
 public:
  explicit InverseKernelProfile(double H) : tail_(-1.0, 0.5 - H) {}
  double operator()(double x) const { return tail_(x); }

 private:
  BetaTail tail_;
};

// Tanh-sinh quadrature on (0,1). The integrand receives both x and 1-x so
// endpoint-singular factors can be evaluated without cancellation.
double integrate01(const std::function<double(double, double)>& f,
                   double rel_tol = 1e-11, int max_level = 12);

// Gauss-Jacobi rule on [0,1] for weight r^alpha0 (1-r)^alpha1.
struct JacobiRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

JacobiRule gauss_jacobi01(std::size_t m, double alpha0, double alpha1);

}  // namespace fracmle::special
