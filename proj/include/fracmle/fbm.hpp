#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fracmle/grid.hpp"
#include "fracmle/rng.hpp"
#include "fracmle/special.hpp"

namespace fracmle::fbm {

// R(t,s) = (t^2H + s^2H - |t-s|^2H)/2
double covariance(double H, double t, double s);

// autocovariance of unit-lag increments on a dt grid, lags 0..m-1
std::vector<double> fgn_autocov(double H, std::size_t m, double dt);

// Kernel of the moving-average representation over the underlying Brownian
// motion, K(t,s) for 0 < s < t. Scales as K(ct,cs) = c^{H-1/2} K(t,s).
class VolterraKernel {
 public:
  explicit VolterraKernel(double H);
  double operator()(double t, double s) const;
  // exact int_{s0}^{s1} K(t,s) ds from the incomplete-beta antiderivative;
  // needs 0 <= s0 < s1 <= t
  double cell_mass(double t, double s0, double s1) const;
  double hurst() const { return H_; }

 private:
  double primitive(double v) const;  // antiderivative of K(t,tv)/t^{H+1/2} in v
  double H_;
  double front_ = 0.0;
  std::unique_ptr<special::BetaTail> profile_;  // tail integral in s/t
  std::unique_ptr<special::BetaHead> head_;     // head integral for cell masses
  double head_full_ = 0.0;                      // complete beta closing head_
};

struct Path {
  Grid grid;
  double H = 0.5;
  std::vector<double> values;  // n+1 nodes, values[0] = 0
  std::vector<double> driver;  // brownian increments when known, else empty
};

// Gaussian sampler from the exact increment covariance. Factorization work is
// done once at construction; sample() is cheap per path.
class ExactSampler {
 public:
  enum class Method { kAuto, kCholesky, kCirculant };

  ExactSampler(double H, const Grid& grid, Method method = Method::kAuto);
  ~ExactSampler();
  ExactSampler(const ExactSampler&) = delete;
  ExactSampler& operator=(const ExactSampler&) = delete;

  Path sample(const CounterRng& rng, std::uint64_t ctr0 = 0) const;
  Method method() const { return method_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double H_;
  Grid grid_;
  Method method_;
};

Path sample_exact(double H, const Grid& grid, const CounterRng& rng,
                  std::uint64_t ctr0 = 0);

// Moving-average discretization driven by an explicit Brownian path; keeps the
// driver increments so whitening can be checked against them.
Path sample_volterra(double H, const Grid& grid, const CounterRng& rng,
                     std::uint64_t ctr0 = 0);

// Same discretization from caller-supplied driver increments (one per cell),
// e.g. a refined version of a coarser driver.
Path sample_volterra(double H, const Grid& grid, std::vector<double> driver);

void write_path_csv(const std::string& path, const Path& p);
Path read_path_csv(const std::string& path, double H);

}  // namespace fracmle::fbm
