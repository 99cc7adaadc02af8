#include "fracmle/fbm.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "fracmle/csv.hpp"
#include "fracmle/frac_ops.hpp"

namespace fracmle::fbm {

namespace {
std::mutex fftw_mutex;  // fftw plan creation is not thread safe
}

double covariance(double H, double t, double s) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("hurst index out of range");
  if (t < 0.0 || s < 0.0) throw std::invalid_argument("negative time");
  double h2 = 2.0 * H;
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

std::vector<double> fgn_autocov(double H, std::size_t m, double dt) {
  if (m == 0) throw std::invalid_argument("need at least one lag");
  double h2 = 2.0 * H;
  double scale = std::pow(dt, h2);
  std::vector<double> g(m);
  for (std::size_t k = 0; k < m; ++k) {
    double kk = static_cast<double>(k);
    // gamma_k = dt^2H (|k+1|^2H - 2 k^2H + |k-1|^2H)/2
    g[k] = 0.5 * scale *
           (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) +
            std::pow(std::abs(kk - 1.0), h2));
  }
  return g;
}

// --- kernel ---

VolterraKernel::VolterraKernel(double H) : H_(H) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("hurst index out of range");
  auto c = special::hurst_constants(H);
  if (H > 0.5) {
    front_ = c.eta / (c.d * std::tgamma(H - 0.5));
    profile_ = std::make_unique<special::BetaTail>(-2.0 * H, H - 1.5);
    head_ = std::make_unique<special::BetaHead>(0.5 - H, H - 1.5);
    head_full_ = special::beta_fn(1.5 - H, H - 0.5);
  } else if (H < 0.5) {
    front_ = c.eta / (c.d * std::tgamma(H + 0.5));
    profile_ = std::make_unique<special::BetaTail>(-2.0 * H, H - 0.5);
    head_ = std::make_unique<special::BetaHead>(0.5 - H, H - 0.5);
    head_full_ = special::beta_fn(1.5 - H, H + 0.5);
  }
}

double VolterraKernel::operator()(double t, double s) const {
  if (!(s > 0.0 && s < t)) throw std::invalid_argument("kernel needs 0 < s < t");
  if (H_ == 0.5) return 1.0;
  double x = s / t;
  if (H_ > 0.5) return front_ * std::pow(s, H_ - 0.5) * (*profile_)(x);
  return front_ * (std::pow(s, 0.5 - H_) * std::pow(t, H_ - 0.5) *
                       std::pow(t - s, H_ - 0.5) +
                   (0.5 - H_) * std::pow(s, H_ - 0.5) * (*profile_)(x));
}

double VolterraKernel::primitive(double v) const {
  // antiderivative of v^{H-1/2} Phi(v) (resp. the H < 1/2 bracket) obtained
  // by parts; the profile factor vanishes at v = 1 and the head integral
  // closes to the complete beta there
  double head = v >= 1.0 ? head_full_ : (*head_)(v);
  double prof = v <= 0.0 || v >= 1.0 ? 0.0 : (*profile_)(v);
  double vp = std::pow(v, H_ + 0.5);
  if (H_ > 0.5) return (vp * prof + head) / (H_ + 0.5);
  double a2 = (0.5 - H_) / (H_ + 0.5);
  return (1.0 + a2) * head + a2 * vp * prof;
}

double VolterraKernel::cell_mass(double t, double s0, double s1) const {
  if (!(t > 0.0 && s0 >= 0.0 && s0 < s1 && s1 <= t))
    throw std::invalid_argument("cell mass needs 0 <= s0 < s1 <= t");
  if (H_ == 0.5) return s1 - s0;
  return front_ * std::pow(t, H_ + 0.5) * (primitive(s1 / t) - primitive(s0 / t));
}

// --- exact sampler ---

struct ExactSampler::Impl {
  // circulant branch
  std::vector<double> sqrt_eig;  // length M/2+1
  std::size_t M = 0;
  fftw_plan plan = nullptr;
  double* in = nullptr;
  fftw_complex* freq = nullptr;
  // cholesky branch
  Eigen::MatrixXd chol;

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    if (plan) fftw_destroy_plan(plan);
    if (in) fftw_free(in);
    if (freq) fftw_free(freq);
  }
};

ExactSampler::ExactSampler(double H, const Grid& grid, Method method)
    : impl_(std::make_unique<Impl>()), H_(H), grid_(grid), method_(method) {
  if (method_ == Method::kAuto)
    method_ = grid.n >= 256 ? Method::kCirculant : Method::kCholesky;
  std::size_t n = grid.n;
  if (method_ == Method::kCholesky) {
    auto g = fgn_autocov(H, n, grid.dt);
    Eigen::MatrixXd G(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            g[i > j ? i - j : j - i];
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("increment covariance not positive definite");
    impl_->chol = llt.matrixL();
    return;
  }
  // circulant embedding of the increment covariance
  std::size_t m = 1;
  while (m < n) m <<= 1;
  std::size_t M = 2 * m;
  auto g = fgn_autocov(H, m + 1, grid.dt);
  std::vector<double> c(M);
  for (std::size_t k = 0; k <= m; ++k) c[k] = g[k];
  for (std::size_t k = 1; k < m; ++k) c[M - k] = g[k];
  std::vector<double> eig(M / 2 + 1);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    double* in = fftw_alloc_real(M);
    fftw_complex* out = fftw_alloc_complex(M / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(M), in, out, FFTW_ESTIMATE);
    for (std::size_t k = 0; k < M; ++k) in[k] = c[k];
    fftw_execute(p);
    for (std::size_t k = 0; k <= M / 2; ++k) eig[k] = out[k][0];
    fftw_destroy_plan(p);
    fftw_free(in);
    fftw_free(out);
  }
  double emax = 0.0, emin = 0.0;
  for (double e : eig) {
    emax = std::max(emax, e);
    emin = std::min(emin, e);
  }
  if (emin < -1e-9 * emax)
    throw std::runtime_error("circulant embedding not nonnegative, min eigenvalue " +
                             std::to_string(emin));
  impl_->M = M;
  impl_->sqrt_eig.resize(M / 2 + 1);
  for (std::size_t k = 0; k <= M / 2; ++k)
    impl_->sqrt_eig[k] = std::sqrt(std::max(eig[k], 0.0));
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    impl_->in = fftw_alloc_real(M);
    impl_->freq = fftw_alloc_complex(M / 2 + 1);
    impl_->plan = fftw_plan_dft_c2r_1d(static_cast<int>(M), impl_->freq, impl_->in,
                                       FFTW_ESTIMATE);
  }
}

ExactSampler::~ExactSampler() = default;

Path ExactSampler::sample(const CounterRng& rng, std::uint64_t ctr0) const {
  std::size_t n = grid_.n;
  Path p;
  p.grid = grid_;
  p.H = H_;
  p.values.assign(n + 1, 0.0);
  if (method_ == Method::kCholesky) {
    auto z = rng.gauss_vector(n, ctr0);
    Eigen::Map<Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd incr = impl_->chol * zv;
    for (std::size_t i = 0; i < n; ++i) p.values[i + 1] = p.values[i] + incr(i);
    return p;
  }
  std::size_t M = impl_->M;
  auto z = rng.gauss_vector(M, ctr0);
  double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(M));
  // per-call buffers so concurrent sample() calls can share one plan; the
  // new-array execute is the documented thread safe entry point
  fftw_complex* freq = fftw_alloc_complex(M / 2 + 1);
  double* out = fftw_alloc_real(M);
  // hermitian spectrum: real at bins 0 and M/2, complex pairs elsewhere
  freq[0][0] = impl_->sqrt_eig[0] * z[0];
  freq[0][1] = 0.0;
  freq[M / 2][0] = impl_->sqrt_eig[M / 2] * z[1];
  freq[M / 2][1] = 0.0;
  for (std::size_t k = 1; k < M / 2; ++k) {
    double s = impl_->sqrt_eig[k] * 0.7071067811865476;
    freq[k][0] = s * z[2 * k];
    freq[k][1] = s * z[2 * k + 1];
  }
  fftw_execute_dft_c2r(impl_->plan, freq, out);
  for (std::size_t i = 0; i < n; ++i)
    p.values[i + 1] = p.values[i] + out[i] * inv_sqrt_m;
  fftw_free(freq);
  fftw_free(out);
  return p;
}

Path sample_exact(double H, const Grid& grid, const CounterRng& rng,
                  std::uint64_t ctr0) {
  ExactSampler s(H, grid);
  return s.sample(rng, ctr0);
}

Path sample_volterra(double H, const Grid& grid, const CounterRng& rng,
                     std::uint64_t ctr0) {
  auto driver = rng.gauss_vector(grid.n, ctr0);
  double sdt = std::sqrt(grid.dt);
  for (double& d : driver) d *= sdt;
  return sample_volterra(H, grid, std::move(driver));
}

Path sample_volterra(double H, const Grid& grid, std::vector<double> driver) {
  std::size_t n = grid.n;
  double dt = grid.dt;
  if (driver.size() != n) throw std::invalid_argument("driver size mismatch");
  Path p;
  p.grid = grid;
  p.H = H;
  p.values.assign(n + 1, 0.0);
  p.driver = std::move(driver);
  if (H == 0.5) {
    for (std::size_t i = 0; i < n; ++i) p.values[i + 1] = p.values[i] + p.driver[i];
    return p;
  }
  // the profile factor unfolds into a second power-law integral over the
  // prefix I(r) = int_0^r s^{H-1/2} dW; with increments spread uniformly per
  // cell everything reduces to lag convolutions with exact cell moments, so
  // the singular edges carry no sampling error
  auto c = special::hurst_constants(H);
  auto cell_avg = [&](double pw, std::size_t j) {
    return std::pow(dt, pw) *
           (std::pow(static_cast<double>(j + 1), 1.0 + pw) -
            std::pow(static_cast<double>(j), 1.0 + pw)) /
           (1.0 + pw);
  };
  std::vector<double> sw(n), sig(n), ix(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    sw[m] = cell_avg(H - 0.5, m);
    sig[m] = sw[m] * p.driver[m] / dt;
  }
  for (std::size_t m = 1; m < n; ++m) ix[m] = ix[m - 1] + sw[m - 1] * p.driver[m - 1];
  // first rows see no slowly varying factors to freeze, so they use exact
  // kernel cell masses instead of the convolution output
  auto fix_first_rows = [&]() {
    VolterraKernel kern(H);
    std::size_t i0 = std::min<std::size_t>(n, 128);
    for (std::size_t i = 1; i <= i0; ++i) {
      double t = grid.node(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j)
        acc += kern.cell_mass(t, grid.node(j), grid.node(j + 1)) * p.driver[j];
      p.values[i] = acc / dt;
    }
  };
  // lag integrals int_cell tau^{H-1/2} dtau and the (r - r_m) moment bracket
  std::vector<double> lm(n), a0(n);
  for (std::size_t k = 0; k < n; ++k) {
    lm[k] = cell_avg(H - 0.5, k) * dt;
    a0[k] = static_cast<double>(k + 1) * dt * lm[k] - cell_avg(H + 0.5, k) * dt;
  }
  // direct term carries the composition-matched weights so the whitening
  // pass undoes the synthesis exactly at the cell scale
  auto lq = fracops::frac_weights(H + 0.5, n, dt);
  if (H > 0.5) {
    double front = c.eta / (c.d * std::tgamma(H - 0.5));
    // X_t = front t^{H+1/2} int_0^t r^{-2H} (t-r)^{H-3/2} I(r) dr; past the
    // cut r0 the integral is brought by parts to a direct dW term plus a
    // milder prefix term,
    //   (H-1/2) J|_{r0}^t = r0^{-2H} I(r0) (t-r0)^{H-1/2} + int_r0^t
    //   s^{-H-1/2} (t-s)^{H-1/2} dW - 2H int_r0^t r^{-2H-1} (t-r)^{H-1/2}
    //   I(r) dr;
    // the pieces blow up individually as r0 -> 0, so the origin cells keep
    // the original convergent form
    std::size_t m0 = std::min<std::size_t>(n, 128);
    std::vector<double> l0(n), b0(n), vd(n, 0.0), v1(n, 0.0), v2(n, 0.0),
        u1(n, 0.0), u2(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      l0[k] = cell_avg(H - 1.5, k) * dt;
      b0[k] = static_cast<double>(k + 1) * dt * l0[k] - lm[k];
    }
    for (std::size_t m = 1; m < m0; ++m) {
      double ar = cell_avg(-2.0 * H, m);
      u1[m] = ar * ix[m];
      u2[m] = ar * sig[m];
    }
    for (std::size_t m = m0; m < n; ++m) {
      vd[m] = cell_avg(-H - 0.5, m) * p.driver[m];
      double ar = cell_avg(-2.0 * H - 1.0, m);
      v1[m] = ar * ix[m];
      v2[m] = ar * sig[m];
    }
    auto cu1 = fracops::convolve_fast(l0, u1);
    auto cu2 = fracops::convolve_fast(b0, u2);
    auto cvd = fracops::convolve_fast(lq, vd);
    auto cv1 = fracops::convolve_fast(lm, v1);
    auto cv2 = fracops::convolve_fast(a0, v2);
    double first = sig[0] * std::pow(dt, 2.0 - 2.0 * H) / (2.0 - 2.0 * H);
    double r0 = static_cast<double>(m0) * dt;
    double bnd = m0 < n ? std::pow(r0, -2.0 * H) * ix[m0] / (H - 0.5) : 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      double t = grid.node(i);
      double j_int = first * cell_avg(H - 1.5, i - 1) + cu1[i - 1] + cu2[i - 1];
      if (i > m0)
        j_int += bnd * std::pow(t - r0, H - 0.5) +
                 (cvd[i - 1] / dt - 2.0 * H * (cv1[i - 1] + cv2[i - 1])) /
                     (H - 0.5);
      p.values[i] = front * std::pow(t, H + 0.5) * j_int;
    }
    fix_first_rows();
    return p;
  }
  double front = c.eta / (c.d * std::tgamma(H + 0.5));
  // direct term plus profile term, X_t = front t^{H-1/2} [int_0^t s^{1/2-H}
  // (t-s)^{H-1/2} dW + (1/2-H) int_0^t r^{-2H} (t-r)^{H-1/2} I(r) dr]
  std::vector<double> va(n), v1(n, 0.0), v2(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) va[m] = cell_avg(0.5 - H, m) * p.driver[m];
  for (std::size_t m = 1; m < n; ++m) {
    double ar = cell_avg(-2.0 * H, m);
    v1[m] = ar * ix[m];
    v2[m] = ar * sig[m];
  }
  auto cva = fracops::convolve_fast(lq, va);
  auto cv1 = fracops::convolve_fast(lm, v1);
  auto cv2 = fracops::convolve_fast(a0, v2);
  double first = sig[0] * std::pow(dt, 2.0 - 2.0 * H) / (2.0 - 2.0 * H);
  for (std::size_t i = 1; i <= n; ++i) {
    double j_int = cv1[i - 1] + cv2[i - 1] + first * lm[i - 1] / dt;
    p.values[i] = front * std::pow(grid.node(i), H - 0.5) *
                  (cva[i - 1] / dt + (0.5 - H) * j_int);
  }
  fix_first_rows();
  return p;
}

void write_path_csv(const std::string& path, const Path& p) {
  io::Table t;
  bool with_driver = !p.driver.empty();
  t.header = with_driver ? std::vector<std::string>{"t", "x", "dw"}
                         : std::vector<std::string>{"t", "x"};
  for (std::size_t i = 0; i <= p.grid.n; ++i) {
    std::vector<double> row{p.grid.node(i), p.values[i]};
    if (with_driver) row.push_back(i < p.grid.n ? p.driver[i] : 0.0);
    t.rows.push_back(std::move(row));
  }
  io::write_csv(path, t);
}

Path read_path_csv(const std::string& path, double H) {
  auto t = io::read_csv(path);
  if (t.rows.size() < 2) throw std::runtime_error("path file too short");
  Path p;
  p.H = H;
  double dt = t.rows[1][0] - t.rows[0][0];
  p.grid = Grid(t.rows.size() - 1, dt);
  bool with_driver = t.header.size() >= 3;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    p.values.push_back(t.rows[i][1]);
    if (with_driver && i + 1 < t.rows.size()) p.driver.push_back(t.rows[i][2]);
  }
  return p;
}

}  // namespace fracmle::fbm
