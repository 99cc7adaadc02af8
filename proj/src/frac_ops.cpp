#include "fracmle/frac_ops.hpp"

#include <fftw3.h>

#include "fracmle/fbm.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>

namespace fracmle::fracops {

namespace {
std::mutex fftw_mutex;
}

// --- fractional integral and derivative ---

std::vector<double> rl_integral(double alpha, const Grid& g,
                                const std::vector<double>& f) {
  if (alpha <= 0.0) throw std::invalid_argument("order must be positive");
  if (f.size() != g.n + 1) throw std::invalid_argument("size mismatch");
  double inv_gamma = 1.0 / std::tgamma(alpha);
  std::vector<double> out(g.n + 1, 0.0);
  for (std::size_t i = 1; i <= g.n; ++i) {
    double t = g.node(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      double tau0 = t - g.node(j);
      double tau1 = t - g.node(j + 1);
      double m = (f[j + 1] - f[j]) / g.dt;
      double p0 = (std::pow(tau0, alpha) - std::pow(tau1, alpha)) / alpha;
      double p1 = tau0 * p0 - (std::pow(tau0, alpha + 1.0) - std::pow(tau1, alpha + 1.0)) /
                                  (alpha + 1.0);
      acc += f[j] * p0 + m * p1;
    }
    out[i] = inv_gamma * acc;
  }
  return out;
}

std::vector<double> rl_derivative(double alpha, const Grid& g,
                                  const std::vector<double>& f) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("order must be in (0,1)");
  auto iint = rl_integral(1.0 - alpha, g, f);
  std::vector<double> out(g.n + 1, 0.0);
  if (g.n < 2) throw std::invalid_argument("grid too short for stencil");
  double h = g.dt;
  out[0] = (-3.0 * iint[0] + 4.0 * iint[1] - iint[2]) / (2.0 * h);
  for (std::size_t i = 1; i < g.n; ++i) out[i] = (iint[i + 1] - iint[i - 1]) / (2.0 * h);
  out[g.n] = (3.0 * iint[g.n] - 4.0 * iint[g.n - 1] + iint[g.n - 2]) / (2.0 * h);
  return out;
}

// --- convolution ---

std::vector<double> convolve_direct(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty operand");
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

namespace {

std::vector<double> convolve_fft(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  std::size_t need = a.size() + b.size() - 1;
  std::size_t M = 1;
  while (M < need) M <<= 1;
  double* ra;
  double* rb;
  fftw_complex* fa;
  fftw_complex* fb;
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    ra = fftw_alloc_real(M);
    rb = fftw_alloc_real(M);
    fa = fftw_alloc_complex(M / 2 + 1);
    fb = fftw_alloc_complex(M / 2 + 1);
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(M), ra, fa, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(M), rb, fb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(static_cast<int>(M), fa, ra, FFTW_ESTIMATE);
  }
  std::memset(ra, 0, M * sizeof(double));
  std::memset(rb, 0, M * sizeof(double));
  std::memcpy(ra, a.data(), a.size() * sizeof(double));
  std::memcpy(rb, b.data(), b.size() * sizeof(double));
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t k = 0; k <= M / 2; ++k) {
    double re = fa[k][0] * fb[k][0] - fa[k][1] * fb[k][1];
    double im = fa[k][0] * fb[k][1] + fa[k][1] * fb[k][0];
    fa[k][0] = re;
    fa[k][1] = im;
  }
  fftw_execute(pinv);
  std::vector<double> out(need);
  double inv = 1.0 / static_cast<double>(M);
  for (std::size_t i = 0; i < need; ++i) out[i] = ra[i] * inv;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
    fftw_free(ra);
    fftw_free(rb);
    fftw_free(fa);
    fftw_free(fb);
  }
  return out;
}

bool probe_fft_once() {
  std::vector<double> a(13), b(17);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::sin(1.0 + 0.7 * static_cast<double>(i));
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = std::cos(0.3 * static_cast<double>(j)) - 0.2;
  auto fast = convolve_fft(a, b);
  auto slow = convolve_direct(a, b);
  for (std::size_t i = 0; i < slow.size(); ++i)
    if (std::abs(fast[i] - slow[i]) > 1e-10) return false;
  return true;
}

}  // namespace

std::vector<double> convolve_fast(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  static bool probe_ok = probe_fft_once();
  if (!probe_ok) throw std::runtime_error("fft convolution failed self check");
  if (a.size() * b.size() <= 4096) return convolve_direct(a, b);
  return convolve_fft(a, b);
}

std::vector<double> frac_weights(double order, std::size_t n, double dt) {
  if (!(order > 0.0)) throw std::invalid_argument("order must be positive");
  if (dt <= 0.0) throw std::invalid_argument("nonpositive step");
  std::vector<double> w(n);
  if (n == 0) return w;
  w[0] = std::tgamma(order) * std::pow(dt, order);
  for (std::size_t k = 1; k < n; ++k)
    w[k] = w[k - 1] * (static_cast<double>(k) - 1.0 + order) / static_cast<double>(k);
  return w;
}

// --- whitening weights ---

WhiteningRow::WhiteningRow(double H) : H_(H) {
  auto c = special::hurst_constants(H);
  front_ = 1.0 / (c.d * c.c_kb);
  if (H != 0.5) {
    prof_ = std::make_unique<special::InverseKernelProfile>(H);
    head_ = std::make_unique<special::BetaHead>(0.5 - H, 0.5 - H);
    head_full_ = special::beta_fn(1.5 - H, 1.5 - H);
  }
}

double WhiteningRow::weight(double t, double u) const {
  if (!(u > 0.0 && u < t)) throw std::invalid_argument("weight needs 0 < u < t");
  if (H_ == 0.5) return 1.0;
  double x = u / t;
  double bracket = std::pow(1.0 - x, 0.5 - H_) - (H_ - 0.5) * (*prof_)(x);
  return front_ * std::pow(u, 0.5 - H_) * bracket;
}

double WhiteningRow::row_integral(double t) const {
  if (t <= 0.0) throw std::invalid_argument("nonpositive horizon");
  if (H_ == 0.5) return t;
  double p = 1.5 - H_;
  return std::pow(t, p) * special::beta_fn(p, p) * (2.0 - 2.0 * H_) / p * front_;
}

double WhiteningRow::primitive(double v) const {
  // antiderivative of v^{1/2-H} [(1-v)^{1/2-H} - (H-1/2) g(v)] by parts; the
  // log profile g vanishes at v = 1 and v^{3/2-H} g(v) -> 0 at v = 0
  double a = 1.5 - H_;
  double head = v >= 1.0 ? head_full_ : (*head_)(v);
  double prof = v <= 0.0 || v >= 1.0 ? 0.0 : (*prof_)(v);
  return head * (1.0 - (H_ - 0.5) / a) -
         ((H_ - 0.5) / a) * std::pow(v, a) * prof;
}

double WhiteningRow::cell_mass(double t, double u0, double u1) const {
  if (!(t > 0.0 && u0 >= 0.0 && u0 < u1 && u1 <= t))
    throw std::invalid_argument("cell mass needs 0 <= u0 < u1 <= t");
  if (H_ == 0.5) return u1 - u0;
  return front_ * std::pow(t, 1.5 - H_) * (primitive(u1 / t) - primitive(u0 / t));
}

std::vector<double> WhiteningRow::whiten(const Grid& g,
                                         const std::vector<double>& dx) const {
  if (dx.size() != g.n) throw std::invalid_argument("size mismatch");
  std::size_t n = g.n;
  double dt = g.dt;
  std::vector<double> z(n + 1, 0.0);
  if (H_ == 0.5) {
    for (std::size_t i = 0; i < n; ++i) z[i + 1] = z[i] + dx[i];
    return z;
  }
  // the log profile in the weight unfolds over the prefix
  // Ix(r) = int_0^r u^{1/2-H} dX, leaving lag convolutions in (t-r)^{1/2-H}
  // with exact cell moments on both singular edges
  auto cell_avg = [&](double pw, std::size_t j) {
    return std::pow(dt, pw) *
           (std::pow(static_cast<double>(j + 1), 1.0 + pw) -
            std::pow(static_cast<double>(j), 1.0 + pw)) /
           (1.0 + pw);
  };
  std::vector<double> lw(n), aw(n), au(n), vd(n), w1(n, 0.0), w2(n, 0.0);
  auto lq = frac_weights(1.5 - H_, n, dt);
  for (std::size_t k = 0; k < n; ++k) {
    lw[k] = cell_avg(0.5 - H_, k) * dt;
    aw[k] = static_cast<double>(k + 1) * dt * lw[k] - cell_avg(1.5 - H_, k) * dt;
  }
  for (std::size_t m = 0; m < n; ++m) {
    au[m] = cell_avg(0.5 - H_, m);
    vd[m] = au[m] * dx[m];
  }
  double ixm = 0.0;
  for (std::size_t m = 1; m < n; ++m) {
    ixm += au[m - 1] * dx[m - 1];
    double ar = std::log(static_cast<double>(m + 1) / static_cast<double>(m)) / dt;
    w1[m] = ar * ixm;
    w2[m] = ar * au[m] * dx[m] / dt;
  }
  auto cvd = convolve_fast(lq, vd);
  auto cv1 = convolve_fast(lw, w1);
  auto cv2 = convolve_fast(aw, w2);
  double sig0 = au[0] * dx[0] / dt;
  for (std::size_t i = 1; i <= n; ++i) {
    double j_int = cv1[i - 1] + cv2[i - 1] + sig0 * lw[i - 1];
    z[i] = front_ * std::pow(g.node(i), H_ - 0.5) *
           (cvd[i - 1] / dt - (H_ - 0.5) * j_int);
  }
  // the first rows invert the synthesis masses directly: product integration
  // for the first kind equation int_0^{t_i} K(t_i, s) u(s) ds = x(t_i), then
  // z_i accumulates the recovered density
  std::size_t i0 = std::min<std::size_t>(n, 128);
  {
    fbm::VolterraKernel kern(H_);
    std::vector<double> u(i0, 0.0), xv(i0 + 1, 0.0);
    for (std::size_t i = 1; i <= i0; ++i) xv[i] = xv[i - 1] + dx[i - 1];
    for (std::size_t i = 1; i <= i0; ++i) {
      double t = g.node(i);
      double acc = xv[i];
      for (std::size_t j = 0; j + 1 < i; ++j)
        acc -= kern.cell_mass(t, g.node(j), g.node(j + 1)) * u[j];
      u[i - 1] = acc / kern.cell_mass(t, g.node(i - 1), g.node(i));
    }
    double zi = 0.0;
    for (std::size_t i = 1; i <= i0; ++i) {
      zi += u[i - 1] * dt;
      z[i] = zi;
    }
  }
  return z;
}

// --- weighting measure cells ---

std::vector<double> mu_weights(double H, double t, std::size_t m) {
  if (!(H > 0.0 && H < 0.5)) throw std::invalid_argument("needs H < 1/2");
  if (t <= 0.0 || m == 0) throw std::invalid_argument("bad cell layout");
  special::BetaHead head(0.5 - H, -0.5 - H);
  double mass = special::beta_fn(1.5 - H, 0.5 - H);
  std::vector<double> w(m);
  double prev = 0.0;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    double x = static_cast<double>(j + 1) / static_cast<double>(m);
    double cur = head(x);
    w[j] = t * (cur - prev);
    prev = cur;
  }
  w[m - 1] = t * (mass - prev);
  return w;
}

// --- quadrature plan ---

QPlan::QPlan(double H, const Grid& g) : H_(H), grid_(g) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("hurst index out of range");
  if (g.n > 4608 && H != 0.5)
    throw std::invalid_argument("plan too large, use the convolution path");
  build();
}

void QPlan::build() {
  std::size_t n = grid_.n;
  rows_.assign(n + 1, {});
  if (H_ == 0.5) return;  // identity, apply() short-circuits
  auto c = special::hurst_constants(H_);
  double dt = grid_.dt;
  if (H_ < 0.5) {
    special::BetaHead head(0.5 - H_, -0.5 - H_);
    double mass = c.mu_mass;
    for (std::size_t i = 1; i <= n; ++i) {
      double s = grid_.node(i);
      double scale = c.kappa * std::pow(s, 0.5 - H_);
      auto& row = rows_[i];
      row.assign(i + 1, 0.0);
      double prev = 0.0;
      for (std::size_t j = 0; j + 1 < i; ++j) {
        double cur = head(static_cast<double>(j + 1) / static_cast<double>(i));
        double w = cur - prev;
        // interior cells see the node average
        row[j] += 0.5 * w;
        row[j + 1] += 0.5 * w;
        prev = cur;
      }
      // final cell carries the concentration near u = s, right endpoint value
      row[i] += mass - prev;
      for (double& v : row) v *= scale;
    }
    return;
  }
  // H > 1/2: local term plus compensated difference term; interior cells use
  // exact moments of x^{1/2-H}(1-x)^{-H-1/2}, the diagonal cell integrates the
  // linear difference exactly
  special::BetaHead m0(0.5 - H_, -0.5 - H_);
  special::BetaHead m1(1.5 - H_, -0.5 - H_);
  special::BetaHead diag(0.5 - H_, 0.5 - H_);
  double diag_full = special::beta_fn(1.5 - H_, 1.5 - H_);
  for (std::size_t i = 1; i <= n; ++i) {
    double s = grid_.node(i);
    auto& row = rows_[i];
    row.assign(i + 1, 0.0);
    double prev0 = 0.0, prev1 = 0.0;
    for (std::size_t j = 0; j + 1 < i; ++j) {
      double x = static_cast<double>(j + 1) / static_cast<double>(i);
      double cur0 = m0(x);
      double cur1 = m1(x);
      double dm0 = cur0 - prev0;
      double dm1 = cur1 - prev1;
      double u = grid_.node(j);
      double slope_w = (u * dm0 - s * dm1) / dt;
      row[i] += dm0;
      row[j] += -dm0 - slope_w;
      row[j + 1] += slope_w;
      prev0 = cur0;
      prev1 = cur1;
    }
    double lc = s * (diag_full - diag(static_cast<double>(i - 1) / static_cast<double>(i))) / dt;
    row[i] += lc;
    row[i - 1] -= lc;
    double scale = std::pow(s, 0.5 - H_);
    for (double& v : row) v *= c.beta_nl;
    row[i] += c.d;
    for (double& v : row) v *= scale;
  }
}

std::vector<double> QPlan::apply(const std::vector<double>& gnodes) const {
  std::size_t n = grid_.n;
  if (gnodes.size() != n + 1) throw std::invalid_argument("size mismatch");
  std::vector<double> q(n + 1, 0.0);
  if (H_ == 0.5) {
    q = gnodes;
    q[0] = 0.0;
    return q;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    const auto& row = rows_[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * gnodes[k];
    q[i] = acc;
  }
  return q;
}

const std::vector<double>& QPlan::row(std::size_t i) const {
  if (i >= rows_.size()) throw std::invalid_argument("row out of range");
  return rows_[i];
}

std::string QPlan::cache_name(const std::string& dir) const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "/qplan_h%.6f_n%zu_dt%.12e.bin", H_, grid_.n, grid_.dt);
  return dir + buf;
}

bool QPlan::save(const std::string& dir) const {
  if (dir.empty()) return false;
  std::ofstream out(cache_name(dir), std::ios::binary);
  if (!out) return false;
  std::uint64_t n = grid_.n;
  out.write(reinterpret_cast<const char*>(&H_), sizeof(H_));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&grid_.dt), sizeof(grid_.dt));
  for (std::size_t i = 0; i <= grid_.n; ++i) {
    std::uint64_t len = rows_[i].size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(reinterpret_cast<const char*>(rows_[i].data()),
              static_cast<std::streamsize>(len * sizeof(double)));
  }
  return static_cast<bool>(out);
}

std::unique_ptr<QPlan> QPlan::load_or_build(double H, const Grid& g,
                                            const std::string& dir) {
  std::unique_ptr<QPlan> plan(new QPlan());
  plan->H_ = H;
  plan->grid_ = g;
  if (!dir.empty()) {
    std::ifstream in(plan->cache_name(dir), std::ios::binary);
    if (in) {
      double h_file = 0.0, dt_file = 0.0;
      std::uint64_t n_file = 0;
      in.read(reinterpret_cast<char*>(&h_file), sizeof(h_file));
      in.read(reinterpret_cast<char*>(&n_file), sizeof(n_file));
      in.read(reinterpret_cast<char*>(&dt_file), sizeof(dt_file));
      if (in && h_file == H && n_file == g.n && dt_file == g.dt) {
        plan->rows_.assign(g.n + 1, {});
        bool ok = true;
        for (std::size_t i = 0; i <= g.n && ok; ++i) {
          std::uint64_t len = 0;
          in.read(reinterpret_cast<char*>(&len), sizeof(len));
          plan->rows_[i].resize(len);
          in.read(reinterpret_cast<char*>(plan->rows_[i].data()),
                  static_cast<std::streamsize>(len * sizeof(double)));
          ok = static_cast<bool>(in);
        }
        if (ok) return plan;
      }
    }
  }
  plan = std::make_unique<QPlan>(H, g);
  if (!dir.empty()) plan->save(dir);
  return plan;
}

std::string default_plan_cache_dir() {
  const char* env = std::getenv("FRACMLE_PLAN_CACHE");
  return env ? std::string(env) : std::string();
}

}  // namespace fracmle::fracops
