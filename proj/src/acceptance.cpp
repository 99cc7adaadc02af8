#include "fracmle/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fracmle/discrete.hpp"
#include "fracmle/estimators.hpp"
#include "fracmle/fbm.hpp"
#include "fracmle/frac_ops.hpp"
#include "fracmle/grid.hpp"
#include "fracmle/mc.hpp"
#include "fracmle/rng.hpp"
#include "fracmle/sde.hpp"
#include "fracmle/special.hpp"
#include "fracmle/stats.hpp"

namespace fracmle::accept {

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed_s(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

AcResult skipped(const std::string& id) {
  AcResult r;
  r.id = id;
  r.skipped = true;
  r.detail = "skipped (quick)";
  return r;
}

std::string summarize(const mc::McReport& rep) {
  std::size_t ok = 0;
  std::string first_fail;
  for (const auto& c : rep.checks) {
    if (c.rfind("ok:", 0) == 0)
      ++ok;
    else if (first_fail.empty())
      first_fail = c;
  }
  std::ostringstream os;
  os << ok << "/" << rep.checks.size() << " checks ok";
  if (!first_fail.empty()) os << "; " << first_fail;
  return os.str();
}

// --- AC-1: sampled covariance against the closed form ---

AcResult ac1(bool quick) {
  if (quick) return skipped("AC-1");
  AcResult r;
  r.id = "AC-1";
  auto t0 = clock_type::now();
  const std::size_t n = 64, reps = 10000;
  Grid g(n, 1.0 / 64.0);
  double worst = 0.0;
  const double hs[] = {0.25, 0.5, 0.75};
  for (std::size_t hi = 0; hi < 3; ++hi) {
    double H = hs[hi];
    fbm::ExactSampler sampler(H, g, fbm::ExactSampler::Method::kCholesky);
    std::size_t pairs = n * (n + 1) / 2;
    std::vector<double> m1(pairs, 0.0), m2(pairs, 0.0);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      CounterRng rng(4101, (static_cast<std::uint64_t>(hi) << 32) | rep);
      fbm::Path p = sampler.sample(rng);
      std::size_t idx = 0;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i; j <= n; ++j, ++idx) {
          double v = p.values[i] * p.values[j];
          m1[idx] += v;
          m2[idx] += v * v;
        }
    }
    double rr = static_cast<double>(reps);
    std::size_t idx = 0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i; j <= n; ++j, ++idx) {
        double emp = m1[idx] / rr;
        double var = std::max(m2[idx] / rr - emp * emp, 0.0);
        double se = std::sqrt(var / rr);
        double target = fbm::covariance(H, g.node(i), g.node(j));
        worst = std::max(worst, std::abs(emp - target) / std::max(se, 1e-300));
      }
  }
  double secs = elapsed_s(t0);
  r.pass = worst <= 4.0 && secs <= 60.0;
  r.detail = "max |emp-R| = " + fmt(worst) + " se (limit 4), " + fmt(secs) + " s";
  return r;
}

// --- AC-2: moving-average synthesis whitens back to its own driver ---

// round trip max_i |Z_i - W_i| / sup|W| over every stride-th node
double roundtrip_gap(double H, const Grid& g, const std::vector<double>& driver,
                     std::size_t stride) {
  fbm::Path p = fbm::sample_volterra(H, g, driver);
  fracops::WhiteningRow wrow(H);
  auto z = wrow.whiten(g, increments(p.values));
  double w = 0.0, sup = 0.0, gap = 0.0;
  for (std::size_t i = 1; i <= g.n; ++i) {
    w += driver[i - 1];
    if (i % stride) continue;
    sup = std::max(sup, std::abs(w));
    gap = std::max(gap, std::abs(z[i] - w));
  }
  return gap / sup;
}

// exact cell integrals of a smooth deterministic driver density 1 + sin(3s);
// with the noise out of the way the refine factor of the gap is sharp
double smooth_driver_gap(double H, std::size_t n) {
  Grid g(n, 1.0 / static_cast<double>(n));
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) {
    double a = g.node(j), b = g.node(j + 1);
    d[j] = (b - a) + (std::cos(3.0 * a) - std::cos(3.0 * b)) / 3.0;
  }
  return roundtrip_gap(H, g, d, 1);
}

AcResult ac2(bool quick) {
  AcResult r;
  r.id = "AC-2";
  std::size_t n = quick ? 1024 : 4096;
  std::size_t seeds = quick ? 4 : 12;
  bool ok = true;
  std::ostringstream os;
  for (double H : {0.3, 0.7}) {
    double worst = 0.0;
    std::vector<double> ratios;
    for (std::size_t s = 0; s < seeds; ++s) {
      std::uint64_t stream = (H < 0.5 ? 0u : 1u) * 1000 + s;
      Grid gc(n, 1.0 / static_cast<double>(n));
      Grid gf(2 * n, 0.5 / static_cast<double>(n));
      CounterRng rng(4202, stream);
      auto xi = rng.gauss_vector(n, 0);
      double sdt = std::sqrt(gc.dt);
      // the fine grid reruns the same Brownian increments, split in half, so
      // W agrees at shared nodes and the ratio isolates the scheme error
      std::vector<double> dc(n), df(2 * n);
      for (std::size_t j = 0; j < n; ++j) {
        dc[j] = sdt * xi[j];
        df[2 * j] = 0.5 * dc[j];
        df[2 * j + 1] = 0.5 * dc[j];
      }
      double rc = roundtrip_gap(H, gc, dc, 1);
      double rf = roundtrip_gap(H, gf, df, 2);
      worst = std::max(worst, std::max(rc, rf));
      ratios.push_back(rf / rc);
    }
    // the max over nodes can move under refinement, which throws occasional
    // per seed outliers, so the refine factor is judged by its median
    std::sort(ratios.begin(), ratios.end());
    double med = seeds % 2 ? ratios[seeds / 2]
                           : 0.5 * (ratios[seeds / 2 - 1] + ratios[seeds / 2]);
    double det_ratio = smooth_driver_gap(H, 2 * n) / smooth_driver_gap(H, n);
    ok &= worst <= 0.05;
    ok &= med >= 0.25 && med <= 0.75;
    ok &= det_ratio >= 0.35 && det_ratio <= 0.62;
    os << "H=" << H << ": worst gap " << fmt(worst)
       << " of sup|W| (limit 0.05), dt->dt/2 gap ratio " << fmt(med)
       << " on paths / " << fmt(det_ratio) << " smooth; ";
  }
  r.pass = ok;
  r.detail = os.str();
  if (quick) r.detail += "reduced scale";
  return r;
}

// --- AC-3: every route collapses to the classical drift estimator at H=1/2 ---

AcResult ac3(bool) {
  AcResult r;
  r.id = "AC-3";
  auto drift = sde::drift_by_name("linear");
  double ident_max = 0.0;
  bool ok = true;
  std::ostringstream os;
  for (std::size_t level = 0; level < 2; ++level) {
    std::size_t npu = level == 0 ? 64 : 128;
    double dt = 1.0 / static_cast<double>(npu);
    std::size_t n = 16 * npu;
    Grid g(n, dt);
    double scheme_max = 0.0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      CounterRng rng(4303, (level << 8) | seed);
      fbm::Path p = fbm::sample_exact(0.5, g, rng);
      auto x = sde::linear_exact(-1.0, p);
      double classical = disc::classical_discrete_mle(x, drift, dt).theta;
      auto q = est::compute_Q(0.5, g, x);
      auto dx = increments(x);
      double tz = est::mle_z_form(est::left_cells(q), dx, dt).theta;
      ident_max = std::max(ident_max, std::abs(tz - classical));
      std::vector<double> neg(dx.size());
      for (std::size_t i = 0; i < dx.size(); ++i) neg[i] = -dx[i];
      double tw = est::mle_w_form(est::left_cells(q), neg, dt).theta;
      ident_max = std::max(ident_max, std::abs(tw - tz));
      auto qf = est::compute_q_fast(0.5, g, x);
      for (std::size_t i = 0; i <= n; ++i)
        ident_max = std::max(ident_max, std::abs(qf[i] - q[i]));
      std::vector<double> xint;
      for (std::size_t j = 0; j * npu <= n; ++j) xint.push_back(x[j * npu]);
      double tb = disc::theta_bar(xint, xint).theta;
      double cint = disc::classical_discrete_mle(xint, drift, 1.0).theta;
      ident_max = std::max(ident_max, std::abs(tb - cint));
      auto kb = est::kb_objects(0.5, g, x);
      double tkb = est::mle_kb(kb, g).theta;
      scheme_max = std::max(scheme_max, std::abs(tkb - classical));
      auto z2 = est::z_from_kb(0.5, g, kb.z);
      double tz2 = est::mle_z_form(est::left_cells(qf), increments(z2), dt).theta;
      scheme_max = std::max(scheme_max, std::abs(tz2 - classical));
    }
    ok &= scheme_max <= 25.0 * dt;
    os << "scheme gap " << fmt(scheme_max) << " at dt=1/" << npu << " (limit "
       << fmt(25.0 * dt) << "); ";
  }
  ok &= ident_max <= 1e-10;
  r.pass = ok;
  r.detail = "identical routes differ by " + fmt(ident_max) + " (limit 1e-10); " +
             os.str();
  return r;
}

// --- AC-4: whitened-route and transform-route estimates coincide per path ---

AcResult ac4(bool quick) {
  AcResult r;
  r.id = "AC-4";
  std::size_t seeds = quick ? 5 : 50;
  const std::size_t n = 4096;
  const double t = 100.0, theta = -1.0;
  Grid g(n, t / static_cast<double>(n));
  bool ok = true;
  std::ostringstream os;
  for (double H : {0.3, 0.7}) {
    fbm::ExactSampler sampler(H, g);
    double worst_gap = 0.0, worst_resid = 0.0, worst_cdev = 0.0;
    double dH = special::hurst_constants(H).d;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
      CounterRng rng(4404, ((H < 0.5 ? 0ull : 1ull) << 32) | seed);
      fbm::Path p = sampler.sample(rng);
      auto x = sde::linear_exact(theta, p);
      auto kb = est::kb_objects(H, g, x);
      double tkb = est::mle_kb(kb, g).theta;
      auto z = est::z_from_kb(H, g, kb.z);
      auto q = est::compute_q_fast(H, g, x);
      // the kernel transform's backward slope samples the path at an
      // effective time set by the kernel's diagonal behaviour: a vanishing
      // diagonal averages the whole cell, a diverging one weights the fresh
      // edge; blend the whitened q to the same effective time before
      // comparing per path
      double w1 = H < 0.5 ? 0.9 : 0.5;
      std::vector<double> cells(n);
      for (std::size_t i = 0; i < n; ++i)
        cells[i] = w1 * q[i] + (1.0 - w1) * (i ? q[i - 1] : 0.0);
      double tz = est::mle_z_form(cells, increments(z), g.dt).theta;
      worst_gap = std::max(worst_gap, std::abs(tz - tkb));
      if (seed < 5) {
        // single-constant collapse: q should be C s^{1/2-H} q_kb with C = d;
        // block averages suppress the node-level stencil noise the constant
        // does not act on
        std::size_t i0 = std::max<std::size_t>(2, n / 64);
        const std::size_t blk = 64;
        std::vector<double> uu, qq;
        for (std::size_t b0 = i0; b0 + blk <= n + 1; b0 += blk) {
          double su = 0.0, sq = 0.0;
          for (std::size_t i = b0; i < b0 + blk; ++i) {
            su += std::pow(g.node(i), 0.5 - H) * kb.q[i];
            sq += q[i];
          }
          uu.push_back(su / static_cast<double>(blk));
          qq.push_back(sq / static_cast<double>(blk));
        }
        double num = 0.0, den = 0.0, res = 0.0, tot = 0.0;
        for (std::size_t k = 0; k < uu.size(); ++k) {
          num += uu[k] * qq[k];
          den += uu[k] * uu[k];
        }
        double chat = num / den;
        for (std::size_t k = 0; k < uu.size(); ++k) {
          res += (qq[k] - chat * uu[k]) * (qq[k] - chat * uu[k]);
          tot += qq[k] * qq[k];
        }
        worst_resid = std::max(worst_resid, std::sqrt(res / tot));
        worst_cdev = std::max(worst_cdev, std::abs(chat / dH - 1.0));
      }
    }
    ok &= worst_gap <= 1e-2 * std::abs(theta);
    ok &= worst_resid <= 0.01;
    os << "H=" << H << ": gap " << fmt(worst_gap) << ", fit residual "
       << fmt(worst_resid) << ", fitted C off the predicted constant by "
       << fmt(worst_cdev) << "; ";
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

// --- AC-5 / AC-6: bias and mse sweeps from the harness ---

AcResult ac5(bool quick) {
  if (quick) return skipped("AC-5");
  AcResult r;
  r.id = "AC-5";
  auto t0 = clock_type::now();
  mc::ExperimentConfig cfg;
  cfg.experiment = "bias_mse";
  cfg.hursts = {0.25, 0.5, 0.75};
  cfg.theta = -1.0;
  cfg.horizons = {25.0, 50.0, 100.0, 200.0};
  cfg.nodes_per_unit = 64;
  cfg.reps = 500;
  cfg.seed = 4505;
  auto rep = mc::run_bias_mse(cfg);
  double secs = elapsed_s(t0);
  r.pass = rep.pass && secs <= 1800.0;
  r.detail = summarize(rep) + ", " + fmt(secs) + " s";
  return r;
}

AcResult ac6(bool quick) {
  if (quick) return skipped("AC-6");
  AcResult r;
  r.id = "AC-6";
  mc::ExperimentConfig cfg;
  cfg.experiment = "decay";
  cfg.hursts = {0.3, 0.7};
  cfg.theta = 1.0;
  cfg.horizons = {5.0, 8.0, 11.0};
  cfg.nodes_per_unit = 64;
  cfg.reps = 1000;
  cfg.seed = 4606;
  auto rep = mc::run_bias_mse(cfg);
  r.pass = rep.pass;
  r.detail = summarize(rep);
  return r;
}

// --- AC-7: nonlinear drifts through the full pipeline ---

AcResult ac7(bool quick) {
  if (quick) return skipped("AC-7");
  AcResult r;
  r.id = "AC-7";
  bool ok = true;
  std::ostringstream os;
  for (const char* drift : {"capped_power", "logcosh"}) {
    mc::ExperimentConfig cfg;
    cfg.experiment = "consistency";
    cfg.drift = drift;
    cfg.hursts = {0.3, 0.7};
    cfg.theta = -0.5;
    cfg.horizons = {50.0, 100.0, 200.0};
    cfg.nodes_per_unit = 32;
    cfg.reps = 200;
    cfg.seed = 4707;
    auto rep = mc::run_consistency(cfg);
    ok &= rep.pass;
    os << drift << ": " << summarize(rep) << "; ";
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

// --- AC-8: integer-time estimators converge and agree increasingly ---

AcResult ac8(bool quick) {
  if (quick) return skipped("AC-8");
  AcResult r;
  r.id = "AC-8";
  const std::size_t npu = 16, nmax = 400, reps = 200;
  const double theta = -1.0;
  const std::size_t ns[] = {50, 100, 200, 400};
  Grid g(npu * nmax, 1.0 / static_cast<double>(npu));
  bool ok = true;
  std::ostringstream os;
  std::size_t ci = 0;
  for (const char* dname : {"linear", "capped_power"}) {
    auto drift = sde::drift_by_name(dname);
    for (double H : {0.3, 0.7}) {
      fbm::ExactSampler sampler(H, g);
      std::vector<std::vector<double>> abs_bar(4), gap_check(4);
      for (auto& v : abs_bar) v.resize(reps);
      for (auto& v : gap_check) v.resize(reps);
      mc::parallel_reps(reps, 0, [&](std::size_t rep) {
        CounterRng rng(4808, (static_cast<std::uint64_t>(ci) << 32) | rep);
        auto pp = mc::simulate_pipeline(sampler, g, theta, drift, rng);
        std::vector<double> q_int(nmax + 1), z_int(nmax + 1);
        disc::DiscreteRecord rec;
        rec.x.resize(nmax + 1);
        for (std::size_t j = 0; j <= nmax; ++j) {
          q_int[j] = pp.q[j * npu];
          z_int[j] = pp.z[j * npu];
          rec.x[j] = pp.x[j * npu];
        }
        auto qc = disc::q_check(H, rec, drift);
        auto zc = disc::z_check(H, rec);
        double bnum = 0.0, bden = 0.0, cnum = 0.0, cden = 0.0;
        std::size_t k = 0;
        for (std::size_t m = 0; m < nmax && k < 4; ++m) {
          bnum += q_int[m] * (z_int[m + 1] - z_int[m]);
          bden += q_int[m] * q_int[m];
          cnum += qc[m] * (zc[m + 1] - zc[m]);
          cden += qc[m] * qc[m];
          if (m + 1 == ns[k]) {
            double tbar = bnum / bden;
            double tch = cnum / cden;
            abs_bar[k][rep] = std::abs(tbar - theta);
            gap_check[k][rep] = std::abs(tch - tbar);
            ++k;
          }
        }
      });
      std::vector<double> mb(4), mg(4);
      for (std::size_t k = 0; k < 4; ++k) {
        mb[k] = stats::median(abs_bar[k]);
        mg[k] = stats::median(gap_check[k]);
      }
      bool dec_b = true, dec_g = true;
      for (std::size_t k = 1; k < 4; ++k) {
        dec_b &= mb[k] < mb[k - 1];
        dec_g &= mg[k] < mg[k - 1];
      }
      ok &= dec_b && dec_g;
      os << dname << " H=" << H << ": med|err| " << fmt(mb[0]) << "->" << fmt(mb[3])
         << (dec_b ? "" : " NOT DECREASING") << ", med gap " << fmt(mg[0]) << "->"
         << fmt(mg[3]) << (dec_g ? "" : " NOT DECREASING") << "; ";
      ++ci;
    }
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

// --- AC-9: bracket substitution error decays at the predicted exponent ---

AcResult ac9(bool quick) {
  if (quick) return skipped("AC-9");
  AcResult r;
  r.id = "AC-9";
  const double H = 0.3, theta = -1.0;
  const std::size_t npu = 32, seeds = 50;
  Grid g(npu * 256, 1.0 / static_cast<double>(npu));
  std::size_t good = 0;
  std::vector<double> growths, alphas;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    CounterRng rng(4909, seed);
    auto wp = mc::simulate_linear_whitened(H, g, theta, rng);
    auto z = cumsum_from_zero(wp.dz);
    auto d = disc::bracket_diagnostics(wp.q, z, npu);
    if (d.alpha_hat > 0.0 && d.alpha_hat <= 2.0 * H + 0.2) ++good;
    growths.push_back(d.qv_b_growth);
    alphas.push_back(d.alpha_hat);
  }
  double med_growth = stats::median(growths);
  r.pass = good * 10 >= seeds * 9 && med_growth >= 1.8;
  r.detail = "decay exponent in (0, " + fmt(2.0 * H + 0.2) + "] in " +
             std::to_string(good) + "/" + std::to_string(seeds) +
             " seeds (median " + fmt(stats::median(alphas)) +
             "), median info growth " + fmt(med_growth) + " (limit 1.8)";
  return r;
}

// --- AC-10 / AC-11: small-value scan and density study from the harness ---

AcResult ac10(bool quick, const std::string& plan_cache) {
  if (quick) return skipped("AC-10");
  AcResult r;
  r.id = "AC-10";
  mc::ExperimentConfig cfg;
  cfg.experiment = "condition_c";
  cfg.drift = "linear";
  cfg.hursts = {0.3, 0.7};
  cfg.theta = 0.0;
  cfg.horizons = {10.0, 40.0, 160.0};
  cfg.nodes_per_unit = 16;
  cfg.reps = 10000;
  cfg.seed = 4010;
  cfg.plan_cache = plan_cache;
  auto rep = mc::condition_c_scan(cfg);
  r.pass = rep.base.pass;
  r.detail = summarize(rep.base);
  return r;
}

AcResult ac11(bool quick) {
  if (quick) return skipped("AC-11");
  AcResult r;
  r.id = "AC-11";
  mc::ExperimentConfig cfg;
  cfg.experiment = "density";
  cfg.drift = "logcosh";
  cfg.hursts = {0.3};
  cfg.theta = 0.0;
  cfg.horizons = {4.0, 16.0};
  cfg.nodes_per_unit = 1;
  cfg.reps = 10000;
  cfg.mu_nodes = 32;
  cfg.seed = 4011;
  auto rep = mc::malliavin_density(cfg);
  bool rejects = false;
  try {
    mc::ExperimentConfig bad = cfg;
    bad.hursts = {0.6};
    bad.validate();
  } catch (const std::invalid_argument&) {
    rejects = true;
  }
  r.pass = rep.base.pass && rejects;
  r.detail = summarize(rep.base) +
             (rejects ? "; rejects H >= 1/2" : "; MISSING H >= 1/2 rejection");
  return r;
}

// --- AC-12: kernel-op oracles and determinism ---

AcResult ac12(bool) {
  AcResult r;
  r.id = "AC-12";
  auto t0 = clock_type::now();
  bool ok = true;
  double worst_rl = 0.0;
  {
    const std::size_t n = 2048;
    Grid g(n, 1.0 / static_cast<double>(n));
    for (double alpha : {0.3, 0.7}) {
      for (int k : {1, 2}) {
        std::vector<double> f(n + 1), fd(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
          f[i] = std::pow(g.node(i), k);
          fd[i] = std::pow(g.node(i), k + alpha);
        }
        auto I = fracops::rl_integral(alpha, g, f);
        double exact_i = std::tgamma(k + 1.0) / std::tgamma(k + 1.0 + alpha);
        worst_rl = std::max(worst_rl, std::abs(I[n] - exact_i) / exact_i);
        auto D = fracops::rl_derivative(alpha, g, fd);
        double exact_d = std::tgamma(k + alpha + 1.0) / std::tgamma(k + 1.0);
        worst_rl = std::max(worst_rl, std::abs(D[n] - exact_d) / exact_d);
      }
    }
    ok &= worst_rl <= 1e-4;
  }
  double worst_conv = 0.0;
  {
    CounterRng rng(4012, 0);
    auto a = rng.gauss_vector(777, 0);
    auto b = rng.gauss_vector(1537, 100000);
    auto cf = fracops::convolve_fast(a, b);
    auto cd = fracops::convolve_direct(a, b);
    double scale = 0.0;
    for (double v : cd) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < cd.size(); ++i)
      worst_conv = std::max(worst_conv, std::abs(cf[i] - cd[i]) / scale);
    ok &= worst_conv <= 1e-10;
  }
  bool deterministic = true;
  {
    mc::ExperimentConfig cfg;
    cfg.experiment = "bias_mse";
    cfg.hursts = {0.3};
    cfg.theta = -1.0;
    cfg.horizons = {4.0, 8.0};
    cfg.nodes_per_unit = 32;
    cfg.reps = 40;
    cfg.seed = 99;
    cfg.threads = 1;
    mc::McRaw r1, r2;
    auto rep1 = mc::run_bias_mse(cfg, &r1);
    cfg.threads = 4;
    auto rep2 = mc::run_bias_mse(cfg, &r2);
    deterministic &= r1.estimate == r2.estimate && r1.aux == r2.aux;
    deterministic &= rep1.to_json() == rep2.to_json();
    auto tmp = std::filesystem::temp_directory_path() / "fracmle_ac12_raw.csv";
    mc::persist_raw(tmp.string(), r1);
    auto r3 = mc::load_raw(tmp.string());
    deterministic &= mc::report_from_raw(r3).to_json() == rep1.to_json();
    std::filesystem::remove(tmp);
    ok &= deterministic;
  }
  double secs = elapsed_s(t0);
  ok &= secs <= 30.0;
  r.pass = ok;
  r.detail = "monomial error " + fmt(worst_rl) + " (limit 1e-4), convolution gap " +
             fmt(worst_conv) + " (limit 1e-10), " +
             (deterministic ? "deterministic across threads and disk"
                            : "DETERMINISM BROKEN") +
             ", " + fmt(secs) + " s";
  return r;
}

AcResult guarded(AcResult (*f)(bool), bool quick) {
  AcResult r;
  try {
    r = f(quick);
  } catch (const std::exception& e) {
    r.pass = false;
    r.skipped = false;
    r.detail = std::string("error: ") + e.what();
  }
  return r;
}

}  // namespace

std::vector<AcResult> run_acceptance(bool quick, const std::string& plan_cache) {
  std::vector<AcResult> out;
  out.push_back(guarded(ac1, quick));
  out.push_back(guarded(ac2, quick));
  out.push_back(guarded(ac3, quick));
  out.push_back(guarded(ac4, quick));
  out.push_back(guarded(ac5, quick));
  out.push_back(guarded(ac6, quick));
  out.push_back(guarded(ac7, quick));
  out.push_back(guarded(ac8, quick));
  out.push_back(guarded(ac9, quick));
  {
    AcResult r;
    try {
      r = ac10(quick, plan_cache);
    } catch (const std::exception& e) {
      r.id = "AC-10";
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    out.push_back(r);
  }
  out.push_back(guarded(ac11, quick));
  out.push_back(guarded(ac12, quick));
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].id.empty()) out[i].id = "AC-" + std::to_string(i + 1);
  return out;
}

std::string format_results(const std::vector<AcResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    std::string status = r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    os << r.id;
    for (std::size_t i = r.id.size(); i < 6; ++i) os << ' ';
    os << status << "  " << r.detail << "\n";
  }
  return os.str();
}

bool all_passed(const std::vector<AcResult>& results) {
  for (const auto& r : results)
    if (!r.skipped && !r.pass) return false;
  return true;
}

}  // namespace fracmle::accept
