#include "fracmle/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include <Eigen/Dense>

#include "fracmle/csv.hpp"
#include "fracmle/estimators.hpp"
#include "fracmle/frac_ops.hpp"
#include "fracmle/sde.hpp"
#include "fracmle/special.hpp"
#include "fracmle/stats.hpp"

namespace fracmle::mc {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

const std::vector<double> kEpsGrid{0.05, 0.1, 0.2, 0.4};

std::string fmt_g(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double sample_sd(const std::vector<double>& v) {
  return v.size() < 2 ? 0.0 : std::sqrt(stats::variance(v));
}

bool push_check(std::vector<std::string>& checks, bool ok, const std::string& msg) {
  checks.push_back((ok ? "ok: " : "FAIL: ") + msg);
  return ok;
}

std::vector<double> parse_list(const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list value");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

void parse_config_file(ExperimentConfig& cfg, const std::string& path, int depth) {
  if (depth >= 8) throw std::runtime_error("include depth exceeded at " + path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string base = fs::path(path).parent_path().string();
  std::string line;
  while (std::getline(in, line)) cfg.apply_line(line, base, depth);
}

}  // namespace

// --- configuration ---

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  ExperimentConfig cfg;
  parse_config_file(cfg, path, 0);
  cfg.validate();
  return cfg;
}

void ExperimentConfig::apply_line(const std::string& raw_line, const std::string& base_dir,
                                  int depth) {
  std::string line = trim(raw_line);
  if (line.empty() || line[0] == '#') return;
  std::size_t sp = line.find_first_of(" \t");
  std::string key = sp == std::string::npos ? line : line.substr(0, sp);
  std::string value = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
  if (key == "include") {
    if (value.empty()) throw std::invalid_argument("include needs a path");
    fs::path target(value);
    if (target.is_relative() && !base_dir.empty()) target = fs::path(base_dir) / target;
    parse_config_file(*this, target.string(), depth + 1);
    return;
  }
  if (value.empty()) throw std::invalid_argument("config key without value: " + key);
  if (key == "experiment")
    experiment = value;
  else if (key == "drift")
    drift = value;
  else if (key == "hurst")
    hursts = parse_list(value);
  else if (key == "theta")
    theta = std::stod(value);
  else if (key == "horizon")
    horizons = parse_list(value);
  else if (key == "nodes_per_unit")
    nodes_per_unit = static_cast<std::size_t>(std::stoull(value));
  else if (key == "reps")
    reps = static_cast<std::size_t>(std::stoull(value));
  else if (key == "seed")
    seed = std::stoull(value);
  else if (key == "mu_nodes")
    mu_nodes = static_cast<std::size_t>(std::stoull(value));
  else if (key == "threads")
    threads = static_cast<std::size_t>(std::stoull(value));
  else if (key == "out")
    out_dir = value;
  else if (key == "plan_cache")
    plan_cache = value;
  else if (key == "quick")
    quick = value == "1" || value == "true";
  else
    throw std::invalid_argument("unknown config key " + key);
}

void ExperimentConfig::validate() const {
  static const char* kKnown[] = {"bias_mse", "decay", "consistency", "condition_c",
                                 "density"};
  bool known = false;
  for (const char* k : kKnown) known = known || experiment == k;
  if (!known) throw std::invalid_argument("unknown experiment " + experiment);
  if (reps == 0) throw std::invalid_argument("reps must be positive");
  if (nodes_per_unit == 0) throw std::invalid_argument("nodes_per_unit must be positive");
  if (hursts.empty()) throw std::invalid_argument("need at least one hurst value");
  for (double h : hursts)
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("hurst index out of range");
  if (horizons.empty()) throw std::invalid_argument("need at least one horizon");
  double npu = static_cast<double>(nodes_per_unit);
  for (double t : horizons) {
    if (!(t > 0.0)) throw std::invalid_argument("horizon must be positive");
    double cells = t * npu;
    if (std::abs(cells - std::round(cells)) > 1e-9)
      throw std::invalid_argument("horizon not commensurate with the grid");
  }
  if (experiment == "bias_mse" && !(theta < 0.0))
    throw std::invalid_argument("bias_mse experiment needs theta < 0");
  if (experiment == "decay" && !(theta > 0.0))
    throw std::invalid_argument("decay experiment needs theta > 0");
  if (experiment == "consistency" && !(theta < 0.0))
    throw std::invalid_argument("consistency experiment needs theta < 0");
  if (experiment == "condition_c") {
    double tmax = *std::max_element(horizons.begin(), horizons.end());
    if (tmax * npu > 4608.0)
      throw std::invalid_argument("condition_c grid exceeds the quadrature plan limit");
  }
  if (experiment == "density") {
    if (hursts.size() != 1)
      throw std::invalid_argument("density study takes a single hurst value");
    if (hursts[0] >= 0.5) throw std::invalid_argument("density study needs H < 1/2");
    if (mu_nodes < 2) throw std::invalid_argument("density study needs mu_nodes >= 2");
  }
}

std::string ExperimentConfig::echo() const {
  std::ostringstream os;
  os.precision(17);
  os << "experiment " << experiment << "\n";
  os << "drift " << drift << "\n";
  os << "hurst ";
  for (std::size_t i = 0; i < hursts.size(); ++i) os << (i ? "," : "") << hursts[i];
  os << "\n";
  os << "theta " << theta << "\n";
  os << "horizon ";
  for (std::size_t i = 0; i < horizons.size(); ++i) os << (i ? "," : "") << horizons[i];
  os << "\n";
  os << "nodes_per_unit " << nodes_per_unit << "\n";
  os << "reps " << reps << "\n";
  os << "seed " << seed << "\n";
  os << "mu_nodes " << mu_nodes << "\n";
  os << "threads " << threads << "\n";
  if (!out_dir.empty()) os << "out " << out_dir << "\n";
  if (!plan_cache.empty()) os << "plan_cache " << plan_cache << "\n";
  os << "quick " << (quick ? 1 : 0) << "\n";
  return os.str();
}

// --- worker pool ---

void parallel_reps(std::size_t reps, std::size_t threads,
                   const std::function<void(std::size_t)>& f) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  threads = std::min(threads, reps);
  if (threads <= 1) {
    for (std::size_t r = 0; r < reps; ++r) f(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      std::size_t r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        f(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(reps);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// --- simulators ---

WhitenedLinearPath simulate_linear_whitened(double H, const Grid& g, double theta,
                                            const CounterRng& rng) {
  std::size_t n = g.n;
  double dt = g.dt;
  WhitenedLinearPath p;
  p.dw = rng.gauss_vector(n, 0);
  double sdt = std::sqrt(dt);
  for (double& d : p.dw) d *= sdt;
  p.q.assign(n + 1, 0.0);
  p.dz.assign(n, 0.0);
  double e = 0.5 - H;
  // same running-sum discretization as the linear estimation route, so
  // estimating on dz returns exactly this q
  double s_lo = 0.0, s_hi = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    p.dz[i - 1] = p.dw[i - 1] + theta * p.q[i - 1] * dt;
    double u = g.mid(i - 1);
    s_lo += std::pow(u, e) * p.dz[i - 1];
    s_hi += std::pow(u, -e) * p.dz[i - 1];
    double t = g.node(i);
    p.q[i] = 0.5 * (std::pow(t, -e) * s_lo + std::pow(t, e) * s_hi);
  }
  return p;
}

PipelinePath simulate_pipeline(const fbm::ExactSampler& sampler, const Grid& g,
                               double theta, const sde::DriftModel& drift,
                               const CounterRng& rng) {
  fbm::Path noise = sampler.sample(rng);
  PipelinePath p;
  p.x = drift.is_linear ? sde::linear_exact(theta, noise)
                        : sde::euler(drift, theta, noise);
  std::vector<double> gv(p.x.size());
  for (std::size_t i = 0; i < p.x.size(); ++i) gv[i] = drift.b(p.x[i]);
  p.q = est::compute_q_fast(noise.H, g, gv);
  auto kb = est::kb_objects(noise.H, g, p.x);
  p.z = est::z_from_kb(noise.H, g, kb.z);
  return p;
}

// --- raw persistence ---

void persist_raw(const std::string& path, const McRaw& raw) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "experiment,drift,seed,rep,H,theta,t,estimate,aux\n";
  for (std::size_t i = 0; i < raw.estimate.size(); ++i) {
    out << raw.experiment << "," << raw.drift << "," << raw.seed << "," << raw.rep[i]
        << "," << raw.H[i] << "," << raw.theta[i] << "," << raw.t[i] << ","
        << raw.estimate[i] << "," << raw.aux[i] << "\n";
  }
}

McRaw load_raw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  McRaw raw;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty raw file " + path);
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw std::runtime_error("bad raw row in " + path);
    if (first) {
      raw.experiment = cells[0];
      raw.drift = cells[1];
      raw.seed = std::stoull(cells[2]);
      first = false;
    } else if (cells[0] != raw.experiment || cells[1] != raw.drift ||
               std::stoull(cells[2]) != raw.seed) {
      throw std::runtime_error("mixed metadata in raw file " + path);
    }
    raw.rep.push_back(std::stoull(cells[3]));
    raw.H.push_back(std::stod(cells[4]));
    raw.theta.push_back(std::stod(cells[5]));
    raw.t.push_back(std::stod(cells[6]));
    raw.estimate.push_back(std::stod(cells[7]));
    raw.aux.push_back(std::stod(cells[8]));
  }
  if (raw.estimate.empty()) throw std::runtime_error("no rows in raw file " + path);
  return raw;
}

// --- aggregation ---

namespace {

struct CellData {
  double H = 0.0;
  double theta = 0.0;
  double t = 0.0;
  std::vector<double> est;
  std::vector<double> aux;
};

std::vector<CellData> split_cells(const McRaw& raw) {
  std::vector<CellData> cells;
  for (std::size_t i = 0; i < raw.estimate.size(); ++i) {
    if (cells.empty() || cells.back().H != raw.H[i] || cells.back().t != raw.t[i]) {
      CellData c;
      c.H = raw.H[i];
      c.theta = raw.theta[i];
      c.t = raw.t[i];
      cells.push_back(std::move(c));
    }
    cells.back().est.push_back(raw.estimate[i]);
    cells.back().aux.push_back(raw.aux[i]);
  }
  return cells;
}

CellStats cell_stats(const CellData& c, std::uint64_t seed) {
  CellStats s;
  s.H = c.H;
  s.theta = c.theta;
  s.t = c.t;
  s.reps = c.est.size();
  s.seed = seed;
  std::size_t n = c.est.size();
  std::vector<double> err(n), abse(n), sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    err[i] = c.est[i] - c.theta;
    abse[i] = std::abs(err[i]);
    sq[i] = err[i] * err[i];
  }
  s.bias = stats::mean(err);
  // the regressor has exact mean zero (martingale sum), so subtracting the
  // fitted multiple keeps the mean unbiased and strips the shared noise
  double slope = 0.0;
  if (n >= 3) {
    double ma = stats::mean(c.aux);
    double saa = 0.0, sae = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      saa += (c.aux[i] - ma) * (c.aux[i] - ma);
      sae += (c.aux[i] - ma) * (err[i] - s.bias);
    }
    if (saa > 0.0) slope = sae / saa;
  }
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = err[i] - slope * c.aux[i];
  s.bias_cv = stats::mean(resid);
  s.se = n >= 2 ? stats::std_error(resid) : 0.0;
  s.mse = stats::mean(sq);
  s.mse_se = n >= 2 ? stats::std_error(sq) : 0.0;
  s.median_abs = stats::median(abse);
  s.p90_abs = stats::quantile(abse, 0.9);
  return s;
}

struct SlopeFit {
  double slope = 0.0;
  double se = 0.0;
};

// OLS slope with its residual-based standard error
SlopeFit slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit out;
  auto f = stats::ols_line(x, y);
  out.slope = f.slope;
  if (x.size() > 2) {
    double mx = stats::mean(x);
    double sxx = 0.0, ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      double r = y[i] - f.intercept - f.slope * x[i];
      ssr += r * r;
    }
    out.se = std::sqrt(ssr / (static_cast<double>(x.size() - 2) * sxx));
  }
  return out;
}

// consecutive groups of cells sharing one hurst value
std::vector<std::pair<double, std::vector<const CellStats*>>> group_by_h(
    const std::vector<CellStats>& cells) {
  std::vector<std::pair<double, std::vector<const CellStats*>>> groups;
  for (const auto& c : cells) {
    if (groups.empty() || groups.back().first != c.H)
      groups.push_back({c.H, {}});
    groups.back().second.push_back(&c);
  }
  return groups;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

void khat_per_cell(const CellData& c, std::vector<double>& p_small, double& khat) {
  p_small.clear();
  khat = 0.0;
  double n = static_cast<double>(c.est.size());
  for (double eps : kEpsGrid) {
    std::size_t cnt = 0;
    for (double v : c.est)
      if (std::abs(v) <= eps) ++cnt;
    double p = static_cast<double>(cnt) / n;
    p_small.push_back(p);
    khat = std::max(khat, p / eps);
  }
}

void finish_bias_mse(McReport& rep) {
  auto groups = group_by_h(rep.cells);
  bool ok = true;
  std::vector<double> slopes, slope_ses;
  for (auto& [h, cells] : groups) {
    std::string tag = "_h" + fmt_g(h);
    std::vector<double> lx, lb, lm;
    bool logs_ok = true;
    for (const auto* c : cells) {
      lx.push_back(std::log(c->t));
      if (c->bias_cv == 0.0 || c->mse == 0.0) logs_ok = false;
      lb.push_back(std::log(std::abs(c->bias_cv) + 1e-300));
      lm.push_back(std::log(c->mse + 1e-300));
    }
    if (!logs_ok) {
      rep.warnings.push_back("zero bias or mse cell at H=" + fmt_g(h) +
                             ", slope fit skipped");
      continue;
    }
    if (cells.size() < 2) continue;
    auto bf = slope_fit(lx, lb);
    auto mf = slope_fit(lx, lm);
    const CellStats* last = cells.back();
    double bias_t = last->bias_cv * last->t;
    double mse_t = last->mse * last->t / std::abs(last->theta);
    rep.fits["bias_slope" + tag] = bf.slope;
    rep.fits["bias_slope_se" + tag] = bf.se;
    rep.fits["mse_slope" + tag] = mf.slope;
    rep.fits["bias_t" + tag] = bias_t;
    rep.fits["mse_t" + tag] = mse_t;
    slopes.push_back(bf.slope);
    slope_ses.push_back(bf.se);
    ok &= push_check(rep.checks, std::abs(bf.slope + 1.0) <= 0.2,
                     "bias decay slope H=" + fmt_g(h) + " (" + fmt_g(bf.slope) +
                         ", target -1 +- 0.2)");
    ok &= push_check(rep.checks, bias_t >= 1.0 && bias_t <= 4.0,
                     "bias times t at t=" + fmt_g(last->t) + " H=" + fmt_g(h) + " (" +
                         fmt_g(bias_t) + ", target 2 within factor 2)");
    ok &= push_check(rep.checks, mse_t >= 1.0 && mse_t <= 4.0,
                     "mse times t over |theta| H=" + fmt_g(h) + " (" + fmt_g(mse_t) +
                         ", target 2 within factor 2)");
  }
  for (std::size_t i = 0; i < slopes.size(); ++i)
    for (std::size_t j = i + 1; j < slopes.size(); ++j) {
      double gap = std::abs(slopes[i] - slopes[j]);
      double tol = std::max(0.25, 2.0 * (slope_ses[i] + slope_ses[j]));
      ok &= push_check(rep.checks, gap <= tol,
                       "bias slopes agree across hurst pair (gap " + fmt_g(gap) +
                           ", tol " + fmt_g(tol) + ")");
    }
  if (rep.asserted) rep.pass = ok;
}

void finish_decay(McReport& rep) {
  auto groups = group_by_h(rep.cells);
  bool ok = true;
  for (auto& [h, cells] : groups) {
    std::string tag = "_h" + fmt_g(h);
    std::vector<double> ts, meds, logm;
    for (const auto* c : cells) {
      ts.push_back(c->t);
      meds.push_back(c->median_abs);
      logm.push_back(std::log(c->median_abs + 1e-300));
    }
    ok &= push_check(rep.checks, strictly_decreasing(meds),
                     "median error decreasing H=" + fmt_g(h));
    if (cells.size() < 2) continue;
    double rate = -stats::ols_line(ts, logm).slope;
    rep.fits["decay_rate" + tag] = rate;
    double th = std::abs(cells.front()->theta);
    ok &= push_check(rep.checks, rate >= 0.5 * th && rate <= 1.5 * th,
                     "decay rate H=" + fmt_g(h) + " (" + fmt_g(rate) +
                         ", target theta +- 50%)");
  }
  if (rep.asserted) rep.pass = ok;
}

void finish_consistency(McReport& rep) {
  auto groups = group_by_h(rep.cells);
  bool ok = true;
  for (auto& [h, cells] : groups) {
    std::vector<double> lx, meds, logm;
    for (const auto* c : cells) {
      lx.push_back(std::log(c->t));
      meds.push_back(c->median_abs);
      logm.push_back(std::log(c->median_abs + 1e-300));
    }
    ok &= push_check(rep.checks, strictly_decreasing(meds),
                     "median error decreasing H=" + fmt_g(h));
    if (cells.size() >= 2)
      rep.fits["median_slope_h" + fmt_g(h)] = stats::ols_line(lx, logm).slope;
  }
  try {
    auto d = sde::drift_by_name(rep.drift);
    for (auto& [h, cells] : groups)
      if (h > 0.5 && (!d.gamma_known || d.gamma != 0.0))
        rep.warnings.push_back("drift " + rep.drift +
                               " is outside the strong small-value class for H=" +
                               fmt_g(h) + ", trend is empirical only");
  } catch (const std::invalid_argument&) {
  }
  if (rep.asserted) rep.pass = ok;
}

void finish_condition_c(McReport& rep, const std::vector<CellData>& data) {
  bool ok = true;
  std::vector<std::pair<double, std::vector<double>>> khats_by_h;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<double> p;
    double khat = 0.0;
    khat_per_cell(data[i], p, khat);
    rep.fits["khat_h" + fmt_g(data[i].H) + "_t" + fmt_g(data[i].t)] = khat;
    bool mono = true;
    for (std::size_t k = 1; k < p.size(); ++k) mono &= p[k] >= p[k - 1];
    ok &= push_check(rep.checks, mono,
                     "small-value mass monotone in eps H=" + fmt_g(data[i].H) +
                         " t=" + fmt_g(data[i].t));
    if (khats_by_h.empty() || khats_by_h.back().first != data[i].H)
      khats_by_h.push_back({data[i].H, {}});
    khats_by_h.back().second.push_back(khat);
  }
  for (auto& [h, ks] : khats_by_h) {
    double kmin = *std::min_element(ks.begin(), ks.end());
    double kmax = *std::max_element(ks.begin(), ks.end());
    bool stable = kmin > 0.0 && kmax <= 2.0 * kmin;
    ok &= push_check(rep.checks, stable,
                     "small-value constant stable across horizons H=" + fmt_g(h) +
                         " (range " + fmt_g(kmin) + ".." + fmt_g(kmax) + ")");
  }
  if (rep.asserted) rep.pass = ok;
}

}  // namespace

McReport report_from_raw(const McRaw& raw) {
  McReport rep;
  rep.experiment = raw.experiment;
  rep.drift = raw.drift;
  rep.seed = raw.seed;
  auto data = split_cells(raw);
  std::size_t min_reps = raw.estimate.size();
  for (const auto& c : data) {
    rep.cells.push_back(cell_stats(c, raw.seed));
    min_reps = std::min(min_reps, c.est.size());
  }
  rep.asserted = min_reps >= 30;
  if (!rep.asserted)
    rep.warnings.push_back("fewer than 30 replications per cell, "
                           "trend checks reported but not gated");
  if (raw.experiment == "bias_mse")
    finish_bias_mse(rep);
  else if (raw.experiment == "decay")
    finish_decay(rep);
  else if (raw.experiment == "consistency")
    finish_consistency(rep);
  else if (raw.experiment == "condition_c")
    finish_condition_c(rep, data);
  // density adds its checks in density_report_from_raw
  return rep;
}

// --- json and plot output ---

namespace {

ordered_json report_json_obj(const McReport& rep) {
  ordered_json j;
  j["experiment"] = rep.experiment;
  j["drift"] = rep.drift;
  j["seed"] = rep.seed;
  j["pass"] = rep.pass;
  j["asserted"] = rep.asserted;
  j["cells"] = ordered_json::array();
  for (const auto& c : rep.cells) {
    ordered_json jc;
    jc["experiment"] = rep.experiment;
    jc["H"] = c.H;
    jc["theta"] = c.theta;
    jc["t"] = c.t;
    jc["reps"] = c.reps;
    jc["seed"] = c.seed;
    jc["bias"] = c.bias;
    jc["bias_cv"] = c.bias_cv;
    jc["se"] = c.se;
    jc["mse"] = c.mse;
    jc["mse_se"] = c.mse_se;
    jc["median_abs"] = c.median_abs;
    jc["p90_abs"] = c.p90_abs;
    j["cells"].push_back(jc);
  }
  j["fits"] = ordered_json::object();
  for (const auto& [k, v] : rep.fits) j["fits"][k] = v;
  j["checks"] = rep.checks;
  j["warnings"] = rep.warnings;
  return j;
}

}  // namespace

std::string McReport::to_json() const { return report_json_obj(*this).dump(2) + "\n"; }

void write_report_json(const std::string& path, const McReport& rep) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << rep.to_json();
}

void write_plot_csv(const std::string& dir, const McReport& rep) {
  auto groups = group_by_h(rep.cells);
  for (auto& [h, cells] : groups) {
    std::string tag = "_h" + fmt_g(h);
    if (rep.experiment == "bias_mse") {
      io::Table bias, mse;
      bias.header = {"x", "y", "yerr"};
      mse.header = {"x", "y", "yerr"};
      for (const auto* c : cells) {
        bias.rows.push_back({c->t, std::abs(c->bias_cv), c->se});
        mse.rows.push_back({c->t, c->mse, c->mse_se});
      }
      io::write_csv(dir + "/plot_bias" + tag + ".csv", bias);
      io::write_csv(dir + "/plot_mse" + tag + ".csv", mse);
    } else if (rep.experiment == "decay" || rep.experiment == "consistency") {
      io::Table t;
      t.header = {"x", "y", "yerr"};
      for (const auto* c : cells)
        t.rows.push_back({c->t, c->median_abs, 1.2533 * c->se});
      io::write_csv(dir + "/plot_median" + tag + ".csv", t);
    } else if (rep.experiment == "condition_c") {
      io::Table t;
      t.header = {"x", "y", "yerr"};
      for (const auto* c : cells) {
        auto it = rep.fits.find("khat_h" + fmt_g(c->H) + "_t" + fmt_g(c->t));
        t.rows.push_back({c->t, it == rep.fits.end() ? 0.0 : it->second, 0.0});
      }
      io::write_csv(dir + "/plot_khat" + tag + ".csv", t);
    }
  }
}

void persist_run(const ExperimentConfig& cfg, const McRaw& raw, const McReport& rep) {
  if (cfg.out_dir.empty()) throw std::invalid_argument("no output directory configured");
  fs::create_directories(cfg.out_dir);
  persist_raw(cfg.out_dir + "/raw.csv", raw);
  write_report_json(cfg.out_dir + "/report.json", rep);
  write_plot_csv(cfg.out_dir, rep);
  std::ofstream out(cfg.out_dir + "/config.txt");
  if (!out) throw std::runtime_error("cannot open " + cfg.out_dir + "/config.txt");
  out << cfg.echo();
}

// --- experiments ---

McReport run_bias_mse(const ExperimentConfig& cfg, McRaw* raw_out) {
  cfg.validate();
  if (cfg.experiment != "bias_mse" && cfg.experiment != "decay")
    throw std::invalid_argument("config is not a bias_mse or decay experiment");
  std::vector<double> ts = cfg.horizons;
  std::sort(ts.begin(), ts.end());
  double npu = static_cast<double>(cfg.nodes_per_unit);
  std::size_t n = static_cast<std::size_t>(std::llround(ts.back() * npu));
  Grid grid(n, 1.0 / npu);
  std::vector<std::size_t> marks(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k)
    marks[k] = static_cast<std::size_t>(std::llround(ts[k] * npu));
  std::size_t nH = cfg.hursts.size(), nT = ts.size();
  McRaw raw;
  raw.experiment = cfg.experiment;
  raw.drift = "linear";
  raw.seed = cfg.seed;
  std::size_t rows = nH * nT * cfg.reps;
  raw.rep.assign(rows, 0);
  raw.H.assign(rows, 0.0);
  raw.theta.assign(rows, 0.0);
  raw.t.assign(rows, 0.0);
  raw.estimate.assign(rows, 0.0);
  raw.aux.assign(rows, 0.0);
  for (std::size_t hi = 0; hi < nH; ++hi) {
    double H = cfg.hursts[hi];
    parallel_reps(cfg.reps, cfg.threads, [&, hi, H](std::size_t rep) {
      CounterRng rng(cfg.seed, (static_cast<std::uint64_t>(hi) << 32) | rep);
      auto path = simulate_linear_whitened(H, grid, cfg.theta, rng);
      stats::Accumulator qz, qw, qq;
      std::size_t k = 0;
      for (std::size_t j = 0; j < n && k < nT; ++j) {
        qz.add(path.q[j] * path.dz[j]);
        qw.add(path.q[j] * path.dw[j]);
        qq.add(path.q[j] * path.q[j] * grid.dt);
        if (j + 1 == marks[k]) {
          double info = qq.value();
          if (!(info > 0.0)) throw std::runtime_error("degenerate information");
          std::size_t idx = (hi * nT + k) * cfg.reps + rep;
          raw.rep[idx] = rep;
          raw.H[idx] = H;
          raw.theta[idx] = cfg.theta;
          raw.t[idx] = ts[k];
          raw.estimate[idx] = qz.value() / info;
          raw.aux[idx] = qw.value();
          ++k;
        }
      }
    });
  }
  McReport rep = report_from_raw(raw);
  if (raw_out) *raw_out = std::move(raw);
  return rep;
}

McReport run_consistency(const ExperimentConfig& cfg, McRaw* raw_out) {
  cfg.validate();
  if (cfg.experiment != "consistency")
    throw std::invalid_argument("config is not a consistency experiment");
  auto drift = sde::drift_by_name(cfg.drift);
  std::vector<double> ts = cfg.horizons;
  std::sort(ts.begin(), ts.end());
  double npu = static_cast<double>(cfg.nodes_per_unit);
  std::size_t n = static_cast<std::size_t>(std::llround(ts.back() * npu));
  Grid grid(n, 1.0 / npu);
  std::vector<std::size_t> marks(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k)
    marks[k] = static_cast<std::size_t>(std::llround(ts[k] * npu));
  std::size_t nH = cfg.hursts.size(), nT = ts.size();
  McRaw raw;
  raw.experiment = cfg.experiment;
  raw.drift = drift.name;
  raw.seed = cfg.seed;
  std::size_t rows = nH * nT * cfg.reps;
  raw.rep.assign(rows, 0);
  raw.H.assign(rows, 0.0);
  raw.theta.assign(rows, 0.0);
  raw.t.assign(rows, 0.0);
  raw.estimate.assign(rows, 0.0);
  raw.aux.assign(rows, 0.0);
  for (std::size_t hi = 0; hi < nH; ++hi) {
    double H = cfg.hursts[hi];
    fbm::ExactSampler sampler(H, grid);
    parallel_reps(cfg.reps, cfg.threads, [&, hi, H](std::size_t rep) {
      CounterRng rng(cfg.seed, (static_cast<std::uint64_t>(hi) << 32) | rep);
      auto pp = simulate_pipeline(sampler, grid, cfg.theta, drift, rng);
      stats::Accumulator qz, qq;
      std::size_t k = 0;
      for (std::size_t j = 0; j < n && k < nT; ++j) {
        qz.add(pp.q[j] * (pp.z[j + 1] - pp.z[j]));
        qq.add(pp.q[j] * pp.q[j] * grid.dt);
        if (j + 1 == marks[k]) {
          double info = qq.value();
          if (!(info > 0.0)) throw std::runtime_error("degenerate information");
          std::size_t idx = (hi * nT + k) * cfg.reps + rep;
          raw.rep[idx] = rep;
          raw.H[idx] = H;
          raw.theta[idx] = cfg.theta;
          raw.t[idx] = ts[k];
          raw.estimate[idx] = qz.value() / info;
          ++k;
        }
      }
    });
  }
  McReport rep = report_from_raw(raw);
  if (raw_out) *raw_out = std::move(raw);
  return rep;
}

ConditionCReport condition_c_scan(const ExperimentConfig& cfg, McRaw* raw_out) {
  cfg.validate();
  if (cfg.experiment != "condition_c")
    throw std::invalid_argument("config is not a condition_c experiment");
  auto drift = sde::drift_by_name(cfg.drift);
  std::vector<double> ts = cfg.horizons;
  std::sort(ts.begin(), ts.end());
  double npu = static_cast<double>(cfg.nodes_per_unit);
  std::size_t n = static_cast<std::size_t>(std::llround(ts.back() * npu));
  Grid grid(n, 1.0 / npu);
  std::vector<std::size_t> marks(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k)
    marks[k] = static_cast<std::size_t>(std::llround(ts[k] * npu));
  std::string cache = cfg.plan_cache.empty() ? fracops::default_plan_cache_dir()
                                             : cfg.plan_cache;
  std::size_t nH = cfg.hursts.size(), nT = ts.size();
  McRaw raw;
  raw.experiment = cfg.experiment;
  raw.drift = drift.name;
  raw.seed = cfg.seed;
  std::size_t rows = nH * nT * cfg.reps;
  raw.rep.assign(rows, 0);
  raw.H.assign(rows, 0.0);
  raw.theta.assign(rows, 0.0);
  raw.t.assign(rows, 0.0);
  raw.estimate.assign(rows, 0.0);
  raw.aux.assign(rows, 0.0);
  for (std::size_t hi = 0; hi < nH; ++hi) {
    double H = cfg.hursts[hi];
    std::unique_ptr<fracops::QPlan> plan;
    if (H != 0.5) plan = fracops::QPlan::load_or_build(H, grid, cache);
    fbm::ExactSampler sampler(H, grid);
    parallel_reps(cfg.reps, cfg.threads, [&, hi, H](std::size_t rep) {
      CounterRng rng(cfg.seed, (static_cast<std::uint64_t>(hi) << 32) | rep);
      fbm::Path path = sampler.sample(rng);
      std::vector<double> gv(path.values.size());
      for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = drift.b(path.values[i]);
      for (std::size_t k = 0; k < nT; ++k) {
        std::size_t m = marks[k];
        double qv;
        if (H == 0.5) {
          qv = gv[m];
        } else {
          const auto& row = plan->row(m);
          stats::Accumulator acc;
          for (std::size_t j = 0; j < row.size(); ++j) acc.add(row[j] * gv[j]);
          qv = acc.value();
        }
        std::size_t idx = (hi * nT + k) * cfg.reps + rep;
        raw.rep[idx] = rep;
        raw.H[idx] = H;
        raw.theta[idx] = 0.0;
        raw.t[idx] = ts[k];
        raw.estimate[idx] = qv / std::sqrt(ts[k]);
      }
    });
  }
  ConditionCReport out = condition_report_from_raw(raw);
  if (raw_out) *raw_out = std::move(raw);
  return out;
}

ConditionCReport condition_report_from_raw(const McRaw& raw) {
  ConditionCReport out;
  out.base = report_from_raw(raw);
  out.eps_grid = kEpsGrid;
  auto data = split_cells(raw);
  for (const auto& c : data) {
    std::vector<double> p;
    double khat = 0.0;
    khat_per_cell(c, p, khat);
    out.p_small.push_back(std::move(p));
  }
  return out;
}

// --- density study ---

namespace {

struct DensityNodes {
  std::vector<double> s;        // mu nodes scaled to [0, t]
  std::vector<double> w;        // quadrature weights
  Eigen::MatrixXd R;            // covariance at the nodes
  Eigen::MatrixXd L;            // cholesky factor
  double c0 = 0.0;              // kappa t^{-H}
};

DensityNodes density_nodes(double H, double t, std::size_t m) {
  auto rule = special::gauss_jacobi01(m, 0.5 - H, -0.5 - H);
  DensityNodes out;
  out.s.resize(m);
  out.w = rule.weights;
  for (std::size_t i = 0; i < m; ++i) out.s[i] = t * rule.nodes[i];
  Eigen::Index em = static_cast<Eigen::Index>(m);
  out.R.resize(em, em);
  for (Eigen::Index i = 0; i < em; ++i)
    for (Eigen::Index j = 0; j < em; ++j)
      out.R(i, j) = fbm::covariance(H, out.s[static_cast<std::size_t>(i)],
                                    out.s[static_cast<std::size_t>(j)]);
  Eigen::LLT<Eigen::MatrixXd> llt(out.R);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("node covariance not positive definite");
  out.L = llt.matrixL();
  out.c0 = special::hurst_constants(H).kappa * std::pow(t, -H);
  return out;
}

// F = c0 sum_i w_i b(X_i) and the integration by parts weight
// G = -LF/|DF|^2 - 2 <DF x DF; D^2F>/|DF|^4 with the inner product collapsed
// through the covariance
void density_rep_values(const DensityNodes& nd, const sde::DriftModel& drift,
                        const std::vector<double>& x, double H, double& F, double& G) {
  std::size_t m = nd.s.size();
  double c0 = nd.c0;
  std::vector<double> dphi(m);
  double f = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    f += c0 * nd.w[i] * drift.b(x[i]);
    dphi[i] = c0 * nd.w[i] * drift.db(x[i]);
  }
  F = f;
  std::vector<double> rd(m, 0.0);  // (R dphi)_k
  for (std::size_t k = 0; k < m; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      acc += dphi[i] * nd.R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    rd[k] = acc;
  }
  double ndf2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) ndf2 += dphi[i] * rd[i];
  if (!(ndf2 > 0.0)) throw std::runtime_error("malliavin norm degenerate");
  double inner = 0.0, minus_lf = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double curv = c0 * nd.w[k] * drift.d2b(x[k]);
    inner += curv * rd[k] * rd[k];
    minus_lf += dphi[k] * x[k] - curv * std::pow(nd.s[k], 2.0 * H);
  }
  G = minus_lf / ndf2 - 2.0 * inner / (ndf2 * ndf2);
}

// direct tanh-sinh evaluation of int_0^{min(a,b)} K(a,r) K(b,r) dr against the
// covariance-collapsed inner product, one simulated node vector
double density_quad_check(const McRaw& raw) {
  double H = raw.H.front();
  double t = raw.t.front();
  std::size_t m = 32;  // the factorization is certified at this size
  auto drift = sde::drift_by_name(raw.drift);
  auto nd = density_nodes(H, t, m);
  CounterRng rng(raw.seed, 0);
  auto z = rng.gauss_vector(m, 0);
  Eigen::Map<Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(m));
  Eigen::VectorXd xv = nd.L * zv;
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = xv(static_cast<Eigen::Index>(i));
  double c0 = nd.c0;
  std::vector<double> dphi(m);
  for (std::size_t i = 0; i < m; ++i) dphi[i] = c0 * nd.w[i] * drift.db(x[i]);
  // hand-rolled kernel so the diagonal difference t - s comes in exactly
  auto kc = special::hurst_constants(H);
  double front = kc.eta / (kc.d * std::tgamma(H + 0.5));
  special::BetaTail psi(-2.0 * H, H - 0.5);
  auto kernel = [&](double tt, double r, double diff) {
    return front * (std::pow(r, 0.5 - H) * std::pow(tt, H - 0.5) *
                        std::pow(diff, H - 0.5) +
                    (0.5 - H) * std::pow(r, H - 0.5) * psi(r / tt));
  };
  Eigen::MatrixXd itilde(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i; k < m; ++k) {
      double a = nd.s[i], b = nd.s[k];  // a <= b, nodes ascending
      double val = a * special::integrate01(
                           [&](double xx, double omx) {
                             double r = a * xx;
                             double ka = kernel(a, r, a * omx);
                             double kb = i == k ? ka : kernel(b, r, b - a * xx);
                             return ka * kb;
                           },
                           1e-12, 13);
      itilde(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = val;
      itilde(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = val;
    }
  double inner_fact = 0.0, inner_quad = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double acc_r = 0.0, acc_i = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc_r += dphi[i] * nd.R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      acc_i += dphi[i] * itilde(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(k));
    }
    double curv = c0 * nd.w[k] * drift.d2b(x[k]);
    inner_fact += curv * acc_r * acc_r;
    inner_quad += curv * acc_i * acc_i;
  }
  double scale = std::max(std::abs(inner_fact), 1e-300);
  return std::abs(inner_quad - inner_fact) / scale;
}

DensityCurve build_density_curve(const CellData& cell) {
  DensityCurve cv;
  cv.t = cell.t;
  std::size_t n = cell.est.size();
  std::vector<std::pair<double, double>> fg(n);
  for (std::size_t i = 0; i < n; ++i) fg[i] = {cell.est[i], cell.aux[i]};
  std::sort(fg.begin(), fg.end());
  std::vector<double> fs(n);
  for (std::size_t i = 0; i < n; ++i) fs[i] = fg[i].first;
  // suffix sums of the weights and their squares: f(x) averages G over F > x
  std::vector<double> sg(n + 1, 0.0), sg2(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    sg[i] = sg[i + 1] + fg[i].second;
    sg2[i] = sg2[i + 1] + fg[i].second * fg[i].second;
  }
  double nn = static_cast<double>(n);
  double sd = sample_sd(fs);
  double xmin = fs.front() - 0.5 * sd;
  double xmax = fs.back() + 0.5 * sd;
  {
    std::vector<double> contrib(n);
    for (std::size_t i = 0; i < n; ++i) {
      double fcl = std::min(std::max(fg[i].first, xmin), xmax);
      contrib[i] = fg[i].second * (fcl - xmin);
    }
    cv.integral = stats::mean(contrib);
    cv.integral_se = n >= 2 ? stats::std_error(contrib) : 0.0;
  }
  cv.bandwidth = 1.06 * sd * std::pow(nn, -0.2);
  double lo = stats::quantile(fs, 0.1), hi = stats::quantile(fs, 0.9);
  std::size_t pts = 21;
  auto suffix_at = [&](double x) {
    return static_cast<std::size_t>(std::upper_bound(fs.begin(), fs.end(), x) -
                                    fs.begin());
  };
  for (std::size_t k = 0; k < pts; ++k) {
    double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(pts - 1);
    std::size_t idx = suffix_at(x);
    double fhat = sg[idx] / nn;
    double var = std::max(sg2[idx] / nn - fhat * fhat, 0.0);
    cv.x.push_back(x);
    cv.f.push_back(fhat);
    cv.se.push_back(std::sqrt(var / nn));
    double h = cv.bandwidth;
    double p_hi = static_cast<double>(suffix_at(x + h)) / nn;
    double p_lo = static_cast<double>(suffix_at(x - h)) / nn;
    double p = std::min(std::max(p_hi - p_lo, 0.0), 1.0);
    cv.f_ecdf.push_back((p_hi - p_lo) / (2.0 * h));
    cv.se_ecdf.push_back(std::sqrt(std::max(p * (1.0 - p), 0.0) / nn) / (2.0 * h));
  }
  // curvature allowance |f''| h^2/6 for the finite-difference comparison
  for (std::size_t k = 0; k < pts; ++k) {
    std::size_t kk = std::min(std::max<std::size_t>(k, 1), pts - 2);
    double dx = cv.x[1] - cv.x[0];
    double fpp = (cv.f[kk - 1] - 2.0 * cv.f[kk] + cv.f[kk + 1]) / (dx * dx);
    cv.tol.push_back(3.0 * (cv.se[k] + cv.se_ecdf[k]) +
                     std::abs(fpp) * cv.bandwidth * cv.bandwidth / 6.0);
  }
  cv.sup_f = *std::max_element(cv.f.begin(), cv.f.end());
  return cv;
}

}  // namespace

DensityReport density_report_from_raw(const McRaw& raw) {
  DensityReport out;
  out.base = report_from_raw(raw);
  auto data = split_cells(raw);
  auto drift = sde::drift_by_name(raw.drift);
  bool ok = true;
  std::vector<double> env_consts;
  for (const auto& cell : data) {
    DensityCurve cv = build_density_curve(cell);
    std::string tag = " t=" + fmt_g(cv.t);
    ok &= push_check(out.base.checks,
                     std::abs(cv.integral - 1.0) <= 3.0 * cv.integral_se,
                     "density mass" + tag + " (" + fmt_g(cv.integral) + " +- " +
                         fmt_g(cv.integral_se) + ", target 1)");
    bool point_ok = true, nonneg = true;
    for (std::size_t k = 0; k < cv.x.size(); ++k) {
      point_ok &= std::abs(cv.f[k] - cv.f_ecdf[k]) <= cv.tol[k];
      nonneg &= cv.f[k] >= -3.0 * cv.se[k];
    }
    ok &= push_check(out.base.checks, point_ok,
                     "density matches cdf derivative" + tag);
    ok &= push_check(out.base.checks, nonneg, "density nonnegative" + tag);
    out.base.fits["sup_f_t" + fmt_g(cv.t)] = cv.sup_f;
    if (drift.slope_lower > 0.0) {
      double H = cell.H;
      double beta = 1.0 - drift.gamma;
      double env = (1.0 + std::pow(cv.t, H * (1.0 - beta))) /
                   (drift.slope_lower * drift.slope_lower);
      double c_hat = cv.sup_f / env;
      out.base.fits["sup_env_c_t" + fmt_g(cv.t)] = c_hat;
      env_consts.push_back(c_hat);
    }
    out.curves.push_back(std::move(cv));
  }
  if (env_consts.size() >= 2) {
    double cmin = *std::min_element(env_consts.begin(), env_consts.end());
    double cmax = *std::max_element(env_consts.begin(), env_consts.end());
    if (!(cmin > 0.0) || cmax > 3.0 * cmin)
      out.base.warnings.push_back("sup-density envelope constant drifts across "
                                  "horizons (range " + fmt_g(cmin) + ".." +
                                  fmt_g(cmax) + ")");
  }
  out.quad_vs_fact_rel = density_quad_check(raw);
  out.base.fits["quad_vs_fact_rel"] = out.quad_vs_fact_rel;
  ok &= push_check(out.base.checks, out.quad_vs_fact_rel <= 1e-8,
                   "factorized inner product agrees with the direct integrals (" +
                       fmt_g(out.quad_vs_fact_rel) + ", target 1e-8)");
  if (out.base.asserted) out.base.pass = ok;
  return out;
}

DensityReport malliavin_density(const ExperimentConfig& cfg, McRaw* raw_out) {
  cfg.validate();
  if (cfg.experiment != "density")
    throw std::invalid_argument("config is not a density experiment");
  auto drift = sde::drift_by_name(cfg.drift);
  if (!(drift.slope_lower > 0.0))
    throw std::invalid_argument("density study needs a drift with slope bounded below");
  double H = cfg.hursts[0];
  std::vector<double> ts = cfg.horizons;
  std::sort(ts.begin(), ts.end());
  std::size_t nT = ts.size(), m = cfg.mu_nodes;
  McRaw raw;
  raw.experiment = cfg.experiment;
  raw.drift = drift.name;
  raw.seed = cfg.seed;
  std::size_t rows = nT * cfg.reps;
  raw.rep.assign(rows, 0);
  raw.H.assign(rows, 0.0);
  raw.theta.assign(rows, 0.0);
  raw.t.assign(rows, 0.0);
  raw.estimate.assign(rows, 0.0);
  raw.aux.assign(rows, 0.0);
  for (std::size_t k = 0; k < nT; ++k) {
    auto nd = density_nodes(H, ts[k], m);
    parallel_reps(cfg.reps, cfg.threads, [&, k](std::size_t rep) {
      CounterRng rng(cfg.seed, (static_cast<std::uint64_t>(k) << 32) | rep);
      auto z = rng.gauss_vector(m, 0);
      Eigen::Map<Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(m));
      Eigen::VectorXd xv = nd.L * zv;
      std::vector<double> x(m);
      for (std::size_t i = 0; i < m; ++i) x[i] = xv(static_cast<Eigen::Index>(i));
      double F = 0.0, G = 0.0;
      density_rep_values(nd, drift, x, H, F, G);
      std::size_t idx = k * cfg.reps + rep;
      raw.rep[idx] = rep;
      raw.H[idx] = H;
      raw.theta[idx] = 0.0;
      raw.t[idx] = ts[k];
      raw.estimate[idx] = F;
      raw.aux[idx] = G;
    });
  }
  DensityReport out = density_report_from_raw(raw);
  if (raw_out) *raw_out = std::move(raw);
  return out;
}

std::string density_report_json(const DensityReport& rep) {
  ordered_json j = report_json_obj(rep.base);
  j["quad_vs_fact_rel"] = rep.quad_vs_fact_rel;
  j["curves"] = ordered_json::array();
  for (const auto& cv : rep.curves) {
    ordered_json jc;
    jc["t"] = cv.t;
    jc["bandwidth"] = cv.bandwidth;
    jc["integral"] = cv.integral;
    jc["integral_se"] = cv.integral_se;
    jc["sup_f"] = cv.sup_f;
    jc["x"] = cv.x;
    jc["f"] = cv.f;
    jc["se"] = cv.se;
    jc["f_ecdf"] = cv.f_ecdf;
    jc["se_ecdf"] = cv.se_ecdf;
    jc["tol"] = cv.tol;
    j["curves"].push_back(jc);
  }
  return j.dump(2) + "\n";
}

}  // namespace fracmle::mc
