#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fracmle/drift.hpp"
#include "fracmle/fbm.hpp"
#include "fracmle/grid.hpp"

namespace fracmle::mc {

// Line-oriented key value configuration. One `key value` pair per line, `#`
// starts a comment, `include path` splices another file relative to the
// current one. Later assignments win.
struct ExperimentConfig {
  std::string experiment = "bias_mse";
  std::string drift = "linear";
  std::vector<double> hursts{0.3};
  double theta = -1.0;
  std::vector<double> horizons{100.0};
  std::size_t nodes_per_unit = 64;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::size_t mu_nodes = 32;  // quadrature size for the density study
  std::size_t threads = 0;    // 0 picks hardware concurrency
  std::string out_dir;
  std::string plan_cache;
  bool quick = false;

  static ExperimentConfig from_file(const std::string& path);
  void apply_line(const std::string& line, const std::string& base_dir, int depth);
  void validate() const;
  std::string echo() const;  // config back in its own file format
};

struct CellStats {
  double H = 0.0;
  double theta = 0.0;
  double t = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double bias = 0.0;     // plain mean error
  double bias_cv = 0.0;  // mean error after the martingale control variate
  double se = 0.0;       // standard error of bias_cv
  double mse = 0.0;
  double mse_se = 0.0;
  double median_abs = 0.0;
  double p90_abs = 0.0;
};

struct McReport {
  std::string experiment;
  std::string drift;
  std::uint64_t seed = 0;
  std::vector<CellStats> cells;
  std::map<std::string, double> fits;  // named fitted slopes and constants
  std::vector<std::string> checks;     // "ok: ..." / "FAIL: ..." lines
  std::vector<std::string> warnings;
  bool pass = true;
  bool asserted = true;  // false when reps are too few to gate on trends

  std::string to_json() const;
};

// one row per replication and horizon; aux carries the per-rep control
// variate (or the density weight) so reports rebuild exactly from disk
struct McRaw {
  std::string experiment;
  std::string drift;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> rep;
  std::vector<double> H, theta, t, estimate, aux;
};

void persist_raw(const std::string& path, const McRaw& raw);
McRaw load_raw(const std::string& path);

// pure aggregation: report(load(persist(raw))) is byte identical to report(raw)
McReport report_from_raw(const McRaw& raw);

void write_report_json(const std::string& path, const McReport& rep);
// one x,y,yerr file per (experiment, hurst) figure under dir
void write_plot_csv(const std::string& dir, const McReport& rep);
// raw + report + plot data + config echo under cfg.out_dir
void persist_run(const ExperimentConfig& cfg, const McRaw& raw, const McReport& rep);

// negative theta: bias and mse decay like 1/t with universal constants;
// positive theta (experiment "decay"): error falls exponentially at rate theta
McReport run_bias_mse(const ExperimentConfig& cfg, McRaw* raw_out = nullptr);

// nonlinear drifts through the full observation pipeline: median error
// decreasing in the horizon
McReport run_consistency(const ExperimentConfig& cfg, McRaw* raw_out = nullptr);

// small-value concentration of Q_t/sqrt(t) under the driftless law:
// empirical P[|Q_t|/sqrt(t) <= eps] and the smallest K with P <= K eps
struct ConditionCReport {
  McReport base;
  std::vector<double> eps_grid;
  // p_small[cell index][eps index], cells in report order
  std::vector<std::vector<double>> p_small;
};

ConditionCReport condition_c_scan(const ExperimentConfig& cfg, McRaw* raw_out = nullptr);
ConditionCReport condition_report_from_raw(const McRaw& raw);

// density of Q_t/sqrt(t) under the driftless law by integration by parts;
// H < 1/2 only
struct DensityCurve {
  double t = 0.0;
  std::vector<double> x;       // central grid
  std::vector<double> f;       // weighted tail average estimate
  std::vector<double> se;
  std::vector<double> f_ecdf;  // central difference of the empirical cdf
  std::vector<double> se_ecdf;
  std::vector<double> tol;     // 3 (se + se_ecdf) + curvature allowance
  double bandwidth = 0.0;
  double integral = 0.0;       // mass over the wide grid
  double integral_se = 0.0;
  double sup_f = 0.0;
};

struct DensityReport {
  McReport base;
  std::vector<DensityCurve> curves;
  double quad_vs_fact_rel = 0.0;  // factorized vs direct inner product, one path
};

DensityReport malliavin_density(const ExperimentConfig& cfg, McRaw* raw_out = nullptr);
DensityReport density_report_from_raw(const McRaw& raw);
std::string density_report_json(const DensityReport& rep);

// --- shared simulation helpers (also used by the verifier) ---

struct WhitenedLinearPath {
  std::vector<double> q;   // Q at nodes, q[0] = 0
  std::vector<double> dz;  // whitened observation increments
  std::vector<double> dw;  // underlying brownian increments
};

// linear drift simulated directly in whitened coordinates, O(n) per path:
// dz_i = dw_i + theta q_i dt with q_i the left node value
WhitenedLinearPath simulate_linear_whitened(double H, const Grid& g, double theta,
                                            const CounterRng& rng);

struct PipelinePath {
  std::vector<double> x;  // state at nodes
  std::vector<double> q;  // Q at nodes, convolution route
  std::vector<double> z;  // whitened observation, two-stage transform
};

// exact-law noise, euler state, then the estimation-side transforms
PipelinePath simulate_pipeline(const fbm::ExactSampler& sampler, const Grid& g,
                               double theta, const sde::DriftModel& drift,
                               const CounterRng& rng);

// run f(rep) for rep in [0, reps); f must only touch state owned by its index
void parallel_reps(std::size_t reps, std::size_t threads,
                   const std::function<void(std::size_t)>& f);

}  // namespace fracmle::mc
