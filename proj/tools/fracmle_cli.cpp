#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracmle/acceptance.hpp"
#include "fracmle/csv.hpp"
#include "fracmle/discrete.hpp"
#include "fracmle/estimators.hpp"
#include "fracmle/fbm.hpp"
#include "fracmle/grid.hpp"
#include "fracmle/mc.hpp"
#include "fracmle/rng.hpp"
#include "fracmle/sde.hpp"

namespace fs = std::filesystem;
using namespace fracmle;

namespace {

struct SimulateArgs {
  double hurst = 0.5;
  double theta = 0.0;
  std::string drift = "linear";
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  double horizon = 10.0;
  std::size_t nodes_per_unit = 64;
  std::string out;
};

struct EstimateArgs {
  std::string input;
  double hurst = 0.5;
  std::string drift = "linear";
  std::string method = "z";
  std::string plan_cache;
};

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::string plan_cache;
  std::string drift;
  std::vector<double> hursts;
  double theta = 0.0;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::size_t threads = 0;
  bool has_theta = false;
  bool quick = false;
};

struct VerifyArgs {
  bool quick = false;
  std::string plan_cache;
};

int run_simulate(const SimulateArgs& a) {
  double cells = a.horizon * static_cast<double>(a.nodes_per_unit);
  if (std::abs(cells - std::round(cells)) > 1e-9)
    throw std::invalid_argument("horizon not commensurate with the grid");
  std::size_t n = static_cast<std::size_t>(std::llround(cells));
  Grid g(n, 1.0 / static_cast<double>(a.nodes_per_unit));
  auto drift = sde::drift_by_name(a.drift);
  std::size_t reps = a.out.empty() ? 1 : a.reps;
  if (!a.out.empty()) fs::create_directories(a.out);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    CounterRng rng(a.seed, rep);
    fbm::Path p = fbm::sample_exact(a.hurst, g, rng);
    fbm::Path out = p;
    if (a.theta != 0.0) {
      out.values = drift.is_linear ? sde::linear_exact(a.theta, p)
                                   : sde::euler(drift, a.theta, p);
      out.driver.clear();
    }
    if (a.out.empty()) {
      io::Table t;
      t.header = {"t", "x"};
      for (std::size_t i = 0; i <= n; ++i)
        t.rows.push_back({g.node(i), out.values[i]});
      std::ostringstream os;
      os.precision(17);
      for (std::size_t c = 0; c < t.header.size(); ++c)
        os << (c ? "," : "") << t.header[c];
      os << "\n";
      for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << "\n";
      }
      std::cout << os.str();
    } else {
      char name[32];
      std::snprintf(name, sizeof name, "path_%04zu.csv", rep);
      fbm::write_path_csv(a.out + "/" + name, out);
    }
  }
  return 0;
}

int run_estimate(const EstimateArgs& a) {
  fbm::Path p = fbm::read_path_csv(a.input, a.hurst);
  const Grid& g = p.grid;
  auto drift = sde::drift_by_name(a.drift);
  std::vector<double> gv(p.values.size());
  for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = drift.b(p.values[i]);
  double H = a.hurst;
  est::MleResult res;
  if (a.method == "z" || a.method == "w") {
    auto q = est::compute_q_fast(H, g, gv);
    auto kb = est::kb_objects(H, g, p.values);
    auto z = est::z_from_kb(H, g, kb.z);
    auto dz = increments(z);
    if (a.method == "z") {
      res = est::mle_z_form(est::left_cells(q), dz, g.dt);
    } else {
      // reference-tilt form on the negated innovations, same value as z
      for (double& d : dz) d = -d;
      res = est::mle_w_form(est::left_cells(q), dz, g.dt);
    }
  } else if (a.method == "kb") {
    auto kb = est::kb_objects(H, g, p.values);
    res = est::mle_kb(kb, g);
  } else if (a.method == "bar" || a.method == "check") {
    double npu = 1.0 / g.dt;
    if (std::abs(npu - std::round(npu)) > 1e-6)
      throw std::invalid_argument("integer-time methods need a unit-commensurate grid");
    std::size_t stride = static_cast<std::size_t>(std::llround(npu));
    std::size_t nmax = g.n / stride;
    if (nmax < 2) throw std::invalid_argument("record shorter than two unit steps");
    if (a.method == "bar") {
      auto q = est::compute_q_fast(H, g, gv);
      auto kb = est::kb_objects(H, g, p.values);
      auto z = est::z_from_kb(H, g, kb.z);
      std::vector<double> q_int(nmax + 1), z_int(nmax + 1);
      for (std::size_t j = 0; j <= nmax; ++j) {
        q_int[j] = q[j * stride];
        z_int[j] = z[j * stride];
      }
      res = disc::theta_bar(q_int, z_int);
    } else {
      disc::DiscreteRecord rec;
      for (std::size_t j = 0; j <= nmax; ++j) rec.x.push_back(p.values[j * stride]);
      res = disc::theta_check(H, rec, drift);
    }
  } else {
    throw std::invalid_argument("unknown method " + a.method);
  }
  nlohmann::ordered_json j;
  j["method"] = a.method;
  j["hurst"] = a.hurst;
  j["drift"] = drift.name;
  j["theta"] = res.theta;
  j["numerator"] = res.numerator;
  j["information"] = res.information;
  j["n"] = g.n;
  j["dt"] = g.dt;
  j["horizon"] = g.horizon();
  std::cout << j.dump(2) << "\n";
  return 0;
}

void persist_density(const mc::ExperimentConfig& cfg, const mc::McRaw& raw,
                     const mc::DensityReport& rep) {
  fs::create_directories(cfg.out_dir);
  mc::persist_raw(cfg.out_dir + "/raw.csv", raw);
  std::ofstream out(cfg.out_dir + "/report.json");
  if (!out) throw std::runtime_error("cannot open " + cfg.out_dir + "/report.json");
  out << mc::density_report_json(rep);
  for (const auto& cv : rep.curves) {
    std::ostringstream tag;
    tag << cv.t;
    io::Table est, ecdf;
    est.header = {"x", "y", "yerr"};
    ecdf.header = {"x", "y", "yerr"};
    for (std::size_t k = 0; k < cv.x.size(); ++k) {
      est.rows.push_back({cv.x[k], cv.f[k], cv.se[k]});
      ecdf.rows.push_back({cv.x[k], cv.f_ecdf[k], cv.se_ecdf[k]});
    }
    io::write_csv(cfg.out_dir + "/plot_density_t" + tag.str() + ".csv", est);
    io::write_csv(cfg.out_dir + "/plot_density_ecdf_t" + tag.str() + ".csv", ecdf);
  }
  std::ofstream cfgout(cfg.out_dir + "/config.txt");
  cfgout << cfg.echo();
}

int run_experiment(const ExperimentArgs& a) {
  mc::ExperimentConfig cfg = mc::ExperimentConfig::from_file(a.config);
  if (!a.drift.empty()) cfg.drift = a.drift;
  if (!a.hursts.empty()) cfg.hursts = a.hursts;
  if (a.has_theta) cfg.theta = a.theta;
  if (a.seed != 0) cfg.seed = a.seed;
  if (a.reps != 0) cfg.reps = a.reps;
  if (a.threads != 0) cfg.threads = a.threads;
  if (!a.out.empty()) cfg.out_dir = a.out;
  if (!a.plan_cache.empty()) cfg.plan_cache = a.plan_cache;
  if (a.quick) cfg.quick = true;
  if (cfg.quick) cfg.reps = std::min<std::size_t>(cfg.reps, 50);
  cfg.validate();
  mc::McRaw raw;
  if (cfg.experiment == "bias_mse" || cfg.experiment == "decay") {
    auto rep = mc::run_bias_mse(cfg, &raw);
    if (!cfg.out_dir.empty()) mc::persist_run(cfg, raw, rep);
    std::cout << rep.to_json();
  } else if (cfg.experiment == "consistency") {
    auto rep = mc::run_consistency(cfg, &raw);
    if (!cfg.out_dir.empty()) mc::persist_run(cfg, raw, rep);
    std::cout << rep.to_json();
  } else if (cfg.experiment == "condition_c") {
    auto rep = mc::condition_c_scan(cfg, &raw);
    if (!cfg.out_dir.empty()) mc::persist_run(cfg, raw, rep.base);
    std::cout << rep.base.to_json();
  } else if (cfg.experiment == "density") {
    auto rep = mc::malliavin_density(cfg, &raw);
    if (!cfg.out_dir.empty()) persist_density(cfg, raw, rep);
    std::cout << mc::density_report_json(rep);
  } else {
    throw std::invalid_argument("unknown experiment " + cfg.experiment);
  }
  return 0;
}

int run_verify(const VerifyArgs& a) {
  auto results = accept::run_acceptance(a.quick, a.plan_cache);
  std::cout << accept::format_results(results);
  bool ok = accept::all_passed(results);
  std::cout << (ok ? "all invoked criteria passed\n" : "FAILURES above\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drift estimation for fractional-noise diffusions"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "emit sample paths as CSV");
  c_sim->add_option("--hurst", sim.hurst, "hurst index in (0,1)")->required();
  c_sim->add_option("--theta", sim.theta, "drift parameter, 0 for pure noise");
  c_sim->add_option("--drift", sim.drift, "drift preset name");
  c_sim->add_option("--seed", sim.seed, "rng seed");
  c_sim->add_option("--reps", sim.reps, "number of paths (with --out)");
  c_sim->add_option("--horizon", sim.horizon, "time horizon");
  c_sim->add_option("--nodes-per-unit", sim.nodes_per_unit, "grid nodes per unit time");
  c_sim->add_option("--out", sim.out, "output directory, stdout if omitted");

  EstimateArgs estp;
  auto* c_est = app.add_subcommand("estimate", "estimate theta from one path CSV");
  c_est->add_option("--input", estp.input, "path CSV (t,x columns)")->required();
  c_est->add_option("--hurst", estp.hurst, "hurst index in (0,1)")->required();
  c_est->add_option("--drift", estp.drift, "drift preset name");
  c_est->add_option("--method", estp.method, "w|z|kb|bar|check");
  c_est->add_option("--plan-cache", estp.plan_cache, "quadrature plan cache dir");

  ExperimentArgs exp;
  auto* c_exp = app.add_subcommand("experiment", "run an experiment from a config file");
  c_exp->add_option("--config", exp.config, "experiment config file")->required();
  c_exp->add_option("--out", exp.out, "output directory override");
  c_exp->add_option("--plan-cache", exp.plan_cache, "quadrature plan cache dir");
  c_exp->add_option("--drift", exp.drift, "drift preset override");
  c_exp->add_option("--hurst", exp.hursts, "hurst value override, repeatable");
  auto* theta_opt = c_exp->add_option("--theta", exp.theta, "theta override");
  c_exp->add_option("--seed", exp.seed, "seed override (nonzero)");
  c_exp->add_option("--reps", exp.reps, "replication override (nonzero)");
  c_exp->add_option("--threads", exp.threads, "worker threads (0 = hardware)");
  c_exp->add_flag("--quick", exp.quick, "cap replications for a fast pass");

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "run the acceptance battery");
  c_ver->add_flag("--quick", ver.quick, "algebraic subset, under a minute");
  c_ver->add_option("--plan-cache", ver.plan_cache, "quadrature plan cache dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  exp.has_theta = theta_opt->count() > 0;

  try {
    if (app.got_subcommand(c_sim)) return run_simulate(sim);
    if (app.got_subcommand(c_est)) return run_estimate(estp);
    if (app.got_subcommand(c_exp)) return run_experiment(exp);
    if (app.got_subcommand(c_ver)) return run_verify(ver);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
