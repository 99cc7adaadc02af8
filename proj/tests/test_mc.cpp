#include <doctest.h>

#include <cmath>
#include <fstream>
#include <filesystem>

#include "fracmle/mc.hpp"
#include "fracmle/rng.hpp"

using namespace fracmle;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const std::string& name, const std::string& body) {
  auto p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

}  // namespace

TEST_CASE("config parses keys comments and lists") {
  auto p = write_file("fracmle_cfg_basic.txt",
                      "# comment line\n"
                      "experiment bias_mse\n"
                      "drift linear\n"
                      "hurst 0.25,0.5,0.75\n"
                      "theta -1\n"
                      "horizon 25,50\n"
                      "nodes_per_unit 32\n"
                      "reps 40\n"
                      "seed 9\n"
                      "threads 2\n");
  auto cfg = mc::ExperimentConfig::from_file(p.string());
  CHECK(cfg.experiment == "bias_mse");
  REQUIRE(cfg.hursts.size() == 3);
  CHECK(cfg.hursts[1] == 0.5);
  REQUIRE(cfg.horizons.size() == 2);
  CHECK(cfg.horizons[1] == 50.0);
  CHECK(cfg.reps == 40);
  CHECK(cfg.seed == 9);
  fs::remove(p);
}

TEST_CASE("config include splices relative files with later lines winning") {
  auto inc = write_file("fracmle_cfg_inc.txt",
                        "reps 100\n"
                        "seed 4\n");
  auto p = write_file("fracmle_cfg_main.txt",
                      "experiment bias_mse\n"
                      "theta -1\n"
                      "include fracmle_cfg_inc.txt\n"
                      "reps 7\n");
  auto cfg = mc::ExperimentConfig::from_file(p.string());
  CHECK(cfg.seed == 4);
  CHECK(cfg.reps == 7);
  fs::remove(p);
  fs::remove(inc);
}

TEST_CASE("config rejects unknown keys and bad values") {
  mc::ExperimentConfig cfg;
  CHECK_THROWS_AS(cfg.apply_line("turbo yes", "", 0), std::invalid_argument);
  CHECK_THROWS_AS(cfg.apply_line("drift", "", 0), std::invalid_argument);

  mc::ExperimentConfig bad;
  bad.reps = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  mc::ExperimentConfig h;
  h.hursts = {1.2};
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);

  mc::ExperimentConfig t;
  t.horizons = {0.3};
  t.nodes_per_unit = 16;  // 4.8 cells, not a whole number
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);

  mc::ExperimentConfig s;
  s.experiment = "bias_mse";
  s.theta = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  mc::ExperimentConfig d;
  d.experiment = "density";
  d.hursts = {0.7};
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("config echo round trips through its own format") {
  mc::ExperimentConfig cfg;
  cfg.experiment = "decay";
  cfg.theta = 1.0;
  cfg.hursts = {0.3, 0.7};
  cfg.horizons = {5.0, 8.0};
  cfg.reps = 13;
  cfg.seed = 77;
  auto p = write_file("fracmle_cfg_echo.txt", cfg.echo());
  auto back = mc::ExperimentConfig::from_file(p.string());
  CHECK(back.echo() == cfg.echo());
  fs::remove(p);
}

TEST_CASE("raw tables round trip and reports rebuild byte identically") {
  mc::ExperimentConfig cfg;
  cfg.experiment = "bias_mse";
  cfg.drift = "linear";
  cfg.hursts = {0.5};
  cfg.theta = -1.0;
  cfg.horizons = {5.0};
  cfg.nodes_per_unit = 32;
  cfg.reps = 16;
  cfg.seed = 5;
  cfg.threads = 2;
  cfg.validate();

  mc::McRaw raw;
  auto rep = mc::run_bias_mse(cfg, &raw);
  REQUIRE(raw.rep.size() == 16);
  REQUIRE(rep.cells.size() == 1);

  auto p = fs::temp_directory_path() / "fracmle_raw_rt.csv";
  mc::persist_raw(p.string(), raw);
  auto loaded = mc::load_raw(p.string());
  CHECK(mc::report_from_raw(loaded).to_json() == mc::report_from_raw(raw).to_json());
  fs::remove(p);
}

TEST_CASE("replication scheduling does not change the report") {
  for (std::size_t threads : {std::size_t(1), std::size_t(4)}) {
    mc::ExperimentConfig cfg;
    cfg.experiment = "bias_mse";
    cfg.drift = "linear";
    cfg.hursts = {0.3};
    cfg.theta = -1.0;
    cfg.horizons = {5.0};
    cfg.nodes_per_unit = 32;
    cfg.reps = 12;
    cfg.seed = 11;
    cfg.threads = threads;
    cfg.validate();
    static std::string first;
    auto rep = mc::run_bias_mse(cfg);
    if (threads == 1)
      first = rep.to_json();
    else
      CHECK(rep.to_json() == first);
  }
}

TEST_CASE("persisted runs carry config raw report and plot data") {
  mc::ExperimentConfig cfg;
  cfg.experiment = "bias_mse";
  cfg.drift = "linear";
  cfg.hursts = {0.5};
  cfg.theta = -1.0;
  cfg.horizons = {5.0};
  cfg.nodes_per_unit = 16;
  cfg.reps = 8;
  cfg.seed = 3;
  cfg.out_dir = (fs::temp_directory_path() / "fracmle_run_out").string();
  fs::remove_all(cfg.out_dir);
  cfg.validate();

  mc::McRaw raw;
  auto rep = mc::run_bias_mse(cfg, &raw);
  mc::persist_run(cfg, raw, rep);
  CHECK(fs::exists(cfg.out_dir + "/raw.csv"));
  CHECK(fs::exists(cfg.out_dir + "/report.json"));
  CHECK(fs::exists(cfg.out_dir + "/config.txt"));
  bool has_plot = false;
  for (const auto& e : fs::directory_iterator(cfg.out_dir))
    has_plot = has_plot || e.path().filename().string().rfind("plot_", 0) == 0;
  CHECK(has_plot);
  // the persisted raw rebuilds the identical report
  auto loaded = mc::load_raw(cfg.out_dir + "/raw.csv");
  CHECK(mc::report_from_raw(loaded).to_json() == mc::report_from_raw(raw).to_json());
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("whitened linear simulation closes its own recursion") {
  Grid g(200, 0.02);
  double theta = -0.9;
  CounterRng rng(51);
  auto path = mc::simulate_linear_whitened(0.5, g, theta, rng);
  REQUIRE(path.q.size() == g.n + 1);
  REQUIRE(path.dz.size() == g.n);
  REQUIRE(path.dw.size() == g.n);
  double z = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    CHECK(path.dz[i] ==
          doctest::Approx(path.dw[i] + theta * path.q[i] * g.dt).epsilon(1e-12));
    z += path.dz[i];
    // at the brownian point the whitened observation is the state itself
    CHECK(path.q[i + 1] == doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("replication pool covers every index exactly once") {
  std::vector<int> hits(257, 0);
  mc::parallel_reps(hits.size(), 8, [&](std::size_t r) { hits[r] += 1; });
  for (std::size_t r = 0; r < hits.size(); ++r) CHECK(hits[r] == 1);
}

TEST_CASE("small value scan reports probabilities per cell") {
  mc::ExperimentConfig cfg;
  cfg.experiment = "condition_c";
  cfg.drift = "linear";
  cfg.hursts = {0.25};
  cfg.theta = -1.0;
  cfg.horizons = {4.0};
  cfg.nodes_per_unit = 16;
  cfg.reps = 60;
  cfg.seed = 19;
  cfg.validate();

  mc::McRaw raw;
  auto scan = mc::condition_c_scan(cfg, &raw);
  REQUIRE(!scan.eps_grid.empty());
  REQUIRE(scan.p_small.size() == scan.base.cells.size());
  for (const auto& row : scan.p_small) {
    REQUIRE(row.size() == scan.eps_grid.size());
    for (std::size_t k = 1; k < row.size(); ++k) {
      CHECK(row[k] >= row[k - 1]);  // cdf in eps
      CHECK(row[k] >= 0.0);
      CHECK(row[k] <= 1.0);
    }
  }
  auto back = mc::condition_report_from_raw(raw);
  REQUIRE(back.p_small.size() == scan.p_small.size());
  for (std::size_t c = 0; c < scan.p_small.size(); ++c)
    for (std::size_t k = 0; k < scan.eps_grid.size(); ++k)
      CHECK(back.p_small[c][k] == doctest::Approx(scan.p_small[c][k]).epsilon(1e-12));
}

TEST_CASE("density study integrates to one and rejects high hurst") {
  mc::ExperimentConfig cfg;
  cfg.experiment = "density";
  cfg.drift = "linear";
  cfg.hursts = {0.3};
  cfg.theta = -1.0;
  cfg.horizons = {4.0};
  cfg.nodes_per_unit = 16;
  cfg.reps = 800;
  cfg.seed = 23;
  cfg.mu_nodes = 8;
  cfg.validate();

  auto rep = mc::malliavin_density(cfg);
  REQUIRE(rep.curves.size() == 1);
  const auto& c = rep.curves[0];
  CHECK(std::abs(c.integral - 1.0) < 0.15);
  CHECK(rep.quad_vs_fact_rel < 1e-6);
  CHECK(c.sup_f > 0.0);

  mc::ExperimentConfig bad = cfg;
  bad.hursts = {0.6};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
