#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>

#include "support.hpp"
#include "swarmcov/config.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/estimation.hpp"
#include "swarmcov/experiments.hpp"
#include "swarmcov/graph.hpp"
#include "swarmcov/grid_io.hpp"
#include "swarmcov/sde.hpp"

using namespace swarmcov;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = SWARMCOV_CONFIG_DIR;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SWARMCOV_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallCoverage = R"(
[run]
seed = 4
[field]
kind = sine1d
[law]
family = diffusion
c1 = 1
[swarm]
agents = 300
dt = 1e-3
t_end = 0.05
snapshots = 0, 0.02, 0.05
init = point
init_center = 0.5
[output]
grid = 20
agents = true
)";

const char* kSmallEstimate = R"(
[run]
seed = 2
[field]
kind = quadratic1d
[protocol]
c = 0.01
T1 = 500
T2 = 3500
d = 3e-5
dt1 = 1
dt2 = 30
agents = 2000
observations = 10
[estimate]
lambda = 0.1
basis = 8
solver_cells = 50
window = 0.7, 1
partition = 100
compare = 10
max_iters = 300
)";

}  // namespace

TEST_CASE("config reader") {
  const Config c = Config::parse("[a]\nx = 1.5  # trailing\ny = 1, 2,3 ; more\nname = gauss\nn = 12\nb = true\n");
  CHECK(c.number("a.x") == 1.5);
  CHECK(c.numbers("a.y") == std::vector<double>{1, 2, 3});
  CHECK(c.choice("a.name", {"gauss", "flat"}) == "gauss");
  CHECK(c.integer("a.n") == 12);
  CHECK(c.flag("a.b", false));
  CHECK(c.number("a.missing", 7.0) == 7.0);
  CHECK_NOTHROW(c.finish());

  const Config u = Config::parse("[a]\nx = 1\ntypo = 2\n");
  u.number("a.x");
  try {
    u.finish();
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("a.typo") != std::string::npos);
  }

  const Config bad = Config::parse("[a]\nx = 1.5abc\nn = -3\nk = 2.5\nname = other\np = -1\n");
  CHECK_THROWS_AS(bad.number("a.x"), ConfigError);
  CHECK_THROWS_AS(bad.integer("a.n"), ConfigError);
  CHECK_THROWS_AS(bad.integer("a.k"), ConfigError);
  CHECK_THROWS_AS(bad.choice("a.name", {"gauss"}), ConfigError);
  CHECK_THROWS_AS(bad.positive("a.p"), ConfigError);
  CHECK_THROWS_AS(bad.number("a.absent"), ConfigError);
  CHECK_THROWS_AS(bad.existing_file("a.name"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/swarmcov.cfg"), ConfigError);
}

TEST_CASE("graph command on the bundled two-vertex config") {
  testing::TempDir tmp("graph");
  RunOptions opt;
  opt.out_dir = tmp.path();
  const auto res = cmd_graph(Config::load(kConfigs / "graph_two_path.cfg"), opt);
  CHECK(res.metrics.at("max_residual") <= 1e-12);
  CHECK(res.metrics.at("occupation_tv") <= 0.02);
  const auto traj = read_trajectory_csv(tmp / "trajectory.csv");
  CHECK(traj.size() == 100001);
  CHECK(traj.front().time == 0.0);
  CHECK(testing::read_file(tmp / "invariant.csv").rfind("vertex,pi,residual", 0) == 0);
}

TEST_CASE("pde command on the heat config") {
  testing::TempDir tmp("pde");
  RunOptions opt;
  opt.out_dir = tmp.path();
  opt.gnuplot = true;
  const auto res = cmd_pde(Config::load(kConfigs / "pde_heat.cfg"), opt);
  CHECK(res.metrics.at("decay_rate_over_w_pi2") == doctest::Approx(1.0).epsilon(0.01));
  CHECK(res.metrics.at("mass_drift") <= 1e-12);
  const auto frames = read_histograms_csv(tmp / "snapshots.csv", Domain::unit(1));
  CHECK(frames.size() == 10);
  CHECK(frames.back().density.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fs::exists(tmp / "pde.gp"));
}

TEST_CASE("coverage command") {
  testing::TempDir a("cov_a"), b("cov_b"), c("cov_c");
  RunOptions opt;
  opt.out_dir = a.path();
  const auto res = cmd_coverage(Config::parse(kSmallCoverage), opt);
  CHECK(res.metrics.count("final_tv") == 1);

  SUBCASE("agent snapshots round-trip through the loader") {
    const auto snaps = read_snapshots_csv(a / "agents.csv");
    REQUIRE(snaps.size() == 3);
    CHECK(snaps[0].agents.size() == 300);
    for (const auto& ag : snaps[0].agents) CHECK(ag.position[0] == 0.5);
    const auto frames = read_histograms_csv(a / "histograms.csv", Domain::unit(1));
    CHECK(frames.size() == 3);
    CHECK(histogram(snaps[2], frames[2].density.grid()) == frames[2].density);
  }
  SUBCASE("reruns and worker counts give byte-identical artifacts") {
    opt.out_dir = b.path();
    cmd_coverage(Config::parse(kSmallCoverage), opt);
    opt.out_dir = c.path();
    std::string threaded = kSmallCoverage;
    threaded.replace(threaded.find("seed = 4"), 8, "seed = 4\nworkers = 3");
    cmd_coverage(Config::parse(threaded), opt);
    for (const char* f : {"agents.csv", "histograms.csv", "summary.csv"}) {
      CHECK(testing::read_file(a / f) == testing::read_file(b / f));
      CHECK(testing::read_file(a / f) == testing::read_file(c / f));
    }
  }
  SUBCASE("seed override changes the draw") {
    opt.out_dir = b.path();
    opt.seed = 99;
    cmd_coverage(Config::parse(kSmallCoverage), opt);
    CHECK(testing::read_file(a / "agents.csv") != testing::read_file(b / "agents.csv"));
  }
  SUBCASE("invalid swarm settings") {
    std::string zero = kSmallCoverage;
    zero.replace(zero.find("agents = 300"), 12, "agents = 0");
    CHECK_THROWS_AS(cmd_coverage(Config::parse(zero), opt), ConfigError);
    CHECK_THROWS_AS(cmd_coverage(Config::parse(std::string(kSmallCoverage) + "extra = 1\n"), opt), ConfigError);
  }
}

TEST_CASE("estimate command") {
  testing::TempDir a("est_a"), b("est_b");
  RunOptions opt;
  opt.out_dir = a.path();
  const auto res = cmd_estimate(Config::parse(kSmallEstimate), opt);
  CHECK(res.metrics.at("cells") == 30);
  CHECK(res.metrics.at("cells_compare") == 3);
  const auto obs = read_observations_csv(a / "observations.csv");
  CHECK(obs.partition.size() == 30);
  CHECK(obs.times.size() == 10);
  CHECK(obs.times.back() == doctest::Approx(3500.0));
  const auto u = read_estimate_csv(a / "estimate.csv", Domain::unit(1));
  CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-9));

  opt.out_dir = b.path();
  cmd_estimate(Config::parse(kSmallEstimate), opt);
  for (const char* f : {"observations.csv", "estimate.csv", "history.csv", "summary.csv"})
    CHECK(testing::read_file(a / f) == testing::read_file(b / f));
}

TEST_CASE("command line exit codes") {
  testing::TempDir tmp("exit");
  const std::string out = " --out " + tmp.path().string();
  CHECK(run_cli("graph --config " + (kConfigs / "graph_two_path.cfg").string() + out) == 0);
  CHECK(run_cli("graph --config " + (kConfigs / "graph_two_path.cfg").string() + out + " --seed 5 --gnuplot") == 0);
  CHECK(fs::exists(tmp / "graph.gp"));
  CHECK(run_cli("") == 2);
  CHECK(run_cli("bogus --config x") == 2);
  CHECK(run_cli("graph") == 2);
  CHECK(run_cli("graph --config /nonexistent.cfg" + out) == 2);

  testing::write_file(tmp / "typo.cfg", "[graph]\nkind = path\nvertices = 3\n[rates]\nf = 1,1,1\nfoo = 1\n");
  CHECK(run_cli("graph --config " + (tmp / "typo.cfg").string() + out) == 2);
  testing::write_file(tmp / "bad_graph.cfg", "[graph]\nkind = edges\nedges = g.edges\n[rates]\nf = 1,1,1\n");
  testing::write_file(tmp / "g.edges", "0 1\n1 1\n");
  CHECK(run_cli("graph --config " + (tmp / "bad_graph.cfg").string() + out) == 2);
  testing::write_file(tmp / "unstable.cfg",
                      "[pde]\ncoefficients = constant\nw = 1\ncells = 50\nt_end = 1\nsnapshots = 1\ndt = 0.01\n");
  CHECK(run_cli("pde --config " + (tmp / "unstable.cfg").string() + out) == 3);
}
