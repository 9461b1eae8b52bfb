#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>

#include "swarmcov/config.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/experiments.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace swarmcov;
  CLI::App app{"Stochastic swarm coverage and field estimation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool gnuplot = false;

  const std::map<std::string, std::function<RunResult(const Config&, const RunOptions&)>> commands{
      {"coverage", cmd_coverage}, {"pde", cmd_pde}, {"graph", cmd_graph}, {"estimate", cmd_estimate}};
  const std::map<std::string, std::string> help{
      {"coverage", "Simulate the swarm under a coverage law"},
      {"pde", "Solve the mean-field equations"},
      {"graph", "Markov chain analogue on a graph"},
      {"estimate", "Three-phase field estimation"}};

  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "Config file")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Seed (overrides the config)");
    sub->add_flag("--gnuplot", gnuplot, "Also write gnuplot scripts");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    for (auto* sub : subs) {
      if (!sub->parsed()) continue;
      RunOptions options;
      options.out_dir = out_dir;
      options.gnuplot = gnuplot;
      if (sub->count("--seed") > 0) options.seed = seed;
      const Config cfg = Config::load(config_path);
      const RunResult res = commands.at(sub->get_name())(cfg, options);
      for (const auto& [k, v] : res.metrics) std::printf("%s = %.10g\n", k.c_str(), v);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const LoadError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericError;
  }
  return 0;
}
