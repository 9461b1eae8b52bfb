#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmcov/config.hpp"

namespace swarmcov {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides [run] seed
  bool gnuplot = false;
};

struct RunResult {
  std::vector<std::filesystem::path> artifacts;
  std::map<std::string, double> metrics;
};

// Each command validates the whole config (unknown keys included) before
// computing anything, then writes its CSVs into out_dir.
RunResult cmd_coverage(const Config& cfg, const RunOptions& options);
RunResult cmd_pde(const Config& cfg, const RunOptions& options);
RunResult cmd_graph(const Config& cfg, const RunOptions& options);
RunResult cmd_estimate(const Config& cfg, const RunOptions& options);

}  // namespace swarmcov
