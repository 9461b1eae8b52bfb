#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "swarmcov/field.hpp"
#include "swarmcov/geometry.hpp"
#include "swarmcov/grid_io.hpp"

namespace swarmcov {

enum class Mode : std::uint8_t { passive = 0, active = 1 };

struct AgentState {
  Point position{0.0, 0.0};
  Mode mode = Mode::active;

  bool operator==(const AgentState&) const = default;
};

struct SwarmState {
  double time = 0.0;
  std::vector<AgentState> agents;

  bool operator==(const SwarmState&) const = default;
};

struct GaussianInit {
  Point center{0.5, 0.5};
  double sigma = 0.1;
};
struct UniformInit {};
struct PointInit {
  Point position{0.5, 0.5};
};
using InitialDistribution = std::variant<GaussianInit, UniformInit, PointInit>;

struct SimConfig {
  std::size_t agent_count = 1;
  double dt = 1e-3;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> snapshot_times;
  InitialDistribution initial = UniformInit{};
  Mode initial_mode = Mode::active;
  // Threads used for stepping; results do not depend on it.
  unsigned workers = 1;
};

// Specular fold of each coordinate into [lo, hi] (triangle wave of period
// 2 (hi - lo)). Identity on interior points.
Point reflect(const Point& x, const Domain& domain);

// One Euler-Maruyama step with mode switching. The switching test and all law
// evaluations use the pre-step position.
AgentState step_agent(const AgentState& state, const ControlLaws& laws, double dt, const Point& noise,
                      const std::array<double, 2>& uniform_draws);

// Validates dt * sup H < 1 and dt * k < 1 (ConfigError otherwise).
void check_step_size(const ControlLaws& laws, double dt);

// Draws the initial swarm for `config` (Gaussian draws rejected until inside).
SwarmState initial_swarm(const SimConfig& config, const Domain& domain);

// Advances `state` by `steps` steps of size dt, recording a snapshot whenever
// the step counter reaches one of `snapshot_steps` (sorted, relative to the
// start). `step_offset` shifts the global step index used to key the RNG, so
// consecutive phases draw independent noise.
std::vector<SwarmState> advance(SwarmState state, const ControlLaws& laws, double dt, std::uint64_t steps,
                                const std::vector<std::uint64_t>& snapshot_steps, std::uint64_t seed,
                                std::uint64_t step_offset = 0, unsigned workers = 1);

// Full simulation: initial draw then stepping to t_end; one snapshot per
// requested time, taken at the nearest step time >= the request.
std::vector<SwarmState> simulate(const SimConfig& config, const ControlLaws& laws, const Domain& domain);

// Empirical density: cell count / (N * cell volume).
GridFunction histogram(const SwarmState& state, const UniformGrid& grid);

// Half the L1 distance between two densities on the same grid.
double tv_distance(const GridFunction& p, const GridFunction& q);

// Snapshot CSV: `t,agent_id,x[,y],mode`.
void write_snapshots_csv(const std::filesystem::path& path, const std::vector<SwarmState>& snapshots, int dimension);
std::vector<SwarmState> read_snapshots_csv(const std::filesystem::path& path);

}  // namespace swarmcov
