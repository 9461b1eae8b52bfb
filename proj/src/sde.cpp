#include "swarmcov/sde.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "swarmcov/csv.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/philox.hpp"

namespace swarmcov {

Point reflect(const Point& x, const Domain& domain) {
  Point out = x;
  for (int a = 0; a < domain.dimension(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const Interval& ax = domain.axis(a);
    if (x[ua] >= ax.lo && x[ua] <= ax.hi) continue;
    const double len = ax.length();
    double m = std::fmod(x[ua] - ax.lo, 2.0 * len);
    if (m < 0.0) m += 2.0 * len;
    if (m > len) m = 2.0 * len - m;
    out[ua] = std::clamp(ax.lo + m, ax.lo, ax.hi);
  }
  return out;
}

AgentState step_agent(const AgentState& state, const ControlLaws& laws, double dt, const Point& noise,
                      const std::array<double, 2>& uniform_draws) {
  AgentState next = state;
  if (state.mode == Mode::passive) {
    if (uniform_draws[1] < laws.switch_rate() * dt) next.mode = Mode::active;
    return next;
  }
  const Point& x = state.position;
  const double D = laws.diffusion(x);
  const double amp = std::sqrt(2.0 * D * D * dt);
  Point y{x[0] + amp * noise[0], x[1] + amp * noise[1]};
  if (laws.has_advection()) {
    const Point a = laws.advection(x);
    y[0] += a[0] * dt;
    y[1] += a[1] * dt;
  }
  if (laws.domain().dimension() == 1) y[1] = x[1];
  if (laws.has_reaction() && uniform_draws[0] < laws.reaction(x) * dt) next.mode = Mode::passive;
  next.position = reflect(y, laws.domain());
  return next;
}

void check_step_size(const ControlLaws& laws, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step dt must be positive");
  if (!(dt * laws.reaction_bound() < 1.0)) {
    throw ConfigError("time step too large for the reaction law: dt * sup H = " +
                      format_double(dt * laws.reaction_bound()) + " >= 1");
  }
  if (!(dt * laws.switch_rate() < 1.0)) {
    throw ConfigError("time step too large for the switch rate: dt * k = " + format_double(dt * laws.switch_rate()) +
                      " >= 1");
  }
}

SwarmState initial_swarm(const SimConfig& config, const Domain& domain) {
  if (config.agent_count < 1) throw ConfigError("agent count must be >= 1");
  SwarmState s;
  s.agents.resize(config.agent_count);
  const int dim = domain.dimension();
  for (std::size_t i = 0; i < config.agent_count; ++i) {
    AgentState& ag = s.agents[i];
    ag.mode = config.initial_mode;
    if (const auto* g = std::get_if<GaussianInit>(&config.initial)) {
      if (!(g->sigma > 0.0)) throw ConfigError("initial Gaussian sigma must be positive");
      for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt > 1000000) throw ConfigError("initial Gaussian has negligible mass inside the domain");
        const auto w = random_block(config.seed, RngStream::initial, i, attempt);
        const auto n = to_normal_pair(w[0], w[1]);
        Point p{g->center[0] + g->sigma * n[0], dim == 2 ? g->center[1] + g->sigma * n[1] : 0.0};
        if (domain.contains(p)) {
          ag.position = p;
          break;
        }
      }
    } else if (std::holds_alternative<UniformInit>(config.initial)) {
      const auto w = random_block(config.seed, RngStream::initial, i, 0);
      ag.position[0] = domain.axis(0).lo + domain.axis(0).length() * to_unit_open(w[0]);
      if (dim == 2) ag.position[1] = domain.axis(1).lo + domain.axis(1).length() * to_unit_open(w[1]);
    } else {
      Point p = std::get<PointInit>(config.initial).position;
      if (dim == 1) p[1] = 0.0;
      if (!domain.contains(p)) throw ConfigError("initial point lies outside the domain");
      ag.position = p;
    }
  }
  return s;
}

std::vector<SwarmState> advance(SwarmState state, const ControlLaws& laws, double dt, std::uint64_t steps,
                                const std::vector<std::uint64_t>& snapshot_steps, std::uint64_t seed,
                                std::uint64_t step_offset, unsigned workers) {
  check_step_size(laws, dt);
  if (!std::is_sorted(snapshot_steps.begin(), snapshot_steps.end())) {
    throw ConfigError("snapshot steps must be sorted");
  }
  if (!snapshot_steps.empty() && snapshot_steps.back() > steps) {
    throw ConfigError("snapshot requested after the final step");
  }
  const double t0 = state.time;
  std::vector<SwarmState> out(snapshot_steps.size());
  for (std::size_t s = 0; s < out.size(); ++s) {
    out[s].time = t0 + double(snapshot_steps[s]) * dt;
    out[s].agents.resize(state.agents.size());
  }
  const std::size_t n = state.agents.size();

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      AgentState ag = state.agents[i];
      std::size_t next_snap = 0;
      while (next_snap < snapshot_steps.size() && snapshot_steps[next_snap] == 0) out[next_snap++].agents[i] = ag;
      for (std::uint64_t k = 1; k <= steps; ++k) {
        const auto w = random_block(seed, RngStream::step, i, step_offset + k);
        const auto z = to_normal_pair(w[0], w[1]);
        ag = step_agent(ag, laws, dt, Point{z[0], z[1]}, {to_unit_open(w[2]), to_unit_open(w[3])});
        while (next_snap < snapshot_steps.size() && snapshot_steps[next_snap] == k) out[next_snap++].agents[i] = ag;
      }
    }
  };

  const unsigned nw = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (nw == 1) {
    run_range(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + nw - 1) / nw;
    for (unsigned w = 0; w < nw; ++w) {
      const std::size_t b = std::min(n, w * chunk);
      const std::size_t e = std::min(n, b + chunk);
      pool.emplace_back(run_range, b, e);
    }
  }
  return out;
}

std::vector<SwarmState> simulate(const SimConfig& config, const ControlLaws& laws, const Domain& domain) {
  if (!(laws.domain() == domain)) throw ConfigError("control laws are defined on a different domain");
  if (!(config.t_end > 0.0)) throw ConfigError("t_end must be positive");
  check_step_size(laws, config.dt);
  if (!std::is_sorted(config.snapshot_times.begin(), config.snapshot_times.end())) {
    throw ConfigError("snapshot times must be sorted");
  }
  for (double t : config.snapshot_times) {
    if (t < 0.0 || t > config.t_end) throw ConfigError("snapshot time " + format_double(t) + " outside [0, t_end]");
  }
  SwarmState s0 = initial_swarm(config, domain);
  std::vector<std::uint64_t> snaps;
  for (double t : config.snapshot_times) snaps.push_back(step_at_or_after(t, config.dt));
  const std::uint64_t steps = std::max(step_at_or_after(config.t_end, config.dt), snaps.empty() ? 0 : snaps.back());
  return advance(std::move(s0), laws, config.dt, steps, snaps, config.seed, 0, config.workers);
}

GridFunction histogram(const SwarmState& state, const UniformGrid& grid) {
  GridFunction h(grid);
  if (state.agents.empty()) throw ConfigError("histogram of an empty swarm");
  for (const auto& a : state.agents) h[grid.locate(a.position)] += 1.0;
  const double scale = 1.0 / (double(state.agents.size()) * grid.cell_volume());
  for (double& v : h.values()) v *= scale;
  return h;
}

double tv_distance(const GridFunction& p, const GridFunction& q) {
  require_same_grid(p.grid(), q.grid(), "tv_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s * p.grid().cell_volume();
}

void write_snapshots_csv(const std::filesystem::path& path, const std::vector<SwarmState>& snapshots, int dimension) {
  CsvWriter w = dimension == 2 ? CsvWriter(path, {"t", "agent_id", "x", "y", "mode"})
                               : CsvWriter(path, {"t", "agent_id", "x", "mode"});
  for (const auto& s : snapshots) {
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
      const auto& a = s.agents[i];
      w.cell(s.time).cell(i).cell(a.position[0]);
      if (dimension == 2) w.cell(a.position[1]);
      w.cell(a.mode == Mode::active ? "active" : "passive");
      w.end_row();
    }
  }
}

std::vector<SwarmState> read_snapshots_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const bool two_d = t.has_column("y");
  const std::size_t ct = t.column("t"), cid = t.column("agent_id"), cx = t.column("x"), cm = t.column("mode");
  const std::size_t cy = two_d ? t.column("y") : 0;
  std::vector<SwarmState> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double time = t.number(r, ct);
    if (out.empty() || out.back().time != time) {
      out.push_back(SwarmState{time, {}});
    }
    const auto id = static_cast<std::size_t>(t.number(r, cid));
    if (id != out.back().agents.size()) throw LoadError(path.string() + ": agent ids must be consecutive per time");
    AgentState a;
    a.position[0] = t.number(r, cx);
    if (two_d) a.position[1] = t.number(r, cy);
    const std::string& m = t.rows[r][cm];
    if (m == "active" || m == "1") {
      a.mode = Mode::active;
    } else if (m == "passive" || m == "0") {
      a.mode = Mode::passive;
    } else {
      throw LoadError(path.string() + ": unknown mode '" + m + "'");
    }
    out.back().agents.push_back(a);
  }
  return out;
}

}  // namespace swarmcov
