#include "swarmcov/graph.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "swarmcov/csv.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/philox.hpp"

namespace swarmcov {

Graph::Graph(std::size_t vertex_count, std::vector<std::pair<std::size_t, std::size_t>> edges)
    : edges_(std::move(edges)), adjacency_(vertex_count) {
  if (vertex_count == 0) throw ConfigError("graph: no vertices");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto& [u, v] : edges_) {
    if (u >= vertex_count || v >= vertex_count)
      throw ConfigError("graph: edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    if (u == v) throw ConfigError("graph: self-loop at vertex " + std::to_string(u));
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
      throw ConfigError("graph: duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());

  std::vector<bool> reached(vertex_count, false);
  std::vector<std::size_t> stack{0};
  reached[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adjacency_[v]) {
      if (reached[w]) continue;
      reached[w] = true;
      ++count;
      stack.push_back(w);
    }
  }
  if (count != vertex_count) throw ConfigError("graph: not connected");
}

Graph Graph::path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

Graph Graph::complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open edge list " + path.string());
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t max_vertex = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u = 0, v = 0;
    if (!(ls >> u)) continue;
    std::string rest;
    if (!(ls >> v) || u < 0 || v < 0 || (ls >> rest))
      throw LoadError(path.string() + ":" + std::to_string(lineno) + ": expected `u v`");
    edges.emplace_back(std::size_t(u), std::size_t(v));
    max_vertex = std::max({max_vertex, std::size_t(u), std::size_t(v)});
  }
  if (edges.empty()) throw LoadError(path.string() + ": no edges");
  try {
    return Graph(max_vertex + 1, std::move(edges));
  } catch (const ConfigError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

Matrix laplacian(const Graph& g) {
  Matrix L(g.vertex_count());
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    L(i, i) = double(g.degree(i));
    for (std::size_t j : g.neighbors(i)) L(i, j) = -1.0;
  }
  return L;
}

double NodeRates::rate(std::size_t i) const { return c * std::pow(f[i], exponent); }

void validate(const NodeRates& rates, const Graph& g) {
  if (rates.f.size() != g.vertex_count())
    throw ShapeError("node field has " + std::to_string(rates.f.size()) + " values for " +
                     std::to_string(g.vertex_count()) + " vertices");
  for (std::size_t i = 0; i < rates.f.size(); ++i)
    if (!(rates.f[i] > 0.0) || !std::isfinite(rates.f[i]))
      throw ConfigError("node field must be positive (vertex " + std::to_string(i) + ")");
  if (!(rates.c > 0.0) || !std::isfinite(rates.c)) throw ConfigError("rate constant c must be positive");
  if (!std::isfinite(rates.exponent)) throw ConfigError("rate exponent must be finite");
}

namespace {

// out = L D p, using adjacency lists.
void apply_generator(const Graph& g, const std::vector<double>& rate, const std::vector<double>& p,
                     std::vector<double>& out) {
  const std::size_t n = g.vertex_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double dpi = rate[i] * p[i];
    double acc = double(g.degree(i)) * dpi;
    for (std::size_t j : g.neighbors(i)) acc -= rate[j] * p[j];
    out[i] = acc;
  }
}

std::vector<double> rate_vector(const NodeRates& rates) {
  std::vector<double> r(rates.f.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rates.rate(i);
  return r;
}

}  // namespace

std::vector<double> generator_residual(const Graph& g, const NodeRates& rates, const std::vector<double>& p) {
  validate(rates, g);
  if (p.size() != g.vertex_count()) throw ShapeError("probability vector length mismatch");
  std::vector<double> out(p.size());
  apply_generator(g, rate_vector(rates), p, out);
  return out;
}

std::vector<double> propagate(const Graph& g, const std::vector<double>& p0, const NodeRates& rates, double t) {
  validate(rates, g);
  if (p0.size() != g.vertex_count()) throw ShapeError("probability vector length mismatch");
  if (t < 0.0 || !std::isfinite(t)) throw ConfigError("propagate: t must be finite and nonnegative");
  std::vector<double> p = p0;
  if (t == 0.0) return p;
  const auto r = rate_vector(rates);
  auto rhs = [&](const std::vector<double>& x, std::vector<double>& dx, double) {
    apply_generator(g, r, x, dx);
    for (double& v : dx) v = -v;
  };
  namespace ode = boost::numeric::odeint;
  const double fastest = *std::max_element(r.begin(), r.end());
  const double dt0 = std::min(t, 0.01 / (fastest * 2.0 * double(g.vertex_count())));
  ode::integrate_adaptive(ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<std::vector<double>>()), rhs, p,
                          0.0, t, dt0);
  return p;
}

std::vector<double> invariant_distribution(const NodeRates& rates) {
  std::vector<double> pi(rates.f.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = 1.0 / rates.rate(i);
  const double s = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& v : pi) v /= s;
  return pi;
}

std::vector<Jump> sample_ctmc(const Graph& g, const NodeRates& rates, std::size_t start, double t_end,
                              std::uint64_t seed, std::size_t max_jumps) {
  validate(rates, g);
  if (start >= g.vertex_count()) throw ConfigError("start vertex out of range");
  const auto r = rate_vector(rates);
  std::vector<Jump> traj{{0.0, start}};
  double t = 0.0;
  std::size_t v = start;
  for (std::uint64_t k = 0; k < max_jumps; ++k) {
    const auto block = random_block(seed, RngStream::ctmc, 0, k);
    const double exit_rate = r[v] * double(g.degree(v));
    t += -std::log(to_unit_open(block[0])) / exit_rate;
    if (t > t_end) break;
    const auto& nb = g.neighbors(v);
    const auto pick = std::min(nb.size() - 1, std::size_t(to_unit_open(block[1]) * double(nb.size())));
    v = nb[pick];
    traj.push_back({t, v});
  }
  return traj;
}

std::vector<double> occupation_fractions(const std::vector<Jump>& trajectory, std::size_t vertex_count,
                                         double horizon) {
  if (trajectory.empty()) throw ShapeError("empty trajectory");
  const double end = horizon < 0.0 ? trajectory.back().time : horizon;
  std::vector<double> occ(vertex_count, 0.0);
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const double t0 = trajectory[k].time;
    if (t0 >= end) break;
    const double t1 = k + 1 < trajectory.size() ? std::min(trajectory[k + 1].time, end) : end;
    if (trajectory[k].vertex >= vertex_count) throw ShapeError("trajectory vertex out of range");
    occ[trajectory[k].vertex] += t1 - t0;
  }
  const double total = std::accumulate(occ.begin(), occ.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateError("trajectory spans zero time");
  for (double& v : occ) v /= total;
  return occ;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ShapeError("tv_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<Jump>& trajectory) {
  CsvWriter w(path, {"t", "vertex"});
  for (const auto& j : trajectory) {
    w.cell(j.time).cell(j.vertex);
    w.end_row();
  }
}

std::vector<Jump> read_trajectory_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const auto ct = table.column("t");
  const auto cv = table.column("vertex");
  std::vector<Jump> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double v = table.number(r, cv);
    if (v < 0.0 || v != std::floor(v)) throw LoadError(path.string() + ": vertex must be a nonnegative integer");
    out.push_back({table.number(r, ct), std::size_t(v)});
  }
  return out;
}

}  // namespace swarmcov
