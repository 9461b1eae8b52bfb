#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace swarmcov {

// Connected undirected simple graph on vertices 0..n-1.
class Graph {
 public:
  // ConfigError on self-loops, duplicate edges, out-of-range vertices or a
  // disconnected graph.
  Graph(std::size_t vertex_count, std::vector<std::pair<std::size_t, std::size_t>> edges);

  static Graph path(std::size_t n);
  static Graph complete(std::size_t n);

  std::size_t vertex_count() const { return adjacency_.size(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_[v]; }
  std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

// Edge list, one `u v` pair per line, 0-indexed; '#' starts a comment.
// Vertex count is one more than the largest index.
Graph load_edge_list(const std::filesystem::path& path);

// Dense row-major square matrix.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> data;

  explicit Matrix(std::size_t size) : n(size), data(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

// L = degree matrix - adjacency.
Matrix laplacian(const Graph& g);

// Vertex rates D_ii = c * f(i)^exponent. exponent = +1 is the generator -D L
// as stated (stationary law proportional to 1/f); exponent = -1 gives a law
// proportional to f.
struct NodeRates {
  std::vector<double> f;
  double c = 1.0;
  double exponent = 1.0;

  double rate(std::size_t i) const;
};

void validate(const NodeRates& rates, const Graph& g);

// Residual vector L D p.
std::vector<double> generator_residual(const Graph& g, const NodeRates& rates, const std::vector<double>& p);

// Integrates dp/dt = -L D p from p0 over [0, t] (adaptive Dormand-Prince).
std::vector<double> propagate(const Graph& g, const std::vector<double>& p0, const NodeRates& rates, double t);

// Normalised solution of L D pi = 0: pi_i proportional to 1 / D_ii.
std::vector<double> invariant_distribution(const NodeRates& rates);

struct Jump {
  double time = 0.0;
  std::size_t vertex = 0;
};

// Gillespie sampler for the chain with generator -D L: holding rate
// D_ii * deg(i), uniform neighbour choice. Stops at t_end or after
// max_jumps jumps, whichever is first. The first entry is (0, start).
std::vector<Jump> sample_ctmc(const Graph& g, const NodeRates& rates, std::size_t start, double t_end,
                              std::uint64_t seed, std::size_t max_jumps = SIZE_MAX);

// Fraction of [0, horizon] spent at each vertex (horizon defaults to the last jump time).
std::vector<double> occupation_fractions(const std::vector<Jump>& trajectory, std::size_t vertex_count,
                                         double horizon = -1.0);

double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<Jump>& trajectory);
std::vector<Jump> read_trajectory_csv(const std::filesystem::path& path);

}  // namespace swarmcov
