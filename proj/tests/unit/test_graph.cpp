#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "support.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/graph.hpp"
#include "swarmcov/pde.hpp"

using namespace swarmcov;

namespace {

// Random spanning tree plus extra edges.
Graph random_connected(std::mt19937_64& rng, std::size_t n) {
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t v = 1; v < n; ++v) {
    const std::size_t u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
    edges.insert({u, v});
  }
  const std::size_t extra = std::uniform_int_distribution<std::size_t>(0, 2 * n)(rng);
  for (std::size_t k = 0; k < extra && n > 2; ++k) {
    std::size_t a = rng() % n, b = rng() % n;
    if (a == b) continue;
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  return Graph(n, {edges.begin(), edges.end()});
}

std::vector<double> random_field(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> f(n);
  for (double& v : f) v = std::exp(std::uniform_real_distribution<double>(-2.0, 2.0)(rng));
  return f;
}

}  // namespace

TEST_CASE("laplacian") {
  const Matrix L2 = laplacian(Graph::path(2));
  CHECK(L2.data == std::vector<double>{1, -1, -1, 1});
  const Matrix K3 = laplacian(Graph::complete(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(K3(i, j) == (i == j ? 2.0 : -1.0));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const Graph g = random_connected(rng, 2 + rng() % 30);
    const Matrix L = laplacian(g);
    for (std::size_t i = 0; i < L.n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < L.n; ++j) {
        row += L(i, j);
        REQUIRE(L(i, j) == L(j, i));
      }
      REQUIRE(row == 0.0);
    }
  }
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(Graph(3, {{0, 1}}), ConfigError);
  CHECK_THROWS_AS(Graph(2, {{0, 0}, {0, 1}}), ConfigError);
  CHECK_THROWS_AS(Graph(2, {{0, 1}, {1, 0}}), ConfigError);
  CHECK_THROWS_AS(Graph(2, {{0, 2}}), ConfigError);
  CHECK_NOTHROW(Graph(1, {}));
  NodeRates bad{{1.0, -1.0}, 1.0, 1.0};
  CHECK_THROWS_AS(validate(bad, Graph::path(2)), ConfigError);
  NodeRates short_f{{1.0}, 1.0, 1.0};
  CHECK_THROWS_AS(validate(short_f, Graph::path(2)), ShapeError);
}

TEST_CASE("invariant distribution") {
  const auto pi = invariant_distribution({{1.0, 2.0}, 1.0, 1.0});
  CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (double v : invariant_distribution({{3.0, 3.0, 3.0, 3.0}, 2.0, 1.0})) CHECK(v == doctest::Approx(0.25));
  const auto pc = invariant_distribution({{1.0, 2.0, 5.0}, 7.5, 1.0});
  const auto p1 = invariant_distribution({{1.0, 2.0, 5.0}, 1.0, 1.0});
  for (std::size_t i = 0; i < 3; ++i) CHECK(pc[i] == doctest::Approx(p1[i]).epsilon(1e-15));
  const auto flipped = invariant_distribution({{1.0, 3.0}, 1.0, -1.0});
  CHECK(flipped[1] == doctest::Approx(0.75).epsilon(1e-15));

  SUBCASE("L D pi = 0 on random connected graphs") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 100; ++t) {
      const Graph g = random_connected(rng, 1 + rng() % 50);
      NodeRates r{random_field(rng, g.vertex_count()), std::exp(std::uniform_real_distribution<double>(-1, 1)(rng)),
                  1.0};
      const auto res = generator_residual(g, r, invariant_distribution(r));
      for (double v : res) REQUIRE(std::abs(v) <= 1e-12);
    }
  }
}

TEST_CASE("propagate") {
  const Graph p2 = Graph::path(2);
  const NodeRates flat{{1.0, 1.0}, 1.0, 1.0};
  CHECK(propagate(p2, {0.3, 0.7}, flat, 0.0) == std::vector<double>{0.3, 0.7});
  const auto p = propagate(p2, {1.0, 0.0}, flat, 1.0);
  CHECK(p[0] == doctest::Approx(0.5 + 0.5 * std::exp(-2.0)).epsilon(1e-10));
  CHECK(p[1] == doctest::Approx(0.5 - 0.5 * std::exp(-2.0)).epsilon(1e-10));
  CHECK(p[0] == doctest::Approx(0.56767).epsilon(1e-5));

  std::mt19937_64 rng(33);
  for (int t = 0; t < 10; ++t) {
    const Graph g = random_connected(rng, 2 + rng() % 20);
    const std::size_t n = g.vertex_count();
    NodeRates r{random_field(rng, n), 0.7, 1.0};
    const auto pi = invariant_distribution(r);
    const auto still = propagate(g, pi, r, 3.0);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(still[i] - pi[i]) <= 1e-10);

    std::vector<double> p0(n, 0.0);
    p0[rng() % n] = 1.0;
    const double fmin = *std::min_element(r.f.begin(), r.f.end());
    double prev_tv = 2.0;
    for (double k : {1.0, 2.0, 4.0, 8.0}) {
      const auto pt = propagate(g, p0, r, k / (r.c * fmin));
      double sum = 0.0;
      for (double v : pt) {
        REQUIRE(v >= -1e-10);
        sum += v;
      }
      REQUIRE(std::abs(sum - 1.0) <= 1e-10);
      const double tv = tv_distance(pt, pi);
      REQUIRE(tv <= prev_tv + 1e-12);
      prev_tv = tv;
    }
  }
}

TEST_CASE("path graph matches the finite-volume steady state") {
  const ScalarField F = sine_field_1d();
  const std::size_t n = 40;
  const UniformGrid grid(F.domain(), n);
  std::vector<double> f(n);
  GridFunction w(grid);
  const double c = 0.3;
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = F(grid.center(i));
    w[i] = c * f[i];
  }
  const auto pi = invariant_distribution({f, c, 1.0});
  const auto ss = steady_state(w);
  for (std::size_t i = 0; i < n; ++i) CHECK(pi[i] == doctest::Approx(ss[i] * grid.cell_volume()).epsilon(1e-14));
}

TEST_CASE("CTMC sampler") {
  const Graph p2 = Graph::path(2);
  const NodeRates r{{1.0, 2.0}, 1.0, 1.0};
  const auto traj = sample_ctmc(p2, r, 0, INFINITY, 17, 100000);
  CHECK(traj.size() == 100001);
  CHECK(tv_distance(occupation_fractions(traj, 2), {2.0 / 3.0, 1.0 / 3.0}) <= 0.02);
  CHECK(sample_ctmc(p2, r, 0, INFINITY, 17, 1000).size() == 1001);

  const auto a = sample_ctmc(Graph::complete(5), {{1, 2, 3, 4, 5}, 1.0, 1.0}, 2, 50.0, 9);
  const auto b = sample_ctmc(Graph::complete(5), {{1, 2, 3, 4, 5}, 1.0, 1.0}, 2, 50.0, 9);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].time == b[i].time);
    CHECK(a[i].vertex == b[i].vertex);
  }
  CHECK(a.back().time <= 50.0);
  const auto c = sample_ctmc(Graph::complete(5), {{1, 2, 3, 4, 5}, 1.0, 1.0}, 2, 50.0, 10);
  CHECK((c.size() != a.size() || c[1].time != a[1].time));

  SUBCASE("fast vertices have short holding times") {
    const auto fast = sample_ctmc(p2, {{1e9, 1e9}, 1.0, 1.0}, 0, INFINITY, 1, 1000);
    CHECK(fast.back().time < 1e-5);
  }
  SUBCASE("jumps go to neighbours") {
    const Graph path = Graph::path(6);
    const auto t = sample_ctmc(path, {{1, 1, 1, 1, 1, 1}, 1.0, 1.0}, 0, INFINITY, 4, 5000);
    for (std::size_t i = 1; i < t.size(); ++i)
      REQUIRE(std::abs(double(t[i].vertex) - double(t[i - 1].vertex)) == 1.0);
  }
}

TEST_CASE("graph file formats") {
  testing::TempDir tmp("graph");
  testing::write_file(tmp / "g.edges", "# triangle plus tail\n0 1\n1 2\n2 0\n\n2 3 # tail\n");
  const Graph g = load_edge_list(tmp / "g.edges");
  CHECK(g.vertex_count() == 4);
  CHECK(g.degree(2) == 3);
  testing::write_file(tmp / "bad.edges", "0 1\n1\n");
  CHECK_THROWS_AS(load_edge_list(tmp / "bad.edges"), LoadError);
  testing::write_file(tmp / "disc.edges", "0 1\n2 3\n");
  CHECK_THROWS_AS(load_edge_list(tmp / "disc.edges"), LoadError);

  const auto traj = sample_ctmc(g, {{1, 2, 3, 4}, 0.5, 1.0}, 3, 20.0, 2);
  write_trajectory_csv(tmp / "t.csv", traj);
  const auto back = read_trajectory_csv(tmp / "t.csv");
  REQUIRE(back.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(back[i].time == traj[i].time);
    CHECK(back[i].vertex == traj[i].vertex);
  }
}
