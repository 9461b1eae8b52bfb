#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "swarmcov/error.hpp"
#include "swarmcov/pde.hpp"
#include "swarmcov/sde.hpp"

using namespace swarmcov;

namespace {

GridFunction random_positive(const UniformGrid& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  GridFunction f(g);
  for (double& v : f.values()) v = u(rng);
  return f;
}

UniformGrid random_grid(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n(2, 30);
  if (rng() % 2) return UniformGrid(Domain::unit(1), std::size_t(n(rng)));
  return UniformGrid(Domain({{0.0, 1.0}, {0.0, 2.0}}), std::size_t(n(rng)), std::size_t(n(rng)));
}

double rel_mass_change(const GridFunction& a, const GridFunction& b) { return std::abs(b.mass() - a.mass()) / a.mass(); }

}  // namespace

TEST_CASE("step_diffusion examples") {
  const UniformGrid two(Domain::unit(1), 2);
  const GridFunction w(two, {1.0, 1.0});
  const auto y = step_diffusion(GridFunction(two, {2.0, 0.0}), w, 0.01);
  CHECK(y[0] == doctest::Approx(1.92).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(0.08).epsilon(1e-15));

  const UniformGrid g(Domain::unit(2), 7, 5);
  const GridFunction uniform(g, 3.0);
  CHECK(step_diffusion(uniform, GridFunction(g, 0.4), 1e-3) == uniform);

  CHECK_THROWS_AS(step_diffusion(GridFunction(two, {2.0, 0.0}), w, 0.2), StepError);
  CHECK_THROWS_AS(step_diffusion(GridFunction(two, 1.0), GridFunction(UniformGrid(Domain::unit(1), 3), 1.0), 0.01),
                  ShapeError);
}

TEST_CASE("cfl_max_dt") {
  CHECK(cfl_max_dt(GridFunction(UniformGrid(Domain::unit(1), 10), 1.0)) == doctest::Approx(0.005).epsilon(1e-14));
  CHECK(cfl_max_dt(GridFunction(UniformGrid(Domain::unit(2), 10, 10), 1.0)) == doctest::Approx(0.0025).epsilon(1e-14));
  const UniformGrid g(Domain::unit(1), 16);
  GridFunction w(g, 1.0);
  w[3] = 2.5;
  const double base = cfl_max_dt(w);
  for (double& v : w.values()) v *= 2.0;
  CHECK(cfl_max_dt(w) == doctest::Approx(base / 2.0).epsilon(1e-14));
}

TEST_CASE("conservation, positivity and sweep order over random inputs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const UniformGrid g = random_grid(rng);
    const GridFunction w = random_positive(g, rng, 0.05, 3.0);
    const GridFunction y = random_positive(g, rng, 0.0, 5.0);
    const double dt = cfl_max_dt(w) * std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    const auto a = step_diffusion(y, w, dt, Sweep::row_major);
    const auto b = step_diffusion(y, w, dt, Sweep::column_major);
    REQUIRE(a == b);
    REQUIRE(rel_mass_change(y, a) <= 1e-13);
    REQUIRE(a.min() >= 0.0);

    AdrCoefficients c(w);
    VectorGridFunction adv(g);
    std::uniform_real_distribution<double> av(-2.0, 2.0);
    for (int a = 0; a < g.dimension(); ++a)
      for (double& v : adv.components[std::size_t(a)]) v = av(rng);
    c.advection = adv;
    c.reaction = random_positive(g, rng, 0.0, 4.0);
    c.switch_rate = 1.5;
    const GridFunction y2 = random_positive(g, rng, 0.0, 2.0);
    const double dta = adr_max_dt(c) * std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    const auto [n1, n2] = step_adr(y, y2, c, dta);
    const double before = y.mass() + y2.mass();
    REQUIRE(std::abs(n1.mass() + n2.mass() - before) <= 1e-13 * before);
    REQUIRE(n1.min() >= 0.0);
    REQUIRE(n2.min() >= 0.0);
  }
}

TEST_CASE("step_adr") {
  const UniformGrid g(Domain::unit(1), 12);
  std::mt19937_64 rng(9);
  const GridFunction w = random_positive(g, rng, 0.5, 1.5);
  const GridFunction y = random_positive(g, rng, 0.0, 2.0);

  SUBCASE("no reaction and empty passive pool reduces to step_diffusion") {
    AdrCoefficients c(w);
    c.switch_rate = 4.0;
    const double dt = 0.5 * cfl_max_dt(w);
    const auto [y1, y2] = step_adr(y, GridFunction(g, 0.0), c, dt);
    CHECK(y1 == step_diffusion(y, w, dt));
    CHECK(y2.max() == 0.0);
  }
  SUBCASE("reaction pair arithmetic") {
    AdrCoefficients c(GridFunction(g, 1e-12));
    c.reaction = GridFunction(g, 2.0);
    c.switch_rate = 1.0;
    const auto [y1, y2] = step_adr(GridFunction(g, 1.0), GridFunction(g, 0.0), c, 0.1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(y1[i] == doctest::Approx(0.8).epsilon(1e-12));
      CHECK(y2[i] == doctest::Approx(0.2).epsilon(1e-12));
    }
  }
  SUBCASE("too large a step") {
    AdrCoefficients c(w);
    c.reaction = GridFunction(g, 50.0);
    CHECK_THROWS_AS(step_adr(y, GridFunction(g, 0.0), c, cfl_max_dt(w)), StepError);
  }
}

TEST_CASE("transposed step is the adjoint of the forward step") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const UniformGrid g = random_grid(rng);
    const GridFunction w = random_positive(g, rng, 0.1, 2.0);
    const GridFunction y = random_positive(g, rng, -1.0, 1.0);
    const GridFunction p = random_positive(g, rng, -1.0, 1.0);
    const double dt = 0.9 * cfl_max_dt(w);
    const auto sy = step_diffusion(y, w, dt);
    const auto stp = step_diffusion_transpose(p, w, dt);
    double lhs = 0.0, rhs = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      lhs += sy[i] * p[i];
      rhs += y[i] * stp[i];
      scale += std::abs(y[i] * p[i]);
    }
    CHECK(std::abs(lhs - rhs) <= 1e-13 * scale);
  }
}

TEST_CASE("steady_state") {
  const UniformGrid two(Domain::unit(1), 2);
  const auto s = steady_state(GridFunction(two, {1.0, 4.0}));
  CHECK(s[0] == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(0.4).epsilon(1e-15));
  const UniformGrid g(Domain({{0.0, 2.0}, {0.0, 0.5}}), 4, 3);
  const auto u = steady_state(GridFunction(g, 7.0));
  for (double v : u.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-15));

  SUBCASE("coverage weight gives the normalised field") {
    const ScalarField F = sine_field_1d();
    const UniformGrid grid(F.domain(), 64);
    const auto c = coefficients_from_laws(diffusion_coverage_law(F, 0.3), grid);
    const auto ss = steady_state(c.w);
    const auto target = target_density(F, grid);
    CHECK(tv_distance(ss, target) < 1e-4);
  }
  SUBCASE("fixed point of the step") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      const UniformGrid rg = random_grid(rng);
      const GridFunction w = random_positive(rg, rng, 0.1, 3.0);
      const auto ss = steady_state(w);
      const auto next = step_diffusion(ss, w, 0.9 * cfl_max_dt(w));
      for (std::size_t i = 0; i < ss.size(); ++i) REQUIRE(std::abs(next[i] - ss[i]) <= 1e-12 * ss[i]);
    }
  }
}

TEST_CASE("solve") {
  SUBCASE("uniform stays uniform under constant weight") {
    const UniformGrid g(Domain::unit(2), 6, 6);
    const auto rep = solve(GridFunction(g, 1.0), std::nullopt, AdrCoefficients(GridFunction(g, 0.7)), 0.5, {0.1, 0.5});
    REQUIRE(rep.snapshots.size() == 2);
    for (const auto& s : rep.snapshots)
      for (double v : s.y1.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.dt_used == doctest::Approx(0.9 * cfl_max_dt(GridFunction(g, 0.7))).epsilon(1e-15));
  }
  SUBCASE("normalised field is invariant under w = c^2 / F") {
    const ScalarField F = sine_field_1d();
    const UniformGrid g(F.domain(), 50);
    const auto c = coefficients_from_laws(diffusion_coverage_law(F, 0.5), g);
    GridFunction y0(g);
    for (std::size_t i = 0; i < g.size(); ++i) y0[i] = F(g.center(i));
    const double m = y0.mass();
    for (double& v : y0.values()) v /= m;
    const auto rep = solve(y0, std::nullopt, c, 2.0, {0.5, 1.0, 2.0});
    for (const auto& s : rep.snapshots)
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(s.y1[i] - y0[i]) <= 1e-10);
  }
  SUBCASE("point bump relaxes to the steady state") {
    const ScalarField F = sine_field_1d();
    const UniformGrid g(F.domain(), 100);
    const auto c = coefficients_from_laws(diffusion_coverage_law(F, 1.0), g);
    GridFunction y0(g);
    y0[50] = 1.0 / g.cell_volume();
    const auto rep = solve(y0, std::nullopt, c, 1.0, {0.25, 0.5, 0.75, 1.0});
    CHECK(tv_distance(rep.snapshots.back().y1, steady_state(c.w)) <= 1e-4);
    CHECK(rep.mass_drift <= 1e-12);
  }
  SUBCASE("two-species solve conserves total mass") {
    const ScalarField F = bump_field_2d();
    const UniformGrid g(F.domain(), 16, 16);
    const auto c = coefficients_from_laws(reaction_coverage_law(F, 0.1, 3.0).with_switch_rate(2.0), g);
    const auto rep = solve(GridFunction(g, 1.0), GridFunction(g, 0.0), c, 0.2, {0.1, 0.2});
    REQUIRE(rep.snapshots.back().y2.has_value());
    CHECK(rep.snapshots.back().y2->mass() > 0.0);
    CHECK(rep.mass_drift <= 1e-12);
  }
  SUBCASE("explicit dt above the bound") {
    const UniformGrid g(Domain::unit(1), 10);
    CHECK_THROWS_AS(solve(GridFunction(g, 1.0), std::nullopt, AdrCoefficients(GridFunction(g, 1.0)), 1.0, {1.0}, 0.1),
                    StepError);
  }
}

TEST_CASE("decay_rate") {
  auto heat_rate = [](std::size_t cells, double w) {
    const UniformGrid g(Domain::unit(1), cells);
    const GridFunction target(g, 1.0);
    GridFunction y0(g);
    for (std::size_t i = 0; i < cells; ++i) y0[i] = 1.0 + 0.1 * std::cos(std::numbers::pi * g.center(i)[0]);
    std::vector<double> times;
    for (int k = 1; k <= 8; ++k) times.push_back(0.05 * k / w);
    const auto rep = solve(y0, std::nullopt, AdrCoefficients(GridFunction(g, w)), times.back(), times);
    return decay_rate(rep.snapshots, target);
  };
  const double w = 0.5;
  const auto fit = heat_rate(200, w);
  CHECK(std::abs(fit.rate / (w * std::numbers::pi * std::numbers::pi) - 1.0) <= 0.05);
  CHECK(fit.r_squared >= 0.99);
  const auto coarse = heat_rate(100, w);
  CHECK(std::abs(coarse.rate / fit.rate - 1.0) <= 0.02);

  const UniformGrid g(Domain::unit(1), 10);
  const GridFunction t(g, 1.0);
  std::vector<PdeSnapshot> converged;
  for (int k = 0; k < 5; ++k) converged.push_back(PdeSnapshot{double(k), t, std::nullopt});
  CHECK_THROWS_AS(decay_rate(converged, t), DegenerateError);
  converged.erase(converged.begin() + 3, converged.end());
  CHECK_THROWS_AS(decay_rate(converged, t), ConfigError);
}
