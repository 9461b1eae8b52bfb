#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "swarmcov/csv.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/field.hpp"

using namespace swarmcov;

TEST_CASE("builtin fields at reference points") {
  const double c1 = 1.0 / (2.0 / std::numbers::pi + 0.01);
  CHECK(c1 == doctest::Approx(1.54650).epsilon(1e-5));
  CHECK(sine_field_1d()({0.5, 0.0}) == doctest::Approx(1.56197).epsilon(1e-5));
  CHECK(sine_field_1d()({0.5, 0.0}) == doctest::Approx(c1 * 1.01).epsilon(1e-14));
  CHECK(quadratic_field_1d()({0.0, 0.0}) == doctest::Approx(0.0291262).epsilon(1e-5));
  CHECK(bump_field_2d()({0.5, 0.5}) == doctest::Approx(std::exp(-1.0) + 0.01).epsilon(1e-14));
  CHECK(bump_field_2d()({0.5, 0.5}) == doctest::Approx(0.377879).epsilon(1e-5));
}

TEST_CASE("evaluation outside the domain is a domain error") {
  CHECK_THROWS_AS(sine_field_1d()({1.5, 0.0}), DomainError);
  CHECK_THROWS_AS(bump_field_2d()({0.5, -0.1}), DomainError);
}

TEST_CASE("builtin fields stay above their floor") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ScalarField fields[] = {sine_field_1d(), quadratic_field_1d(), bump_field_2d()};
  for (const auto& f : fields) {
    REQUIRE(f.floor() > 0.0);
    double lowest = INFINITY;
    for (int i = 0; i < 1'000'000; ++i) {
      const Point p{u(rng), f.domain().dimension() == 2 ? u(rng) : 0.0};
      lowest = std::min(lowest, f(p));
    }
    CHECK(lowest >= f.floor());
  }
}

TEST_CASE("the literal difference of bumps is rejected as non-positive") {
  BumpParams p;
  p.combine = BumpCombine::difference;
  CHECK_THROWS_AS(bump_field_2d(p), ConfigError);
}

TEST_CASE("normalize") {
  const Domain unit = Domain::unit(1);
  SUBCASE("constant") {
    const auto n = normalize(ScalarField::constant(unit, 5.0), unit, 100);
    CHECK(n({0.3, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("x^2 + 0.01 scales by 1/(1/3 + 0.01)") {
    const double c2 = 1.0 / (1.0 / 3.0 + 0.01);
    const auto raw = quadratic_field_1d().scaled(1.0 / c2);
    CHECK(raw({0.5, 0.0}) == doctest::Approx(0.26).epsilon(1e-14));
    const auto n = normalize(raw, unit, 2000);
    CHECK(n({0.5, 0.0}) == doctest::Approx(c2 * 0.26).epsilon(1e-6));
  }
  SUBCASE("idempotent") {
    const auto once = normalize(bump_field_2d(), Domain::unit(2), 200);
    const auto twice = normalize(once, Domain::unit(2), 200);
    for (const Point p : {Point{0.1, 0.2}, Point{0.5, 0.5}, Point{0.9, 0.3}})
      CHECK(std::abs(twice(p) - once(p)) <= 1e-10 * once(p));
  }
}

TEST_CASE("diffusion coverage law") {
  const Domain unit = Domain::unit(1);
  const auto low = diffusion_coverage_law(ScalarField::constant(unit, 0.01), 1e-5);
  CHECK(low.diffusion({0.4, 0.0}) == doctest::Approx(1e-4).epsilon(1e-14));
  const auto one = diffusion_coverage_law(ScalarField::constant(unit, 1.0), 1e-5);
  CHECK(one.diffusion({0.4, 0.0}) == doctest::Approx(1e-5).epsilon(1e-14));
  CHECK_FALSE(one.has_advection());
  CHECK(one.advection({0.4, 0.0}) == Point{0.0, 0.0});
  CHECK(one.reaction({0.4, 0.0}) == 0.0);

  SUBCASE("D^2 F = c1^2 at sample points") {
    const ScalarField F = bump_field_2d();
    const double c1 = 1e-5;
    const auto laws = diffusion_coverage_law(F, c1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Point p{u(rng), u(rng)};
      const double D = laws.diffusion(p);
      worst = std::max(worst, std::abs(D * D * F(p) / (c1 * c1) - 1.0));
    }
    CHECK(worst <= 1e-15);
  }
  SUBCASE("c2 > 0 adds advection along grad F / F") {
    const auto laws = diffusion_coverage_law(sine_field_1d(), 1.0, 0.5);
    const Point x{0.25, 0.0};
    const double F = sine_field_1d()(x);
    const double dF = 1.0 / (2.0 / std::numbers::pi + 0.01) * std::numbers::pi * std::cos(std::numbers::pi * 0.25);
    CHECK(laws.advection(x)[0] == doctest::Approx(0.5 * dF / F).epsilon(1e-12));
    CHECK(laws.diffusion(x) == doctest::Approx(1.0 / std::sqrt(F) + 0.5).epsilon(1e-14));
  }
}

TEST_CASE("reaction coverage law") {
  const Domain unit = Domain::unit(1);
  const auto flat = reaction_coverage_law(ScalarField::constant(unit, 1.0), 0.2, 3.0);
  CHECK(flat.reaction({0.7, 0.0}) == 3.0);
  CHECK(flat.diffusion({0.7, 0.0}) == 0.2);
  CHECK_FALSE(flat.has_advection());
  const auto s = reaction_coverage_law(sine_field_1d(), 0.2, 1.0);
  CHECK(s.reaction({0.5, 0.0}) == doctest::Approx(1.56197).epsilon(1e-5));
  const auto tiny = reaction_coverage_law(sine_field_1d(), 0.2, 1e-300);
  CHECK(tiny.reaction({0.5, 0.0}) < 1e-299);
}

TEST_CASE("sampled fields") {
  const Domain unit2 = Domain::unit(2);
  std::vector<double> samples;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) samples.push_back(1.0 + i + 0.1 * j * j);
  const auto f = sampled_field(unit2, {5, 4}, samples);

  SUBCASE("interpolates its own samples at nodes") {
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j) CHECK(f({i / 4.0, j / 3.0}) == doctest::Approx(samples[i * 4 + j]).epsilon(1e-15));
  }
  SUBCASE("bilinear between nodes") {
    CHECK(f({0.125, 0.0}) == doctest::Approx(1.5).epsilon(1e-15));
  }
  SUBCASE("non-positive samples are rejected") {
    auto bad = samples;
    bad[7] = 0.0;
    CHECK_THROWS_AS(sampled_field(unit2, {5, 4}, bad), ConfigError);
  }
  SUBCASE("sample count must match") {
    CHECK_THROWS(sampled_field(unit2, {5, 5}, samples));
  }
}

TEST_CASE("grid-sampled gradient converges at second order") {
  const ScalarField exact = sine_field_1d();
  const double c1 = 1.0 / (2.0 / std::numbers::pi + 0.01);
  auto sampled = [&](std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = exact({double(i) / double(n - 1), 0.0});
    return sampled_field(Domain::unit(1), {n, 1}, s);
  };
  auto max_err = [&](const ScalarField& f) {
    double e = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double x = k / 1000.0;
      const double g = c1 * std::numbers::pi * std::cos(std::numbers::pi * x);
      e = std::max(e, std::abs(f.gradient({x, 0.0})[0] - g));
    }
    return e;
  };
  const double e1 = max_err(sampled(41));
  const double e2 = max_err(sampled(81));
  CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("field CSV round trip and validation") {
  testing::TempDir tmp("field");
  SUBCASE("2D round trip") {
    save_field_csv(tmp / "f.csv", bump_field_2d(), {11, 11});
    const auto g = load_field_csv(tmp / "f.csv");
    CHECK(g.domain() == Domain::unit(2));
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j <= 10; ++j) {
        const Point p{i / 10.0, j / 10.0};
        CHECK(g(p) == bump_field_2d()(p));
      }
  }
  SUBCASE("1D round trip") {
    save_field_csv(tmp / "s.csv", sine_field_1d(), {21, 1});
    const auto g = load_field_csv(tmp / "s.csv");
    CHECK(g({0.35, 0.0}) == sine_field_1d()({0.35, 0.0}));
  }
  SUBCASE("non-uniform spacing is a load error") {
    testing::write_file(tmp / "bad.csv", "x,value\n0,1\n0.3,1\n1,1\n");
    CHECK_THROWS_AS(load_field_csv(tmp / "bad.csv"), LoadError);
  }
  SUBCASE("non-positive values are rejected") {
    testing::write_file(tmp / "neg.csv", "x,value\n0,1\n0.5,-1\n1,1\n");
    CHECK_THROWS_AS(load_field_csv(tmp / "neg.csv"), Error);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_field_csv(tmp / "nope.csv"), LoadError); }
}

TEST_CASE("target density on a grid has unit mass") {
  const UniformGrid g(Domain::unit(2), 20, 20);
  CHECK(target_density(bump_field_2d(), g).mass() == doctest::Approx(1.0).epsilon(1e-14));
}
