#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathheat/path.hpp"
#include "pathheat/rng.hpp"

using namespace pathheat;

TEST_CASE("path evaluation: constant, nodes, interpolation") {
  const auto c = SampledPath::constant(1.0, 8, 1.0);
  CHECK(c(-0.5) == 1.0);

  const auto ident =
      SampledPath::from_function(1.0, 8, [](double x) { return x; });
  for (std::size_t k = 0; k <= 8; ++k) {
    CHECK(ident(ident.node(k)) == ident.node(k));
  }

  const SampledPath two(1.0, {0.0, 1.0});  // N = 1
  CHECK(two(-0.5) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(c(0.5), std::domain_error);
  CHECK_THROWS_AS(c(-1.5), std::domain_error);
}

TEST_CASE("window extraction with constant left extension") {
  const double T = 1.0;
  const auto traj =
      Trajectory::from_function(T, 8, [](double s) { return s; });

  SUBCASE("full window at t=T") {
    const auto w = window(traj, T);
    for (std::size_t k = 0; k <= 8; ++k) {
      CHECK(w.at(k) == doctest::Approx(T + w.node(k)).epsilon(1e-15));
    }
  }
  SUBCASE("degenerate window at t=0") {
    const auto w = window(traj, 0.0);
    for (std::size_t k = 0; k <= 8; ++k) CHECK(w.at(k) == traj.at(0));
  }
  SUBCASE("hand-evaluated interior window") {
    const auto w = window(traj, T / 2);
    CHECK(w(-T / 4) == doctest::Approx(T / 4).epsilon(1e-15));
    CHECK(w(-3 * T / 4) == 0.0);  // left of the window start
  }
  SUBCASE("window at x=0 equals the trajectory value") {
    for (std::size_t k = 0; k <= 8; ++k) {
      CHECK(window(traj, traj.node(k))(0.0) == traj.at(k));
    }
  }
  SUBCASE("off-grid time rejected") {
    CHECK_THROWS_AS(window(traj, 0.3), std::invalid_argument);
  }
}

TEST_CASE("pair_measure examples and bilinearity") {
  const double T = 1.0;
  const auto g = SampledPath::from_function(T, 64, [](double x) { return x; });

  SUBCASE("pure dirac at zero") {
    const auto mu = PathMeasure::dirac0(T);
    CHECK(pair_measure(mu, g) == g(0.0));
  }
  SUBCASE("unit density against unit path") {
    PathMeasure mu;
    mu.horizon = T;
    mu.density = SampledPath::constant(T, 64, 1.0);
    const auto one = SampledPath::constant(T, 64, 1.0);
    CHECK(pair_measure(mu, one) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("dirac difference against the identity") {
    PathMeasure mu;
    mu.horizon = T;
    mu.atom0 = 1.0;
    mu.atoms.emplace_back(-T / 2, -1.0);
    CHECK(pair_measure(mu, g) == doctest::Approx(T / 2).epsilon(1e-14));
  }
  SUBCASE("bilinearity to machine precision") {
    PathMeasure mu1, mu2;
    mu1.horizon = mu2.horizon = T;
    mu1.atom0 = 0.7;
    mu1.density = SampledPath::from_function(
        T, 64, [](double x) { return std::sin(3 * x); });
    mu2.atoms.emplace_back(-0.25, 1.3);
    mu2.density = SampledPath::from_function(
        T, 64, [](double x) { return x * x; });

    PathMeasure sum;
    sum.horizon = T;
    sum.atom0 = mu1.atom0 + mu2.atom0;
    sum.atoms = mu2.atoms;
    std::vector<double> d(65);
    for (std::size_t k = 0; k <= 64; ++k) {
      d[k] = mu1.density->at(k) + mu2.density->at(k);
    }
    sum.density = SampledPath(T, std::move(d));

    const double lhs = pair_measure(sum, g);
    const double rhs = pair_measure(mu1, g) + pair_measure(mu2, g);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
  SUBCASE("horizon mismatch rejected") {
    PathMeasure mu;
    mu.horizon = 2.0;
    CHECK_THROWS_AS(pair_measure(mu, g), std::invalid_argument);
  }
}

TEST_CASE("Kernel2 symmetry on 100 random separable pairs") {
  const double T = 1.0;
  CounterRng rng(2024);

  Kernel2 k;
  k.horizon = T;
  k.atom00 = 0.4;
  k.cross_x = SampledPath::from_function(T, 32, [](double x) { return x; });
  k.cross_y = *k.cross_x;  // symmetric object
  const auto a =
      SampledPath::from_function(T, 32, [](double x) { return 1 + x; });
  const auto b = SampledPath::from_function(
      T, 32, [](double x) { return std::cos(2 * x); });
  k.separable.emplace_back(a, b);
  k.separable.emplace_back(b, a);

  const auto kt = k.transposed();
  for (std::size_t c = 0; c < 100; ++c) {
    const double p0 = rng.normal(c, 0), p1 = rng.normal(c, 1);
    const double q0 = rng.normal(c, 2), q1 = rng.normal(c, 3);
    const auto g = SampledPath::from_function(
        T, 32, [&](double x) { return p0 + p1 * x; });
    const auto h = SampledPath::from_function(
        T, 32, [&](double x) { return q0 + q1 * x * x; });
    CHECK(std::abs(k.pair(g, h) - k.pair(h, g)) <= 1e-12);
    CHECK(std::abs(k.pair(g, h) - kt.pair(g, h)) <= 1e-12);
  }
}

TEST_CASE("Kernel2 window helpers against direct integrals") {
  const double T = 1.0;
  Kernel2 k;
  k.horizon = T;
  // Constant kernel 2 on the plane, like the second derivative of a squared
  // path integral; analytic window masses are (window length)^2 * 2.
  k.separable.emplace_back(SampledPath::constant(T, 64, 2.0),
                           SampledPath::constant(T, 64, 1.0));
  const double a = -0.75;
  CHECK(k.window_mass(a) == doctest::Approx(2.0 * 0.75 * 0.75).epsilon(1e-12));
  CHECK(k.row_integral(-0.3, a) == doctest::Approx(2.0 * 0.75).epsilon(1e-12));
  CHECK(k.plane_at(-0.3, -0.6) == doctest::Approx(2.0).epsilon(1e-15));
}
