#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathheat/clark_ocone.hpp"
#include "pathheat/cylindrical.hpp"
#include "pathheat/functional.hpp"
#include "pathheat/smooth.hpp"

using namespace pathheat;

namespace {

DriverSpec brownian(std::size_t n, std::uint64_t seed) {
  DriverSpec d;
  d.kind = DriverKind::kBrownian;
  d.N = n;
  d.seed = seed;
  return d;
}

}  // namespace

TEST_CASE("driver sampling") {
  SUBCASE("brownian kind matches the shared generator") {
    const DriverSampler s(brownian(64, 9));
    const auto x = s.sample(0);
    CHECK(x.at(0) == 0.0);
    const DriverSampler s2(brownian(64, 9));
    const auto y = s2.sample(0);
    for (std::size_t k = 0; k <= 64; ++k) CHECK(x.at(k) == y.at(k));
  }
  SUBCASE("fbm normalization: unit variance at t=1") {
    DriverSpec d = brownian(256, 10);
    d.kind = DriverKind::kBrownianPlusFbm;
    d.sigma = 0.0;  // isolate the fractional component
    d.hurst = 0.75;
    const DriverSampler s(d);
    const std::size_t n_paths = 20000;
    double v = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const double x = s.sample(p).at(256);
      v += x * x;
    }
    v /= static_cast<double>(n_paths);
    CHECK(std::abs(v - 1.0) <= 3.0 * std::sqrt(2.0 / n_paths));
  }
  SUBCASE("quadratic variation of the sum is sigma^2 T") {
    DriverSpec d = brownian(1024, 11);
    d.kind = DriverKind::kBrownianPlusFbm;
    d.sigma = 0.8;
    d.hurst = 0.75;
    const DriverSampler s(d);
    double qv = 0.0;
    const std::size_t n_paths = 50;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const auto x = s.sample(p);
      for (std::size_t k = 0; k < 1024; ++k) {
        const double dx = x.at(k + 1) - x.at(k);
        qv += dx * dx;
      }
    }
    qv /= static_cast<double>(n_paths);
    CHECK(std::abs(qv - 0.64) <= 0.05 * 0.64);
  }
  SUBCASE("invalid hurst rejected") {
    DriverSpec d = brownian(64, 12);
    d.kind = DriverKind::kBrownianPlusFbm;
    d.hurst = 0.4;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
}

TEST_CASE("left-point stochastic integral") {
  const DriverSampler s(brownian(512, 13));

  SUBCASE("unit integrand telescopes") {
    const auto x = s.sample(0);
    std::vector<double> a(512, 1.0);
    CHECK(forward_stochastic_integral(a, x) ==
          doctest::Approx(x.at(512) - x.at(0)).epsilon(1e-12));
  }
  SUBCASE("zero integrand") {
    const auto x = s.sample(1);
    std::vector<double> a(512, 0.0);
    CHECK(forward_stochastic_integral(a, x) == 0.0);
  }
  SUBCASE("ito oracle for int W dW") {
    const std::size_t n_paths = 2000;
    double mean = 0.0, l2 = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const auto x = s.sample(p);
      std::vector<double> a(512);
      for (std::size_t k = 0; k < 512; ++k) a[k] = x.at(k);
      const double s1 = forward_stochastic_integral(a, x);
      const double ito = 0.5 * (x.at(512) * x.at(512) - 1.0);
      mean += s1;
      l2 += (s1 - ito) * (s1 - ito);
    }
    mean /= static_cast<double>(n_paths);
    l2 = std::sqrt(l2 / static_cast<double>(n_paths));
    CHECK(std::abs(mean) <= 3.0 / std::sqrt(static_cast<double>(n_paths)));
    CHECK(l2 <= 5.0 * std::sqrt(1.0 / 512.0));  // O(sqrt(dt)) strong error
  }
}

TEST_CASE("window prefixes enforce adaptedness") {
  const DriverSampler s(brownian(64, 14));
  const auto x = s.sample(0);
  // Poison the tail beyond step 32 and check the prefix window ignores it.
  auto poisoned = x.values();
  for (std::size_t k = 33; k <= 64; ++k) {
    poisoned[k] = std::numeric_limits<double>::quiet_NaN();
  }
  const auto eta = window_prefix(poisoned, 1.0, 32);
  for (std::size_t k = 0; k <= 64; ++k) {
    CHECK(std::isfinite(eta.at(k)));
  }
  CHECK(eta(0.0) == x.at(32));
  CHECK(eta(-0.25) == x.at(16));
  CHECK(eta(-0.75) == x.at(0));  // constant extension region
}

TEST_CASE("representation for cylindrical payoffs") {
  SUBCASE("linear payoff telescopes pathwise") {
    CylindricalSpec spec;
    spec.phi = {phi_const()};
    spec.f = outer_linear();
    const CylSolver solver(spec);
    const auto zero = SampledPath::constant(1.0, 128, 0.0);
    const auto rep = representation_check(
        [&](double t, const SampledPath& eta) {
          return solver.delta0(t, eta);
        },
        [&](const SampledPath& eta) { return solver.u(1.0, eta); },
        solver.u(0.0, zero), brownian(128, 15), {128}, 40);
    CHECK(rep.rmse_rel <= 1e-12);
  }
  SUBCASE("quadratic payoff error decays with the grid") {
    CylindricalSpec spec;
    spec.phi = {phi_const()};
    spec.f = outer_square();
    const CylSolver solver(spec);
    const auto zero = SampledPath::constant(1.0, 128, 0.0);
    const auto rep = representation_check(
        [&](double t, const SampledPath& eta) {
          return solver.delta0(t, eta);
        },
        [&](const SampledPath& eta) { return solver.u(1.0, eta); },
        solver.u(0.0, zero), brownian(128, 16), {64, 128, 256}, 800);
    REQUIRE(rep.convergence.size() == 3);
    CHECK(rep.convergence[2].rmse_rel < rep.convergence[0].rmse_rel);
    CHECK(rep.rmse_rel <= 0.10);
  }
}

TEST_CASE("representation for a smooth functional with inner monte carlo") {
  SmoothParams sp;
  sp.N = 64;
  const auto w = Weight::from_functions(
      1.0, 64, [](double) { return 1.0; }, [](double) { return 0.0; });
  const SmoothSolver solver(make_quadratic(w), sp);
  const auto zero = SampledPath::constant(1.0, 64, 0.0);
  const auto u0 = solver.u(0.0, zero, 20000, 99);
  const auto rep = representation_check(
      [&](double t, const SampledPath& eta) {
        return solver.delta0(t, eta, 1000, 99).value;
      },
      [&](const SampledPath& eta) { return solver.u(1.0, eta, 1, 99).value; },
      u0.value, brownian(64, 17), {64}, 60);
  CHECK(rep.rmse_rel <= 0.25);
}
