#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathheat/cylindrical.hpp"
#include "pathheat/flow.hpp"
#include "pathheat/quad.hpp"
#include "pathheat/rng.hpp"

using namespace pathheat;

namespace {

CylindricalSpec spec_square() {
  CylindricalSpec s;
  s.phi = {phi_const()};
  s.f = outer_square();
  return s;
}

CylindricalSpec spec_call() {
  CylindricalSpec s;
  s.phi = {phi_const()};
  s.f = outer_call();
  s.f_kinks = {0.0};
  return s;
}

CylindricalSpec spec_sum2() {
  CylindricalSpec s;
  s.phi = {phi_const(), phi_monomial(1)};
  s.f = outer_sum2();
  return s;
}

SampledPath random_eta(std::uint64_t seed, std::uint64_t idx,
                       std::size_t n = 256) {
  CounterRng rng(seed);
  const double a = rng.normal(idx, 0);
  const double b = rng.normal(idx, 1);
  const double c = rng.normal(idx, 2);
  return SampledPath::from_function(1.0, n, [=](double x) {
    return a + b * x + c * std::sin(3.0 * x);
  });
}

}  // namespace

TEST_CASE("gram matrix values and failure modes") {
  SUBCASE("constant basis") {
    const auto g = gram(spec_square(), 0.25);
    CHECK(g.sigma(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("monomial pair") {
    const auto g = gram(spec_sum2(), 0.0);
    CHECK(g.sigma(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g.sigma(0, 1) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(g.sigma(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  }
  SUBCASE("singular at t = T") {
    CHECK_THROWS_AS(gram(spec_square(), 1.0), SingularGramError);
  }
  SUBCASE("linearly dependent basis") {
    CylindricalSpec s;
    s.phi = {phi_const(), phi_const(2.0)};
    s.f = outer_sum2();
    CHECK_THROWS_AS(gram(s, 0.5), SingularGramError);
  }
  SUBCASE("monotonicity: covariance shrinks with t") {
    const auto spec = spec_sum2();
    for (double t = 0.0; t < 0.8; t += 0.2) {
      const auto g1 = gram(spec, t);
      const auto g2 = gram(spec, t + 0.2);
      const Eigen::MatrixXd diff = g1.sigma - g2.sigma;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff);
      CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    }
  }
}

TEST_CASE("gaussian kernel and its derivatives") {
  const auto spec = spec_square();
  const auto g = gram(spec, 0.0);  // variance 1

  SUBCASE("standard normal value") {
    Eigen::VectorXd z(1);
    z << 0.0;
    CHECK(gaussian_p(g, z) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * 3.14159265358979323846))
              .epsilon(1e-10));
  }
  SUBCASE("heat identity of the kernel") {
    CounterRng rng(5);
    const auto s2 = spec_sum2();
    for (std::size_t k = 0; k < 10; ++k) {
      const double t = 0.8 * rng.uniform(k, 0);
      const auto gm = gram(s2, t);
      Eigen::VectorXd z(2);
      z << rng.normal(k, 1), rng.normal(k, 2);
      const auto d = gaussian_dp(s2, gm, t, z);
      Eigen::VectorXd ph(2);
      ph << 1.0, t;
      const double res = d.dt + 0.5 * ph.dot(d.hess * ph);
      CHECK(std::abs(res) <= 1e-9);
    }
  }
  SUBCASE("gradient against central differences") {
    Eigen::VectorXd z(1);
    z << 0.7;
    const auto d = gaussian_dp(spec, g, 0.0, z);
    const double h = 1e-5;
    Eigen::VectorXd zp = z, zm = z;
    zp(0) += h;
    zm(0) -= h;
    const double fd = (gaussian_p(g, zp) - gaussian_p(g, zm)) / (2 * h);
    CHECK(std::abs(d.grad(0) - fd) / std::abs(fd) <= 1e-6);
  }
}

TEST_CASE("psi closed forms") {
  SUBCASE("squared payoff: y^2 + sigma^2 (T - t)") {
    auto spec = spec_square();
    spec.sigma = 0.8;
    Eigen::VectorXd y(1);
    for (double t : {0.0, 0.3, 0.7}) {
      for (double yy : {-1.0, 0.2, 2.0}) {
        y << yy;
        const double ref = yy * yy + spec.sigma * spec.sigma * (1.0 - t);
        CHECK(psi(spec, t, y) == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }
  SUBCASE("call payoff: Bachelier formula") {
    const auto spec = spec_call();
    Eigen::VectorXd y(1);
    for (double t : {0.0, 0.5, 0.9}) {
      const double s = std::sqrt(1.0 - t);
      for (double yy : {-1.2, 0.0, 0.4, 1.7}) {
        y << yy;
        const double ref = yy * normal_cdf(yy / s) + s * normal_pdf(yy / s);
        CHECK(std::abs(psi(spec, t, y) - ref) <= 1e-8);
      }
    }
  }
  SUBCASE("terminal slice returns f exactly") {
    const auto spec = spec_call();
    Eigen::VectorXd y(1);
    y << 0.37;
    CHECK(psi(spec, 1.0, y) == 0.37);
    CHECK_THROWS_AS(psi(spec, 1.5, y), std::domain_error);
    CHECK_THROWS_AS(psi_derivs(spec, 1.0, y), std::domain_error);
  }
  SUBCASE("degenerate sigma") {
    auto cont = spec_square();
    cont.sigma = 0.0;
    Eigen::VectorXd y(1);
    y << 2.0;
    CHECK(psi(cont, 0.5, y) == 4.0);
    auto disc = spec_call();
    disc.sigma = 0.0;
    disc.f_continuous = false;
    CHECK_THROWS_AS(psi(disc, 0.5, y), DegenerateError);
  }
}

TEST_CASE("feature integrals") {
  SUBCASE("constant basis reads the endpoint") {
    const auto spec = spec_square();
    const auto eta = random_eta(31, 0);
    for (double t : {0.0, 0.25, 0.5}) {
      const auto y = features(spec, t, eta);
      CHECK(y(0) == doctest::Approx(eta(0.0)).epsilon(1e-12));
    }
  }
  SUBCASE("zero path gives zero features") {
    const auto spec = spec_sum2();
    const auto zero = SampledPath::constant(1.0, 64, 0.0);
    const auto y = features(spec, 0.5, zero);
    CHECK(y(0) == 0.0);
    CHECK(y(1) == 0.0);
  }
  SUBCASE("agreement with the closed-interval forward integral") {
    CounterRng rng(17);
    for (std::size_t c = 0; c < 20; ++c) {
      const int deg = 1 + static_cast<int>(c % 3);
      CylindricalSpec spec;
      spec.phi = {phi_monomial(deg)};
      spec.f = outer_linear();
      const auto eta = random_eta(40, c, 512);
      const double t = std::round(
          (0.2 + 0.7 * rng.uniform(c, 0)) * 512.0) / 512.0;
      const auto y = features(spec, t, eta);

      PathMeasure mu;
      mu.horizon = 1.0;
      const auto& p = spec.phi[0];
      mu.density_fn = [&p, t](double x) { return p.f(x + t); };
      mu.density_deriv_fn = [&p, t](double x) { return p.df(x + t); };
      const auto f = BVFunction::from_path(eta);
      const double ref =
          forward_integral(mu, f, {-t, 0.0, IntervalMode::kClosed}).value;
      CHECK(std::abs(y(0) - ref) <= 1e-8);
    }
  }
}

TEST_CASE("solution values and derivatives") {
  auto spec = spec_square();
  spec.sigma = 1.0;
  const CylSolver solver(spec);

  SUBCASE("closed form eta(0)^2 + sigma^2 (T-t)") {
    const auto eta = random_eta(51, 3);
    for (double t : {0.0, 0.25, 0.75}) {
      const double ref = eta(0.0) * eta(0.0) + (1.0 - t);
      CHECK(solver.u(t, eta) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
  SUBCASE("terminal value is exact") {
    const auto eta = random_eta(51, 4);
    CHECK(solver.u(1.0, eta) == eta(0.0) * eta(0.0));
  }
  SUBCASE("linear payoff is a martingale in t") {
    CylindricalSpec lin = spec_square();
    lin.f = outer_linear();
    const CylSolver ls(lin);
    const auto eta = random_eta(51, 5);
    for (double t : {0.0, 0.5, 0.9375}) {
      CHECK(ls.u(t, eta) == doctest::Approx(eta(0.0)).epsilon(1e-10));
    }
  }
  SUBCASE("derivative components of the squared payoff") {
    const auto eta = random_eta(51, 6);
    const double t = 0.5;
    const auto m = solver.du(t, eta);
    CHECK(m.atom0 == doctest::Approx(2.0 * eta(0.0)).epsilon(1e-9));
    for (std::size_t k = 0; k <= m.density->n_steps(); ++k) {
      CHECK(std::abs(m.density->at(k)) <= 1e-12);  // phi' = 0
    }
    const auto k2 = solver.d2u(t, eta);
    CHECK(k2.atom00 == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(solver.dtu(t, eta) == doctest::Approx(-1.0).epsilon(1e-9));
  }
  SUBCASE("pairing du against central differences of u") {
    CylindricalSpec s2 = spec_sum2();
    s2.sigma = 0.7;
    const CylSolver sv(s2);
    const auto eta = random_eta(51, 7);
    const auto g = SampledPath::from_function(
        1.0, 256, [](double x) { return std::cos(2.0 * x); });
    const double t = 0.5;
    const auto m = sv.du(t, eta);
    const double paired = pair_measure(m, g);
    const double eps = 1e-4;
    std::vector<double> vp(257), vm(257);
    for (std::size_t k = 0; k <= 256; ++k) {
      vp[k] = eta.at(k) + eps * g.at(k);
      vm[k] = eta.at(k) - eps * g.at(k);
    }
    const double fd = (sv.u(t, SampledPath(1.0, vp)) -
                       sv.u(t, SampledPath(1.0, vm))) /
                      (2.0 * eps);
    // The du density jumps at x = -t; pairing by the trapezoid rule smears
    // that jump over one grid cell, an O(dx/2 * jump * g(-t)) effect.
    const double jump_budget = 0.5 * eta.dx() * std::abs(std::cos(2.0 * -t));
    CHECK(std::abs(paired - fd) / std::max(1.0, std::abs(fd)) <=
          1e-5 + jump_budget);
  }
  SUBCASE("second derivative kernel is symmetric") {
    CylindricalSpec s2 = spec_sum2();
    const CylSolver sv(s2);
    const auto eta = random_eta(51, 8);
    const auto k2 = sv.d2u(0.5, eta);
    CounterRng rng(52);
    for (std::size_t c = 0; c < 20; ++c) {
      const double a0 = rng.normal(c, 0), a1 = rng.normal(c, 1);
      const auto g = SampledPath::from_function(
          1.0, 256, [&](double x) { return a0 + a1 * x; });
      const auto h = SampledPath::from_function(
          1.0, 256, [&](double x) { return a1 - a0 * x * x; });
      CHECK(std::abs(k2.pair(g, h) - k2.pair(h, g)) <= 1e-12);
    }
  }
}

TEST_CASE("pde residual vanishes for the shipped specs") {
  SUBCASE("squared payoff") {
    const CylSolver solver(spec_square());
    for (std::size_t k = 0; k < 10; ++k) {
      CounterRng rng(61);
      const double t = std::round(0.9 * rng.uniform(k, 0) * 256.0) / 256.0;
      const auto eta = random_eta(62, k);
      CHECK(std::abs(solver.residual(t, eta)) <= 1e-6);
    }
  }
  SUBCASE("two-feature payoff") {
    const CylSolver solver(spec_sum2());
    for (std::size_t k = 0; k < 10; ++k) {
      CounterRng rng(63);
      const double t = std::round(0.9 * rng.uniform(k, 0) * 256.0) / 256.0;
      const auto eta = random_eta(64, k);
      CHECK(std::abs(solver.residual(t, eta)) <= 1e-6);
    }
  }
  SUBCASE("call payoff") {
    const CylSolver solver(spec_call());
    for (std::size_t k = 0; k < 6; ++k) {
      CounterRng rng(65);
      const double t = std::round(0.9 * rng.uniform(k, 0) * 256.0) / 256.0;
      const auto eta = random_eta(66, k);
      CHECK(std::abs(solver.residual(t, eta)) <= 1e-5);
    }
  }
}

TEST_CASE("martingale property of the explicit solution") {
  const CylSolver solver(spec_square());
  const auto zero = SampledPath::constant(1.0, 128, 0.0);
  const double u0 = solver.u(0.0, zero);
  FlowParams fp;
  fp.N = 128;
  fp.seed = 77;
  const std::size_t n_paths = 4000;
  for (double t : {0.25, 0.5, 0.75}) {
    std::vector<double> vals(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
      const auto w = sample_brownian(fp, p);
      vals[p] = solver.u(t, window(w, t));
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(n_paths);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n_paths - 1);
    const double se = std::sqrt(var / static_cast<double>(n_paths));
    CHECK(std::abs(mean - u0) <= 3.0 * se);
  }
}
