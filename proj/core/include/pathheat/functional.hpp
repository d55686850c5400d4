#pragma once

#include <functional>
#include <utility>

#include "pathheat/path.hpp"

namespace pathheat {

// First Frechet derivative of a path functional, represented by its
// absolutely continuous density on [-T,0] together with the density's own
// spatial derivative (needed by Stieltjes-form forward integrals).
struct FirstDerivative {
  SampledPath density;
  SampledPath density_deriv;
};

// Twice Frechet-differentiable functional H on paths over [-T,0] with
// analytic first and second derivatives and a polynomial growth certificate
// |H(eta)| <= growth_c * (1 + ||eta||_sup^growth_p).
struct FunctionalH {
  std::function<double(const SampledPath&)> eval;
  std::function<FirstDerivative(const SampledPath&)> d1;
  std::function<Kernel2(const SampledPath&)> d2;
  double growth_p = 1.0;
  double growth_c = 1.0;
  // Bound for the H^1 norm of the derivative density as a function of the
  // sup norm of the argument path (used by the preflight diagnostics).
  std::function<double(double)> h1_bound;
};

class GrowthViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weight profile g on [-T,0] with its derivative, both sampled on a shared
// grid; the integral functional below is F(eta) = int_{-T}^0 eta g dx.
struct Weight {
  SampledPath g;
  SampledPath dg;

  static Weight from_functions(double horizon, std::size_t n_steps,
                               const std::function<double(double)>& g,
                               const std::function<double(double)>& dg);
};

// H(eta) = int eta g dx (linear, second derivative vanishes).
FunctionalH make_linear(const Weight& w);
// H(eta) = (int eta g dx)^2.
FunctionalH make_quadratic(const Weight& w);
// H(eta) = (int eta g dx)^3.
FunctionalH make_cubic(const Weight& w);
// H(eta) = (int eta g1 dx)(int eta g2 dx).
FunctionalH make_product(const Weight& w1, const Weight& w2);

// Throws GrowthViolationError if |H(eta)| exceeds the declared growth bound.
void enforce_growth(const FunctionalH& h, const SampledPath& eta,
                    double value);

struct PreflightReport {
  double max_h1_ratio = 0.0;     // observed / declared H^1 bound
  double max_growth_ratio = 0.0; // observed |H| / growth bound
  bool pass = false;
};

// Probe-based hypothesis check: evaluates H and its derivative on random
// smooth probe paths and compares against the declared certificates.
PreflightReport preflight(const FunctionalH& h, double horizon,
                          std::size_t n_steps, std::size_t n_probes,
                          std::uint64_t seed);

}  // namespace pathheat
