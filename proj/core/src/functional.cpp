#include "pathheat/functional.hpp"

#include <cmath>
#include <numbers>

#include "pathheat/rng.hpp"

namespace pathheat {

Weight Weight::from_functions(double horizon, std::size_t n_steps,
                              const std::function<double(double)>& g,
                              const std::function<double(double)>& dg) {
  return Weight{SampledPath::from_function(horizon, n_steps, g),
                SampledPath::from_function(horizon, n_steps, dg)};
}

namespace {

double pair_weight(const Weight& w, const SampledPath& eta) {
  return trapezoid_product(w.g, eta);
}

SampledPath scaled(const SampledPath& p, double c) {
  std::vector<double> v(p.values());
  for (double& x : v) x *= c;
  return SampledPath(p.horizon(), std::move(v));
}

double weight_bound(const Weight& w) {
  // |F(eta)| <= T * sup|g| * sup|eta|
  return w.g.horizon() * w.g.sup_norm();
}

double h1_of(const Weight& w, double coeff) {
  const double l2 = std::sqrt(trapezoid_product(w.g, w.g) +
                              trapezoid_product(w.dg, w.dg));
  return std::abs(coeff) * l2;
}

}  // namespace

FunctionalH make_linear(const Weight& w) {
  FunctionalH h;
  h.eval = [w](const SampledPath& eta) { return pair_weight(w, eta); };
  h.d1 = [w](const SampledPath&) { return FirstDerivative{w.g, w.dg}; };
  h.d2 = [w](const SampledPath& eta) {
    Kernel2 k;
    k.horizon = eta.horizon();
    return k;
  };
  h.growth_p = 1.0;
  h.growth_c = weight_bound(w) + 1.0;
  h.h1_bound = [w](double) { return h1_of(w, 1.0) * 1.000001; };
  return h;
}

FunctionalH make_quadratic(const Weight& w) {
  FunctionalH h;
  h.eval = [w](const SampledPath& eta) {
    const double f = pair_weight(w, eta);
    return f * f;
  };
  h.d1 = [w](const SampledPath& eta) {
    const double f = pair_weight(w, eta);
    return FirstDerivative{scaled(w.g, 2.0 * f), scaled(w.dg, 2.0 * f)};
  };
  h.d2 = [w](const SampledPath& eta) {
    Kernel2 k;
    k.horizon = eta.horizon();
    k.separable.emplace_back(scaled(w.g, 2.0), w.g);
    return k;
  };
  h.growth_p = 2.0;
  const double b = weight_bound(w);
  h.growth_c = b * b + 1.0;
  h.h1_bound = [w, b](double sup) { return h1_of(w, 2.0 * b * sup) + 1e-9; };
  return h;
}

FunctionalH make_cubic(const Weight& w) {
  FunctionalH h;
  h.eval = [w](const SampledPath& eta) {
    const double f = pair_weight(w, eta);
    return f * f * f;
  };
  h.d1 = [w](const SampledPath& eta) {
    const double f = pair_weight(w, eta);
    return FirstDerivative{scaled(w.g, 3.0 * f * f),
                           scaled(w.dg, 3.0 * f * f)};
  };
  h.d2 = [w](const SampledPath& eta) {
    const double f = pair_weight(w, eta);
    Kernel2 k;
    k.horizon = eta.horizon();
    k.separable.emplace_back(scaled(w.g, 6.0 * f), w.g);
    return k;
  };
  h.growth_p = 3.0;
  const double b = weight_bound(w);
  h.growth_c = b * b * b + 1.0;
  h.h1_bound = [w, b](double sup) {
    return h1_of(w, 3.0 * b * b * sup * sup) + 1e-9;
  };
  return h;
}

FunctionalH make_product(const Weight& w1, const Weight& w2) {
  FunctionalH h;
  h.eval = [w1, w2](const SampledPath& eta) {
    return pair_weight(w1, eta) * pair_weight(w2, eta);
  };
  h.d1 = [w1, w2](const SampledPath& eta) {
    const double f1 = pair_weight(w1, eta);
    const double f2 = pair_weight(w2, eta);
    std::vector<double> d(w1.g.values());
    std::vector<double> dd(w1.dg.values());
    for (std::size_t k = 0; k < d.size(); ++k) {
      d[k] = f2 * w1.g.at(k) + f1 * w2.g.at(k);
      dd[k] = f2 * w1.dg.at(k) + f1 * w2.dg.at(k);
    }
    return FirstDerivative{SampledPath(w1.g.horizon(), std::move(d)),
                           SampledPath(w1.g.horizon(), std::move(dd))};
  };
  h.d2 = [w1, w2](const SampledPath& eta) {
    Kernel2 k;
    k.horizon = eta.horizon();
    k.separable.emplace_back(w1.g, w2.g);
    k.separable.emplace_back(w2.g, w1.g);
    return k;
  };
  h.growth_p = 2.0;
  const double b = weight_bound(w1) * weight_bound(w2);
  h.growth_c = b + 1.0;
  h.h1_bound = [w1, w2](double sup) {
    return (h1_of(w1, weight_bound(w2)) + h1_of(w2, weight_bound(w1))) * sup +
           1e-9;
  };
  return h;
}

void enforce_growth(const FunctionalH& h, const SampledPath& eta,
                    double value) {
  const double bound =
      h.growth_c * (1.0 + std::pow(eta.sup_norm(), h.growth_p));
  if (!(std::abs(value) <= bound)) {
    throw GrowthViolationError(
        "terminal functional violates its polynomial growth certificate: |H|="
        + std::to_string(std::abs(value)) + " > " + std::to_string(bound));
  }
}

PreflightReport preflight(const FunctionalH& h, double horizon,
                          std::size_t n_steps, std::size_t n_probes,
                          std::uint64_t seed) {
  PreflightReport rep;
  CounterRng rng(seed);
  for (std::size_t p = 0; p < n_probes; ++p) {
    // Smooth random probe: a + b sin(pi x / T) + c x/T with O(1) coefficients.
    const double a = 2.0 * rng.normal(p, 0);
    const double b = rng.normal(p, 1);
    const double c = rng.normal(p, 2);
    const auto eta = SampledPath::from_function(
        horizon, n_steps, [&](double x) {
          return a + b * std::sin(std::numbers::pi * x / horizon) +
                 c * x / horizon;
        });
    const double v = h.eval(eta);
    const double gb =
        h.growth_c * (1.0 + std::pow(eta.sup_norm(), h.growth_p));
    rep.max_growth_ratio = std::max(rep.max_growth_ratio, std::abs(v) / gb);
    if (h.d1 && h.h1_bound) {
      const auto d = h.d1(eta);
      const double h1 = std::sqrt(
          trapezoid_product(d.density, d.density) +
          trapezoid_product(d.density_deriv, d.density_deriv));
      const double hb = h.h1_bound(eta.sup_norm());
      if (hb > 0.0) {
        rep.max_h1_ratio = std::max(rep.max_h1_ratio, h1 / hb);
      }
    }
  }
  rep.pass = rep.max_growth_ratio <= 1.0 && rep.max_h1_ratio <= 1.0;
  return rep;
}

}  // namespace pathheat
