#include "pathheat/reg_calculus.hpp"

#include <algorithm>
#include <cmath>

#include "pathheat/quad.hpp"

namespace pathheat {

namespace {
constexpr double kTol = 1e-12;
}

BVFunction BVFunction::from_function(double lo, double hi, std::size_t n_steps,
                                     std::function<double(double)> f,
                                     std::function<double(double)> df) {
  BVFunction b;
  b.lo = lo;
  b.hi = hi;
  b.samples.resize(n_steps + 1);
  const double d = (hi - lo) / static_cast<double>(n_steps);
  for (std::size_t k = 0; k <= n_steps; ++k) {
    b.samples[k] = f(lo + static_cast<double>(k) * d);
  }
  if (df) {
    b.deriv_samples.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
      b.deriv_samples[k] = df(lo + static_cast<double>(k) * d);
    }
  }
  b.fn = std::move(f);
  b.dfn = std::move(df);
  return b;
}

BVFunction BVFunction::from_path(const SampledPath& p) {
  BVFunction b;
  b.lo = -p.horizon();
  b.hi = 0.0;
  b.samples = p.values();
  return b;
}

static double interp(const std::vector<double>& v, double lo, double hi,
                     double x) {
  const auto n = v.size() - 1;
  const double d = (hi - lo) / static_cast<double>(n);
  double kf = (x - lo) / d;
  kf = std::clamp(kf, 0.0, static_cast<double>(n));
  const auto k0 = static_cast<std::size_t>(
      std::min(std::floor(kf), static_cast<double>(n - 1)));
  const double w = kf - static_cast<double>(k0);
  return v[k0] * (1.0 - w) + v[k0 + 1] * w;
}

double BVFunction::eval(double x) const {
  if (fn) return fn(x);
  return interp(samples, lo, hi, x);
}

double BVFunction::deriv(double x) const {
  if (dfn) return dfn(x);
  if (!deriv_samples.empty()) return interp(deriv_samples, lo, hi, x);
  // First-order differencing of samples.
  const auto n = samples.size() - 1;
  const double d = (hi - lo) / static_cast<double>(n);
  auto k = static_cast<std::size_t>(
      std::clamp((x - lo) / d, 0.0, static_cast<double>(n - 1)));
  return (samples[k + 1] - samples[k]) / d;
}

double BVFunction::discrete_total_variation() const {
  double tv = 0.0;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    tv += std::abs(samples[k + 1] - samples[k]);
  }
  return tv;
}

double extend_eval(const BVFunction& f, const IntervalSpec& iv, double x) {
  if (x > iv.b) return f.eval(iv.b);
  if (x < iv.a) {
    return iv.mode == IntervalMode::kOpen ? f.eval(iv.a) : 0.0;
  }
  return f.eval(x);
}

double forward_integral_eps(const PathMeasure& mu, const BVFunction& f,
                            const IntervalSpec& iv, double eps) {
  if (!(eps > 0.0)) {
    throw std::domain_error("forward_integral_eps: eps must be positive");
  }
  iv.validate(mu.horizon);
  const auto diffq = [&](double x) {
    return (extend_eval(f, iv, x + eps) - extend_eval(f, iv, x)) / eps;
  };

  double s = 0.0;
  if (std::abs(iv.b) <= kTol && mu.atom0 != 0.0) s += mu.atom0 * diffq(0.0);
  for (const auto& [x, w] : mu.atoms) {
    const bool in = (x <= iv.b + kTol) &&
                    (iv.mode == IntervalMode::kOpen ? x > iv.a + kTol
                                                    : x >= iv.a - kTol);
    if (in) s += w * diffq(x);
  }

  if (mu.has_density() && iv.b > iv.a) {
    const double split = iv.b - eps;  // kink of x -> f_ext(x+eps)
    const auto piece = [&](double lo, double hi) {
      if (hi <= lo) return 0.0;
      if (mu.density_fn) {
        return integrate_gl([&](double x) { return diffq(x) * mu.density_fn(x); },
                            lo, hi);
      }
      // Sampled density: trapezoid on a uniform refinement of the piece.
      const std::size_t n = std::max<std::size_t>(
          32, static_cast<std::size_t>(
                  std::ceil((hi - lo) / mu.density->dx())));
      const double d = (hi - lo) / static_cast<double>(n);
      double acc = 0.0;
      for (std::size_t k = 0; k <= n; ++k) {
        const double x = lo + static_cast<double>(k) * d;
        const double v = diffq(x) * (*mu.density)(x);
        acc += (k == 0 || k == n) ? 0.5 * v : v;
      }
      return acc * d;
    };
    if (split > iv.a && split < iv.b) {
      s += piece(iv.a, split) + piece(split, iv.b);
    } else {
      s += piece(iv.a, iv.b);
    }
  }
  return s;
}

namespace {

// int_{]a,b]} mu^{ac}(x-) df(x); mu absolutely continuous.
double stieltjes_mu_df(const PathMeasure& mu, const BVFunction& f, double a,
                       double b) {
  if (f.has_deriv()) {
    if (mu.density_fn) {
      return integrate_gl(
          [&](double x) { return mu.density_fn(x) * f.deriv(x); }, a, b);
    }
    if (mu.density) {
      // Trapezoid on the density grid restricted to [a,b].
      const std::size_t n = std::max<std::size_t>(
          32, static_cast<std::size_t>(std::ceil((b - a) / mu.density->dx())));
      const double d = (b - a) / static_cast<double>(n);
      double acc = 0.0;
      for (std::size_t k = 0; k <= n; ++k) {
        const double x = a + static_cast<double>(k) * d;
        const double v = (*mu.density)(x)*f.deriv(x);
        acc += (k == 0 || k == n) ? 0.5 * v : v;
      }
      return acc * d;
    }
    return 0.0;
  }
  // Left-point Stieltjes sums over f's sample grid; the left limit mu(x-) is
  // realized as the value at the left cell node.
  const auto n = f.samples.size() - 1;
  const double d = (f.hi - f.lo) / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x0 = f.lo + static_cast<double>(k) * d;
    const double x1 = x0 + d;
    if (x1 <= a + kTol || x0 >= b - kTol) continue;
    acc += mu.density_at(x0) * (f.samples[k + 1] - f.samples[k]);
  }
  return acc;
}

// int_a^b f(x) d mu^{ac}(x); mu^{ac} cadlag with bounded variation.
double stieltjes_f_dmu(const PathMeasure& mu, const BVFunction& f, double a,
                       double b) {
  if (mu.density_deriv_fn) {
    if (f.fn) {
      return integrate_gl(
          [&](double x) { return f.eval(x) * mu.density_deriv_fn(x); }, a, b);
    }
    // f sampled only: trapezoid on f's grid nodes so that evaluations of two
    // measures against the same f hit identical nodes (bilinearity is then
    // exact in floating point).
    const auto n = f.samples.size() - 1;
    const double fd = (f.hi - f.lo) / static_cast<double>(n);
    const std::size_t m =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::llround((b - a) / fd)));
    const double d = (b - a) / static_cast<double>(m);
    double acc = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
      const double x = a + static_cast<double>(k) * d;
      const double v = f.eval(x) * mu.density_deriv_fn(x);
      acc += (k == 0 || k == m) ? 0.5 * v : v;
    }
    return acc * d;
  }
  // Differencing of the sampled density.
  const auto& den = *mu.density;
  double acc = 0.0;
  for (std::size_t k = 0; k < den.n_steps(); ++k) {
    const double x0 = den.node(k);
    const double x1 = den.node(k + 1);
    if (x1 <= a + kTol || x0 >= b - kTol) continue;
    acc += 0.5 * (f.eval(x0) + f.eval(x1)) * (den.at(k + 1) - den.at(k));
  }
  return acc;
}

}  // namespace

ForwardIntegralResult forward_integral(const PathMeasure& mu,
                                       const BVFunction& f,
                                       const IntervalSpec& iv) {
  iv.validate(mu.horizon);
  ForwardIntegralResult res;

  const bool pure_ac = mu.atoms.empty() && mu.atom0 == 0.0;
  const bool mu_bv = mu.has_density();
  // Point masses pass to the limit directly: an atom at x contributes
  // w*f'(x) for x interior, and 0 at x = b where the extension is flat.
  const auto atom_limit = [&]() {
    double s = 0.0;  // atom0 sits at 0; if b = 0 its difference quotient is 0
    for (const auto& [x, w] : mu.atoms) {
      const bool in = (x <= iv.b + kTol) &&
                      (iv.mode == IntervalMode::kOpen ? x > iv.a + kTol
                                                      : x >= iv.a - kTol);
      if (!in) continue;
      if (x >= iv.b - kTol) continue;  // flat extension to the right of b
      s += w * f.deriv(x);
    }
    return s;
  };
  const bool atoms_ok = f.has_deriv() || pure_ac;

  if (atoms_ok) {
    if (iv.mode == IntervalMode::kOpen && f.is_bv && mu_bv) {
      res.value = stieltjes_mu_df(mu, f, iv.a, iv.b) + atom_limit();
      res.method = IntegralMethod::kClosedForm;
      return res;
    }
    if (mu_bv) {
      const double mb = mu.density_at(iv.b);
      const double fb = f.eval(iv.b);
      if (iv.mode == IntervalMode::kClosed) {
        res.value = mb * fb - stieltjes_f_dmu(mu, f, iv.a, iv.b) + atom_limit();
        res.method = IntegralMethod::kClosedForm;
        return res;
      }
      const double ma = mu.density_at(iv.a);
      const double fa = f.eval(iv.a);
      res.value =
          mb * fb - ma * fa - stieltjes_f_dmu(mu, f, iv.a, iv.b) + atom_limit();
      res.method = IntegralMethod::kClosedForm;
      return res;
    }
    if (!mu.has_density()) {  // atoms only
      res.value = atom_limit();
      res.method = IntegralMethod::kClosedForm;
      return res;
    }
  }

  // eps-limit with Richardson extrapolation of the last three levels.
  res.method = IntegralMethod::kEpsLimit;
  for (int k = 4; k <= 12; ++k) {
    const double eps = std::ldexp(1.0, -k);
    res.eps_table.emplace_back(eps, forward_integral_eps(mu, f, iv, eps));
  }
  const auto& tab = res.eps_table;
  // Convergence gate: the level-to-level gaps must shrink with eps.  Fit the
  // slope of log(gap) against log(eps) over the gaps that are numerically
  // resolved; a non-positive slope means the sequence has no eps-limit.
  {
    const double scale = 1.0 + std::abs(tab.back().second);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t kept = 0;
    for (std::size_t k = 1; k < tab.size(); ++k) {
      const double gap = std::abs(tab[k].second - tab[k - 1].second);
      if (gap <= 1e-13 * scale) continue;
      const double x = std::log(tab[k].first);
      const double y = std::log(gap);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++kept;
    }
    if (kept >= 2) {
      const double n = static_cast<double>(kept);
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      if (!(slope > 0.0)) throw NonConvergentError(res.eps_table);
    }
  }

  const double i0 = tab[tab.size() - 3].second;
  const double i1 = tab[tab.size() - 2].second;
  const double i2 = tab[tab.size() - 1].second;
  const double r1a = 2.0 * i1 - i0;
  const double r1b = 2.0 * i2 - i1;
  const double r2 = (4.0 * r1b - r1a) / 3.0;
  res.value = r2;
  res.error_estimate =
      std::abs(r2 - r1b) + 1e-14 * (1.0 + std::abs(r2));
  return res;
}

}  // namespace pathheat
