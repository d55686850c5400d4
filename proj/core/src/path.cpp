#include "pathheat/path.hpp"

#include <algorithm>
#include <cmath>

namespace pathheat {

namespace detail {

namespace {
constexpr double kGridSnapTol = 1e-9;
}

double GridSamples::eval(double x) const {
  const double d = dx();
  const double tol = kGridSnapTol * std::max(1.0, hi - lo);
  if (x < lo - tol || x > hi + tol) {
    throw std::domain_error("evaluation point outside the grid domain");
  }
  const double kf = (x - lo) / d;
  const auto n = n_steps();
  const double kr = std::round(kf);
  if (std::abs(kf - kr) * d <= tol && kr >= 0.0 &&
      kr <= static_cast<double>(n)) {
    return v[static_cast<std::size_t>(kr)];
  }
  std::size_t k0 = static_cast<std::size_t>(std::clamp(
      std::floor(kf), 0.0, static_cast<double>(n - 1)));
  const double w = kf - static_cast<double>(k0);
  return v[k0] * (1.0 - w) + v[k0 + 1] * w;
}

std::size_t GridSamples::index_of(double x, const char* what) const {
  const double kf = (x - lo) / dx();
  const double kr = std::round(kf);
  const double tol = kGridSnapTol * std::max(1.0, hi - lo) / dx();
  if (std::abs(kf - kr) > tol || kr < 0.0 ||
      kr > static_cast<double>(n_steps())) {
    throw std::invalid_argument(std::string(what) +
                                ": coordinate is not a grid node");
  }
  return static_cast<std::size_t>(kr);
}

bool GridSamples::on_grid(double x) const {
  const double kf = (x - lo) / dx();
  const double kr = std::round(kf);
  const double tol = kGridSnapTol * std::max(1.0, hi - lo) / dx();
  return std::abs(kf - kr) <= tol && kr >= 0.0 &&
         kr <= static_cast<double>(n_steps());
}

}  // namespace detail

static void check_shape(double horizon, const std::vector<double>& values) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("horizon must be positive");
  }
  if (values.size() < 2) {
    throw std::invalid_argument("need at least two grid values");
  }
}

SampledPath::SampledPath(double horizon, std::vector<double> values) {
  check_shape(horizon, values);
  g_ = {-horizon, 0.0, std::move(values)};
}

SampledPath SampledPath::constant(double horizon, std::size_t n_steps,
                                  double value) {
  return SampledPath(horizon, std::vector<double>(n_steps + 1, value));
}

SampledPath SampledPath::from_function(double horizon, std::size_t n_steps,
                                       const std::function<double(double)>& f) {
  std::vector<double> v(n_steps + 1);
  const double d = horizon / static_cast<double>(n_steps);
  for (std::size_t k = 0; k <= n_steps; ++k) {
    v[k] = f(-horizon + static_cast<double>(k) * d);
  }
  return SampledPath(horizon, std::move(v));
}

double SampledPath::operator()(double x) const { return g_.eval(x); }

double SampledPath::sup_norm() const {
  double m = 0.0;
  for (double x : g_.v) m = std::max(m, std::abs(x));
  return m;
}

Trajectory::Trajectory(double horizon, std::vector<double> values) {
  check_shape(horizon, values);
  g_ = {0.0, horizon, std::move(values)};
}

Trajectory Trajectory::constant(double horizon, std::size_t n_steps,
                                double value) {
  return Trajectory(horizon, std::vector<double>(n_steps + 1, value));
}

Trajectory Trajectory::from_function(double horizon, std::size_t n_steps,
                                     const std::function<double(double)>& f) {
  std::vector<double> v(n_steps + 1);
  const double d = horizon / static_cast<double>(n_steps);
  for (std::size_t k = 0; k <= n_steps; ++k) {
    v[k] = f(static_cast<double>(k) * d);
  }
  return Trajectory(horizon, std::move(v));
}

double Trajectory::operator()(double t) const { return g_.eval(t); }

std::size_t Trajectory::time_index(double t) const {
  return g_.index_of(t, "Trajectory::time_index");
}

SampledPath window(const Trajectory& traj, double t) {
  const std::size_t it = traj.time_index(t);
  const std::size_t n = traj.n_steps();
  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    // eta(x_k) = traj(t + x_k) with x_k = -T + k*dx, left-extended by traj(0).
    const std::ptrdiff_t j =
        static_cast<std::ptrdiff_t>(it) + static_cast<std::ptrdiff_t>(k) -
        static_cast<std::ptrdiff_t>(n);
    v[k] = (j < 0) ? traj.at(0) : traj.at(static_cast<std::size_t>(j));
  }
  return SampledPath(traj.horizon(), std::move(v));
}

double PathMeasure::density_at(double x) const {
  if (density_fn) return density_fn(x);
  if (density) return (*density)(x);
  return 0.0;
}

void PathMeasure::validate() const {
  for (const auto& [x, w] : atoms) {
    (void)w;
    if (x < -horizon || x >= 0.0) {
      throw std::invalid_argument(
          "PathMeasure atom location must lie in [-T,0)");
    }
  }
  if (density && density->horizon() != horizon) {
    throw std::invalid_argument("PathMeasure density horizon mismatch");
  }
}

double PathMeasure::total_variation() const {
  double tv = std::abs(atom0);
  for (const auto& [x, w] : atoms) {
    (void)x;
    tv += std::abs(w);
  }
  if (density) {
    const auto& p = *density;
    const double d = p.dx();
    for (std::size_t k = 0; k < p.n_steps(); ++k) {
      tv += 0.5 * d * (std::abs(p.at(k)) + std::abs(p.at(k + 1)));
    }
  }
  return tv;
}

double trapezoid_product(const SampledPath& a, const SampledPath& b) {
  if (a.n_steps() != b.n_steps() || a.horizon() != b.horizon()) {
    throw std::invalid_argument("trapezoid_product: grids differ");
  }
  const double d = a.dx();
  double s = 0.5 * (a.at(0) * b.at(0) + a.at(a.n_steps()) * b.at(a.n_steps()));
  for (std::size_t k = 1; k < a.n_steps(); ++k) s += a.at(k) * b.at(k);
  return s * d;
}

double trapezoid(const SampledPath& a) {
  const double d = a.dx();
  double s = 0.5 * (a.at(0) + a.at(a.n_steps()));
  for (std::size_t k = 1; k < a.n_steps(); ++k) s += a.at(k);
  return s * d;
}

double pair_measure(const PathMeasure& mu, const SampledPath& g) {
  if (std::abs(mu.horizon - g.horizon()) >
      1e-12 * std::max(1.0, mu.horizon)) {
    throw std::invalid_argument("pair_measure: horizon mismatch");
  }
  double s = mu.atom0 * g(0.0);
  for (const auto& [x, w] : mu.atoms) s += w * g(x);
  if (mu.density) {
    s += trapezoid_product(*mu.density, g);
  } else if (mu.density_fn) {
    // Sample the analytic density on g's grid.
    const auto d = SampledPath::from_function(g.horizon(), g.n_steps(),
                                              mu.density_fn);
    s += trapezoid_product(d, g);
  }
  return s;
}

double Kernel2::pair(const SampledPath& g, const SampledPath& h) const {
  double s = atom00 * g(0.0) * h(0.0);
  if (cross_x) s += trapezoid_product(*cross_x, g) * h(0.0);
  if (cross_y) s += g(0.0) * trapezoid_product(*cross_y, h);
  for (const auto& [gx, hy] : separable) {
    s += trapezoid_product(gx, g) * trapezoid_product(hy, h);
  }
  if (plane_n > 0) {
    // Dense fallback: tensor trapezoid on the stored (plane_n)^2 grid.
    const std::size_t n = plane_n - 1;
    const double d = horizon / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < plane_n; ++i) {
      const double wi = (i == 0 || i == n) ? 0.5 : 1.0;
      const double gi = g(-horizon + static_cast<double>(i) * d);
      double row = 0.0;
      for (std::size_t j = 0; j < plane_n; ++j) {
        const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
        row += wj * plane_dense[i * plane_n + j] *
               h(-horizon + static_cast<double>(j) * d);
      }
      acc += wi * gi * row;
    }
    s += acc * d * d;
  }
  return s;
}

double Kernel2::plane_at(double x, double y) const {
  double s = 0.0;
  for (const auto& [gx, hy] : separable) s += gx(x) * hy(y);
  if (plane_n > 0) {
    const std::size_t n = plane_n - 1;
    const double d = horizon / static_cast<double>(n);
    // Bilinear interpolation on the dense grid.
    auto clampf = [&](double v) {
      return std::clamp((v + horizon) / d, 0.0, static_cast<double>(n));
    };
    const double fx = clampf(x);
    const double fy = clampf(y);
    const std::size_t i0 = static_cast<std::size_t>(
        std::min(std::floor(fx), static_cast<double>(n - 1)));
    const std::size_t j0 = static_cast<std::size_t>(
        std::min(std::floor(fy), static_cast<double>(n - 1)));
    const double wx = fx - static_cast<double>(i0);
    const double wy = fy - static_cast<double>(j0);
    auto v = [&](std::size_t i, std::size_t j) {
      return plane_dense[i * plane_n + j];
    };
    s += (1.0 - wx) * ((1.0 - wy) * v(i0, j0) + wy * v(i0, j0 + 1)) +
         wx * ((1.0 - wy) * v(i0 + 1, j0) + wy * v(i0 + 1, j0 + 1));
  }
  return s;
}

namespace {

// Trapezoid of a sampled density over the tail window [a, 0]; a must be a
// grid node (or below the domain, in which case the full integral is taken).
double tail_integral(const SampledPath& p, double a) {
  std::size_t k0 = 0;
  if (a > -p.horizon()) {
    const double kf = (a + p.horizon()) / p.dx();
    k0 = static_cast<std::size_t>(std::llround(kf));
    if (std::abs(kf - static_cast<double>(k0)) > 1e-6) {
      throw std::invalid_argument("Kernel2: window edge is not a grid node");
    }
  }
  const std::size_t n = p.n_steps();
  if (k0 >= n) return 0.0;
  double s = 0.5 * (p.at(k0) + p.at(n));
  for (std::size_t k = k0 + 1; k < n; ++k) s += p.at(k);
  return s * p.dx();
}

}  // namespace

double Kernel2::row_integral(double x, double a) const {
  double s = cross_x ? (*cross_x)(x) : 0.0;
  for (const auto& [gx, hy] : separable) s += gx(x) * tail_integral(hy, a);
  if (plane_n > 0) {
    const std::size_t n = plane_n - 1;
    const double d = horizon / static_cast<double>(n);
    SampledPath row = SampledPath::from_function(
        horizon, n, [&](double y) { return plane_at(x, y); });
    // Subtract the separable part already counted, leaving the dense rows.
    double dense = tail_integral(row, a);
    for (const auto& [gx, hy] : separable) {
      dense -= gx(x) * tail_integral(hy, a);
    }
    (void)d;
    s += dense;
  }
  return s;
}

double Kernel2::window_mass(double a) const {
  double s = atom00;  // delta_(0,0) always lies in [a,0]^2
  if (cross_x) s += tail_integral(*cross_x, a);
  if (cross_y) s += tail_integral(*cross_y, a);
  for (const auto& [gx, hy] : separable) {
    s += tail_integral(gx, a) * tail_integral(hy, a);
  }
  if (plane_n > 0) {
    const std::size_t n = plane_n - 1;
    const double d = horizon / static_cast<double>(n);
    std::size_t k0 = 0;
    if (a > -horizon) {
      k0 = static_cast<std::size_t>(std::llround((a + horizon) / d));
    }
    double acc = 0.0;
    for (std::size_t i = k0; i < plane_n; ++i) {
      const double wi = (i == k0 || i == n) ? 0.5 : 1.0;
      double row = 0.0;
      for (std::size_t j = k0; j < plane_n; ++j) {
        const double wj = (j == k0 || j == n) ? 0.5 : 1.0;
        row += wj * plane_dense[i * plane_n + j];
      }
      acc += wi * row;
    }
    s += acc * d * d;
  }
  return s;
}

Kernel2 Kernel2::transposed() const {
  Kernel2 k = *this;
  std::swap(k.cross_x, k.cross_y);
  for (auto& [g, h] : k.separable) std::swap(g, h);
  if (k.plane_n > 0) {
    for (std::size_t i = 0; i < k.plane_n; ++i) {
      for (std::size_t j = i + 1; j < k.plane_n; ++j) {
        std::swap(k.plane_dense[i * k.plane_n + j],
                  k.plane_dense[j * k.plane_n + i]);
      }
    }
  }
  return k;
}

}  // namespace pathheat
