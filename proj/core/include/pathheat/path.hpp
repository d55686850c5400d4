#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pathheat {

namespace detail {

// Uniform-grid samples on [lo, hi] with linear interpolation between nodes.
struct GridSamples {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> v;

  std::size_t n_steps() const { return v.size() - 1; }
  double dx() const { return (hi - lo) / static_cast<double>(n_steps()); }
  double node(std::size_t k) const {
    return lo + static_cast<double>(k) * dx();
  }
  double eval(double x) const;
  // Index of a grid-aligned coordinate; throws if x is off-grid.
  std::size_t index_of(double x, const char* what) const;
  bool on_grid(double x) const;
};

}  // namespace detail

// Continuous path on [-T,0] stored on a uniform grid, x_k = -T + k*dx.
class SampledPath {
 public:
  SampledPath(double horizon, std::vector<double> values);

  static SampledPath constant(double horizon, std::size_t n_steps, double value);
  static SampledPath from_function(double horizon, std::size_t n_steps,
                                   const std::function<double(double)>& f);

  double horizon() const { return -g_.lo; }
  std::size_t n_steps() const { return g_.n_steps(); }
  double dx() const { return g_.dx(); }
  double node(std::size_t k) const { return g_.node(k); }
  double at(std::size_t k) const { return g_.v[k]; }
  double& at(std::size_t k) { return g_.v[k]; }
  const std::vector<double>& values() const { return g_.v; }

  // Linear interpolation; exact at grid nodes; throws outside [-T,0].
  double operator()(double x) const;

  double sup_norm() const;

 private:
  detail::GridSamples g_;
};

// Trajectory on [0,T], t_k = k*dx; value at 0 is the stored initial value.
class Trajectory {
 public:
  Trajectory(double horizon, std::vector<double> values);

  static Trajectory constant(double horizon, std::size_t n_steps, double value);
  static Trajectory from_function(double horizon, std::size_t n_steps,
                                  const std::function<double(double)>& f);

  double horizon() const { return g_.hi; }
  std::size_t n_steps() const { return g_.n_steps(); }
  double dx() const { return g_.dx(); }
  double node(std::size_t k) const { return g_.node(k); }
  double at(std::size_t k) const { return g_.v[k]; }
  double& at(std::size_t k) { return g_.v[k]; }
  const std::vector<double>& values() const { return g_.v; }

  double operator()(double t) const;

  // Index of a grid time; throws std::invalid_argument if t is off-grid.
  std::size_t time_index(double t) const;

 private:
  detail::GridSamples g_;
};

// Window of a trajectory at grid time t: eta(x) = traj(t+x) for t+x >= 0,
// extended to the left by the initial value traj(0).
SampledPath window(const Trajectory& traj, double t);

// Finite signed measure on [-T,0]: weight on delta_0, finitely many other
// atoms in [-T,0), and an absolutely continuous part sampled on the grid.
// When an analytic density callback is supplied it takes precedence over the
// sampled density in quadratures that can exploit it.
struct PathMeasure {
  double horizon = 0.0;
  double atom0 = 0.0;
  std::vector<std::pair<double, double>> atoms;  // (location, weight)
  std::optional<SampledPath> density;
  std::function<double(double)> density_fn;
  std::function<double(double)> density_deriv_fn;

  static PathMeasure dirac0(double horizon) {
    PathMeasure m;
    m.horizon = horizon;
    m.atom0 = 1.0;
    return m;
  }

  double density_at(double x) const;
  bool has_density() const { return density.has_value() || density_fn; }
  double total_variation() const;
  void validate() const;
};

// <mu, g> = atom0*g(0) + sum w_i g(x_i) + trapezoid(density*g).
double pair_measure(const PathMeasure& mu, const SampledPath& g);

// Second-derivative object on [-T,0]^2: atom at (0,0), two cross densities
// paired with delta_0, a rank-structured plane (sum of separable g_i(x)h_i(y))
// and an optional dense fallback grid (capped at 513 nodes per axis).
struct Kernel2 {
  static constexpr std::size_t kDenseCap = 513;

  double horizon = 0.0;
  double atom00 = 0.0;
  std::optional<SampledPath> cross_x;  // density in x, paired with delta_0(dy)
  std::optional<SampledPath> cross_y;  // density in y, paired with delta_0(dx)
  std::vector<std::pair<SampledPath, SampledPath>> separable;
  std::vector<double> plane_dense;  // row-major (plane_n)^2 node values
  std::size_t plane_n = 0;

  // Pairing against g(x)h(y).
  double pair(const SampledPath& g, const SampledPath& h) const;
  Kernel2 transposed() const;

  // Absolutely continuous plane density at (x,y).
  double plane_at(double x, double y) const;
  // Measure of the second argument over [a,0] at fixed x, including the
  // delta_0(dy) cross component: int_{[a,0]} K(x, ds) density-in-x.
  double row_integral(double x, double a) const;
  // Pairing with the indicator window 1_{[a,0]} in both arguments.
  double window_mass(double a) const;
};

// Trapezoid rule for int a(x) b(x) dx over the shared grid.
double trapezoid_product(const SampledPath& a, const SampledPath& b);
double trapezoid(const SampledPath& a);

}  // namespace pathheat
