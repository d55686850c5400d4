#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pathheat/path.hpp"
#include "pathheat/rng.hpp"

namespace pathheat {

struct FlowParams {
  double T = 1.0;
  double sigma = 1.0;  // constant-sigma (Brownian) case
  std::size_t N = 256;
  std::uint64_t seed = 0;
  // Markovian case; both must be Lipschitz with linear growth.
  std::function<double(double, double)> sde_sigma;  // sigma(t,x)
  std::function<double(double, double)> sde_drift;  // b(t,x)

  void validate() const {
    if (N < 2) throw std::invalid_argument("FlowParams: N >= 2 required");
    if (!(T > 0.0)) throw std::invalid_argument("FlowParams: T > 0 required");
  }
};

class IntegrationDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Brownian trajectory W_0 = 0 with N(0,dt) increments from the counter-based
// stream keyed (seed, path_index, step).
Trajectory sample_brownian(const FlowParams& params, std::uint64_t path_index);

// Functional Brownian flow: transport eta by the time shift t-s and append
// sigma-scaled Brownian increments on the newly exposed segment.  The new
// segment is accumulated step by step so that composing flows replays the
// identical floating-point sequence (the flow identity is bit-exact).
SampledPath flow_brownian(double s, double t, const SampledPath& eta,
                          double sigma, const Trajectory& w);

// Functional Markovian flow with the Euler-Maruyama scheme on the grid.
SampledPath flow_markovian(double s, double t, const SampledPath& eta,
                           const FlowParams& params, const Trajectory& w);

// Sup-norm of Y_r^{s,eta} - Y_r^{t, Y_t^{s,eta}} on the grid.
double check_flow_property(double s, double t, double r,
                           const SampledPath& eta, double sigma,
                           const Trajectory& w);
double check_flow_property_markovian(double s, double t, double r,
                                     const SampledPath& eta,
                                     const FlowParams& params,
                                     const Trajectory& w);

double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

struct KsReport {
  std::vector<double> probes;
  std::vector<double> stats;
  double max_stat = 0.0;
  double critical = 0.0;
};

// Two-sample KS comparison of the marginals of Y_t^{s,eta} against
// Y_{t-s}^{0,eta} at 8 probe points, independent path streams per side.
KsReport check_time_homogeneity(const FlowParams& params, double s, double t,
                                const SampledPath& eta, std::size_t n_paths);

}  // namespace pathheat
