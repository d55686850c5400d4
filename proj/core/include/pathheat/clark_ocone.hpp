#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "pathheat/path.hpp"

namespace pathheat {

enum class DriverKind { kBrownian, kBrownianPlusFbm };

struct DriverSpec {
  DriverKind kind = DriverKind::kBrownian;
  double T = 1.0;
  double sigma = 1.0;
  double hurst = 0.75;  // fBM component, must lie in (1/2, 1)
  std::size_t N = 512;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Samples X = sigma*W, or X = sigma*W + B^H with the fractional component
// generated by an exact Cholesky factorization of its covariance
// (s,t) -> (s^{2H} + t^{2H} - |t-s|^{2H})/2; W and B^H independent.
class DriverSampler {
 public:
  explicit DriverSampler(DriverSpec spec);

  const DriverSpec& spec() const { return spec_; }
  Trajectory sample(std::uint64_t path_index) const;

 private:
  DriverSpec spec_;
  Eigen::MatrixXd chol_;  // empty for the pure Brownian kind
};

// Window of the first k+1 trajectory samples as a path on [-T,0], extended
// to the left by the initial value.  Only indices <= k are read, so handing
// integrand builders these prefixes enforces adaptedness structurally.
SampledPath window_prefix(const std::vector<double>& x, double horizon,
                          std::size_t k);

// Left-point Riemann sum sum_k a_k (X_{t_{k+1}} - X_{t_k}); a has N entries.
double forward_stochastic_integral(const std::vector<double>& a,
                                   const Trajectory& x);

// Integrand builder: the delta_0 weight of Du at (t, window path).
using IntegrandFn = std::function<double(double, const SampledPath&)>;

struct RepresentationRow {
  std::size_t N = 0;
  double rmse_rel = 0.0;
  double bias = 0.0;
  double se = 0.0;
};

struct RepresentationReport {
  double rmse_rel = 0.0;  // at the largest grid in the sweep
  double bias = 0.0;
  double se = 0.0;
  std::vector<RepresentationRow> convergence;
};

// Pathwise check of h = u(0, X_0(.)) + int_0^T delta0(t, X_t(.)) d-X_t.
// For each grid size in n_list: simulate drivers, accumulate the residual
// h - u0 - integral per path, and report RMSE relative to the RMS of h.
RepresentationReport representation_check(
    const IntegrandFn& delta0,
    const std::function<double(const SampledPath&)>& payoff, double u0,
    const DriverSpec& driver, const std::vector<std::size_t>& n_list,
    std::size_t n_paths);

}  // namespace pathheat
