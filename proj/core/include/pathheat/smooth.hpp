#pragma once

#include <cstdint>
#include <vector>

#include "pathheat/flow.hpp"
#include "pathheat/functional.hpp"
#include "pathheat/path.hpp"
#include "pathheat/reg_calculus.hpp"

namespace pathheat {

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

struct SmoothParams {
  double T = 1.0;
  double sigma = 1.0;
  std::size_t N = 256;  // time/space grid steps

  void validate() const {
    if (!(T > 0.0)) throw std::invalid_argument("SmoothParams: T > 0");
    if (N < 2) throw std::invalid_argument("SmoothParams: N >= 2");
  }
};

// Monte Carlo estimate of a path measure: mean components plus standard
// errors for the density samples and the delta_0 weight.
struct MeasureEstimate {
  PathMeasure mean;
  std::vector<double> density_se;
  double atom0_se = 0.0;
  std::size_t n_paths = 0;
};

struct Kernel2Estimate {
  Kernel2 mean;
  double atom00_se = 0.0;
  std::size_t n_paths = 0;
};

struct MartingaleRow {
  double t = 0.0;
  double outer_mean = 0.0;
  double reference = 0.0;   // u(0, zero path)
  double deviation = 0.0;
  double combined_se = 0.0;
};

// Monte Carlo solver u(t,eta) = E[H(Y_T^{t,eta})] driven by the functional
// Brownian flow, with derivative estimators sharing common random numbers.
class SmoothSolver {
 public:
  SmoothSolver(FunctionalH h, SmoothParams params);

  const SmoothParams& params() const { return params_; }
  const FunctionalH& functional() const { return h_; }

  MCEstimate u(double t, const SampledPath& eta, std::size_t n_paths,
               std::uint64_t seed) const;
  MeasureEstimate du(double t, const SampledPath& eta, std::size_t n_paths,
                     std::uint64_t seed) const;
  Kernel2Estimate d2u(double t, const SampledPath& eta, std::size_t n_paths,
                      std::uint64_t seed) const;
  MCEstimate dtu(double t, const SampledPath& eta, std::size_t n_paths,
                 std::uint64_t seed) const;
  // dt u + int_{]-t,0]} D^{ac}u d-eta + (sigma^2/2) * atom00(D^2 u),
  // all three terms evaluated on the same path set.
  MCEstimate residual(double t, const SampledPath& eta, std::size_t n_paths,
                      std::uint64_t seed) const;
  // delta_0 weight of du only (martingale representation integrand).
  MCEstimate delta0(double t, const SampledPath& eta, std::size_t n_paths,
                    std::uint64_t seed) const;

  std::vector<MartingaleRow> martingale_check(const std::vector<double>& times,
                                              std::size_t n_paths,
                                              std::uint64_t seed) const;

 private:
  std::size_t time_index(double t) const;
  SampledPath terminal_path(double t, const SampledPath& eta,
                            std::uint64_t path, std::uint64_t seed) const;

  FunctionalH h_;
  SmoothParams params_;
};

}  // namespace pathheat
