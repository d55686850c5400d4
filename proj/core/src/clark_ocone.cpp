#include "pathheat/clark_ocone.hpp"

#include <cmath>
#include <stdexcept>

#include "pathheat/flow.hpp"
#include "pathheat/parallel.hpp"
#include "pathheat/rng.hpp"

namespace pathheat {

void DriverSpec::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("DriverSpec: T > 0 required");
  if (N < 2 || N > 2048) {
    throw std::invalid_argument("DriverSpec: need 2 <= N <= 2048");
  }
  if (kind == DriverKind::kBrownianPlusFbm &&
      !(hurst > 0.5 && hurst < 1.0)) {
    throw std::invalid_argument("DriverSpec: hurst must lie in (1/2, 1)");
  }
}

DriverSampler::DriverSampler(DriverSpec spec) : spec_(spec) {
  spec_.validate();
  if (spec_.kind == DriverKind::kBrownianPlusFbm) {
    const auto n = static_cast<Eigen::Index>(spec_.N);
    const double dt = spec_.T / static_cast<double>(spec_.N);
    const double h2 = 2.0 * spec_.hurst;
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = static_cast<double>(i + 1) * dt;
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double t = static_cast<double>(j + 1) * dt;
        const double v = 0.5 * (std::pow(s, h2) + std::pow(t, h2) -
                                std::pow(s - t, h2));
        cov(i, j) = v;
        cov(j, i) = v;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error(
          "DriverSampler: fBM covariance Cholesky factorization failed");
    }
    chol_ = llt.matrixL();
  }
}

Trajectory DriverSampler::sample(std::uint64_t path_index) const {
  FlowParams fp;
  fp.T = spec_.T;
  fp.N = spec_.N;
  fp.seed = spec_.seed;
  auto w = sample_brownian(fp, path_index);
  std::vector<double> v(spec_.N + 1);
  v[0] = 0.0;
  for (std::size_t k = 1; k <= spec_.N; ++k) v[k] = spec_.sigma * w.at(k);
  if (spec_.kind == DriverKind::kBrownianPlusFbm) {
    // Independent normals on a disjoint counter range.
    CounterRng rng(spec_.seed);
    const auto n = static_cast<Eigen::Index>(spec_.N);
    Eigen::VectorXd xi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      xi(i) = rng.normal(path_index,
                         (std::uint64_t{1} << 32) + static_cast<std::uint64_t>(i));
    }
    const Eigen::VectorXd b = chol_ * xi;
    for (std::size_t k = 1; k <= spec_.N; ++k) {
      v[k] += b(static_cast<Eigen::Index>(k - 1));
    }
  }
  return Trajectory(spec_.T, std::move(v));
}

SampledPath window_prefix(const std::vector<double>& x, double horizon,
                          std::size_t k) {
  const std::size_t n = x.size() - 1;
  if (k > n) throw std::invalid_argument("window_prefix: index out of range");
  std::vector<double> v(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    v[j] = (j + k >= n) ? x[j + k - n] : x[0];
  }
  return SampledPath(horizon, std::move(v));
}

double forward_stochastic_integral(const std::vector<double>& a,
                                   const Trajectory& x) {
  if (a.size() != x.n_steps()) {
    throw std::invalid_argument(
        "forward_stochastic_integral: integrand size must equal step count");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += a[k] * (x.at(k + 1) - x.at(k));
  }
  return s;
}

RepresentationReport representation_check(
    const IntegrandFn& delta0,
    const std::function<double(const SampledPath&)>& payoff, double u0,
    const DriverSpec& driver, const std::vector<std::size_t>& n_list,
    std::size_t n_paths) {
  RepresentationReport rep;
  for (std::size_t n : n_list) {
    DriverSpec spec = driver;
    spec.N = n;
    const DriverSampler sampler(spec);
    const double dt = spec.T / static_cast<double>(n);

    std::vector<double> resid(n_paths), hval(n_paths);
    parallel_for(n_paths, [&](std::size_t p) {
      const auto x = sampler.sample(p);
      std::vector<double> a(n);
      for (std::size_t k = 0; k < n; ++k) {
        const auto eta = window_prefix(x.values(), spec.T, k);
        a[k] = delta0(static_cast<double>(k) * dt, eta);
      }
      const double h = payoff(window_prefix(x.values(), spec.T, n));
      hval[p] = h;
      resid[p] = h - u0 - forward_stochastic_integral(a, x);
    });

    double sr = 0.0, sh = 0.0, mean = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      sr += resid[p] * resid[p];
      sh += hval[p] * hval[p];
      mean += resid[p];
    }
    const double np = static_cast<double>(n_paths);
    mean /= np;
    double var = 0.0;
    for (double r : resid) var += (r - mean) * (r - mean);
    var = n_paths > 1 ? var / (np - 1.0) : 0.0;

    RepresentationRow row;
    row.N = n;
    const double rms_h = std::sqrt(sh / np);
    row.rmse_rel = rms_h > 0.0 ? std::sqrt(sr / np) / rms_h
                               : std::sqrt(sr / np);
    row.bias = mean;
    row.se = std::sqrt(var / np);
    rep.convergence.push_back(row);
  }
  const auto& last = rep.convergence.back();
  rep.rmse_rel = last.rmse_rel;
  rep.bias = last.bias;
  rep.se = last.se;
  return rep;
}

}  // namespace pathheat
