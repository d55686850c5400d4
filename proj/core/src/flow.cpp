#include "pathheat/flow.hpp"

#include <algorithm>
#include <cmath>

namespace pathheat {

Trajectory sample_brownian(const FlowParams& params, std::uint64_t path_index) {
  params.validate();
  CounterRng rng(params.seed);
  const double dt = params.T / static_cast<double>(params.N);
  const double sd = std::sqrt(dt);
  std::vector<double> v(params.N + 1);
  v[0] = 0.0;
  for (std::size_t k = 0; k < params.N; ++k) {
    v[k + 1] = v[k] + sd * rng.normal(path_index, k);
  }
  return Trajectory(params.T, std::move(v));
}

namespace {

struct ShiftIndices {
  std::size_t is;  // grid index of s on [0,T]
  std::size_t it;  // grid index of t
  std::size_t m;   // it - is
};

ShiftIndices indices(double s, double t, const Trajectory& w) {
  if (s > t) throw std::domain_error("flow: need s <= t");
  const std::size_t is = w.time_index(s);
  const std::size_t it = w.time_index(t);
  return {is, it, it - is};
}

}  // namespace

SampledPath flow_brownian(double s, double t, const SampledPath& eta,
                          double sigma, const Trajectory& w) {
  const auto [is, it, m] = indices(s, t, w);
  const std::size_t n = eta.n_steps();
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k + m < n; ++k) out[k] = eta.at(k + m);
  // New segment x in [s-t,0]: eta(0) + sigma (W_{t+x} - W_s), accumulated
  // increment by increment from W_s.
  double acc = eta.at(n);
  out[n - m] = acc;
  for (std::size_t j = 0; j < m; ++j) {
    acc += sigma * (w.at(is + j + 1) - w.at(is + j));
    out[n - m + j + 1] = acc;
  }
  return SampledPath(eta.horizon(), std::move(out));
}

SampledPath flow_markovian(double s, double t, const SampledPath& eta,
                           const FlowParams& params, const Trajectory& w) {
  if (!params.sde_sigma || !params.sde_drift) {
    throw std::invalid_argument("flow_markovian: missing SDE callbacks");
  }
  const auto [is, it, m] = indices(s, t, w);
  const std::size_t n = eta.n_steps();
  const double dt = w.dx();
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k + m < n; ++k) out[k] = eta.at(k + m);
  double x = eta.at(n);
  out[n - m] = x;
  for (std::size_t j = 0; j < m; ++j) {
    const double u = w.node(is + j);
    x += params.sde_sigma(u, x) * (w.at(is + j + 1) - w.at(is + j));
    x += params.sde_drift(u, x) * dt;
    if (!std::isfinite(x)) {
      throw IntegrationDivergedError("Euler step produced a non-finite state");
    }
    out[n - m + j + 1] = x;
  }
  return SampledPath(eta.horizon(), std::move(out));
}

namespace {

double sup_diff(const SampledPath& a, const SampledPath& b) {
  double m = 0.0;
  for (std::size_t k = 0; k <= a.n_steps(); ++k) {
    m = std::max(m, std::abs(a.at(k) - b.at(k)));
  }
  return m;
}

}  // namespace

double check_flow_property(double s, double t, double r,
                           const SampledPath& eta, double sigma,
                           const Trajectory& w) {
  const auto direct = flow_brownian(s, r, eta, sigma, w);
  const auto mid = flow_brownian(s, t, eta, sigma, w);
  const auto composed = flow_brownian(t, r, mid, sigma, w);
  return sup_diff(direct, composed);
}

double check_flow_property_markovian(double s, double t, double r,
                                     const SampledPath& eta,
                                     const FlowParams& params,
                                     const Trajectory& w) {
  const auto direct = flow_markovian(s, r, eta, params, w);
  const auto mid = flow_markovian(s, t, eta, params, w);
  const auto composed = flow_markovian(t, r, mid, params, w);
  return sup_diff(direct, composed);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // Advance past all samples tied at the current value on both sides so
    // that ties never inflate the statistic.
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

KsReport check_time_homogeneity(const FlowParams& params, double s, double t,
                                const SampledPath& eta, std::size_t n_paths) {
  KsReport rep;
  const std::size_t n = eta.n_steps();
  std::vector<std::size_t> probe_idx;
  for (int p = 0; p < 8; ++p) {
    probe_idx.push_back((n * (p + 1)) / 9);
  }
  for (auto k : probe_idx) rep.probes.push_back(eta.node(k));

  FlowParams pa = params;
  FlowParams pb = params;
  pb.seed = splitmix64(params.seed ^ 0x7F4A7C15ULL);

  std::vector<std::vector<double>> sa(8), sb(8);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const auto wa = sample_brownian(pa, p);
    const auto wb = sample_brownian(pb, p);
    const auto ya = flow_brownian(s, t, eta, params.sigma, wa);
    const auto yb = flow_brownian(0.0, t - s, eta, params.sigma, wb);
    for (int q = 0; q < 8; ++q) {
      sa[q].push_back(ya.at(probe_idx[q]));
      sb[q].push_back(yb.at(probe_idx[q]));
    }
  }
  for (int q = 0; q < 8; ++q) {
    rep.stats.push_back(ks_two_sample(sa[q], sb[q]));
    rep.max_stat = std::max(rep.max_stat, rep.stats.back());
  }
  rep.critical = ks_critical_value(0.01, n_paths, n_paths);
  return rep;
}

}  // namespace pathheat
