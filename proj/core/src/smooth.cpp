#include "pathheat/smooth.hpp"

#include <algorithm>
#include <cmath>

#include "pathheat/parallel.hpp"
#include "pathheat/rng.hpp"

namespace pathheat {

namespace {

struct MeanVar {
  double mean = 0.0;
  double se = 0.0;
};

MeanVar reduce(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  const double var = v.size() > 1 ? s2 / (n - 1.0) : 0.0;
  return {m, std::sqrt(var / n)};
}

// Trapezoid of samples v over grid cells [k0, n].
double tail_trapezoid(const std::vector<double>& v, std::size_t k0, double dx) {
  const std::size_t n = v.size() - 1;
  if (k0 >= n) return 0.0;
  double s = 0.5 * (v[k0] + v[n]);
  for (std::size_t k = k0 + 1; k < n; ++k) s += v[k];
  return s * dx;
}

}  // namespace

SmoothSolver::SmoothSolver(FunctionalH h, SmoothParams params)
    : h_(std::move(h)), params_(params) {
  params_.validate();
  if (!h_.eval) throw std::invalid_argument("SmoothSolver: missing eval");
}

std::size_t SmoothSolver::time_index(double t) const {
  const double dt = params_.T / static_cast<double>(params_.N);
  const double kf = t / dt;
  const double kr = std::round(kf);
  if (std::abs(kf - kr) > 1e-6 || kr < 0.0 ||
      kr > static_cast<double>(params_.N)) {
    throw std::invalid_argument("SmoothSolver: t must be a grid time");
  }
  return static_cast<std::size_t>(kr);
}

SampledPath SmoothSolver::terminal_path(double t, const SampledPath& eta,
                                        std::uint64_t path,
                                        std::uint64_t seed) const {
  FlowParams fp;
  fp.T = params_.T;
  fp.sigma = params_.sigma;
  fp.N = params_.N;
  fp.seed = seed;
  const auto w = sample_brownian(fp, path);
  return flow_brownian(t, params_.T, eta, params_.sigma, w);
}

MCEstimate SmoothSolver::u(double t, const SampledPath& eta,
                           std::size_t n_paths, std::uint64_t seed) const {
  (void)time_index(t);
  if (t >= params_.T) {
    const double v = h_.eval(eta);
    enforce_growth(h_, eta, v);
    return {v, 0.0, 0, seed};
  }
  std::vector<double> vals(n_paths);
  parallel_for(n_paths, [&](std::size_t k) {
    const auto y = terminal_path(t, eta, k, seed);
    vals[k] = h_.eval(y);
    enforce_growth(h_, y, vals[k]);
  });
  const auto mv = reduce(vals);
  return {mv.mean, mv.se, n_paths, seed};
}

MeasureEstimate SmoothSolver::du(double t, const SampledPath& eta,
                                 std::size_t n_paths,
                                 std::uint64_t seed) const {
  if (!h_.d1) throw std::invalid_argument("SmoothSolver: missing d1");
  const std::size_t it = time_index(t);
  const std::size_t n = params_.N;
  const std::size_t j0 = n - it;  // first node with x_j >= -t
  const double dx = params_.T / static_cast<double>(n);

  std::vector<std::vector<double>> dens(n_paths);
  std::vector<double> atom(n_paths);
  parallel_for(n_paths, [&](std::size_t k) {
    const auto y = terminal_path(t, eta, k, seed);
    const auto d = h_.d1(y);
    std::vector<double> row(n + 1, 0.0);
    // D^{ac}_x u density: D_{x-T+t}H(Y) on [-t,0), zero on [-T,-t).
    for (std::size_t j = j0; j <= n; ++j) row[j] = d.density.at(j - j0);
    // delta_0 weight: integral of the derivative density over [t-T, 0].
    atom[k] = tail_trapezoid(d.density.values(), it, dx);
    dens[k] = std::move(row);
  });

  MeasureEstimate out;
  out.n_paths = n_paths;
  std::vector<double> mean(n + 1, 0.0), se(n + 1, 0.0);
  for (std::size_t j = 0; j <= n; ++j) {
    std::vector<double> col(n_paths);
    for (std::size_t k = 0; k < n_paths; ++k) col[k] = dens[k][j];
    const auto mv = reduce(col);
    mean[j] = mv.mean;
    se[j] = mv.se;
  }
  const auto amv = reduce(atom);
  out.mean.horizon = params_.T;
  out.mean.atom0 = amv.mean;
  out.mean.density = SampledPath(params_.T, std::move(mean));
  out.density_se = std::move(se);
  out.atom0_se = amv.se;
  return out;
}

Kernel2Estimate SmoothSolver::d2u(double t, const SampledPath& eta,
                                  std::size_t n_paths,
                                  std::uint64_t seed) const {
  if (!h_.d2) throw std::invalid_argument("SmoothSolver: missing d2");
  const std::size_t it = time_index(t);
  const std::size_t n = params_.N;
  const std::size_t j0 = n - it;
  const double dx = params_.T / static_cast<double>(n);
  const double a = t - params_.T;  // window edge for the terminal kernel

  const std::size_t pn = std::min<std::size_t>(n + 1, 129);
  const double pd = params_.T / static_cast<double>(pn - 1);

  std::vector<double> atom(n_paths);
  std::vector<std::vector<double>> cx(n_paths), cy(n_paths), pl(n_paths);
  parallel_for(n_paths, [&](std::size_t k) {
    const auto y = terminal_path(t, eta, k, seed);
    const auto ker = h_.d2(y);
    atom[k] = ker.window_mass(a);
    const auto kert = ker.transposed();
    std::vector<double> rx(n + 1, 0.0), ry(n + 1, 0.0);
    for (std::size_t j = j0; j <= n; ++j) {
      const double arg = -params_.T + static_cast<double>(j - j0) * dx;
      rx[j] = ker.row_integral(arg, a);
      ry[j] = kert.row_integral(arg, a);
    }
    cx[k] = std::move(rx);
    cy[k] = std::move(ry);
    std::vector<double> plane(pn * pn, 0.0);
    for (std::size_t i = 0; i < pn; ++i) {
      const double x = -params_.T + static_cast<double>(i) * pd;
      if (x < -t - 1e-12) continue;
      for (std::size_t j = 0; j < pn; ++j) {
        const double yy = -params_.T + static_cast<double>(j) * pd;
        if (yy < -t - 1e-12) continue;
        plane[i * pn + j] =
            ker.plane_at(x - params_.T + t, yy - params_.T + t);
      }
    }
    pl[k] = std::move(plane);
  });

  Kernel2Estimate out;
  out.n_paths = n_paths;
  out.mean.horizon = params_.T;
  const auto amv = reduce(atom);
  out.mean.atom00 = amv.mean;
  out.atom00_se = amv.se;

  auto mean_of = [&](const std::vector<std::vector<double>>& rows,
                     std::size_t len) {
    std::vector<double> m(len, 0.0);
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < len; ++j) m[j] += r[j];
    }
    for (double& v : m) v /= static_cast<double>(n_paths);
    return m;
  };
  out.mean.cross_x = SampledPath(params_.T, mean_of(cx, n + 1));
  out.mean.cross_y = SampledPath(params_.T, mean_of(cy, n + 1));
  out.mean.plane_dense = mean_of(pl, pn * pn);
  out.mean.plane_n = pn;
  return out;
}

MCEstimate SmoothSolver::dtu(double t, const SampledPath& eta,
                             std::size_t n_paths, std::uint64_t seed) const {
  if (!h_.d1 || !h_.d2) {
    throw std::invalid_argument("SmoothSolver: missing derivatives");
  }
  const std::size_t it = time_index(t);
  const std::size_t n = params_.N;
  const std::size_t j0 = n - it;
  const double a = t - params_.T;
  const double s2 = 0.5 * params_.sigma * params_.sigma;

  std::vector<double> vals(n_paths);
  const auto feta = BVFunction::from_path(eta);
  parallel_for(n_paths, [&](std::size_t k) {
    const auto y = terminal_path(t, eta, k, seed);
    const auto d = h_.d1(y);
    const auto ker = h_.d2(y);
    double fwd = 0.0;
    if (it > 0) {
      std::vector<double> dens(n + 1, 0.0);
      for (std::size_t j = j0; j <= n; ++j) dens[j] = d.density.at(j - j0);
      PathMeasure mu;
      mu.horizon = params_.T;
      mu.density = SampledPath(params_.T, std::move(dens));
      fwd = forward_integral(mu, feta, {-t, 0.0, IntervalMode::kOpen}).value;
    }
    vals[k] = -(fwd + s2 * ker.window_mass(a));
  });
  const auto mv = reduce(vals);
  return {mv.mean, mv.se, n_paths, seed};
}

MCEstimate SmoothSolver::residual(double t, const SampledPath& eta,
                                  std::size_t n_paths,
                                  std::uint64_t seed) const {
  if (!h_.d1 || !h_.d2) {
    throw std::invalid_argument("SmoothSolver: missing derivatives");
  }
  const std::size_t it = time_index(t);
  const std::size_t n = params_.N;
  const std::size_t j0 = n - it;
  const double a = t - params_.T;
  const double s2 = 0.5 * params_.sigma * params_.sigma;

  std::vector<double> vals(n_paths);
  const auto feta = BVFunction::from_path(eta);
  parallel_for(n_paths, [&](std::size_t k) {
    const auto y = terminal_path(t, eta, k, seed);
    const auto d = h_.d1(y);
    const auto ker = h_.d2(y);
    double fwd = 0.0;
    if (it > 0) {
      std::vector<double> dens(n + 1, 0.0);
      for (std::size_t j = j0; j <= n; ++j) dens[j] = d.density.at(j - j0);
      PathMeasure mu;
      mu.horizon = params_.T;
      mu.density = SampledPath(params_.T, std::move(dens));
      fwd = forward_integral(mu, feta, {-t, 0.0, IntervalMode::kOpen}).value;
    }
    const double wm = ker.window_mass(a);
    const double dt_term = -(fwd + s2 * wm);         // time derivative bracket
    const double transport = fwd;                    // int D^{ac}u d-eta
    const double second = s2 * wm;                   // (sigma^2/2) atom00
    vals[k] = dt_term + transport + second;
  });
  const auto mv = reduce(vals);
  return {mv.mean, mv.se, n_paths, seed};
}

MCEstimate SmoothSolver::delta0(double t, const SampledPath& eta,
                                std::size_t n_paths,
                                std::uint64_t seed) const {
  if (!h_.d1) throw std::invalid_argument("SmoothSolver: missing d1");
  const std::size_t it = time_index(t);
  const double dx = params_.T / static_cast<double>(params_.N);
  std::vector<double> vals(n_paths);
  parallel_for(n_paths, [&](std::size_t k) {
    const auto y = terminal_path(t, eta, k, seed);
    const auto d = h_.d1(y);
    vals[k] = tail_trapezoid(d.density.values(), it, dx);
  });
  const auto mv = reduce(vals);
  return {mv.mean, mv.se, n_paths, seed};
}

std::vector<MartingaleRow> SmoothSolver::martingale_check(
    const std::vector<double>& times, std::size_t n_paths,
    std::uint64_t seed) const {
  const std::size_t n_inner = std::max<std::size_t>(1, n_paths / 10);
  const auto zero = SampledPath::constant(params_.T, params_.N, 0.0);
  const auto ref = u(0.0, zero, n_paths, splitmix64(seed ^ 0x5D5ECCA4ULL));

  FlowParams fp;
  fp.T = params_.T;
  fp.sigma = params_.sigma;
  fp.N = params_.N;
  fp.seed = splitmix64(seed ^ 0xA5A5A5A5ULL);

  std::vector<MartingaleRow> rows;
  for (double t : times) {
    (void)time_index(t);
    std::vector<double> outer(n_paths);
    parallel_for(n_paths, [&](std::size_t j) {
      auto w = sample_brownian(fp, j);
      for (std::size_t k = 0; k <= w.n_steps(); ++k) {
        w.at(k) *= params_.sigma;
      }
      const auto eta = window(w, t);
      const auto est = u(t, eta, n_inner, splitmix64(seed ^ (j + 1)));
      outer[j] = est.value;
    });
    const auto mv = reduce(outer);
    MartingaleRow row;
    row.t = t;
    row.outer_mean = mv.mean;
    row.reference = ref.value;
    row.deviation = mv.mean - ref.value;
    row.combined_se = std::sqrt(mv.se * mv.se + ref.std_error * ref.std_error);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pathheat
