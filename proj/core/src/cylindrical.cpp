#include "pathheat/cylindrical.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "pathheat/quad.hpp"

namespace pathheat {

void CylindricalSpec::validate() const {
  if (phi.empty() || phi.size() > 4) {
    throw std::invalid_argument("CylindricalSpec: need 1 <= n <= 4 basis functions");
  }
  if (!(T > 0.0) || sigma < 0.0) {
    throw std::invalid_argument("CylindricalSpec: bad T or sigma");
  }
  for (const auto& p : phi) {
    if (!p.f || !p.df || !p.ddf) {
      throw std::invalid_argument("CylindricalSpec: phi needs f, df, ddf");
    }
  }
  if (!f) throw std::invalid_argument("CylindricalSpec: missing outer f");
  if (!f_kinks.empty() && phi.size() != 1) {
    throw std::invalid_argument("kink handling is supported for n == 1 only");
  }
}

GramMatrix gram(const CylindricalSpec& spec, double t) {
  if (t < 0.0 || t > spec.T + 1e-12) {
    throw std::domain_error("gram: t outside [0,T]");
  }
  const int n = spec.n();
  GramMatrix g;
  g.t = t;
  g.sigma = Eigen::MatrixXd(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = integrate_simpson(
          [&](double s) { return spec.phi[i].f(s) * spec.phi[j].f(s); }, t,
          spec.T, std::max<std::size_t>(spec.quad_grid / 2, 32));
      g.sigma(i, j) = v;
      g.sigma(j, i) = v;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(g.sigma);
  double det = 1.0;
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXd L = llt.matrixL();
    for (int i = 0; i < n; ++i) det *= L(i, i) * L(i, i);
    g.chol = L;
  } else {
    det = g.sigma.determinant();
  }
  if (llt.info() != Eigen::Success || det <= kDetFloor) {
    throw SingularGramError(t, det);
  }
  g.det = det;
  g.logdet = std::log(det);
  g.inverse = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return g;
}

double gaussian_p(const GramMatrix& g, const Eigen::VectorXd& z) {
  const int n = static_cast<int>(z.size());
  const double quad = z.dot(g.inverse * z);
  return std::exp(-0.5 * quad - 0.5 * g.logdet -
                  0.5 * n * std::log(2.0 * std::numbers::pi));
}

GaussianDerivs gaussian_dp(const CylindricalSpec& spec, const GramMatrix& g,
                           double t, const Eigen::VectorXd& z) {
  const int n = spec.n();
  GaussianDerivs out;
  out.p = gaussian_p(g, z);
  const Eigen::VectorXd q = g.inverse * z;
  out.grad = -out.p * q;
  out.hess = out.p * (q * q.transpose() - g.inverse);
  // dSigma/dt = -phi(t)phi(t)^T, so d(logdet)/dt = -phi'Sigma^{-1}phi and
  // d(Sigma^{-1})/dt = Sigma^{-1} phi phi' Sigma^{-1}.
  Eigen::VectorXd ph(n);
  for (int i = 0; i < n; ++i) ph(i) = spec.phi[i].f(t);
  const double pap = ph.dot(g.inverse * ph);
  const double pq = ph.dot(q);
  out.dt = out.p * (0.5 * pap - 0.5 * pq * pq);
  return out;
}

namespace {

// One pass over the quadrature nodes accumulating Psi and its derivatives.
// The time derivative is taken through the analytically differentiated
// Gaussian kernel, so the heat identity of the kernel stays a checkable
// property rather than an input.
PsiDerivs psi_accumulate(const CylindricalSpec& spec, const GramMatrix& g,
                         double t, const Eigen::VectorXd& y) {
  const int n = spec.n();
  PsiDerivs out;
  out.dy = Eigen::VectorXd::Zero(n);
  out.d2y = Eigen::MatrixXd::Zero(n, n);

  Eigen::VectorXd ph(n);
  for (int i = 0; i < n; ++i) ph(i) = spec.phi[i].f(t);
  const double pap = ph.dot(g.inverse * ph);
  const double s = spec.sigma;

  const auto add_node = [&](const Eigen::VectorXd& z, double w) {
    const double fv = spec.f(y + s * z);
    const Eigen::VectorXd q = g.inverse * z;
    const double pq = ph.dot(q);
    out.value += w * fv;
    out.dy += (w * fv / s) * q;
    out.d2y += (w * fv / (s * s)) * (q * q.transpose() - g.inverse);
    out.dt += w * fv * 0.5 * (pap - pq * pq);
  };

  if (!spec.f_kinks.empty()) {
    // n == 1: split the z-line at the payoff kinks and use composite
    // Gauss-Legendre with the explicit Gaussian density on each piece.
    const double sd = std::sqrt(g.sigma(0, 0));
    const double lo = -10.0 * sd, hi = 10.0 * sd;
    std::vector<double> cuts{lo};
    for (double k : spec.f_kinks) {
      const double z = (k - y(0)) / s;
      if (z > lo && z < hi) cuts.push_back(z);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    Eigen::VectorXd z(1);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c], b = cuts[c + 1];
      if (b - a < 1e-14) continue;
      const std::size_t cells = 96;
      const double h = (b - a) / static_cast<double>(cells);
      static const double xs[4] = {-0.8611363115940526, -0.33998104358485626,
                                   0.33998104358485626, 0.8611363115940526};
      static const double ws[4] = {0.34785484513745385, 0.6521451548625461,
                                   0.6521451548625461, 0.34785484513745385};
      for (std::size_t cell = 0; cell < cells; ++cell) {
        const double mid = a + (static_cast<double>(cell) + 0.5) * h;
        for (int i = 0; i < 4; ++i) {
          const double zz = mid + 0.5 * h * xs[i];
          z(0) = zz;
          add_node(z, 0.5 * h * ws[i] * normal_pdf(zz / sd) / sd);
        }
      }
    }
    return out;
  }

  // Tensor Gauss-Hermite after whitening with the Cholesky factor.
  const auto& rule = hermite_rule(spec.gh_order());
  const std::size_t q = rule.nodes.size();
  const double norm = std::pow(std::numbers::pi, -0.5 * n);
  std::vector<std::size_t> idx(n, 0);
  Eigen::VectorXd x(n);
  const double sqrt2 = std::numbers::sqrt2;
  while (true) {
    double w = norm;
    for (int d = 0; d < n; ++d) {
      x(d) = rule.nodes[idx[d]];
      w *= rule.weights[idx[d]];
    }
    add_node(sqrt2 * (g.chol * x), w);
    int d = 0;
    for (; d < n; ++d) {
      if (++idx[d] < q) break;
      idx[d] = 0;
    }
    if (d == n) break;
  }
  return out;
}

}  // namespace

double psi(const CylindricalSpec& spec, double t, const Eigen::VectorXd& y) {
  if (t > spec.T + 1e-12) throw std::domain_error("psi: t > T");
  if (std::abs(t - spec.T) <= 1e-12) return spec.f(y);
  if (spec.sigma == 0.0) {
    if (!spec.f_continuous) {
      throw DegenerateError("psi: sigma=0 with discontinuous f");
    }
    return spec.f(y);
  }
  return psi_accumulate(spec, gram(spec, t), t, y).value;
}

PsiDerivs psi_derivs(const CylindricalSpec& spec, double t,
                     const Eigen::VectorXd& y) {
  if (t > spec.T + 1e-12) throw std::domain_error("psi_derivs: t > T");
  if (std::abs(t - spec.T) <= 1e-12) {
    throw std::domain_error("psi_derivs: derivatives undefined at t = T");
  }
  if (spec.sigma == 0.0) {
    throw DegenerateError("psi_derivs: sigma = 0 is degenerate");
  }
  return psi_accumulate(spec, gram(spec, t), t, y);
}

Eigen::VectorXd features(const CylindricalSpec& spec, double t,
                         const SampledPath& eta, IntervalMode mode) {
  const int n = spec.n();
  const std::size_t N = eta.n_steps();
  const double d = eta.dx();
  const auto m = static_cast<std::size_t>(std::llround(t / d));
  if (std::abs(t - static_cast<double>(m) * d) > 1e-9 * std::max(1.0, spec.T)) {
    throw std::invalid_argument("features: t is not grid-aligned");
  }
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double integ = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
      const double w = (j == 0 || j == m) ? 0.5 : 1.0;
      integ += w * eta.at(N - m + j) * spec.phi[i].df(static_cast<double>(j) * d);
    }
    if (m == 0) integ = 0.0;
    y(i) = eta.at(N) * spec.phi[i].f(t) - d * integ;
    if (mode == IntervalMode::kOpen) {
      y(i) -= spec.phi[i].f(0.0) * eta(-t);
    }
  }
  return y;
}

CylSolver::CylSolver(CylindricalSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

const GramMatrix& CylSolver::gram_at(double t) const {
  const auto key = static_cast<long long>(std::llround(t * 1e12));
  std::lock_guard lock(mtx_);
  auto it = gram_cache_.find(key);
  if (it == gram_cache_.end()) {
    it = gram_cache_
             .emplace(key, std::make_shared<GramMatrix>(gram(spec_, t)))
             .first;
  }
  return *it->second;
}

PsiDerivs CylSolver::psi_at(double t, const Eigen::VectorXd& y) const {
  if (spec_.sigma == 0.0) {
    throw DegenerateError("CylSolver: sigma = 0 is degenerate");
  }
  return psi_accumulate(spec_, gram_at(t), t, y);
}

double CylSolver::u(double t, const SampledPath& eta) const {
  const Eigen::VectorXd y = features(spec_, t, eta);
  if (std::abs(t - spec_.T) <= 1e-12) return spec_.f(y);
  return psi_at(t, y).value;
}

double CylSolver::delta0(double t, const SampledPath& eta) const {
  const auto pd = psi_at(t, features(spec_, t, eta));
  double s = 0.0;
  for (int i = 0; i < spec_.n(); ++i) s += pd.dy(i) * spec_.phi[i].f(t);
  return s;
}

PathMeasure CylSolver::du(double t, const SampledPath& eta) const {
  const auto pd = psi_at(t, features(spec_, t, eta));
  const int n = spec_.n();
  PathMeasure m;
  m.horizon = spec_.T;
  for (int i = 0; i < n; ++i) m.atom0 += pd.dy(i) * spec_.phi[i].f(t);

  const auto dac = [this, pd, t, n](double x) {
    if (x < -t - 1e-12) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s -= pd.dy(i) * spec_.phi[i].df(x + t);
    return s;
  };
  m.density = SampledPath::from_function(eta.horizon(), eta.n_steps(), dac);
  m.density_fn = dac;
  m.density_deriv_fn = [this, pd, t, n](double x) {
    if (x < -t - 1e-12) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s -= pd.dy(i) * spec_.phi[i].ddf(x + t);
    return s;
  };
  return m;
}

Kernel2 CylSolver::d2u(double t, const SampledPath& eta) const {
  const auto pd = psi_at(t, features(spec_, t, eta));
  const int n = spec_.n();
  Kernel2 k;
  k.horizon = spec_.T;
  Eigen::VectorXd ph(n);
  for (int i = 0; i < n; ++i) ph(i) = spec_.phi[i].f(t);
  k.atom00 = ph.dot(pd.d2y * ph);

  const auto cross = [this, pd, &ph, t, n](double x) {
    if (x < -t - 1e-12) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        s -= pd.d2y(i, j) * ph(j) * spec_.phi[i].df(x + t);
      }
    }
    return s;
  };
  k.cross_x = SampledPath::from_function(eta.horizon(), eta.n_steps(), cross);
  k.cross_y = k.cross_x;  // symmetric Hessian of Psi

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = pd.d2y(i, j);
      auto gx = SampledPath::from_function(
          eta.horizon(), eta.n_steps(), [this, c, t, i](double x) {
            return x < -t - 1e-12 ? 0.0 : c * spec_.phi[i].df(x + t);
          });
      auto hy = SampledPath::from_function(
          eta.horizon(), eta.n_steps(), [this, t, j](double y) {
            return y < -t - 1e-12 ? 0.0 : spec_.phi[j].df(y + t);
          });
      k.separable.emplace_back(std::move(gx), std::move(hy));
    }
  }
  return k;
}

namespace {

double open_feature_time_derivative(const CylindricalSpec& spec,
                                    const PhiBasis& phi, double t,
                                    const SampledPath& eta) {
  // I_i as the open-interval forward integral of phi_i'(.+t) against d-eta.
  PathMeasure mu;
  mu.horizon = spec.T;
  mu.density_fn = [&phi, t](double x) { return phi.df(x + t); };
  mu.density_deriv_fn = [&phi, t](double x) { return phi.ddf(x + t); };
  const auto f = BVFunction::from_path(eta);
  return forward_integral(mu, f, {-t, 0.0, IntervalMode::kOpen}).value;
}

}  // namespace

double CylSolver::dtu(double t, const SampledPath& eta) const {
  const auto pd = psi_at(t, features(spec_, t, eta));
  double s = pd.dt;
  for (int i = 0; i < spec_.n(); ++i) {
    s += pd.dy(i) * open_feature_time_derivative(spec_, spec_.phi[i], t, eta);
  }
  return s;
}

double CylSolver::residual(double t, const SampledPath& eta) const {
  const auto pd = psi_at(t, features(spec_, t, eta));
  const int n = spec_.n();

  double dt_term = pd.dt;
  for (int i = 0; i < n; ++i) {
    dt_term +=
        pd.dy(i) * open_feature_time_derivative(spec_, spec_.phi[i], t, eta);
  }

  PathMeasure dac;
  dac.horizon = spec_.T;
  dac.density_fn = [this, pd, t, n](double x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s -= pd.dy(i) * spec_.phi[i].df(x + t);
    return s;
  };
  dac.density_deriv_fn = [this, pd, t, n](double x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s -= pd.dy(i) * spec_.phi[i].ddf(x + t);
    return s;
  };
  const auto f = BVFunction::from_path(eta);
  const double transport =
      forward_integral(dac, f, {-t, 0.0, IntervalMode::kOpen}).value;

  Eigen::VectorXd ph(n);
  for (int i = 0; i < n; ++i) ph(i) = spec_.phi[i].f(t);
  const double atom00 = ph.dot(pd.d2y * ph);

  return dt_term + transport + 0.5 * spec_.sigma * spec_.sigma * atom00;
}

std::function<double(const Eigen::VectorXd&)> outer_square() {
  return [](const Eigen::VectorXd& y) { return y(0) * y(0); };
}
std::function<double(const Eigen::VectorXd&)> outer_linear() {
  return [](const Eigen::VectorXd& y) { return y(0); };
}
std::function<double(const Eigen::VectorXd&)> outer_call() {
  return [](const Eigen::VectorXd& y) { return std::max(y(0), 0.0); };
}
std::function<double(const Eigen::VectorXd&)> outer_sum2() {
  return [](const Eigen::VectorXd& y) { return y(0) * y(0) + y(1); };
}

PhiBasis phi_const(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

PhiBasis phi_monomial(int degree) {
  return {[degree](double s) { return std::pow(s, degree); },
          [degree](double s) {
            return degree == 0 ? 0.0 : degree * std::pow(s, degree - 1);
          },
          [degree](double s) {
            return degree <= 1 ? 0.0
                               : degree * (degree - 1) * std::pow(s, degree - 2);
          }};
}

}  // namespace pathheat
