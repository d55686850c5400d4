#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "pathheat/path.hpp"
#include "pathheat/reg_calculus.hpp"

namespace pathheat {

// C^2 basis function on [0,T] with analytic first and second derivatives.
struct PhiBasis {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> ddf;
};

struct CylindricalSpec {
  double T = 1.0;
  double sigma = 1.0;
  std::vector<PhiBasis> phi;
  std::function<double(const Eigen::VectorXd&)> f;
  bool f_continuous = true;
  // Kink locations of f in its first coordinate (supported for n == 1 only);
  // quadrature is split there so non-smooth payoffs keep full accuracy.
  std::vector<double> f_kinks;
  std::size_t quad_grid = 512;  // cells for the Gram/feature quadratures

  int n() const { return static_cast<int>(phi.size()); }
  std::size_t gh_order() const { return n() <= 2 ? 64 : 16; }
  void validate() const;
};

struct GramMatrix {
  double t = 0.0;
  Eigen::MatrixXd sigma;     // Sigma_t, (i,j) -> int_t^T phi_i phi_j
  Eigen::MatrixXd chol;      // lower Cholesky factor
  Eigen::MatrixXd inverse;
  double det = 0.0;
  double logdet = 0.0;
};

class SingularGramError : public std::runtime_error {
 public:
  SingularGramError(double t, double det)
      : std::runtime_error("Gram matrix singular at t=" + std::to_string(t) +
                           " (det=" + std::to_string(det) + ")"),
        t(t),
        det(det) {}
  double t;
  double det;
};

class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kDetFloor = 1e-12;

GramMatrix gram(const CylindricalSpec& spec, double t);

double gaussian_p(const GramMatrix& g, const Eigen::VectorXd& z);

struct GaussianDerivs {
  double p = 0.0;
  double dt = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};
GaussianDerivs gaussian_dp(const CylindricalSpec& spec, const GramMatrix& g,
                           double t, const Eigen::VectorXd& z);

struct PsiDerivs {
  double value = 0.0;
  double dt = 0.0;
  Eigen::VectorXd dy;
  Eigen::MatrixXd d2y;
};

double psi(const CylindricalSpec& spec, double t, const Eigen::VectorXd& y);
PsiDerivs psi_derivs(const CylindricalSpec& spec, double t,
                     const Eigen::VectorXd& y);

// Feature vector: y_i = int over [-t,0] of phi_i(s+t) against d-eta, reduced
// to eta(0)phi_i(t) - int_0^t eta(s-t) phi_i'(s) ds on the grid.  Open mode
// drops the boundary mass phi_i(0) eta(-t).
Eigen::VectorXd features(const CylindricalSpec& spec, double t,
                         const SampledPath& eta,
                         IntervalMode mode = IntervalMode::kClosed);

// Explicit solution for cylindrical terminal conditions; Gram factors and the
// per-time quadrature setup are cached per grid time.
class CylSolver {
 public:
  explicit CylSolver(CylindricalSpec spec);

  const CylindricalSpec& spec() const { return spec_; }

  double u(double t, const SampledPath& eta) const;
  PathMeasure du(double t, const SampledPath& eta) const;
  Kernel2 d2u(double t, const SampledPath& eta) const;
  double dtu(double t, const SampledPath& eta) const;
  // L u = dt u + int_{]-t,0]} D^{ac}u d-eta + (sigma^2/2) D^2u({0,0}).
  double residual(double t, const SampledPath& eta) const;
  // Weight of Du on delta_0 (the integrand of the martingale representation).
  double delta0(double t, const SampledPath& eta) const;

  PsiDerivs psi_at(double t, const Eigen::VectorXd& y) const;

 private:
  const GramMatrix& gram_at(double t) const;

  CylindricalSpec spec_;
  mutable std::mutex mtx_;
  mutable std::map<long long, std::shared_ptr<GramMatrix>> gram_cache_;
};

// Builtin outer functions for scenarios and tests.
std::function<double(const Eigen::VectorXd&)> outer_square();   // y^2 (n=1)
std::function<double(const Eigen::VectorXd&)> outer_linear();   // y   (n=1)
std::function<double(const Eigen::VectorXd&)> outer_call();     // max(y,0)
std::function<double(const Eigen::VectorXd&)> outer_sum2();     // y1^2 + y2

PhiBasis phi_const(double c = 1.0);
PhiBasis phi_monomial(int degree);  // s^degree

}  // namespace pathheat
