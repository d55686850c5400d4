#include "pathheat/quad.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace pathheat {

namespace {

// 4-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double kGlNode = 0.3399810435848562648026658;
constexpr double kGlNodeOuter = 0.8611363115940525752239465;
constexpr double kGlWeight = 0.6521451548625461426269361;
constexpr double kGlWeightOuter = 0.3478548451374538573730639;

}  // namespace

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    std::size_t n_cells) {
  if (n_cells == 0) throw std::invalid_argument("integrate_gl: n_cells == 0");
  if (a == b) return 0.0;
  const double h = (b - a) / static_cast<double>(n_cells);
  const double xs[4] = {-kGlNodeOuter, -kGlNode, kGlNode, kGlNodeOuter};
  const double ws[4] = {kGlWeightOuter, kGlWeight, kGlWeight, kGlWeightOuter};
  double s = 0.0;
  for (std::size_t c = 0; c < n_cells; ++c) {
    const double lo = a + static_cast<double>(c) * h;
    const double mid = lo + 0.5 * h;
    for (int i = 0; i < 4; ++i) s += ws[i] * f(mid + 0.5 * h * xs[i]);
  }
  return s * 0.5 * h;
}

double integrate_simpson(const std::function<double(double)>& f, double a,
                         double b, std::size_t n_cells) {
  if (n_cells == 0) {
    throw std::invalid_argument("integrate_simpson: n_cells == 0");
  }
  if (a == b) return 0.0;
  const std::size_t n = 2 * n_cells;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t k = 1; k < n; ++k) {
    s += ((k % 2 == 1) ? 4.0 : 2.0) * f(a + static_cast<double>(k) * h);
  }
  return s * h / 3.0;
}

const HermiteRule& hermite_rule(std::size_t order) {
  static std::mutex mtx;
  static std::map<std::size_t, HermiteRule> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  // Golub-Welsch: eigen-decomposition of the Jacobi matrix for Hermite
  // polynomials with weight exp(-x^2); off-diagonal beta_k = sqrt(k/2).
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double beta = std::sqrt(static_cast<double>(k) / 2.0);
    J(k, k - 1) = beta;
    J(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  HermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mu0 = std::sqrt(std::numbers::pi);
  for (Eigen::Index k = 0; k < n; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace pathheat
