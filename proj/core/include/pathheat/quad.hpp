#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pathheat {

// Composite 4-point Gauss-Legendre on [a,b] with n_cells cells.
// Exact for polynomials up to degree 7 per cell.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    std::size_t n_cells = 64);

// Composite Simpson on [a,b], n_cells must be >= 1 (2*n_cells panels).
double integrate_simpson(const std::function<double(double)>& f, double a,
                         double b, std::size_t n_cells = 64);

// Gauss-Hermite rule for weight exp(-x^2): int f(x) e^{-x^2} dx ~ sum w f(x).
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const HermiteRule& hermite_rule(std::size_t order);

double normal_pdf(double x);
double normal_cdf(double x);

}  // namespace pathheat
