#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pathheat/path.hpp"

namespace pathheat {

enum class IntervalMode { kOpen, kClosed };  // ]a,b] vs [a,b]

struct IntervalSpec {
  double a = 0.0;
  double b = 0.0;
  IntervalMode mode = IntervalMode::kOpen;

  void validate(double horizon) const {
    if (!(a <= b) || a < -horizon - 1e-12 || b > 1e-12) {
      throw std::invalid_argument("IntervalSpec: need -T <= a <= b <= 0");
    }
  }
};

// Cadlag function on [lo,hi], sampled on a uniform grid, optionally with
// analytic evaluator/derivative callbacks used by the closed-form routes.
struct BVFunction {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> samples;
  bool is_bv = true;
  std::vector<double> deriv_samples;
  std::function<double(double)> fn;
  std::function<double(double)> dfn;

  static BVFunction from_function(double lo, double hi, std::size_t n_steps,
                                  std::function<double(double)> f,
                                  std::function<double(double)> df = {});
  static BVFunction from_path(const SampledPath& p);

  double eval(double x) const;
  double deriv(double x) const;
  bool has_deriv() const { return static_cast<bool>(dfn) || !deriv_samples.empty(); }
  double discrete_total_variation() const;
};

// Cadlag extension of f outside [a,b]: both modes keep f(b) to the right;
// the open-interval extension keeps f(a) to the left, the closed one is 0.
double extend_eval(const BVFunction& f, const IntervalSpec& iv, double x);

// I^-(iv, f, eps) = int (f_ext(x+eps) - f_ext(x))/eps mu(dx) over iv.
double forward_integral_eps(const PathMeasure& mu, const BVFunction& f,
                            const IntervalSpec& iv, double eps);

enum class IntegralMethod { kClosedForm, kEpsLimit };

struct ForwardIntegralResult {
  double value = 0.0;
  IntegralMethod method = IntegralMethod::kClosedForm;
  double error_estimate = 0.0;
  std::vector<std::pair<double, double>> eps_table;  // (eps, I(eps))
};

class NonConvergentError : public std::runtime_error {
 public:
  explicit NonConvergentError(std::vector<std::pair<double, double>> table)
      : std::runtime_error("forward integral eps-sequence did not converge"),
        eps_table(std::move(table)) {}
  std::vector<std::pair<double, double>> eps_table;
};

// Closed form when available (Lebesgue-Stieltjes for BV f on ]a,b], or the
// integration-by-parts forms for BV density), otherwise the eps-limit with
// 3-point Richardson extrapolation over eps_k = 2^-k, k = 4..12.
ForwardIntegralResult forward_integral(const PathMeasure& mu,
                                       const BVFunction& f,
                                       const IntervalSpec& iv);

}  // namespace pathheat
