#include "pathheat/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>

#include "pathheat/clark_ocone.hpp"
#include "pathheat/cylindrical.hpp"
#include "pathheat/flow.hpp"
#include "pathheat/functional.hpp"
#include "pathheat/quad.hpp"
#include "pathheat/reg_calculus.hpp"
#include "pathheat/rng.hpp"
#include "pathheat/smooth.hpp"

namespace pathheat {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::size_t param_size(const json& p, const char* key, std::size_t dflt) {
  if (p.contains(key)) return p.at(key).get<std::size_t>();
  return dflt;
}

struct SuiteContext {
  RunnerReport* report;
  std::uint64_t seed;
  std::filesystem::path out_dir;  // empty when no artifacts requested

  void check(const std::string& name, const std::string& reference,
             const std::function<double()>& value, double tolerance,
             std::optional<double> std_error = std::nullopt) {
    CheckRecord rec;
    rec.name = name;
    rec.reference = reference;
    rec.tolerance = tolerance;
    rec.std_error = std_error;
    try {
      rec.value = value();
      const double gate =
          std_error ? tolerance + 3.0 * (*std_error) : tolerance;
      rec.pass = std::abs(rec.value) <= gate;
    } catch (const std::exception& e) {
      rec.pass = false;
      rec.error = e.what();
    }
    report->overall = report->overall && rec.pass;
    report->checks.push_back(rec);
  }

  // Variant where the computation also produces the standard error.
  void check_stat(const std::string& name, const std::string& reference,
                  const std::function<std::pair<double, double>()>& run,
                  double tolerance) {
    CheckRecord rec;
    rec.name = name;
    rec.reference = reference;
    rec.tolerance = tolerance;
    try {
      const auto [v, se] = run();
      rec.value = v;
      rec.std_error = se;
      rec.pass = std::abs(v) <= tolerance + 3.0 * se;
    } catch (const std::exception& e) {
      rec.pass = false;
      rec.error = e.what();
    }
    report->overall = report->overall && rec.pass;
    report->checks.push_back(rec);
  }
};

// ---------------------------------------------------------------------------
// integrate suite: closed forms vs the eps-limit and the boundary identity.

void suite_integrate(SuiteContext& ctx, const json& params) {
  const std::size_t n_cases = param_size(params, "n_cases", 12);
  CounterRng rng(ctx.seed);

  double worst_agree = 0.0;
  double worst_boundary = 0.0;
  for (std::size_t c = 0; c < n_cases; ++c) {
    // Random cubic density and cubic integrand on a random subinterval.
    double mc[4], fc[4];
    for (int i = 0; i < 4; ++i) {
      mc[i] = 2.0 * rng.uniform(c, 0, i) - 1.0;
      fc[i] = 2.0 * rng.uniform(c, 1, i) - 1.0;
    }
    const double a = -0.9 + 0.3 * rng.uniform(c, 2);
    const double b = -0.05 * rng.uniform(c, 3);
    auto poly = [](const double* k, double x) {
      return k[0] + x * (k[1] + x * (k[2] + x * k[3]));
    };
    auto dpoly = [](const double* k, double x) {
      return k[1] + x * (2.0 * k[2] + x * 3.0 * k[3]);
    };
    PathMeasure mu;
    mu.horizon = 1.0;
    mu.density_fn = [mc, poly](double x) { return poly(mc, x); };
    mu.density_deriv_fn = [mc, dpoly](double x) { return dpoly(mc, x); };
    const auto f = BVFunction::from_function(
        -1.0, 0.0, 64, [fc, poly](double x) { return poly(fc, x); },
        [fc, dpoly](double x) { return dpoly(fc, x); });

    const IntervalSpec open{a, b, IntervalMode::kOpen};
    const IntervalSpec closed{a, b, IntervalMode::kClosed};
    const auto ropen = forward_integral(mu, f, open);
    const auto rclosed = forward_integral(mu, f, closed);

    // eps-limit reference: disable the analytic density derivative so the
    // closed-form route is bypassed and the regularized quotient is used.
    const double i0 = forward_integral_eps(mu, f, open, 1.0 / 512.0);
    const double i1 = forward_integral_eps(mu, f, open, 1.0 / 1024.0);
    const double i2 = forward_integral_eps(mu, f, open, 1.0 / 2048.0);
    const double eps_value =
        (4.0 * (2.0 * i2 - i1) - (2.0 * i1 - i0)) / 3.0;
    worst_agree = std::max(worst_agree, std::abs(ropen.value - eps_value));

    const double identity =
        rclosed.value - ropen.value - mu.density_fn(a) * f.eval(a);
    worst_boundary = std::max(worst_boundary, std::abs(identity));
  }
  ctx.check("closed_form_vs_eps_limit",
            "forward integral closed forms agree with the regularized limit",
            [&] { return worst_agree; }, 1e-6);
  ctx.check("open_closed_boundary_identity",
            "closed-interval minus open-interval integral equals the "
            "boundary mass density(a)*f(a)",
            [&] { return worst_boundary; }, 1e-10);
}

// ---------------------------------------------------------------------------
// cylindrical suite: PDE residuals and the Bachelier closed form.

CylindricalSpec quadratic_spec() {
  CylindricalSpec spec;
  spec.T = 1.0;
  spec.sigma = 1.0;
  spec.phi = {phi_const()};
  spec.f = outer_square();
  return spec;
}

SampledPath random_path(double T, std::size_t n, std::uint64_t seed,
                        std::uint64_t idx) {
  CounterRng rng(seed);
  const double a = rng.normal(idx, 0);
  const double b = rng.normal(idx, 1);
  const double c = rng.normal(idx, 2);
  return SampledPath::from_function(T, n, [&](double x) {
    return a + b * x + c * std::sin(3.0 * x);
  });
}

void suite_cylindrical(SuiteContext& ctx, const json& params) {
  const std::size_t n_points = param_size(params, "n_points", 8);
  {
    CylSolver solver(quadratic_spec());
    double worst = 0.0;
    ctx.check("pde_residual_quadratic",
              "explicit solution for a squared linear feature satisfies the "
              "path-dependent heat equation",
              [&] {
                for (std::size_t k = 0; k < n_points; ++k) {
                  CounterRng rng(ctx.seed ^ 0x11U);
                  const double t =
                      std::round(0.9 * rng.uniform(k, 9) * 256.0) / 256.0;
                  const auto eta = random_path(1.0, 256, ctx.seed ^ 0x12U, k);
                  worst = std::max(worst, std::abs(solver.residual(t, eta)));
                }
                return worst;
              },
              1e-6);
  }
  {
    CylindricalSpec spec = quadratic_spec();
    spec.f = outer_call();
    spec.f_kinks = {0.0};
    CylSolver solver(spec);
    ctx.check("bachelier_closed_form",
              "call payoff on a constant profile matches the Bachelier "
              "formula y*Phi(y/s) + s*phi(y/s), s = sqrt(T-t)",
              [&] {
                double worst = 0.0;
                for (int i = 0; i < 8; ++i) {
                  const double t = 0.1 * static_cast<double>(i);
                  const double tt = std::round(t * 256.0) / 256.0;
                  for (int j = 0; j < 8; ++j) {
                    const double y = -1.5 + static_cast<double>(j) * 3.0 / 7.0;
                    const auto eta = SampledPath::constant(1.0, 256, y);
                    const double s = std::sqrt(1.0 - tt);
                    const double ref =
                        y * normal_cdf(y / s) + s * normal_pdf(y / s);
                    worst = std::max(worst,
                                     std::abs(solver.u(tt, eta) - ref));
                  }
                }
                return worst;
              },
              1e-6);
  }
}

// ---------------------------------------------------------------------------
// flow-check suite.

void suite_flow(SuiteContext& ctx, const json& params) {
  const std::size_t n_tuples = param_size(params, "n_tuples", 20);
  const std::size_t ks_paths = param_size(params, "ks_paths", 2000);

  ctx.check("flow_identity",
            "two-stage composition of the Brownian path flow is bit-exact "
            "against the direct flow",
            [&] {
              double worst = 0.0;
              for (std::size_t c = 0; c < n_tuples; ++c) {
                FlowParams fp;
                fp.N = 128;
                fp.seed = ctx.seed + c;
                const auto w = sample_brownian(fp, c);
                const auto eta = random_path(1.0, 128, ctx.seed ^ 0x21U, c);
                CounterRng rng(ctx.seed ^ 0x22U);
                double s = rng.uniform(c, 0);
                double r = rng.uniform(c, 1);
                double t = rng.uniform(c, 2);
                if (s > t) std::swap(s, t);
                if (t > r) std::swap(t, r);
                if (s > t) std::swap(s, t);
                auto snap = [](double v) {
                  return std::round(v * 128.0) / 128.0;
                };
                worst = std::max(worst, check_flow_property(
                                            snap(s), snap(t), snap(r), eta,
                                            1.0, w));
              }
              return worst;
            },
            1e-12);

  ctx.check("time_homogeneity_ks",
            "marginals of the flow started at s match the flow restarted at "
            "0 over the same elapsed time (two-sample KS gate, alpha=0.01)",
            [&] {
              FlowParams fp;
              fp.N = 128;
              fp.seed = ctx.seed ^ 0x31U;
              const auto eta = random_path(1.0, 128, ctx.seed ^ 0x32U, 0);
              const auto rep =
                  check_time_homogeneity(fp, 0.25, 0.75, eta, ks_paths);
              // One-sided gate: only an excess over the critical value fails.
              return std::max(0.0, rep.max_stat - rep.critical);
            },
            0.0);
}

// ---------------------------------------------------------------------------
// smooth suite.

void suite_smooth(SuiteContext& ctx, const json& params) {
  const std::size_t n_paths = param_size(params, "n_paths", 20000);
  SmoothParams sp;
  sp.N = 128;
  const auto w = Weight::from_functions(
      sp.T, sp.N, [](double) { return 1.0; }, [](double) { return 0.0; });
  SmoothSolver solver(make_quadratic(w), sp);
  const auto zero = SampledPath::constant(sp.T, sp.N, 0.0);

  ctx.check_stat("terminal_variance_oracle",
                 "value at the zero path for the squared path integral "
                 "equals T^3/3 (double integral of the Brownian covariance)",
                 [&] {
                   const auto est = solver.u(0.0, zero, n_paths, ctx.seed);
                   return std::make_pair(est.value - 1.0 / 3.0,
                                         est.std_error);
                 },
                 0.0);

  ctx.check("per_path_residual_quadratic",
            "per-path cancellation of the time derivative against the "
            "transport and second-order terms",
            [&] {
              const auto eta = random_path(1.0, sp.N, ctx.seed ^ 0x41U, 0);
              const auto res = solver.residual(0.5, eta, 200, ctx.seed);
              return std::abs(res.value) + res.std_error;
            },
            1e-8);
}

// ---------------------------------------------------------------------------
// clark-ocone suite.

void suite_clark(SuiteContext& ctx, const json& params) {
  const std::size_t n_paths = param_size(params, "n_paths", 2000);

  DriverSpec driver;
  driver.kind = DriverKind::kBrownian;
  driver.sigma = 1.0;
  driver.seed = ctx.seed ^ 0x51U;

  {
    CylindricalSpec spec = quadratic_spec();
    spec.f = outer_linear();
    CylSolver solver(spec);
    ctx.check("representation_linear_telescoping",
              "linear payoff representation telescopes pathwise",
              [&] {
                const auto rep = representation_check(
                    [&](double t, const SampledPath& eta) {
                      return solver.delta0(t, eta);
                    },
                    [&](const SampledPath& eta) {
                      return solver.u(1.0, eta);
                    },
                    solver.u(0.0, SampledPath::constant(1.0, 256, 0.0)),
                    driver, {256}, 50);
                return rep.rmse_rel;
              },
              1e-12);
  }
  {
    CylSolver solver(quadratic_spec());
    ctx.check("representation_quadratic",
              "squared payoff representation converges with the grid",
              [&] {
                const auto rep = representation_check(
                    [&](double t, const SampledPath& eta) {
                      return solver.delta0(t, eta);
                    },
                    [&](const SampledPath& eta) {
                      return solver.u(1.0, eta);
                    },
                    solver.u(0.0, SampledPath::constant(1.0, 256, 0.0)),
                    driver, {128, 256}, n_paths);
                if (!ctx.out_dir.empty()) {
                  std::ofstream csv(ctx.out_dir / "clark_ocone_convergence.csv");
                  csv << "N,rmse_rel,bias,se\n";
                  for (const auto& row : rep.convergence) {
                    csv << row.N << ',' << row.rmse_rel << ',' << row.bias
                        << ',' << row.se << '\n';
                  }
                }
                return rep.rmse_rel;
              },
              0.10);
  }
}

}  // namespace

nlohmann::ordered_json CheckRecord::to_json() const {
  ordered_json j;
  j["name"] = name;
  j["reference"] = reference;
  j["value"] = value;
  j["tolerance"] = tolerance;
  if (std_error) j["std_error"] = *std_error;
  j["pass"] = pass;
  if (!error.empty()) j["error"] = error;
  return j;
}

nlohmann::ordered_json RunnerReport::to_json() const {
  ordered_json j;
  j["schema"] = 1;
  j["suite"] = suite;
  j["environment"] = {{"version", "0.1.0"}, {"seed", seed}};
  j["params"] = params.is_null() ? json::object() : params;
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) arr.push_back(c.to_json());
  j["checks"] = arr;
  j["overall"] = overall;
  j["wall_ms"] = wall_ms;
  return j;
}

bool is_known_suite(const std::string& suite) {
  return suite == "integrate" || suite == "cylindrical" ||
         suite == "flow-check" || suite == "smooth" ||
         suite == "clark-ocone" || suite == "all";
}

namespace {

RunnerReport execute(const std::string& suite, const json& params,
                     std::uint64_t seed, const std::filesystem::path& dir) {
  if (!is_known_suite(suite)) {
    throw std::invalid_argument("unknown suite: " + suite);
  }
  RunnerReport report;
  report.suite = suite;
  report.seed = seed;
  report.params = params;

  SuiteContext ctx{&report, seed, dir};
  const auto t0 = std::chrono::steady_clock::now();
  if (suite == "integrate" || suite == "all") suite_integrate(ctx, params);
  if (suite == "cylindrical" || suite == "all") suite_cylindrical(ctx, params);
  if (suite == "flow-check" || suite == "all") suite_flow(ctx, params);
  if (suite == "smooth" || suite == "all") suite_smooth(ctx, params);
  if (suite == "clark-ocone" || suite == "all") suite_clark(ctx, params);
  const auto t1 = std::chrono::steady_clock::now();
  report.wall_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return report;
}

}  // namespace

RunnerReport run_suite(const std::string& suite, const json& params,
                       std::uint64_t seed) {
  return execute(suite, params, seed, {});
}

int run_scenario(const std::string& suite, const json& params,
                 std::uint64_t seed, const std::string& out_dir) {
  if (const char* env = std::getenv("PATHHEAT_SEED")) {
    seed = std::strtoull(env, nullptr, 10);
  }
  std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
  std::filesystem::create_directories(dir);
  const RunnerReport report = execute(suite, params, seed, dir);
  std::ofstream out(dir / "report.json");
  out << report.to_json().dump(2) << '\n';
  return report.overall ? 0 : 1;
}

}  // namespace pathheat
