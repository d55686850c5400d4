#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "pathheat/rng.hpp"
#include "pathheat/serialize.hpp"

using namespace pathheat;

namespace {

std::string temp_base(const char* tag) {
  const auto dir = std::filesystem::temp_directory_path() / "pathheat_tests";
  std::filesystem::create_directories(dir);
  return (dir / tag).string();
}

}  // namespace

TEST_CASE("double formatting round-trips exactly") {
  CounterRng rng(7);
  for (std::size_t k = 0; k < 1000; ++k) {
    const double x = std::ldexp(rng.normal(k, 0), static_cast<int>(k % 64) - 32);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(parse_double(format_double(0.0)) == 0.0);
  CHECK(parse_double(format_double(0.1)) == 0.1);
}

TEST_CASE("path round-trip is bit exact") {
  CounterRng rng(11);
  std::vector<double> v(129);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = rng.normal(k, 1);
  const SampledPath p(0.75, v);
  const auto base = temp_base("path");
  save_path(p, base);
  const auto q = load_path(base);
  REQUIRE(q.n_steps() == p.n_steps());
  CHECK(q.horizon() == p.horizon());
  for (std::size_t k = 0; k <= p.n_steps(); ++k) CHECK(q.at(k) == p.at(k));
}

TEST_CASE("trajectory round-trip is bit exact") {
  CounterRng rng(13);
  std::vector<double> v(65);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = rng.normal(k, 2);
  const Trajectory t(2.0, v);
  const auto base = temp_base("traj");
  save_trajectory(t, base);
  const auto s = load_trajectory(base);
  REQUIRE(s.n_steps() == t.n_steps());
  CHECK(s.horizon() == t.horizon());
  for (std::size_t k = 0; k <= t.n_steps(); ++k) CHECK(s.at(k) == t.at(k));
}

TEST_CASE("measure round-trip keeps atoms and density") {
  PathMeasure m;
  m.horizon = 1.0;
  m.atom0 = 0.25;
  m.atoms = {{-0.5, 1.5}, {-0.125, -0.75}};
  m.density = SampledPath::from_function(
      1.0, 32, [](double x) { return std::sin(5 * x); });
  const auto base = temp_base("measure");
  save_measure(m, base);
  const auto r = load_measure(base);
  CHECK(r.atom0 == m.atom0);
  REQUIRE(r.atoms.size() == m.atoms.size());
  for (std::size_t k = 0; k < m.atoms.size(); ++k) {
    CHECK(r.atoms[k].first == m.atoms[k].first);
    CHECK(r.atoms[k].second == m.atoms[k].second);
  }
  REQUIRE(r.density.has_value());
  for (std::size_t k = 0; k <= 32; ++k) {
    CHECK(r.density->at(k) == m.density->at(k));
  }
}
