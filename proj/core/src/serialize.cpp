#include "pathheat/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pathheat {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

double parse_double(std::string_view s) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{}) {
    throw std::runtime_error("parse_double: bad literal '" + std::string(s) +
                             "'");
  }
  return x;
}

namespace {

void write_csv(const std::string& file, double lo, double dx,
               const std::vector<double>& v) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file);
  out << "x,value\n";
  for (std::size_t k = 0; k < v.size(); ++k) {
    out << format_double(lo + static_cast<double>(k) * dx) << ','
        << format_double(v[k]) << '\n';
  }
}

std::vector<double> read_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("malformed CSV row in " + file);
    }
    v.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  return v;
}

void write_envelope(const std::string& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file);
  out << j.dump(2) << '\n';
}

json read_envelope(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  return json::parse(in);
}

}  // namespace

void save_path(const SampledPath& p, const std::string& base) {
  write_csv(base + ".csv", -p.horizon(), p.dx(), p.values());
  write_envelope(base + ".json",
                 {{"T", p.horizon()}, {"N", p.n_steps()}, {"kind", "path"}});
}

SampledPath load_path(const std::string& base) {
  const json env = read_envelope(base + ".json");
  if (env.at("kind") != "path") throw std::runtime_error("kind is not 'path'");
  auto v = read_csv(base + ".csv");
  if (v.size() != env.at("N").get<std::size_t>() + 1) {
    throw std::runtime_error("CSV row count disagrees with envelope N");
  }
  return SampledPath(env.at("T").get<double>(), std::move(v));
}

void save_trajectory(const Trajectory& t, const std::string& base) {
  write_csv(base + ".csv", 0.0, t.dx(), t.values());
  write_envelope(base + ".json", {{"T", t.horizon()},
                                  {"N", t.n_steps()},
                                  {"kind", "trajectory"}});
}

Trajectory load_trajectory(const std::string& base) {
  const json env = read_envelope(base + ".json");
  if (env.at("kind") != "trajectory") {
    throw std::runtime_error("kind is not 'trajectory'");
  }
  auto v = read_csv(base + ".csv");
  if (v.size() != env.at("N").get<std::size_t>() + 1) {
    throw std::runtime_error("CSV row count disagrees with envelope N");
  }
  return Trajectory(env.at("T").get<double>(), std::move(v));
}

void save_measure(const PathMeasure& m, const std::string& base) {
  json env = {{"T", m.horizon}, {"kind", "measure"}, {"atom0", m.atom0}};
  json atoms = json::array();
  for (const auto& [x, w] : m.atoms) atoms.push_back({x, w});
  env["atoms"] = atoms;
  if (m.density) {
    env["N"] = m.density->n_steps();
    write_csv(base + ".csv", -m.horizon, m.density->dx(),
              m.density->values());
  } else {
    env["N"] = 0;
  }
  write_envelope(base + ".json", env);
}

PathMeasure load_measure(const std::string& base) {
  const json env = read_envelope(base + ".json");
  if (env.at("kind") != "measure") {
    throw std::runtime_error("kind is not 'measure'");
  }
  PathMeasure m;
  m.horizon = env.at("T").get<double>();
  m.atom0 = env.at("atom0").get<double>();
  for (const auto& a : env.at("atoms")) {
    m.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  }
  if (env.at("N").get<std::size_t>() > 0) {
    m.density = SampledPath(m.horizon, read_csv(base + ".csv"));
  }
  return m;
}

}  // namespace pathheat
