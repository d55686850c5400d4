#pragma once

#include <string>
#include <string_view>

#include "pathheat/path.hpp"

namespace pathheat {

// Shortest decimal representation that round-trips at double precision.
std::string format_double(double x);
double parse_double(std::string_view s);

// Each object is stored as <base>.csv (columnar "x,value" rows) plus a JSON
// envelope <base>.json with {T, N, kind} and any point masses.
void save_path(const SampledPath& p, const std::string& base);
SampledPath load_path(const std::string& base);

void save_trajectory(const Trajectory& t, const std::string& base);
Trajectory load_trajectory(const std::string& base);

void save_measure(const PathMeasure& m, const std::string& base);
PathMeasure load_measure(const std::string& base);

}  // namespace pathheat
