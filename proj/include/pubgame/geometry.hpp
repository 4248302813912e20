#pragma once

#include <string>
#include <vector>

namespace pubgame {

using Point = std::vector<double>;

enum class DistanceKind { NormalizedSquaredEuclidean, Absolute1d };

// Distance on [0,1]^k with values in [0,1]. The squared-Euclidean variant is
// ||x - y||^2 / c; c = k makes the bound tight on the unit cube.
struct DistanceSpec {
  DistanceKind kind = DistanceKind::NormalizedSquaredEuclidean;
  double normalizer = 1.0;  // c > 0, squared-Euclidean only

  static DistanceSpec normalized_squared_euclidean(int k);
  static DistanceSpec absolute_1d();
};

// Throws std::invalid_argument on dimension mismatch or empty input.
double distance(const DistanceSpec& spec, const Point& x, const Point& y);

bool in_unit_cube(const Point& x);
Point clamped_to_unit_cube(Point x);

std::string to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(const std::string& name);

}  // namespace pubgame
