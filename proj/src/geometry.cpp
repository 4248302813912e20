#include "pubgame/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pubgame {

DistanceSpec DistanceSpec::normalized_squared_euclidean(int k) {
  if (k < 1) throw std::invalid_argument("distance: dimension must be >= 1");
  return {DistanceKind::NormalizedSquaredEuclidean, static_cast<double>(k)};
}

DistanceSpec DistanceSpec::absolute_1d() {
  return {DistanceKind::Absolute1d, 1.0};
}

double distance(const DistanceSpec& spec, const Point& x, const Point& y) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("distance: dimension mismatch");
  switch (spec.kind) {
    case DistanceKind::NormalizedSquaredEuclidean: {
      if (spec.normalizer <= 0.0)
        throw std::invalid_argument("distance: normalizer must be positive");
      double sq = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) {
        const double d = x[t] - y[t];
        sq += d * d;
      }
      return sq / spec.normalizer;
    }
    case DistanceKind::Absolute1d:
      if (x.size() != 1)
        throw std::invalid_argument("distance: absolute-1d needs dimension 1");
      return std::abs(x[0] - y[0]);
  }
  throw std::invalid_argument("distance: unknown kind");
}

bool in_unit_cube(const Point& x) {
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

Point clamped_to_unit_cube(Point x) {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  return x;
}

std::string to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::NormalizedSquaredEuclidean: return "squared-euclidean";
    case DistanceKind::Absolute1d: return "absolute-1d";
  }
  return "?";
}

DistanceKind distance_kind_from_string(const std::string& name) {
  if (name == "squared-euclidean" || name == "normalized-squared-euclidean")
    return DistanceKind::NormalizedSquaredEuclidean;
  if (name == "absolute-1d") return DistanceKind::Absolute1d;
  throw std::invalid_argument("unknown distance kind: " + name);
}

}  // namespace pubgame
