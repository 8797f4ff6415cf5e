// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "kdph/geometry.hpp"

#include <cmath>
#include <utility>

namespace kdph {

namespace {

void check_finite(const Point& p, const char* what) {
  if (!p.allFinite()) {
    throw ContractViolation(std::string(what) + ": non-finite coordinate");
  }
}

}  // namespace

PointCloud::PointCloud(std::vector<Point> pts) : points(std::move(pts)) {
  if (points.empty()) {
    throw ContractViolation("PointCloud: must contain at least one point");
  }
  const Eigen::Index d = points.front().size();
  if (d < 1) {
    throw ContractViolation("PointCloud: ambient dimension must be >= 1");
  }
  for (const Point& p : points) {
    if (p.size() != d) {
      throw ContractViolation("PointCloud: points have mixed dimensions");
    }
    check_finite(p, "PointCloud");
  }
}

WeightedCloud::WeightedCloud(std::vector<WeightedPoint> pts,
                             CloudProvenance provenance, int k)
    : points(std::move(pts)), provenance(provenance), k(k) {
  if (points.empty()) {
    throw ContractViolation("WeightedCloud: must contain at least one point");
  }
  const Eigen::Index d = points.front().point.size();
  if (d < 1) {
    throw ContractViolation("WeightedCloud: ambient dimension must be >= 1");
  }
  for (const WeightedPoint& p : points) {
    if (p.point.size() != d) {
      throw ContractViolation("WeightedCloud: points have mixed dimensions");
    }
    check_finite(p.point, "WeightedCloud");
    if (!std::isfinite(p.weight)) {
      throw ContractViolation("WeightedCloud: non-finite weight");
    }
  }
  if (provenance != CloudProvenance::raw && k < 1) {
    throw ContractViolation("WeightedCloud: derived clouds need k >= 1");
  }
}

double squared_distance(const Point& x, const Point& y) {
  if (x.size() != y.size()) {
    throw ContractViolation("squared_distance: dimension mismatch");
  }
  // Accumulated componentwise; never expanded into norms and dot products.
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double power_distance(const Point& x, const WeightedPoint& p) {
  return squared_distance(x, p.point) - p.weight;
}

double weighted_pair_distance(const WeightedPoint& p, const WeightedPoint& q) {
  return squared_distance(p.point, q.point) - p.weight - q.weight;
}

WeightedPoint barycenter(std::span<const Point> subset) {
  if (subset.empty()) {
    throw ContractViolation("barycenter: empty subset");
  }
  const Eigen::Index d = subset.front().size();
  Point b = Point::Zero(d);
  for (const Point& p : subset) {
    if (p.size() != d) {
      throw ContractViolation("barycenter: dimension mismatch");
    }
    b += p;
  }
  b /= static_cast<double>(subset.size());
  double w = 0.0;
  for (const Point& p : subset) {
    w += squared_distance(b, p);
  }
  w /= -static_cast<double>(subset.size());
  return WeightedPoint{std::move(b), w};
}

WeightedPoint barycenter(const PointCloud& cloud, std::span<const int> subset) {
  if (subset.empty()) {
    throw ContractViolation("barycenter: empty subset");
  }
  std::vector<Point> pts;
  pts.reserve(subset.size());
  for (int i : subset) {
    if (i < 0 || i >= cloud.size()) {
      throw ContractViolation("barycenter: index out of range");
    }
    pts.push_back(cloud[i]);
  }
  return barycenter(std::span<const Point>(pts));
}

}  // namespace kdph
