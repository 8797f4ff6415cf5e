// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "kdph/errors.hpp"

namespace kdph {

using Point = Eigen::VectorXd;

// Point with an additive power weight. D(x, p) = |x - p|^2 - w.
struct WeightedPoint {
  Point point;
  double weight = 0.0;
};

// Non-empty list of points sharing one ambient dimension.
struct PointCloud {
  std::vector<Point> points;

  explicit PointCloud(std::vector<Point> pts);

  int size() const { return static_cast<int>(points.size()); }
  int dim() const { return static_cast<int>(points.front().size()); }
  const Point& operator[](int i) const {
    return points[static_cast<std::size_t>(i)];
  }
};

enum class CloudProvenance { raw, barycentric, approx };

// Weighted points plus a record of how the weights were produced.
// `k` is meaningful for barycentric/approx clouds; `sources` holds the
// generating index subsets for barycentric clouds (weights depend on the
// generating subset, not only on the barycenter location).
struct WeightedCloud {
  std::vector<WeightedPoint> points;
  CloudProvenance provenance = CloudProvenance::raw;
  int k = 0;
  std::vector<std::vector<int>> sources;

  explicit WeightedCloud(std::vector<WeightedPoint> pts,
                         CloudProvenance provenance = CloudProvenance::raw,
                         int k = 0);

  int size() const { return static_cast<int>(points.size()); }
  int dim() const { return static_cast<int>(points.front().point.size()); }
  const WeightedPoint& operator[](int i) const {
    return points[static_cast<std::size_t>(i)];
  }
};

// Sum of squared coordinate differences. Dimension mismatch is a
// contract violation.
double squared_distance(const Point& x, const Point& y);

// Power distance D(x, p) = |x - p|^2 - w(p). May be negative for
// positive weights.
double power_distance(const Point& x, const WeightedPoint& p);

// Symmetric pair form D(p, q) = |p - q|^2 - w(p) - w(q). Zero exactly
// when the two weighted points are orthogonal to each other.
double weighted_pair_distance(const WeightedPoint& p, const WeightedPoint& q);

// Iso-barycenter b of the subset with weight w(b) = -(1/k) sum |b - p_i|^2.
WeightedPoint barycenter(std::span<const Point> subset);

// Same, for a subset of a cloud given by indices (indices must be valid).
WeightedPoint barycenter(const PointCloud& cloud, std::span<const int> subset);

}  // namespace kdph
