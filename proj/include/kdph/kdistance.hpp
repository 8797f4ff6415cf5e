// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <cstdint>
#include <vector>

#include "kdph/geometry.hpp"

namespace kdph {

struct KDistanceResult {
  double value = 0.0;
  // The k nearest indices, closest first; ties broken by ascending index.
  std::vector<int> neighbor_indices;
};

// Root mean squared distance from x to the k nearest points of P.
// Requires 1 <= k <= |P|.
KDistanceResult k_distance(const Point& x, const PointCloud& P, int k);

// Each point of P weighted by minus its own squared k-distance.
// With k = 1 every weight is 0 because a point is its own nearest neighbor.
WeightedCloud assign_approx_weights(const PointCloud& P, int k);

// min over p of sqrt(D(x, p)) for an approx-weighted cloud.
double approx_k_distance(const Point& x, const WeightedCloud& W);

// All C(|P|, k) barycenters of k-subsets in lexicographic subset order,
// with their generating subsets recorded. Throws BudgetExceeded when
// C(|P|, k) > budget, before any enumeration happens.
WeightedCloud barycenter_cloud(const PointCloud& P, int k,
                               std::int64_t budget = 200000);

// min over b of sqrt(D(x, b)) for a barycentric cloud. Equals the exact
// k-distance of the generating point set.
double k_distance_via_barycenters(const Point& x, const WeightedCloud& B);

// C(n, k) saturated at 2^63 - 1 to keep budget comparisons overflow-safe.
std::int64_t binomial_capped(int n, int k);

}  // namespace kdph
