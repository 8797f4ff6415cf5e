// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "kdph/kdistance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kdph {

std::int64_t binomial_capped(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  const std::int64_t cap = std::numeric_limits<std::int64_t>::max();
  std::int64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    // c * (n - k + i) / i stays integral at every step.
    if (c > cap / (n - k + i)) return cap;
    c = c * (n - k + i) / i;
  }
  return c;
}

namespace {

// Mean of the k smallest squared distances from x to P, ties broken by
// ascending index. Callers validate k.
double mean_squared_k(const Point& x, const PointCloud& P, int k,
                      std::vector<int>* neighbors) {
  const int n = P.size();
  std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dist[static_cast<std::size_t>(i)] = {squared_distance(x, P[i]), i};
  }
  // Full sort by (distance, index): deterministic under ties.
  std::sort(dist.begin(), dist.end());
  double s = 0.0;
  for (int j = 0; j < k; ++j) {
    s += dist[static_cast<std::size_t>(j)].first;
    if (neighbors) neighbors->push_back(dist[static_cast<std::size_t>(j)].second);
  }
  return s / static_cast<double>(k);
}

}  // namespace

KDistanceResult k_distance(const Point& x, const PointCloud& P, int k) {
  if (k < 1 || k > P.size()) {
    throw ContractViolation("k_distance: k must satisfy 1 <= k <= |P|, got " +
                            std::to_string(k));
  }
  KDistanceResult r;
  r.neighbor_indices.reserve(static_cast<std::size_t>(k));
  r.value = std::sqrt(mean_squared_k(x, P, k, &r.neighbor_indices));
  return r;
}

WeightedCloud assign_approx_weights(const PointCloud& P, int k) {
  const int n = P.size();
  if (k < 1 || k > n) {
    throw ContractViolation("assign_approx_weights: need 1 <= k <= |P|");
  }
  std::vector<WeightedPoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Weight is minus the mean squared distance itself, not the square of
    // the root: keeps w(p) exact when the mean is exact.
    pts.push_back(WeightedPoint{P[i], -mean_squared_k(P[i], P, k, nullptr)});
  }
  return WeightedCloud(std::move(pts), CloudProvenance::approx, k);
}

double approx_k_distance(const Point& x, const WeightedCloud& W) {
  if (W.provenance != CloudProvenance::approx) {
    throw ContractViolation("approx_k_distance: cloud is not approx-weighted");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const WeightedPoint& p : W.points) {
    best = std::min(best, power_distance(x, p));
  }
  return std::sqrt(std::max(0.0, best));
}

WeightedCloud barycenter_cloud(const PointCloud& P, int k,
                               std::int64_t budget) {
  const int n = P.size();
  if (k < 1 || k > n) {
    throw ContractViolation("barycenter_cloud: need 1 <= k <= |P|");
  }
  if (budget < 1) {
    throw ContractViolation("barycenter_cloud: budget must be positive");
  }
  const std::int64_t count = binomial_capped(n, k);
  if (count > budget) {
    throw BudgetExceeded(
        "barycenter_cloud: C(" + std::to_string(n) + ", " + std::to_string(k) +
            ") = " + std::to_string(count) + " exceeds budget " +
            std::to_string(budget),
        static_cast<std::uint64_t>(count), static_cast<std::uint64_t>(budget));
  }

  std::vector<WeightedPoint> pts;
  std::vector<std::vector<int>> sources;
  pts.reserve(static_cast<std::size_t>(count));
  sources.reserve(static_cast<std::size_t>(count));

  // Lexicographic k-subset enumeration.
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    pts.push_back(barycenter(P, idx));
    sources.push_back(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  WeightedCloud B(std::move(pts), CloudProvenance::barycentric, k);
  B.sources = std::move(sources);
  return B;
}

double k_distance_via_barycenters(const Point& x, const WeightedCloud& B) {
  if (B.provenance != CloudProvenance::barycentric) {
    throw ContractViolation(
        "k_distance_via_barycenters: cloud is not barycentric");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const WeightedPoint& b : B.points) {
    best = std::min(best, power_distance(x, b));
  }
  return std::sqrt(std::max(0.0, best));
}

}  // namespace kdph
