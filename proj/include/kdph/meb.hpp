// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "kdph/geometry.hpp"

namespace kdph {

// Solution of min_x max_i D(x, p_i) over a weighted point set.
//
// Invariants on a returned result (tol is the solver tolerance, scaled by
// max(1, |rad_sq|)):
//   - support weights are > 0 and sum to 1 within 1e-12,
//   - center equals the support convex combination,
//   - |D(center, p_i) - rad_sq| <= tol for support members, and
//     D(center, p_j) <= rad_sq + tol for everything else,
//   - |rad_sq - (1/2) sum_ij lambda_i lambda_j D(p_i, p_j)| <= tol.
struct MebResult {
  Point center;
  double rad_sq = 0.0;
  std::vector<std::pair<int, double>> support;  // (index, lambda), lambda > 0
  int iterations = 0;
  double residual = 0.0;  // primal value minus dual value at termination
  bool imaginary = false;  // rad_sq < 0 (only possible with positive weights)

  std::vector<double> dense_lambda(int n) const;
};

// Thrown when the iterative solver runs out of iterations. Carries the best
// iterate seen so the caller can inspect how far convergence got.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, MebResult best)
      : std::runtime_error(what), best(std::move(best)) {}

  MebResult best;
};

inline constexpr double kMebDefaultTol = 1e-8;
inline constexpr int kMebDefaultMaxIter = 200000;
inline constexpr double kMebSupportPrune = 1e-10;

// Frank-Wolfe on the dual simplex with an active-set polish stage.
// Termination requires the primal-dual gap (the dual identity residual) to
// drop below tol * max(1, |rad_sq|). `init_index` selects the deterministic
// starting vertex; distinct starts must agree on the (unique) center.
MebResult weighted_meb(const WeightedCloud& X, double tol = kMebDefaultTol,
                       int max_iter = kMebDefaultMaxIter, int init_index = 0);

// Same solver restricted to X[subset]. Support indices in the result refer
// to positions within `subset`, not to cloud indices.
MebResult weighted_meb(const WeightedCloud& X, std::span<const int> subset,
                       double tol = kMebDefaultTol,
                       int max_iter = kMebDefaultMaxIter, int init_index = 0);

// Reference oracle: enumerates support subsets and solves each stationarity
// system exactly. Only for |X| <= 12.
MebResult weighted_meb_exact(const WeightedCloud& X);

// Dual radius form (1/2) sum_ij lambda_i lambda_j D(p_i, p_j) for convex
// lambda over all of X.
double radius_from_support(std::span<const double> lambdas,
                           const WeightedCloud& X);

// Closed form for two weighted points; indices 0 and 1 in the support.
MebResult two_point_meb(const WeightedPoint& a, const WeightedPoint& b);

}  // namespace kdph
