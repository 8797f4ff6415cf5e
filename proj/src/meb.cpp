// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "kdph/meb.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kdph {

namespace {

constexpr int kMaxPolishRounds = 64;
constexpr int kMaxActiveSize = 64;
constexpr int kPolishEnumLimit = 12;

// Stationarity system on an active set A:
//   sum_j M_ij lambda_j - v = 0   (i in A),   sum_j lambda_j = 1,
// with M_ij = D(p_i, p_j). At a solution the common value v equals twice
// the squared radius of the ball determined by A.
struct KktSolution {
  Eigen::VectorXd lambda;
  double v = 0.0;
  bool ok = false;
};

KktSolution solve_kkt(const WeightedCloud& X, const std::vector<int>& ids,
                      const std::vector<int>& active) {
  const int m = static_cast<int>(active.size());
  Eigen::MatrixXd A(m + 1, m + 1);
  for (int i = 0; i < m; ++i) {
    const WeightedPoint& pi = X[ids[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])]];
    for (int j = i; j < m; ++j) {
      const WeightedPoint& pj = X[ids[static_cast<std::size_t>(active[static_cast<std::size_t>(j)])]];
      const double d = weighted_pair_distance(pi, pj);
      A(i, j) = d;
      A(j, i) = d;
    }
    A(i, m) = -1.0;
    A(m, i) = 1.0;
  }
  A(m, m) = 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(m) = 1.0;
  // Rank-deficient systems are routine: in d dimensions any active set with
  // more than d+1 points makes A singular. When the system is consistent the
  // minimum-norm solution is as good as any other, because every solution
  // shares the same center and common value v; only lambda moves along null
  // directions. Inconsistent systems mean no stationary point exists for
  // this active set and are reported as failure.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  KktSolution s;
  Eigen::VectorXd x = cod.solve(rhs);
  if (!x.allFinite()) return s;
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A * x - rhs).cwiseAbs().maxCoeff() > 1e-10 * scale) return s;
  s.lambda = x.head(m);
  s.v = x(m);
  s.ok = true;
  return s;
}

// Constrained maximiser of the dual over the simplex spanned by a small
// active set, found by enumerating faces and keeping the best stationary
// solution with strictly positive weights. The best face also covers every
// active point, so no drop heuristics are needed at this size.
struct FaceSolution {
  std::vector<int> support;  // positions into ids, ascending
  Eigen::VectorXd lambda;    // aligned with support
  double v = 0.0;
  bool ok = false;
};

FaceSolution best_face(const WeightedCloud& X, const std::vector<int>& ids,
                       const std::vector<int>& active) {
  FaceSolution best;
  const int k = static_cast<int>(active.size());
  std::vector<int> subset;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    subset.clear();
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) subset.push_back(active[static_cast<std::size_t>(i)]);
    }
    KktSolution s = solve_kkt(X, ids, subset);
    if (!s.ok) continue;
    bool feasible = true;
    for (int i = 0; i < s.lambda.size(); ++i) {
      if (!(s.lambda(i) > 0.0)) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    if (!best.ok || s.v > best.v) {
      best.ok = true;
      best.support = subset;
      best.lambda = std::move(s.lambda);
      best.v = s.v;
    }
  }
  return best;
}

struct SolverState {
  Eigen::VectorXd lambda;
  Point center;
  double primal = 0.0;
  double dual = 0.0;
  double gap = std::numeric_limits<double>::infinity();
};

Point combination(const WeightedCloud& X, const std::vector<int>& ids,
                  const Eigen::VectorXd& lambda) {
  Point c = Point::Zero(X.dim());
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda(i) != 0.0) {
      c += lambda(i) * X[ids[static_cast<std::size_t>(i)]].point;
    }
  }
  return c;
}

// One active-set solve-with-dropping pass followed by violation checks.
// On success fills `out` with a stationary iterate whose worst violation
// is below `accept`. Deterministic throughout.
bool polish(const WeightedCloud& X, const std::vector<int>& ids,
            const Eigen::VectorXd& lambda_in, int argmax_pos, double accept,
            SolverState* out) {
  const int m = static_cast<int>(ids.size());
  std::vector<int> active;
  for (int i = 0; i < m; ++i) {
    if (lambda_in(i) > kMebSupportPrune) active.push_back(i);
  }
  if (std::find(active.begin(), active.end(), argmax_pos) == active.end()) {
    active.push_back(argmax_pos);
    std::sort(active.begin(), active.end());
  }
  if (static_cast<int>(active.size()) > kMaxActiveSize) {
    // Keep the heaviest entries plus the current worst violator.
    std::vector<int> by_mass = active;
    std::sort(by_mass.begin(), by_mass.end(), [&](int a, int b) {
      if (lambda_in(a) != lambda_in(b)) return lambda_in(a) > lambda_in(b);
      return a < b;
    });
    by_mass.resize(kMaxActiveSize - 1);
    if (std::find(by_mass.begin(), by_mass.end(), argmax_pos) == by_mass.end()) {
      by_mass.push_back(argmax_pos);
    }
    std::sort(by_mass.begin(), by_mass.end());
    active = std::move(by_mass);
  }

  // Last solved weights per active entry, used to pick drop victims.
  std::vector<double> cur(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    cur[i] = lambda_in(active[static_cast<std::size_t>(i)]);
  }

  for (int round = 0; round < kMaxPolishRounds; ++round) {
    if (static_cast<int>(active.size()) <= kPolishEnumLimit) {
      // Exact subproblem. Greedy multiplier dropping can cycle through
      // faces that exclude the true support (near-collinear triples give
      // wild multipliers), so small sets are maximised by enumeration
      // instead. Each admitted violator strictly raises the face value,
      // which rules out revisiting an active set.
      FaceSolution face = best_face(X, ids, active);
      if (!face.ok) return false;
      Eigen::VectorXd dense = Eigen::VectorXd::Zero(m);
      for (std::size_t i = 0; i < face.support.size(); ++i) {
        dense(face.support[i]) = face.lambda(static_cast<int>(i));
      }
      Point c = combination(X, ids, dense);
      const double rad2 = 0.5 * face.v;
      double worst = -std::numeric_limits<double>::infinity();
      int worst_pos = 0;
      for (int j = 0; j < m; ++j) {
        const double dj =
            power_distance(c, X[ids[static_cast<std::size_t>(j)]]);
        if (dj > worst) {
          worst = dj;
          worst_pos = j;
        }
      }
      if (worst - rad2 <= accept) {
        out->lambda = std::move(dense);
        out->center = std::move(c);
        out->primal = worst;
        out->dual = rad2;
        out->gap = std::max(0.0, worst - rad2);
        return true;
      }
      if (std::find(active.begin(), active.end(), worst_pos) !=
          active.end()) {
        return false;  // numerically stuck; let Frank-Wolfe make progress
      }
      active = face.support;
      cur.assign(active.size(), 0.0);
      for (std::size_t i = 0; i < active.size(); ++i) {
        cur[i] = face.lambda(static_cast<int>(i));
      }
      auto it = std::lower_bound(active.begin(), active.end(), worst_pos);
      cur.insert(cur.begin() + (it - active.begin()), 0.0);
      active.insert(it, worst_pos);
      continue;
    }

    KktSolution s = solve_kkt(X, ids, active);
    if (!s.ok) {
      if (active.size() <= 1) return false;
      // No stationary point for this active set: shed the lightest member
      // and retry.
      std::size_t drop = 0;
      for (std::size_t i = 1; i < active.size(); ++i) {
        if (cur[i] <= cur[drop]) drop = i;
      }
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
      cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(drop));
      continue;
    }
    int neg = -1;
    double most_negative = 0.0;
    for (int i = 0; i < s.lambda.size(); ++i) {
      if (s.lambda(i) < most_negative) {
        most_negative = s.lambda(i);
        neg = i;
      }
    }
    if (neg >= 0) {
      if (active.size() <= 1) return false;
      active.erase(active.begin() + neg);
      cur.erase(cur.begin() + neg);
      continue;
    }
    // Drop vanishing multipliers so the reported support stays strictly
    // positive; re-solve to keep the stationarity identity exact.
    bool pruned = false;
    for (std::size_t i = active.size(); i-- > 0;) {
      if (s.lambda(static_cast<int>(i)) < kMebSupportPrune &&
          active.size() > 1) {
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(i));
        cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(i));
        pruned = true;
      }
    }
    if (pruned) continue;

    for (std::size_t i = 0; i < active.size(); ++i) {
      cur[i] = s.lambda(static_cast<int>(i));
    }
    Eigen::VectorXd dense = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < active.size(); ++i) {
      dense(active[i]) = s.lambda(static_cast<int>(i));
    }
    Point c = combination(X, ids, dense);
    const double rad2 = 0.5 * s.v;
    double worst = -std::numeric_limits<double>::infinity();
    int worst_pos = 0;
    for (int j = 0; j < m; ++j) {
      const double dj =
          power_distance(c, X[ids[static_cast<std::size_t>(j)]]);
      if (dj > worst) {
        worst = dj;
        worst_pos = j;
      }
    }
    if (worst - rad2 <= accept) {
      out->lambda = std::move(dense);
      out->center = std::move(c);
      out->primal = worst;
      out->dual = rad2;
      out->gap = std::max(0.0, worst - rad2);
      return true;
    }
    if (std::find(active.begin(), active.end(), worst_pos) != active.end()) {
      return false;  // numerically stuck; let Frank-Wolfe make progress
    }
    auto it = std::lower_bound(active.begin(), active.end(), worst_pos);
    cur.insert(cur.begin() + (it - active.begin()), 0.0);
    active.insert(it, worst_pos);
  }
  return false;
}

MebResult package(const WeightedCloud& X, const std::vector<int>& ids,
                  const SolverState& st, int iterations) {
  MebResult r;
  r.center = st.center;
  r.iterations = iterations;
  const int m = static_cast<int>(ids.size());
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    if (st.lambda(i) > kMebSupportPrune) sum += st.lambda(i);
  }
  for (int i = 0; i < m; ++i) {
    if (st.lambda(i) > kMebSupportPrune) {
      r.support.emplace_back(i, st.lambda(i) / sum);
    }
  }
  double primal = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    primal = std::max(
        primal, power_distance(st.center, X[ids[static_cast<std::size_t>(j)]]));
  }
  double dual = 0.0;
  for (const auto& [i, li] : r.support) {
    for (const auto& [j, lj] : r.support) {
      dual += li * lj *
              weighted_pair_distance(X[ids[static_cast<std::size_t>(i)]],
                                     X[ids[static_cast<std::size_t>(j)]]);
    }
  }
  dual *= 0.5;
  r.rad_sq = primal;
  r.residual = std::max(0.0, primal - dual);
  r.imaginary = r.rad_sq < 0.0;
  return r;
}

MebResult solve(const WeightedCloud& X, const std::vector<int>& ids,
                double tol, int max_iter, int init_index) {
  const int m = static_cast<int>(ids.size());
  if (tol <= 0.0) throw ContractViolation("weighted_meb: tol must be > 0");
  if (max_iter < 1) {
    throw ContractViolation("weighted_meb: max_iter must be >= 1");
  }

  SolverState st;
  st.lambda = Eigen::VectorXd::Zero(m);
  const int start = ((init_index % m) + m) % m;
  st.lambda(start) = 1.0;
  st.center = X[ids[static_cast<std::size_t>(start)]].point;

  Eigen::VectorXd d(m);
  SolverState best;
  int polish_backoff = 0;
  int next_polish = 0;
  const int polish_every = (m <= kMaxActiveSize) ? 1 : 8;

  int t = 0;
  while (true) {
    int arg = 0;
    double primal = -std::numeric_limits<double>::infinity();
    double dual = 0.0;
    for (int i = 0; i < m; ++i) {
      d(i) = power_distance(st.center, X[ids[static_cast<std::size_t>(i)]]);
      if (d(i) > primal) {
        primal = d(i);
        arg = i;
      }
      dual += st.lambda(i) * d(i);
    }
    st.primal = primal;
    st.dual = dual;
    st.gap = std::max(0.0, primal - dual);
    const double scale = std::max(1.0, std::abs(primal));
    if (st.gap < best.gap) best = st;

    if (st.gap <= tol * scale) break;

    if (t >= next_polish) {
      SolverState polished;
      if (polish(X, ids, st.lambda, arg, 0.9 * tol * scale, &polished)) {
        st = std::move(polished);
        break;
      }
      polish_backoff = std::min(polish_backoff + 1, 8);
      next_polish = t + std::min(polish_every << polish_backoff, 256);
    }

    if (t >= max_iter) {
      MebResult bad = package(X, ids, best, t);
      throw ConvergenceFailure(
          "weighted_meb: no convergence after " + std::to_string(t) +
              " iterations, residual " + std::to_string(bad.residual),
          std::move(bad));
    }

    // Badoiu-Clarkson step toward the worst violator.
    const double gamma = 1.0 / static_cast<double>(t + 2);
    st.lambda *= (1.0 - gamma);
    st.lambda(arg) += gamma;
    if ((t & 63) == 63) {
      st.center = combination(X, ids, st.lambda);
    } else {
      st.center = (1.0 - gamma) * st.center +
                  gamma * X[ids[static_cast<std::size_t>(arg)]].point;
    }
    ++t;
  }

  return package(X, ids, st, t);
}

}  // namespace

std::vector<double> MebResult::dense_lambda(int n) const {
  std::vector<double> l(static_cast<std::size_t>(n), 0.0);
  for (const auto& [i, li] : support) {
    l.at(static_cast<std::size_t>(i)) = li;
  }
  return l;
}

MebResult weighted_meb(const WeightedCloud& X, double tol, int max_iter,
                       int init_index) {
  std::vector<int> ids(static_cast<std::size_t>(X.size()));
  for (int i = 0; i < X.size(); ++i) ids[static_cast<std::size_t>(i)] = i;
  return solve(X, ids, tol, max_iter, init_index);
}

MebResult weighted_meb(const WeightedCloud& X, std::span<const int> subset,
                       double tol, int max_iter, int init_index) {
  if (subset.empty()) {
    throw ContractViolation("weighted_meb: empty subset");
  }
  std::vector<int> ids(subset.begin(), subset.end());
  for (int i : ids) {
    if (i < 0 || i >= X.size()) {
      throw ContractViolation("weighted_meb: subset index out of range");
    }
  }
  return solve(X, ids, tol, max_iter, init_index);
}

MebResult weighted_meb_exact(const WeightedCloud& X) {
  const int n = X.size();
  if (n > 12) {
    throw ContractViolation(
        "weighted_meb_exact: exhaustive oracle limited to 12 points");
  }
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;

  MebResult best;
  bool found = false;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> subset;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    KktSolution s = solve_kkt(X, ids, subset);
    if (!s.ok) continue;
    bool positive = true;
    for (int i = 0; i < s.lambda.size(); ++i) {
      if (!(s.lambda(i) > 0.0)) {
        positive = false;
        break;
      }
    }
    if (!positive) continue;
    Eigen::VectorXd dense = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < subset.size(); ++i) {
      dense(subset[i]) = s.lambda(static_cast<int>(i));
    }
    Point c = combination(X, ids, dense);
    const double rad2 = 0.5 * s.v;
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      worst = std::max(worst, power_distance(c, X[j]));
    }
    const double slack = 1e-9 * std::max({1.0, std::abs(rad2), worst});
    if (worst > rad2 + slack) continue;  // some point sticks out: not optimal
    if (!found || rad2 < best.rad_sq) {
      found = true;
      best = MebResult{};
      best.center = std::move(c);
      best.rad_sq = rad2;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        best.support.emplace_back(subset[i], s.lambda(static_cast<int>(i)));
      }
      best.iterations = 0;
      best.residual = std::max(0.0, worst - rad2);
      best.imaginary = rad2 < 0.0;
    }
  }
  if (!found) {
    throw ContractViolation(
        "weighted_meb_exact: no stationary support subset found");
  }
  return best;
}

double radius_from_support(std::span<const double> lambdas,
                           const WeightedCloud& X) {
  if (static_cast<int>(lambdas.size()) != X.size()) {
    throw ContractViolation("radius_from_support: weight count != |X|");
  }
  double sum = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0)) {
      throw ContractViolation("radius_from_support: weights must be >= 0");
    }
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ContractViolation("radius_from_support: weights must sum to 1");
  }
  std::vector<int> nz;
  for (int i = 0; i < X.size(); ++i) {
    if (lambdas[static_cast<std::size_t>(i)] != 0.0) nz.push_back(i);
  }
  double r = 0.0;
  for (int i : nz) {
    for (int j : nz) {
      r += lambdas[static_cast<std::size_t>(i)] *
           lambdas[static_cast<std::size_t>(j)] *
           weighted_pair_distance(X[i], X[j]);
    }
  }
  return 0.5 * r;
}

MebResult two_point_meb(const WeightedPoint& a, const WeightedPoint& b) {
  const double d2 = squared_distance(a.point, b.point);
  MebResult r;
  if (d2 == 0.0) {
    r.center = a.point;
    const double ra = -a.weight;
    const double rb = -b.weight;
    r.rad_sq = std::max(ra, rb);
    if (ra == rb) {
      r.support = {{0, 0.5}, {1, 0.5}};
    } else if (ra > rb) {
      r.support = {{0, 1.0}};
    } else {
      r.support = {{1, 1.0}};
    }
    r.imaginary = r.rad_sq < 0.0;
    return r;
  }
  const double t = 0.5 + (a.weight - b.weight) / (2.0 * d2);
  if (t <= 0.0) {
    r.center = a.point;
    r.support = {{0, 1.0}};
  } else if (t >= 1.0) {
    r.center = b.point;
    r.support = {{1, 1.0}};
  } else {
    r.center = a.point + t * (b.point - a.point);
    r.support = {{0, 1.0 - t}, {1, t}};
  }
  const double da = power_distance(r.center, a);
  const double db = power_distance(r.center, b);
  r.rad_sq = std::max(da, db);
  double dual = 0.0;
  for (const auto& [i, li] : r.support) {
    for (const auto& [j, lj] : r.support) {
      const WeightedPoint& pi = (i == 0) ? a : b;
      const WeightedPoint& pj = (j == 0) ? a : b;
      dual += li * lj * weighted_pair_distance(pi, pj);
    }
  }
  r.residual = std::max(0.0, r.rad_sq - 0.5 * dual);
  r.imaginary = r.rad_sq < 0.0;
  return r;
}

}  // namespace kdph
