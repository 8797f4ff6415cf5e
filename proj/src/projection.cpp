// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "kdph/projection.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace kdph {

namespace {

// Guard against representation error when the true right-hand side is an
// integer (e.g. exact powers in the dimension formulas).
int guarded_ceil(double x) {
  return static_cast<int>(std::ceil(x - 1e-9));
}

}  // namespace

Point Projector::operator()(const Point& v) const {
  if (v.size() != source_dim) {
    throw ContractViolation("Projector: input dimension mismatch");
  }
  return scale * (matrix * v);
}

int jl_dimension(int n, double epsilon, double c) {
  if (n < 2) throw ContractViolation("jl_dimension: n must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ContractViolation("jl_dimension: epsilon must lie in (0,1)");
  }
  if (!(c > 0.0)) throw ContractViolation("jl_dimension: c must be > 0");
  return guarded_ceil(c * std::log(static_cast<double>(n)) /
                      (epsilon * epsilon));
}

int gw_dimension(double width, double delta, double epsilon) {
  if (!(width >= 0.0)) {
    throw ContractViolation("gw_dimension: width must be >= 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ContractViolation("gw_dimension: delta must lie in (0,1)");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ContractViolation("gw_dimension: epsilon must lie in (0,1)");
  }
  const double s = width + std::sqrt(2.0 * std::log(2.0 / delta));
  const int d = guarded_ceil(s * s / (epsilon * epsilon) + 1.0);
  return std::max(2, d);
}

Projector sample_projector(int source_dim, int target_dim, ProjectorKind kind,
                           std::uint64_t seed) {
  if (source_dim < 1) {
    throw ContractViolation("sample_projector: source_dim must be >= 1");
  }
  if (target_dim < 1) {
    throw ContractViolation("sample_projector: target_dim must be >= 1");
  }
  Projector f;
  f.source_dim = source_dim;
  f.target_dim = target_dim;
  f.kind = kind;
  f.seed = seed;
  f.scale = std::sqrt(static_cast<double>(source_dim) /
                      static_cast<double>(target_dim));
  f.matrix.resize(target_dim, source_dim);

  std::mt19937_64 rng(seed);
  const double inv = 1.0 / static_cast<double>(source_dim);
  switch (kind) {
    case ProjectorKind::gaussian: {
      std::normal_distribution<double> g(0.0, std::sqrt(inv));
      for (int i = 0; i < target_dim; ++i) {
        for (int j = 0; j < source_dim; ++j) {
          f.matrix(i, j) = g(rng);
        }
      }
      break;
    }
    case ProjectorKind::rademacher: {
      const double mag = std::sqrt(inv);
      std::uniform_int_distribution<int> coin(0, 1);
      for (int i = 0; i < target_dim; ++i) {
        for (int j = 0; j < source_dim; ++j) {
          f.matrix(i, j) = coin(rng) ? mag : -mag;
        }
      }
      break;
    }
    case ProjectorKind::sparse_achlioptas: {
      // +-sqrt(3/D) with probability 1/6 each, 0 with probability 2/3.
      const double mag = std::sqrt(3.0 * inv);
      std::uniform_int_distribution<int> die(0, 5);
      for (int i = 0; i < target_dim; ++i) {
        for (int j = 0; j < source_dim; ++j) {
          const int r = die(rng);
          f.matrix(i, j) = (r == 0) ? mag : (r == 1) ? -mag : 0.0;
        }
      }
      break;
    }
  }
  return f;
}

PointCloud apply(const Projector& f, const PointCloud& P) {
  if (P.dim() != f.source_dim) {
    throw ContractViolation("apply: cloud dimension != projector source_dim");
  }
  std::vector<Point> out;
  out.reserve(P.points.size());
  for (const Point& p : P.points) {
    out.push_back(f(p));
  }
  return PointCloud(std::move(out));
}

DistortionReport audit_distortion(const PointCloud& P, const PointCloud& Q,
                                  double epsilon) {
  if (P.size() != Q.size()) {
    throw ContractViolation("audit_distortion: cloud sizes differ");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ContractViolation("audit_distortion: epsilon must lie in (0,1)");
  }
  DistortionReport rep;
  rep.epsilon_target = epsilon;
  rep.max_expansion = -std::numeric_limits<double>::infinity();
  rep.max_contraction = std::numeric_limits<double>::infinity();
  double worst_dev = -1.0;
  for (int i = 0; i < P.size(); ++i) {
    for (int j = i + 1; j < P.size(); ++j) {
      const double orig = squared_distance(P[i], P[j]);
      if (orig == 0.0) {
        ++rep.skipped_pairs;
        continue;
      }
      const double img = squared_distance(Q[i], Q[j]);
      const double ratio = std::sqrt(img / orig);
      rep.max_expansion = std::max(rep.max_expansion, ratio);
      rep.max_contraction = std::min(rep.max_contraction, ratio);
      const double dev = std::max(ratio, ratio > 0.0
                                             ? 1.0 / ratio
                                             : std::numeric_limits<double>::infinity());
      if (dev > worst_dev) {
        worst_dev = dev;
        rep.worst_pair = {i, j};
      }
    }
  }
  if (worst_dev < 0.0) {
    throw ContractViolation("audit_distortion: no pair at positive distance");
  }
  const double slack = 1e-12;
  rep.is_epsilon_distortion =
      rep.max_expansion <= (1.0 + epsilon) * (1.0 + slack) &&
      rep.max_contraction >= (1.0 - epsilon) * (1.0 - slack);
  return rep;
}

WidthEstimate estimate_gaussian_width(const PointCloud& S, int samples,
                                      std::uint64_t seed) {
  if (samples < 100) {
    throw ContractViolation("estimate_gaussian_width: need samples >= 100");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int d = S.dim();
  Point z(d);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i) z(i) = g(rng);
    double sup = -std::numeric_limits<double>::infinity();
    for (const Point& x : S.points) {
      sup = std::max(sup, x.dot(z));
    }
    sum += sup;
    sum_sq += sup * sup;
  }
  WidthEstimate w;
  const double n = static_cast<double>(samples);
  w.estimate = sum / n;
  const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
  w.std_error = std::sqrt(var / n);
  return w;
}

PointCloud difference_set(const PointCloud& P) {
  if (P.size() < 2) {
    throw ContractViolation("difference_set: need at least two points");
  }
  std::vector<Point> out;
  for (int i = 0; i < P.size(); ++i) {
    for (int j = 0; j < P.size(); ++j) {
      if (i == j) continue;
      const double d2 = squared_distance(P[i], P[j]);
      if (d2 == 0.0) continue;  // coincident points contribute nothing
      out.push_back((P[i] - P[j]) / std::sqrt(d2));
    }
  }
  if (out.empty()) {
    throw ContractViolation("difference_set: all points coincide");
  }
  return PointCloud(std::move(out));
}

}  // namespace kdph
