// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <cstdint>
#include <utility>

#include "kdph/geometry.hpp"

namespace kdph {

enum class ProjectorKind { gaussian, rademacher, sparse_achlioptas };

// Linear map f(v) = scale * G v with G a (target_dim x source_dim) matrix of
// i.i.d. entries of variance 1/source_dim and scale = sqrt(source_dim /
// target_dim), so that E |f(v)|^2 = |v|^2. Entries are drawn row-major from
// a generator seeded with `seed`; the same seed reproduces the matrix
// bit-for-bit.
struct Projector {
  int source_dim = 0;
  int target_dim = 0;
  ProjectorKind kind = ProjectorKind::gaussian;
  std::uint64_t seed = 0;
  Eigen::MatrixXd matrix;  // target_dim x source_dim
  double scale = 1.0;

  Point operator()(const Point& v) const;
};

// ceil(c * ln n / eps^2). Requires n >= 2, eps in (0,1), c > 0.
int jl_dimension(int n, double epsilon, double c = 8.0);

// ceil((width + sqrt(2 ln(2/delta)))^2 / eps^2 + 1). Requires width >= 0,
// delta in (0,1), eps in (0,1). Never below 2.
int gw_dimension(double width, double delta, double epsilon);

Projector sample_projector(int source_dim, int target_dim, ProjectorKind kind,
                           std::uint64_t seed);

// Projects every point, preserving order.
PointCloud apply(const Projector& f, const PointCloud& P);

struct DistortionReport {
  double epsilon_target = 0.0;
  double max_expansion = 0.0;    // largest |f(x)-f(y)| / |x-y|
  double max_contraction = 0.0;  // smallest such ratio
  bool is_epsilon_distortion = false;
  std::pair<int, int> worst_pair = {-1, -1};
  int skipped_pairs = 0;  // zero-distance pairs, excluded from ratios
};

// All-pairs check that (1-eps)|x-y| <= |f(x)-f(y)| <= (1+eps)|x-y|,
// with 1e-12 relative slack on both sides.
DistortionReport audit_distortion(const PointCloud& P, const PointCloud& Q,
                                  double epsilon);

struct WidthEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo estimate of E sup_{x in S} <x, g>, g standard gaussian.
// Requires samples >= 100. Deterministic for a fixed seed.
WidthEstimate estimate_gaussian_width(const PointCloud& S, int samples,
                                      std::uint64_t seed);

// Normalized differences (x_i - x_j) / |x_i - x_j| over ordered pairs
// i != j; coincident pairs are skipped. Requires at least one distinct pair.
PointCloud difference_set(const PointCloud& P);

}  // namespace kdph
