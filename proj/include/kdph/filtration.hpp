// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kdph/geometry.hpp"

namespace kdph {

struct Simplex {
  std::vector<int> vertices;  // strictly increasing
  double value = 0.0;

  int dim() const { return static_cast<int>(vertices.size()) - 1; }
};

// Simplices sorted by (value, dimension, lexicographic vertices); closed
// under faces; every value <= alpha_max; face values never exceed coface
// values. `clamped` counts simplices whose negative squared radius was
// clamped to value 0 (only possible with positive input weights).
struct FilteredComplex {
  int n_vertices = 0;
  int max_dim = 0;
  double alpha_max = 0.0;
  int clamped = 0;
  std::vector<Simplex> simplices;
};

// Ordering used everywhere a filtration order is needed.
bool filtration_less(const Simplex& a, const Simplex& b);

// Throws ContractViolation unless K is a valid filtration: values
// non-decreasing, every face present strictly earlier with a value no
// larger than its cofaces, vertices strictly increasing, caps respected.
// Constructors emit the canonical filtration_less order; any order that
// passes this check yields the same diagrams.
void validate_complex(const FilteredComplex& K);

// Weighted Cech: simplex sigma enters at the smallest alpha whose common
// power-intersection is non-empty, i.e. value = sqrt(rad_sq(sigma)) from the
// weighted MEB. Vertices enter at sqrt(-w). Requires max_dim >= 1 and
// alpha_max >= 0.
FilteredComplex weighted_cech(const WeightedCloud& W, int max_dim,
                              double alpha_max);

// Weighted Rips: edges via the two-point closed form, higher simplices at
// the max over their vertices and edges.
FilteredComplex weighted_rips(const WeightedCloud& W, int max_dim,
                              double alpha_max);

// Cech filtration of the barycentric k-subset cloud of P.
FilteredComplex exact_kdist_cech(const PointCloud& P, int k, int max_dim,
                                 double alpha_max,
                                 std::int64_t budget = 200000);

// Cech filtration of P weighted by minus squared k-distances.
FilteredComplex approx_kdist_cech(const PointCloud& P, int k, int max_dim,
                                  double alpha_max);

// Line-based text format, one simplex per line in filtration order:
//   dim v0 v1 ... vk value
void write_complex(const FilteredComplex& K, std::ostream& os);

// Parses the emitted format. n_vertices, max_dim and alpha_max are
// reconstructed from the contents. Malformed input raises ParseError.
FilteredComplex read_complex(std::istream& is);

}  // namespace kdph
