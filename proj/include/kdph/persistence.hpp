// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdph/filtration.hpp"

namespace kdph {

// A feature born at `birth`. Finite features die at `death`; for features
// that survive the whole filtration `infinite` is set and `death` must not
// be used (it is never a sentinel float in arithmetic).
struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;
  bool infinite = false;
};

struct PersistenceDiagram {
  int degree = 0;
  std::vector<PersistencePair> pairs;
  int zero_length_discarded = 0;
};

// Z/2 boundary-matrix column reduction over the filtration order.
// Diagrams are produced for degrees 0..max_degree; deaths in degree q need
// (q+1)-simplices in K. Unsorted or face-incomplete complexes are a
// contract violation.
std::vector<PersistenceDiagram> compute_persistence(const FilteredComplex& K,
                                                    int max_degree);

// Independent rank-nullity Betti number of the alpha-sublevel subcomplex
// via dense Gaussian elimination over Z/2. Limited to 2000 simplices.
int betti_oracle(const FilteredComplex& K, double alpha, int degree);

enum class Scale { linear, log_scale };

// Diagonal index in a matching edge.
inline constexpr int kDiagonal = -1;

struct MatchEdge {
  int a = kDiagonal;  // index into A.pairs, or kDiagonal
  int b = kDiagonal;  // index into B.pairs, or kDiagonal
};

// Exact bottleneck distance via binary search over candidate thresholds
// plus bipartite matching with diagonal projections. Infinite-death points
// match only infinite-death points (by birth); mismatched counts yield an
// infinite distance. On the log scale, coordinates are mapped through ln
// first, and zero-birth points match only zero-birth points.
double bottleneck(const PersistenceDiagram& A, const PersistenceDiagram& B,
                  Scale scale);

struct InterleavingCertificate {
  double epsilon = 0.0;
  double beta = 1.0;           // (1 - epsilon)^(-1/2)
  double log_bottleneck = 0.0;  // max over degrees
  bool passes = false;
  std::vector<double> per_degree;
  std::vector<std::vector<MatchEdge>> matching;  // witness, per degree
  std::string diagnostic;
};

// Multiplicative interleaving certificate: passes iff the log-scale
// bottleneck in every degree is at most ln(beta) + 1e-12.
InterleavingCertificate certify_interleaving(
    std::span<const PersistenceDiagram> A,
    std::span<const PersistenceDiagram> B, double epsilon);

// JSON forms with stable key order; infinite deaths appear as "inf".
nlohmann::ordered_json diagram_to_json(const PersistenceDiagram& D);
nlohmann::ordered_json diagrams_to_json(std::span<const PersistenceDiagram> Ds);

}  // namespace kdph
