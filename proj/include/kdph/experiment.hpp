// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdph/geometry.hpp"
#include "kdph/persistence.hpp"

namespace kdph {

enum class InputFormat { csv, whitespace };

// One point per row, columns = coordinates. Blank lines and '#' comments are
// ignored. Ragged rows and non-numeric fields raise ParseError carrying the
// 1-based line number; a file without data rows raises as well.
PointCloud load_points(const std::string& path, InputFormat format);

// csv when the first data row contains a comma, whitespace otherwise.
InputFormat infer_format(const std::string& path);

struct SimplexSample {
  std::vector<std::vector<int>> subsets;  // sorted index subsets into B
  bool exhaustive = false;  // count covered the whole family, all returned
};

// Uniform random subsets of B with cardinality in [2, max_card]; indices are
// distinct within each subset; deterministic under seed. When count reaches
// the number of available subsets the entire family is returned instead.
SimplexSample sample_simplices_for_radius_check(const WeightedCloud& B,
                                                std::int64_t count,
                                                int max_card,
                                                std::uint64_t seed);

struct ExperimentConfig {
  std::string input_path;
  int k = 1;
  double epsilon = 0.25;
  double delta = 0.05;
  // gaussian | rademacher | sparse | identity. identity skips projection
  // (target dimension forced to the ambient dimension).
  std::string projector_kind = "gaussian";
  std::uint64_t seed = 0;
  std::string target_dim = "auto-jl";  // auto-jl | auto-gw | positive integer
  double jl_constant = 8.0;
  std::string filtration = "approx-cech";  // exact-cech | approx-cech | rips
  int max_homology_degree = 1;
  double alpha_max = 1.0;
  std::int64_t budget = 200000;
  std::int64_t probes = 500;
  int radius_max_card = 6;
  std::string out_path;  // report written here when non-empty
  std::string svg_dir;   // diagram plots written here when non-empty
};

struct ExperimentReport {
  nlohmann::ordered_json json;
  std::vector<PersistenceDiagram> diagrams_before;
  std::vector<PersistenceDiagram> diagrams_after;
  double beta = 1.0;
};

// Full pipeline: load, resolve the target dimension, project, audit the
// distortion, audit pointwise k-distances and sampled simplex radii, build
// the chosen filtration on both sides (image weights recomputed from the
// projected points), compute persistence, and certify the interleaving.
// The report is byte-stable for a fixed config except the timing block.
ExperimentReport run(const ExperimentConfig& config);

// Report with the timing block removed, for determinism comparisons.
nlohmann::ordered_json strip_timings(nlohmann::ordered_json report);

}  // namespace kdph
