// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "kdph/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "kdph/kdistance.hpp"
#include "kdph/meb.hpp"

namespace kdph {

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(x));
      h *= 1099511628211ull;
    }
    return h;
  }
};

using Layer = std::unordered_map<std::vector<int>, double, VecHash>;

// MEB tolerance used for filtration values; a bit tighter than the solver
// default so value jitter stays far below diagram tolerances.
constexpr double kFiltrationMebTol = 1e-9;

enum class ValueRule { cech, rips };

FilteredComplex build(const WeightedCloud& W, int max_dim, double alpha_max,
                      ValueRule rule) {
  if (max_dim < 1) {
    throw ContractViolation("filtration: max_dim must be >= 1");
  }
  if (!(alpha_max >= 0.0)) {
    throw ContractViolation("filtration: alpha_max must be >= 0");
  }
  const int n = W.size();
  FilteredComplex K;
  K.n_vertices = n;
  K.max_dim = max_dim;
  K.alpha_max = alpha_max;

  std::vector<Layer> layers(static_cast<std::size_t>(max_dim) + 1);
  std::vector<int> present;
  for (int i = 0; i < n; ++i) {
    double rad2 = -W[i].weight;
    if (rad2 < 0.0) {
      rad2 = 0.0;
      ++K.clamped;
    }
    const double v = std::sqrt(rad2);
    if (v <= alpha_max) {
      layers[0].emplace(std::vector<int>{i}, v);
      present.push_back(i);
    }
  }

  std::vector<int> facet;
  for (int d = 1; d <= max_dim; ++d) {
    // Candidates: extend each (d-1)-simplex by a larger present vertex and
    // require every facet to be present already. The max facet value is a
    // lower bound for the candidate's value, so candidates whose facets are
    // missing (value > alpha_max) are pruned for free.
    std::vector<std::vector<int>> keys;
    keys.reserve(layers[static_cast<std::size_t>(d - 1)].size());
    for (const auto& [key, val] : layers[static_cast<std::size_t>(d - 1)]) {
      keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    for (const auto& base : keys) {
      const double base_value = layers[static_cast<std::size_t>(d - 1)].at(base);
      for (int u : present) {
        if (u <= base.back()) continue;
        std::vector<int> cand = base;
        cand.push_back(u);
        double lb = base_value;
        bool closed = true;
        for (std::size_t skip = 0; skip + 1 < cand.size(); ++skip) {
          facet.clear();
          for (std::size_t l = 0; l < cand.size(); ++l) {
            if (l != skip) facet.push_back(cand[l]);
          }
          auto it = layers[static_cast<std::size_t>(d - 1)].find(facet);
          if (it == layers[static_cast<std::size_t>(d - 1)].end()) {
            closed = false;
            break;
          }
          lb = std::max(lb, it->second);
        }
        if (!closed || lb > alpha_max) continue;

        double value = lb;
        if (rule == ValueRule::cech) {
          MebResult ball =
              weighted_meb(W, std::span<const int>(cand), kFiltrationMebTol);
          double rad2 = ball.rad_sq;
          if (rad2 < 0.0) {
            rad2 = 0.0;
            ++K.clamped;
          }
          value = std::max(std::sqrt(rad2), lb);
        } else if (d == 1) {
          MebResult ball = two_point_meb(W[cand[0]], W[cand[1]]);
          double rad2 = ball.rad_sq;
          if (rad2 < 0.0) {
            rad2 = 0.0;
            ++K.clamped;
          }
          value = std::max(std::sqrt(rad2), lb);
        }
        if (value <= alpha_max) {
          layers[static_cast<std::size_t>(d)].emplace(std::move(cand), value);
        }
      }
    }
  }

  for (int d = 0; d <= max_dim; ++d) {
    for (const auto& [key, val] : layers[static_cast<std::size_t>(d)]) {
      K.simplices.push_back(Simplex{key, val});
    }
  }
  std::sort(K.simplices.begin(), K.simplices.end(), filtration_less);
  return K;
}

}  // namespace

bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim() != b.dim()) return a.dim() < b.dim();
  return a.vertices < b.vertices;
}

void validate_complex(const FilteredComplex& K) {
  std::unordered_map<std::vector<int>, double, VecHash> seen;
  const Simplex* prev = nullptr;
  for (const Simplex& s : K.simplices) {
    if (s.vertices.empty()) {
      throw ContractViolation("complex: empty simplex");
    }
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
      if (s.vertices[i] < 0 || s.vertices[i] >= K.n_vertices) {
        throw ContractViolation("complex: vertex index out of range");
      }
      if (i > 0 && s.vertices[i] <= s.vertices[i - 1]) {
        throw ContractViolation("complex: vertices not strictly increasing");
      }
    }
    if (!(s.value <= K.alpha_max)) {
      throw ContractViolation("complex: value exceeds alpha_max");
    }
    if (s.dim() > K.max_dim) {
      throw ContractViolation("complex: dimension exceeds max_dim");
    }
    if (prev && s.value < prev->value) {
      throw ContractViolation("complex: values out of filtration order");
    }
    if (s.dim() > 0) {
      std::vector<int> facet;
      for (std::size_t skip = 0; skip < s.vertices.size(); ++skip) {
        facet.clear();
        for (std::size_t l = 0; l < s.vertices.size(); ++l) {
          if (l != skip) facet.push_back(s.vertices[l]);
        }
        auto it = seen.find(facet);
        if (it == seen.end()) {
          throw ContractViolation("complex: missing or later face");
        }
        if (it->second > s.value) {
          throw ContractViolation("complex: face value exceeds coface value");
        }
      }
    }
    if (!seen.emplace(s.vertices, s.value).second) {
      throw ContractViolation("complex: duplicate simplex");
    }
    prev = &s;
  }
}

FilteredComplex weighted_cech(const WeightedCloud& W, int max_dim,
                              double alpha_max) {
  return build(W, max_dim, alpha_max, ValueRule::cech);
}

FilteredComplex weighted_rips(const WeightedCloud& W, int max_dim,
                              double alpha_max) {
  return build(W, max_dim, alpha_max, ValueRule::rips);
}

FilteredComplex exact_kdist_cech(const PointCloud& P, int k, int max_dim,
                                 double alpha_max, std::int64_t budget) {
  return weighted_cech(barycenter_cloud(P, k, budget), max_dim, alpha_max);
}

FilteredComplex approx_kdist_cech(const PointCloud& P, int k, int max_dim,
                                  double alpha_max) {
  return weighted_cech(assign_approx_weights(P, k), max_dim, alpha_max);
}

void write_complex(const FilteredComplex& K, std::ostream& os) {
  char buf[40];
  for (const Simplex& s : K.simplices) {
    os << s.dim();
    for (int v : s.vertices) os << ' ' << v;
    std::snprintf(buf, sizeof(buf), "%.17g", s.value);
    os << ' ' << buf << '\n';
  }
}

FilteredComplex read_complex(std::istream& is) {
  FilteredComplex K;
  K.alpha_max = 0.0;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    int dim = -1;
    if (!(ss >> dim) || dim < 0) {
      throw ParseError("complex: bad dimension field", lineno);
    }
    Simplex s;
    s.vertices.resize(static_cast<std::size_t>(dim) + 1);
    for (int i = 0; i <= dim; ++i) {
      if (!(ss >> s.vertices[static_cast<std::size_t>(i)]) ||
          s.vertices[static_cast<std::size_t>(i)] < 0) {
        throw ParseError("complex: bad vertex field", lineno);
      }
      if (i > 0 && s.vertices[static_cast<std::size_t>(i)] <=
                       s.vertices[static_cast<std::size_t>(i - 1)]) {
        throw ParseError("complex: vertices not strictly increasing", lineno);
      }
    }
    if (!(ss >> s.value)) {
      throw ParseError("complex: bad value field", lineno);
    }
    std::string extra;
    if (ss >> extra) {
      throw ParseError("complex: trailing tokens", lineno);
    }
    K.max_dim = std::max(K.max_dim, dim);
    K.alpha_max = std::max(K.alpha_max, s.value);
    K.n_vertices = std::max(K.n_vertices, s.vertices.back() + 1);
    K.simplices.push_back(std::move(s));
  }
  validate_complex(K);
  return K;
}

}  // namespace kdph
