// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "kdph/persistence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

namespace kdph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

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

std::vector<int> symmetric_difference(const std::vector<int>& a,
                                      const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else if (b[j] < a[i]) {
      out.push_back(b[j++]);
    } else {
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(i), a.end());
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(j), b.end());
  return out;
}

// ---- bottleneck internals -------------------------------------------------

struct TransformedDiagram {
  // Finite points in working coordinates.
  struct FinitePoint {
    double b = 0.0;
    double d = 0.0;
    bool zero = false;  // zero birth under the log scale
    int orig = 0;
  };
  // Infinite-death points, keyed by (transformed) birth.
  struct InfinitePoint {
    double key = 0.0;
    bool zero = false;
    int orig = 0;
  };
  std::vector<FinitePoint> fin;
  std::vector<InfinitePoint> inf;
};

TransformedDiagram transform(const PersistenceDiagram& D, Scale scale) {
  TransformedDiagram t;
  for (int i = 0; i < static_cast<int>(D.pairs.size()); ++i) {
    const PersistencePair& p = D.pairs[static_cast<std::size_t>(i)];
    if (scale == Scale::log_scale && p.birth < 0.0) {
      throw ContractViolation("bottleneck: negative birth under log scale");
    }
    if (p.infinite) {
      TransformedDiagram::InfinitePoint q;
      q.zero = (scale == Scale::log_scale && p.birth == 0.0);
      q.key = q.zero ? 0.0
                     : (scale == Scale::log_scale ? std::log(p.birth) : p.birth);
      q.orig = i;
      t.inf.push_back(q);
    } else {
      if (scale == Scale::log_scale && p.death <= 0.0) {
        throw ContractViolation("bottleneck: non-positive death under log scale");
      }
      TransformedDiagram::FinitePoint q;
      q.zero = (scale == Scale::log_scale && p.birth == 0.0);
      q.b = q.zero ? 0.0
                   : (scale == Scale::log_scale ? std::log(p.birth) : p.birth);
      q.d = scale == Scale::log_scale ? std::log(p.death) : p.death;
      q.orig = i;
      t.fin.push_back(q);
    }
  }
  return t;
}

double cross_cost(const TransformedDiagram::FinitePoint& a,
                  const TransformedDiagram::FinitePoint& b) {
  if (a.zero != b.zero) return kInf;
  if (a.zero) return std::abs(a.d - b.d);
  return std::max(std::abs(a.b - b.b), std::abs(a.d - b.d));
}

double diag_cost(const TransformedDiagram::FinitePoint& a) {
  if (a.zero) return kInf;  // zero-birth features never sit on the diagonal
  return 0.5 * (a.d - a.b);
}

struct BottleneckWitness {
  double value = kInf;
  std::vector<MatchEdge> matching;
  std::string reason;
};

// Perfect-matching feasibility of the finite parts at threshold r.
// U = A-points then B-dummies; V = B-points then A-dummies.
bool feasible(const TransformedDiagram& A, const TransformedDiagram& B,
              double r, std::vector<int>* match_u) {
  const int na = static_cast<int>(A.fin.size());
  const int nb = static_cast<int>(B.fin.size());
  const int nu = na + nb;
  const int nv = nb + na;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nu));
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      if (cross_cost(A.fin[static_cast<std::size_t>(i)],
                     B.fin[static_cast<std::size_t>(j)]) <= r) {
        adj[static_cast<std::size_t>(i)].push_back(j);
      }
    }
    if (diag_cost(A.fin[static_cast<std::size_t>(i)]) <= r) {
      adj[static_cast<std::size_t>(i)].push_back(nb + i);
    }
  }
  for (int j = 0; j < nb; ++j) {
    auto& a = adj[static_cast<std::size_t>(na + j)];
    if (diag_cost(B.fin[static_cast<std::size_t>(j)]) <= r) {
      a.push_back(j);
    }
    for (int i = 0; i < na; ++i) a.push_back(nb + i);  // dummy-dummy edges
  }

  std::vector<int> match_v(static_cast<std::size_t>(nv), -1);
  std::vector<int> owner_u(static_cast<std::size_t>(nu), -1);
  std::vector<char> used(static_cast<std::size_t>(nv), 0);
  std::function<bool(int)> augment = [&](int u) -> bool {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = 1;
      if (match_v[static_cast<std::size_t>(v)] < 0 ||
          augment(match_v[static_cast<std::size_t>(v)])) {
        match_v[static_cast<std::size_t>(v)] = u;
        owner_u[static_cast<std::size_t>(u)] = v;
        return true;
      }
    }
    return false;
  };
  int matched = 0;
  for (int u = 0; u < nu; ++u) {
    std::fill(used.begin(), used.end(), 0);
    if (augment(u)) {
      ++matched;
    } else {
      return false;
    }
  }
  if (match_u) *match_u = owner_u;
  return matched == nu;
}

BottleneckWitness bottleneck_impl(const PersistenceDiagram& A,
                                  const PersistenceDiagram& B, Scale scale) {
  if (A.degree != B.degree) {
    throw ContractViolation("bottleneck: diagrams of different degrees");
  }
  TransformedDiagram ta = transform(A, scale);
  TransformedDiagram tb = transform(B, scale);
  BottleneckWitness w;

  if (ta.inf.size() != tb.inf.size()) {
    w.reason = "infinite-death point counts differ";
    return w;
  }
  auto inf_key = [](const TransformedDiagram::InfinitePoint& p) {
    return std::pair<int, double>(p.zero ? 0 : 1, p.key);
  };
  std::sort(ta.inf.begin(), ta.inf.end(),
            [&](const auto& x, const auto& y) { return inf_key(x) < inf_key(y); });
  std::sort(tb.inf.begin(), tb.inf.end(),
            [&](const auto& x, const auto& y) { return inf_key(x) < inf_key(y); });
  double m_inf = 0.0;
  std::vector<MatchEdge> inf_edges;
  for (std::size_t i = 0; i < ta.inf.size(); ++i) {
    if (ta.inf[i].zero != tb.inf[i].zero) {
      w.reason = "zero-birth infinite-death points cannot be matched";
      return w;
    }
    const double c = ta.inf[i].zero ? 0.0 : std::abs(ta.inf[i].key - tb.inf[i].key);
    m_inf = std::max(m_inf, c);
    inf_edges.push_back(MatchEdge{ta.inf[i].orig, tb.inf[i].orig});
  }

  std::vector<double> candidates{0.0, m_inf};
  for (const auto& a : ta.fin) {
    const double d = diag_cost(a);
    if (std::isfinite(d)) candidates.push_back(d);
    for (const auto& b : tb.fin) {
      const double c = cross_cost(a, b);
      if (std::isfinite(c)) candidates.push_back(c);
    }
  }
  for (const auto& b : tb.fin) {
    const double d = diag_cost(b);
    if (std::isfinite(d)) candidates.push_back(d);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  if (!feasible(ta, tb, candidates.back(), nullptr)) {
    w.reason = "zero-birth points cannot be matched";
    return w;
  }
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(ta, tb, candidates[mid], nullptr)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const double r_fin = candidates[lo];
  w.value = std::max(m_inf, r_fin);

  std::vector<int> owner_u;
  feasible(ta, tb, w.value, &owner_u);
  const int na = static_cast<int>(ta.fin.size());
  const int nb = static_cast<int>(tb.fin.size());
  for (int u = 0; u < na; ++u) {
    const int v = owner_u[static_cast<std::size_t>(u)];
    if (v < nb) {
      w.matching.push_back(
          MatchEdge{ta.fin[static_cast<std::size_t>(u)].orig,
                    tb.fin[static_cast<std::size_t>(v)].orig});
    } else {
      w.matching.push_back(
          MatchEdge{ta.fin[static_cast<std::size_t>(u)].orig, kDiagonal});
    }
  }
  for (int u = na; u < na + nb; ++u) {
    const int v = owner_u[static_cast<std::size_t>(u)];
    if (v < nb) {
      w.matching.push_back(
          MatchEdge{kDiagonal, tb.fin[static_cast<std::size_t>(v)].orig});
    }
  }
  w.matching.insert(w.matching.end(), inf_edges.begin(), inf_edges.end());
  return w;
}

}  // namespace

std::vector<PersistenceDiagram> compute_persistence(const FilteredComplex& K,
                                                    int max_degree) {
  if (max_degree < 0) {
    throw ContractViolation("compute_persistence: max_degree must be >= 0");
  }
  validate_complex(K);
  const int S = static_cast<int>(K.simplices.size());
  std::unordered_map<std::vector<int>, int, VecHash> position;
  position.reserve(static_cast<std::size_t>(S) * 2);
  for (int j = 0; j < S; ++j) {
    position.emplace(K.simplices[static_cast<std::size_t>(j)].vertices, j);
  }

  std::vector<int> low_owner(static_cast<std::size_t>(S), -1);
  std::vector<std::vector<int>> stored(static_cast<std::size_t>(S));
  std::vector<char> creator(static_cast<std::size_t>(S), 0);
  std::vector<std::pair<int, int>> deaths;  // (birth position, death position)

  std::vector<int> facet;
  for (int j = 0; j < S; ++j) {
    const Simplex& s = K.simplices[static_cast<std::size_t>(j)];
    std::vector<int> col;
    if (s.dim() > 0) {
      col.reserve(s.vertices.size());
      for (std::size_t skip = 0; skip < s.vertices.size(); ++skip) {
        facet.clear();
        for (std::size_t l = 0; l < s.vertices.size(); ++l) {
          if (l != skip) facet.push_back(s.vertices[l]);
        }
        col.push_back(position.at(facet));
      }
      std::sort(col.begin(), col.end());
    }
    while (!col.empty()) {
      const int low = col.back();
      const int owner = low_owner[static_cast<std::size_t>(low)];
      if (owner < 0) break;
      col = symmetric_difference(col, stored[static_cast<std::size_t>(owner)]);
    }
    if (col.empty()) {
      creator[static_cast<std::size_t>(j)] = 1;
    } else {
      const int low = col.back();
      low_owner[static_cast<std::size_t>(low)] = j;
      stored[static_cast<std::size_t>(j)] = std::move(col);
      deaths.emplace_back(low, j);
    }
  }

  std::vector<PersistenceDiagram> out(static_cast<std::size_t>(max_degree) + 1);
  for (int q = 0; q <= max_degree; ++q) {
    out[static_cast<std::size_t>(q)].degree = q;
  }
  for (const auto& [i, j] : deaths) {
    const int q = K.simplices[static_cast<std::size_t>(i)].dim();
    if (q > max_degree) continue;
    const double birth = K.simplices[static_cast<std::size_t>(i)].value;
    const double death = K.simplices[static_cast<std::size_t>(j)].value;
    if (birth == death) {
      ++out[static_cast<std::size_t>(q)].zero_length_discarded;
    } else {
      out[static_cast<std::size_t>(q)].pairs.push_back(
          PersistencePair{birth, death, false});
    }
  }
  for (int i = 0; i < S; ++i) {
    if (!creator[static_cast<std::size_t>(i)] ||
        low_owner[static_cast<std::size_t>(i)] >= 0) {
      continue;
    }
    const int q = K.simplices[static_cast<std::size_t>(i)].dim();
    if (q > max_degree) continue;
    out[static_cast<std::size_t>(q)].pairs.push_back(
        PersistencePair{K.simplices[static_cast<std::size_t>(i)].value, 0.0,
                        true});
  }
  for (auto& D : out) {
    std::sort(D.pairs.begin(), D.pairs.end(),
              [](const PersistencePair& x, const PersistencePair& y) {
                if (x.infinite != y.infinite) return !x.infinite;
                if (x.birth != y.birth) return x.birth < y.birth;
                if (!x.infinite && x.death != y.death) return x.death < y.death;
                return false;
              });
  }
  return out;
}

int betti_oracle(const FilteredComplex& K, double alpha, int degree) {
  if (degree < 0) {
    throw ContractViolation("betti_oracle: degree must be >= 0");
  }
  if (K.simplices.size() > 2000) {
    throw ContractViolation("betti_oracle: complex too large for the oracle");
  }
  validate_complex(K);

  // Sublevel simplices grouped by dimension, with local indices.
  std::unordered_map<std::vector<int>, int, VecHash> local[3];
  int counts[3] = {0, 0, 0};  // degree-1, degree, degree+1
  for (const Simplex& s : K.simplices) {
    if (s.value > alpha) continue;
    const int d = s.dim();
    for (int slot = 0; slot < 3; ++slot) {
      if (d == degree - 1 + slot) {
        local[slot].emplace(s.vertices, counts[slot]++);
      }
    }
  }

  auto rank_of = [&](int cols_slot) -> int {
    // Rank over Z/2 of the boundary map from slot `cols_slot` (= degree or
    // degree+1) down to its facets, via elimination on bit rows.
    const int rows_slot = cols_slot - 1;
    const int width = counts[rows_slot];
    if (width == 0 || counts[cols_slot] == 0) return 0;
    const int words = (width + 63) / 64;
    std::vector<std::vector<std::uint64_t>> pivot(
        static_cast<std::size_t>(width));
    int rank = 0;
    std::vector<int> facet;
    for (const auto& [verts, idx] : local[cols_slot]) {
      std::vector<std::uint64_t> row(static_cast<std::size_t>(words), 0);
      for (std::size_t skip = 0; skip < verts.size(); ++skip) {
        facet.clear();
        for (std::size_t l = 0; l < verts.size(); ++l) {
          if (l != skip) facet.push_back(verts[l]);
        }
        const int r = local[rows_slot].at(facet);
        row[static_cast<std::size_t>(r / 64)] ^= (1ull << (r % 64));
      }
      while (true) {
        int lead = -1;
        for (int wd = words - 1; wd >= 0 && lead < 0; --wd) {
          if (row[static_cast<std::size_t>(wd)]) {
            lead = wd * 64 +
                   63 - std::countl_zero(row[static_cast<std::size_t>(wd)]);
          }
        }
        if (lead < 0) break;
        auto& p = pivot[static_cast<std::size_t>(lead)];
        if (p.empty()) {
          p = std::move(row);
          ++rank;
          break;
        }
        for (int wd = 0; wd < words; ++wd) {
          row[static_cast<std::size_t>(wd)] ^= p[static_cast<std::size_t>(wd)];
        }
      }
    }
    return rank;
  };

  const int n_q = counts[1];
  const int rank_down = (degree == 0) ? 0 : rank_of(1);
  const int rank_up = rank_of(2);
  return n_q - rank_down - rank_up;
}

double bottleneck(const PersistenceDiagram& A, const PersistenceDiagram& B,
                  Scale scale) {
  return bottleneck_impl(A, B, scale).value;
}

InterleavingCertificate certify_interleaving(
    std::span<const PersistenceDiagram> A,
    std::span<const PersistenceDiagram> B, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ContractViolation("certify_interleaving: epsilon must lie in (0,1)");
  }
  if (A.size() != B.size()) {
    throw ContractViolation("certify_interleaving: degree lists differ");
  }
  InterleavingCertificate cert;
  cert.epsilon = epsilon;
  cert.beta = 1.0 / std::sqrt(1.0 - epsilon);
  const double threshold = -0.5 * std::log1p(-epsilon);
  cert.log_bottleneck = 0.0;
  cert.passes = true;
  for (std::size_t q = 0; q < A.size(); ++q) {
    if (A[q].degree != B[q].degree) {
      throw ContractViolation("certify_interleaving: degrees misaligned");
    }
    BottleneckWitness w = bottleneck_impl(A[q], B[q], Scale::log_scale);
    cert.per_degree.push_back(w.value);
    cert.matching.push_back(std::move(w.matching));
    if (!std::isfinite(w.value)) {
      cert.passes = false;
      cert.log_bottleneck = w.value;
      if (!cert.diagnostic.empty()) cert.diagnostic += "; ";
      cert.diagnostic +=
          "degree " + std::to_string(A[q].degree) + ": " + w.reason;
      continue;
    }
    cert.log_bottleneck = std::max(cert.log_bottleneck, w.value);
  }
  if (cert.passes && cert.log_bottleneck > threshold + 1e-12) {
    cert.passes = false;
    cert.diagnostic = "log-bottleneck exceeds ln(beta)";
  }
  return cert;
}

nlohmann::ordered_json diagram_to_json(const PersistenceDiagram& D) {
  nlohmann::ordered_json j;
  j["degree"] = D.degree;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const PersistencePair& p : D.pairs) {
    nlohmann::ordered_json pr = nlohmann::ordered_json::array();
    pr.push_back(p.birth);
    if (p.infinite) {
      pr.push_back("inf");
    } else {
      pr.push_back(p.death);
    }
    pairs.push_back(std::move(pr));
  }
  j["pairs"] = std::move(pairs);
  j["zero_length_discarded"] = D.zero_length_discarded;
  return j;
}

nlohmann::ordered_json diagrams_to_json(
    std::span<const PersistenceDiagram> Ds) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const PersistenceDiagram& D : Ds) {
    j.push_back(diagram_to_json(D));
  }
  return j;
}

}  // namespace kdph
