// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "kdph/persistence.hpp"

using namespace kdph;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point pt(std::initializer_list<double> cs) {
  Point p(static_cast<int>(cs.size()));
  int i = 0;
  for (double c : cs) p[i++] = c;
  return p;
}

WeightedCloud unweighted(std::initializer_list<Point> pts) {
  std::vector<WeightedPoint> w;
  for (const Point& p : pts) w.push_back({p, 0.0});
  return WeightedCloud(std::move(w));
}

WeightedCloud unit_square() {
  return unweighted({pt({0, 0}), pt({1, 0}), pt({0, 1}), pt({1, 1})});
}

FilteredComplex make_complex(std::vector<Simplex> simplices, double alpha_max) {
  FilteredComplex K;
  K.alpha_max = alpha_max;
  for (const Simplex& s : simplices) {
    K.max_dim = std::max(K.max_dim, s.dim());
    K.n_vertices = std::max(K.n_vertices, s.vertices.back() + 1);
  }
  K.simplices = std::move(simplices);
  std::sort(K.simplices.begin(), K.simplices.end(), filtration_less);
  return K;
}

PersistenceDiagram diagram(int degree,
                           std::vector<std::pair<double, double>> finite,
                           std::vector<double> infinite = {}) {
  PersistenceDiagram D;
  D.degree = degree;
  for (auto [b, d] : finite) D.pairs.push_back({b, d, false});
  for (double b : infinite) D.pairs.push_back({b, 0.0, true});
  return D;
}

int alive_count(const PersistenceDiagram& D, double alpha) {
  int count = 0;
  for (const PersistencePair& p : D.pairs) {
    if (p.birth <= alpha && (p.infinite || p.death > alpha)) ++count;
  }
  return count;
}

WeightedCloud random_weighted(std::mt19937_64& rng, int n, int dim) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> w(-3.0, 0.0);
  std::vector<WeightedPoint> pts;
  for (int i = 0; i < n; ++i) {
    Point p(dim);
    for (int j = 0; j < dim; ++j) p[j] = 2.0 * g(rng);
    pts.push_back({p, w(rng)});
  }
  return WeightedCloud(std::move(pts));
}

// Alpha values at events, event midpoints, and beyond the last event.
std::vector<double> probe_alphas(const FilteredComplex& K) {
  std::vector<double> events;
  for (const Simplex& s : K.simplices) events.push_back(s.value);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  std::vector<double> out = events;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    out.push_back((events[i] + events[i + 1]) / 2.0);
  }
  if (!events.empty()) out.push_back(events.back() + 1.0);
  return out;
}

void check_against_oracle(const FilteredComplex& K, int max_degree) {
  const std::vector<PersistenceDiagram> Ds = compute_persistence(K, max_degree);
  REQUIRE(static_cast<int>(Ds.size()) == max_degree + 1);
  for (double alpha : probe_alphas(K)) {
    for (int q = 0; q <= max_degree; ++q) {
      CHECK(alive_count(Ds[static_cast<std::size_t>(q)], alpha) ==
            betti_oracle(K, alpha, q));
    }
  }
}

}  // namespace

TEST_CASE("two points merge at the edge value") {
  const FilteredComplex K = weighted_cech(unweighted({pt({0}), pt({2})}), 1, 5.0);
  const auto Ds = compute_persistence(K, 0);
  REQUIRE(Ds.size() == 1);
  const PersistenceDiagram& h0 = Ds[0];
  REQUIRE(h0.pairs.size() == 2);
  CHECK(h0.pairs[0].birth == 0.0);
  CHECK(h0.pairs[0].death == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(h0.pairs[0].infinite);
  CHECK(h0.pairs[1].birth == 0.0);
  CHECK(h0.pairs[1].infinite);
}

TEST_CASE("unit square rips has one h1 bar") {
  const FilteredComplex K = weighted_rips(unit_square(), 2, 2.0);
  const auto Ds = compute_persistence(K, 1);
  const PersistenceDiagram& h0 = Ds[0];
  const PersistenceDiagram& h1 = Ds[1];
  REQUIRE(h1.pairs.size() == 1);
  // Both diagonals spawn cycles that the triangles fill instantly.
  CHECK(h1.zero_length_discarded == 2);
  CHECK(h1.pairs[0].birth == 0.5);
  CHECK(h1.pairs[0].death == std::sqrt(0.5));
  CHECK(h1.pairs[0].death == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  REQUIRE(h0.pairs.size() == 4);
  int infinite = 0;
  for (const PersistencePair& p : h0.pairs) {
    CHECK(p.birth == 0.0);
    if (p.infinite) {
      ++infinite;
    } else {
      CHECK(p.death == 0.5);
    }
  }
  CHECK(infinite == 1);
}

TEST_CASE("vertices only complexes have n infinite bars") {
  std::vector<Simplex> ss;
  for (int i = 0; i < 5; ++i) ss.push_back({{i}, 0.25 * i});
  const FilteredComplex K = make_complex(std::move(ss), 2.0);
  const auto Ds = compute_persistence(K, 1);
  REQUIRE(Ds[0].pairs.size() == 5);
  for (const PersistencePair& p : Ds[0].pairs) CHECK(p.infinite);
  CHECK(Ds[1].pairs.empty());
}

TEST_CASE("zero length pairs are discarded but counted") {
  const FilteredComplex K = make_complex(
      {{{0}, 1.0}, {{1}, 1.0}, {{0, 1}, 1.0}}, 2.0);
  const auto Ds = compute_persistence(K, 0);
  REQUIRE(Ds[0].pairs.size() == 1);
  CHECK(Ds[0].pairs[0].infinite);
  CHECK(Ds[0].zero_length_discarded == 1);
}

TEST_CASE("betti oracle on the square rips complex") {
  const FilteredComplex K = weighted_rips(unit_square(), 2, 2.0);
  CHECK(betti_oracle(K, 0.6, 1) == 1);
  CHECK(betti_oracle(K, 0.6, 0) == 1);
  CHECK(betti_oracle(K, 0.4, 0) == 4);
  CHECK(betti_oracle(K, 0.4, 1) == 0);
  CHECK(betti_oracle(K, 1.0, 1) == 0);
  CHECK(betti_oracle(K, -0.5, 0) == 0);
  CHECK(betti_oracle(K, -0.5, 1) == 0);
  CHECK(betti_oracle(K, -0.5, 2) == 0);
}

TEST_CASE("betti oracle sees a cone as contractible") {
  const FilteredComplex K = make_complex(
      {{{0}, 0.0}, {{1}, 0.0}, {{2}, 0.0}, {{3}, 0.0},
       {{0, 1}, 1.0}, {{0, 2}, 1.0}, {{1, 2}, 1.0},
       {{0, 3}, 1.0}, {{1, 3}, 1.0}, {{2, 3}, 1.0},
       {{0, 1, 3}, 2.0}, {{0, 2, 3}, 2.0}, {{1, 2, 3}, 2.0}},
      3.0);
  validate_complex(K);
  CHECK(betti_oracle(K, kInf, 0) == 1);
  CHECK(betti_oracle(K, kInf, 1) == 0);
  CHECK(betti_oracle(K, kInf, 2) == 0);
  // Before the cone triangles arrive the 1-skeleton is a complete graph.
  CHECK(betti_oracle(K, 1.5, 1) == 3);
  check_against_oracle(K, 2);
}

TEST_CASE("betti oracle refuses oversized complexes") {
  std::vector<Simplex> ss;
  for (int i = 0; i < 2001; ++i) ss.push_back({{i}, 0.0});
  const FilteredComplex K = make_complex(std::move(ss), 1.0);
  CHECK_THROWS_AS(betti_oracle(K, 0.5, 0), ContractViolation);
}

TEST_CASE("reduction matches the rank oracle on random complexes") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 4; ++trial) {
    const WeightedCloud W = random_weighted(rng, 8 + trial, 2 + trial % 2);
    check_against_oracle(weighted_rips(W, 3, 50.0), 2);
    check_against_oracle(weighted_cech(W, 2, 50.0), 1);
  }
}

TEST_CASE("infinite bars in degree zero count components") {
  std::mt19937_64 rng(43);
  const WeightedCloud W = random_weighted(rng, 10, 2);
  const FilteredComplex K = weighted_rips(W, 2, 1.9);
  const auto Ds = compute_persistence(K, 0);
  int infinite = 0;
  for (const PersistencePair& p : Ds[0].pairs) infinite += p.infinite ? 1 : 0;
  CHECK(infinite == betti_oracle(K, kInf, 0));
}

TEST_CASE("bottleneck basics") {
  const PersistenceDiagram A = diagram(1, {{1.0, 2.0}});
  CHECK(bottleneck(A, A, Scale::linear) == 0.0);
  CHECK(bottleneck(A, A, Scale::log_scale) == 0.0);
  CHECK(bottleneck(A, diagram(1, {}), Scale::linear) == 0.5);
  CHECK(bottleneck(diagram(1, {}), A, Scale::linear) == 0.5);
  const PersistenceDiagram B = diagram(1, {{1.1, 2.2}});
  CHECK(bottleneck(A, B, Scale::log_scale) ==
        doctest::Approx(0.09531017980432493).epsilon(1e-14));
  CHECK(bottleneck(A, B, Scale::log_scale) ==
        doctest::Approx(std::log(1.1)).epsilon(1e-14));
}

TEST_CASE("bottleneck degree mismatch is a contract violation") {
  CHECK_THROWS_AS(bottleneck(diagram(0, {{0.0, 1.0}}), diagram(1, {{0.0, 1.0}}),
                             Scale::linear),
                  ContractViolation);
}

TEST_CASE("infinite bars must pair with infinite bars") {
  const PersistenceDiagram A = diagram(0, {}, {0.0});
  const PersistenceDiagram B = diagram(0, {});
  CHECK(std::isinf(bottleneck(A, B, Scale::linear)));

  // Sorted-by-birth matching of the infinite parts.
  const PersistenceDiagram C = diagram(0, {}, {0.0, 1.0});
  const PersistenceDiagram D = diagram(0, {}, {0.5, 2.0});
  CHECK(bottleneck(C, D, Scale::linear) == 1.0);
  const PersistenceDiagram E = diagram(0, {}, {1.0});
  const PersistenceDiagram F = diagram(0, {}, {1.1});
  CHECK(bottleneck(E, F, Scale::log_scale) ==
        doctest::Approx(std::log(1.1)).epsilon(1e-14));
}

TEST_CASE("log scale zero birth rules") {
  // Zero-birth matches zero-birth at the death log-distance.
  CHECK(bottleneck(diagram(1, {{0.0, 2.0}}), diagram(1, {{0.0, 2.2}}),
                   Scale::log_scale) ==
        doctest::Approx(std::log(1.1)).epsilon(1e-14));
  // Zero-birth may not fall to the diagonal nor cross to a positive birth.
  CHECK(std::isinf(bottleneck(diagram(1, {{0.0, 2.0}}), diagram(1, {}),
                              Scale::log_scale)));
  CHECK(std::isinf(bottleneck(diagram(1, {{0.0, 2.0}}), diagram(1, {{1.0, 2.0}}),
                              Scale::log_scale)));
  // Zero-birth infinite bars pair with their own kind only.
  CHECK(bottleneck(diagram(0, {}, {0.0}), diagram(0, {}, {0.0}),
                   Scale::log_scale) == 0.0);
  CHECK(std::isinf(bottleneck(diagram(0, {}, {0.0}), diagram(0, {}, {1.0}),
                              Scale::log_scale)));
  // Linear scale has no zero-birth restriction.
  CHECK(bottleneck(diagram(1, {{0.0, 2.0}}), diagram(1, {{1.0, 2.0}}),
                   Scale::linear) == 1.0);
}

TEST_CASE("log scale rejects negative coordinates") {
  CHECK_THROWS_AS(bottleneck(diagram(1, {{-1.0, 2.0}}), diagram(1, {}),
                             Scale::log_scale),
                  ContractViolation);
  CHECK_THROWS_AS(bottleneck(diagram(1, {{0.0, 0.0}}), diagram(1, {}),
                             Scale::log_scale),
                  ContractViolation);
}

TEST_CASE("bottleneck is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> birth(0.1, 2.0);
  std::uniform_real_distribution<double> len(0.0, 1.5);
  std::uniform_int_distribution<int> count(0, 6);
  auto random_diagram = [&]() {
    PersistenceDiagram D;
    D.degree = 1;
    const int m = count(rng);
    for (int i = 0; i < m; ++i) {
      const double b = birth(rng);
      D.pairs.push_back({b, b + len(rng) + 1e-3, false});
    }
    return D;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const PersistenceDiagram A = random_diagram();
    const PersistenceDiagram B = random_diagram();
    const PersistenceDiagram C = random_diagram();
    for (Scale scale : {Scale::linear, Scale::log_scale}) {
      const double ab = bottleneck(A, B, scale);
      const double ba = bottleneck(B, A, scale);
      const double bc = bottleneck(B, C, scale);
      const double ac = bottleneck(A, C, scale);
      CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
      CHECK(ac <= ab + bc + 1e-12);
    }
  }
}

TEST_CASE("certificate thresholds") {
  const std::vector<PersistenceDiagram> A = {diagram(0, {{1.0, 2.0}})};
  InterleavingCertificate c =
      certify_interleaving(std::span(A), std::span(A), 0.25);
  CHECK(c.beta == doctest::Approx(1.0 / std::sqrt(0.75)).epsilon(1e-15));
  CHECK(std::log(c.beta) ==
        doctest::Approx(0.14384103622589045).epsilon(1e-14));
  CHECK(c.log_bottleneck == 0.0);
  CHECK(c.passes);
  CHECK(c.epsilon == 0.25);
  REQUIRE(c.per_degree.size() == 1);
  CHECK(c.per_degree[0] == 0.0);

  c = certify_interleaving(std::span(A), std::span(A), 0.1);
  CHECK(std::log(c.beta) ==
        doctest::Approx(0.052680257828913155).epsilon(1e-14));
}

TEST_CASE("uniform scaling within the factor passes") {
  std::vector<PersistenceDiagram> A(2), B(2), C(2);
  for (int q = 0; q < 2; ++q) {
    A[static_cast<std::size_t>(q)] =
        diagram(q, {{0.5, 1.0}, {0.8, 1.3}}, {0.4});
    B[static_cast<std::size_t>(q)] = A[static_cast<std::size_t>(q)];
    C[static_cast<std::size_t>(q)] = A[static_cast<std::size_t>(q)];
    for (PersistencePair& p : B[static_cast<std::size_t>(q)].pairs) {
      p.birth *= 1.03;
      p.death *= 1.03;
    }
    for (PersistencePair& p : C[static_cast<std::size_t>(q)].pairs) {
      p.birth *= 1.2;
      p.death *= 1.2;
    }
  }
  const InterleavingCertificate pass =
      certify_interleaving(std::span(A), std::span(B), 0.1);
  CHECK(pass.passes);
  CHECK(pass.log_bottleneck == doctest::Approx(std::log(1.03)).epsilon(1e-12));
  CHECK(pass.diagnostic.empty());
  REQUIRE(pass.matching.size() == 2);
  for (const auto& edges : pass.matching) CHECK(!edges.empty());

  const InterleavingCertificate fail =
      certify_interleaving(std::span(A), std::span(C), 0.1);
  CHECK_FALSE(fail.passes);
  CHECK(fail.log_bottleneck == doctest::Approx(std::log(1.2)).epsilon(1e-12));
  CHECK(!fail.diagnostic.empty());
}

TEST_CASE("certificate is monotone in epsilon") {
  std::vector<PersistenceDiagram> A = {diagram(0, {{1.0, 2.0}})};
  std::vector<PersistenceDiagram> B = {diagram(0, {{1.1, 2.2}})};
  // ln 1.1 = 0.0953 sits between the 0.1 and 0.2 thresholds.
  CHECK_FALSE(certify_interleaving(std::span(A), std::span(B), 0.1).passes);
  CHECK(certify_interleaving(std::span(A), std::span(B), 0.2).passes);
  bool prev = false;
  for (double eps : {0.05, 0.1, 0.15, 0.2, 0.3, 0.5}) {
    const bool now =
        certify_interleaving(std::span(A), std::span(B), eps).passes;
    CHECK((now || !prev));
    prev = now;
  }
}

TEST_CASE("zero birth incompatibility is a diagnosed failure") {
  std::vector<PersistenceDiagram> A = {diagram(0, {{0.0, 2.0}})};
  std::vector<PersistenceDiagram> B = {diagram(0, {{1.0, 2.0}})};
  const InterleavingCertificate c =
      certify_interleaving(std::span(A), std::span(B), 0.5);
  CHECK_FALSE(c.passes);
  CHECK(std::isinf(c.log_bottleneck));
  CHECK(c.diagnostic.find("zero-birth") != std::string::npos);
}

TEST_CASE("diagrams are invariant under refiltration") {
  std::mt19937_64 rng(53);
  const FilteredComplex K = weighted_rips(unit_square(), 2, 2.0);
  const auto want = compute_persistence(K, 1);
  for (int trial = 0; trial < 10; ++trial) {
    FilteredComplex shuffled = K;
    // Permute within (value, dimension) groups: any such order is a valid
    // filtration because proper faces have smaller dimension at equal value.
    auto same_group = [](const Simplex& a, const Simplex& b) {
      return a.value == b.value && a.dim() == b.dim();
    };
    auto it = shuffled.simplices.begin();
    while (it != shuffled.simplices.end()) {
      auto last = it;
      while (last != shuffled.simplices.end() && same_group(*it, *last)) {
        ++last;
      }
      std::shuffle(it, last, rng);
      it = last;
    }
    validate_complex(shuffled);
    const auto got = compute_persistence(shuffled, 1);
    REQUIRE(got.size() == want.size());
    for (std::size_t q = 0; q < want.size(); ++q) {
      REQUIRE(got[q].pairs.size() == want[q].pairs.size());
      for (std::size_t i = 0; i < want[q].pairs.size(); ++i) {
        CHECK(got[q].pairs[i].birth == want[q].pairs[i].birth);
        CHECK(got[q].pairs[i].death == want[q].pairs[i].death);
        CHECK(got[q].pairs[i].infinite == want[q].pairs[i].infinite);
      }
      CHECK(got[q].zero_length_discarded == want[q].zero_length_discarded);
    }
  }
}

TEST_CASE("diagram json uses inf for open deaths") {
  PersistenceDiagram D = diagram(1, {{0.5, 1.5}}, {0.25});
  const nlohmann::ordered_json j = diagram_to_json(D);
  CHECK(j["degree"] == 1);
  REQUIRE(j["pairs"].size() == 2);
  CHECK(j["pairs"][0][0] == 0.5);
  CHECK(j["pairs"][0][1] == 1.5);
  CHECK(j["pairs"][1][0] == 0.25);
  CHECK(j["pairs"][1][1] == "inf");
  CHECK(j.contains("zero_length_discarded"));

  const std::vector<PersistenceDiagram> Ds = {diagram(0, {}), D};
  const nlohmann::ordered_json all = diagrams_to_json(std::span(Ds));
  REQUIRE(all.is_array());
  CHECK(all.size() == 2);
  CHECK(all[1]["degree"] == 1);
}
