// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kdph/meb.hpp"

using namespace kdph;

namespace {

Point pt(std::initializer_list<double> cs) {
  Point p(static_cast<int>(cs.size()));
  int i = 0;
  for (double c : cs) p[i++] = c;
  return p;
}

WeightedCloud cloud(std::initializer_list<WeightedPoint> pts) {
  return WeightedCloud(std::vector<WeightedPoint>(pts));
}

WeightedCloud random_weighted(std::mt19937_64& rng, int n, int dim) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> w(-10.0, 0.0);
  std::vector<WeightedPoint> pts;
  for (int i = 0; i < n; ++i) {
    Point p(dim);
    for (int j = 0; j < dim; ++j) p[j] = 3.0 * g(rng);
    pts.push_back({p, w(rng)});
  }
  return WeightedCloud(std::move(pts));
}

void check_result_invariants(const MebResult& r, const WeightedCloud& X,
                             double tol) {
  const double scale = std::max(1.0, std::abs(r.rad_sq));
  double lam_sum = 0.0;
  Point comb = Point::Zero(r.center.size());
  for (const auto& [i, l] : r.support) {
    CHECK(l > 0.0);
    lam_sum += l;
    comb += l * X[i].point;
  }
  CHECK(std::abs(lam_sum - 1.0) <= 1e-12);
  CHECK((comb - r.center).norm() <= 1e-6 * std::max(1.0, r.center.norm()));
  for (const auto& [i, l] : r.support) {
    CHECK(std::abs(power_distance(r.center, X[i]) - r.rad_sq) <= tol * scale);
  }
  for (int j = 0; j < X.size(); ++j) {
    CHECK(power_distance(r.center, X[j]) <= r.rad_sq + tol * scale);
  }
  CHECK(std::abs(r.rad_sq - radius_from_support(r.dense_lambda(X.size()), X)) <=
        tol * scale);
}

}  // namespace

TEST_CASE("two unweighted points") {
  const WeightedCloud X = cloud({{pt({0, 0}), 0.0}, {pt({4, 0}), 0.0}});
  const MebResult r = weighted_meb(X);
  CHECK(r.center[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.center[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.rad_sq == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r.support.size() == 2);
  check_result_invariants(r, X, 1e-7);
}

TEST_CASE("equal weights shift the squared radius") {
  const WeightedCloud X = cloud({{pt({0, 0}), -3.0}, {pt({4, 0}), -3.0}});
  const MebResult r = weighted_meb(X);
  CHECK(r.center[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.rad_sq == doctest::Approx(7.0).epsilon(1e-9));
}

TEST_CASE("one dominating power function gives single support") {
  const WeightedCloud X = cloud({{pt({0, 0}), 0.0}, {pt({0.1, 0}), -100.0}});
  const MebResult r = weighted_meb(X);
  CHECK(r.rad_sq == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(r.center[0] == doctest::Approx(0.1).epsilon(1e-9));
  REQUIRE(r.support.size() == 1);
  CHECK(r.support[0].first == 1);
}

TEST_CASE("exact solver on a singleton") {
  const WeightedCloud X = cloud({{pt({1, 2}), -5.0}});
  const MebResult r = weighted_meb_exact(X);
  CHECK(r.rad_sq == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(r.center[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.center[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("acute triangle reproduces the circumcircle") {
  // (0,0), (4,0), (1,3): acute; circumcenter from the perpendicular
  // bisector equations x = 2, 2x + 6y = 10 -> (2, 1), radius^2 = 5.
  const WeightedCloud X =
      cloud({{pt({0, 0}), 0.0}, {pt({4, 0}), 0.0}, {pt({1, 3}), 0.0}});
  const MebResult it = weighted_meb(X);
  const MebResult ex = weighted_meb_exact(X);
  for (const MebResult& r : {it, ex}) {
    CHECK(r.center[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r.center[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.rad_sq == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(r.support.size() == 3);
  }
}

TEST_CASE("obtuse triangle drops the far vertex from support") {
  const WeightedCloud X =
      cloud({{pt({0, 0}), 0.0}, {pt({4, 0}), 0.0}, {pt({1, 0.5}), 0.0}});
  const MebResult r = weighted_meb(X);
  CHECK(r.rad_sq == doctest::Approx(4.0).epsilon(1e-8));
  REQUIRE(r.support.size() == 2);
  CHECK(r.support[0].first == 0);
  CHECK(r.support[1].first == 1);
}

TEST_CASE("radius from support") {
  const WeightedCloud single = cloud({{pt({1, 2}), -5.0}});
  const std::vector<double> one{1.0};
  CHECK(radius_from_support(one, single) == doctest::Approx(5.0));

  const WeightedCloud two = cloud({{pt({0, 0}), 0.0}, {pt({4, 0}), 0.0}});
  const std::vector<double> halves{0.5, 0.5};
  CHECK(radius_from_support(halves, two) ==
        doctest::Approx(4.0).epsilon(1e-12));

  const std::vector<double> not_convex{0.7, 0.7};
  CHECK_THROWS_AS(radius_from_support(not_convex, two), ContractViolation);
  const std::vector<double> negative{1.5, -0.5};
  CHECK_THROWS_AS(radius_from_support(negative, two), ContractViolation);
  const std::vector<double> wrong_len{1.0};
  CHECK_THROWS_AS(radius_from_support(wrong_len, two), ContractViolation);
}

TEST_CASE("iterative solver agrees with the exact oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const int dim = 1 + static_cast<int>(rng() % 6);
    const WeightedCloud X = random_weighted(rng, n, dim);
    const MebResult it = weighted_meb(X);
    const MebResult ex = weighted_meb_exact(X);
    const double scale = std::max(1.0, std::abs(ex.rad_sq));
    CHECK(std::abs(it.rad_sq - ex.rad_sq) <= 1e-6 * scale);
    check_result_invariants(it, X, 1e-6);
    check_result_invariants(ex, X, 1e-6);
  }
}

TEST_CASE("uniqueness across deterministic starts") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const WeightedCloud X = random_weighted(rng, n, 4);
    const MebResult a = weighted_meb(X, 1e-8, kMebDefaultMaxIter, 0);
    const MebResult b = weighted_meb(X, 1e-8, kMebDefaultMaxIter, n - 1);
    CHECK((a.center - b.center).norm() <= 1e-5 * std::max(1.0, a.center.norm()));
    CHECK(std::abs(a.rad_sq - b.rad_sq) <= 1e-6 * std::max(1.0, std::abs(a.rad_sq)));
  }
}

TEST_CASE("support weights exceed the pruning threshold") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const WeightedCloud X = random_weighted(rng, 6, 3);
    const MebResult r = weighted_meb(X);
    for (const auto& [i, l] : r.support) CHECK(l > kMebSupportPrune);
  }
}

TEST_CASE("adding a point never shrinks the ball") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    WeightedCloud X = random_weighted(rng, 5, 3);
    const MebResult before = weighted_meb(X);
    WeightedCloud Y = random_weighted(rng, 1, 3);
    std::vector<WeightedPoint> pts = X.points;
    pts.push_back(Y[0]);
    const MebResult after = weighted_meb(WeightedCloud(std::move(pts)));
    CHECK(after.rad_sq >=
          before.rad_sq - 1e-7 * std::max(1.0, std::abs(before.rad_sq)));
  }
}

TEST_CASE("translation equivariance") {
  std::mt19937_64 rng(31);
  const WeightedCloud X = random_weighted(rng, 6, 3);
  const Point t = pt({100.0, -40.0, 7.0});
  std::vector<WeightedPoint> moved;
  for (const WeightedPoint& p : X.points) {
    moved.push_back({p.point + t, p.weight});
  }
  const MebResult a = weighted_meb(X);
  const MebResult b = weighted_meb(WeightedCloud(std::move(moved)));
  CHECK((b.center - (a.center + t)).norm() <=
        1e-6 * std::max(1.0, b.center.norm()));
  CHECK(std::abs(a.rad_sq - b.rad_sq) <=
        1e-9 * std::max(1.0, std::abs(a.rad_sq)));
}

TEST_CASE("imaginary ball for positive weights") {
  const WeightedCloud X = cloud({{pt({0, 0}), 4.0}});
  const MebResult r = weighted_meb(X);
  CHECK(r.rad_sq == doctest::Approx(-4.0).epsilon(1e-9));
  CHECK(r.imaginary);

  const WeightedCloud Y = cloud({{pt({0, 0}), 9.0}, {pt({1, 0}), 9.0}});
  const MebResult s = weighted_meb(Y);
  CHECK(s.rad_sq < 0.0);
  CHECK(s.imaginary);
}

TEST_CASE("coincident points are handled") {
  const WeightedCloud X =
      cloud({{pt({1, 1}), -2.0}, {pt({1, 1}), -2.0}, {pt({1, 1}), -5.0}});
  const MebResult r = weighted_meb(X);
  CHECK(r.rad_sq == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(r.center[0] == doctest::Approx(1.0).epsilon(1e-9));
  check_result_invariants(r, X, 1e-7);
}

TEST_CASE("two point closed form") {
  SUBCASE("interior split") {
    const MebResult r = two_point_meb({pt({0, 0}), 0.0}, {pt({4, 0}), 0.0});
    CHECK(r.rad_sq == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.support.size() == 2);
  }
  SUBCASE("first point dominates") {
    const MebResult r = two_point_meb({pt({0}), -100.0}, {pt({0.1}), 0.0});
    CHECK(r.rad_sq == doctest::Approx(100.0).epsilon(1e-12));
    REQUIRE(r.support.size() == 1);
    CHECK(r.support[0].first == 0);
  }
  SUBCASE("second point dominates") {
    const MebResult r = two_point_meb({pt({0}), 0.0}, {pt({0.1}), -100.0});
    REQUIRE(r.support.size() == 1);
    CHECK(r.support[0].first == 1);
    CHECK(r.rad_sq == doctest::Approx(100.0).epsilon(1e-12));
  }
  SUBCASE("coincident points") {
    const MebResult r = two_point_meb({pt({2, 2}), -1.0}, {pt({2, 2}), -9.0});
    CHECK(r.rad_sq == doctest::Approx(9.0).epsilon(1e-12));
  }
  SUBCASE("agrees with the iterative solver on random pairs") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 200; ++trial) {
      const WeightedCloud X = random_weighted(rng, 2, 3);
      const MebResult closed = two_point_meb(X[0], X[1]);
      const MebResult it = weighted_meb(X);
      CHECK(std::abs(closed.rad_sq - it.rad_sq) <=
            1e-8 * std::max(1.0, std::abs(it.rad_sq)));
    }
  }
}

TEST_CASE("subset solve maps indices to subset positions") {
  std::mt19937_64 rng(41);
  const WeightedCloud X = random_weighted(rng, 8, 3);
  const std::vector<int> subset{1, 4, 6};
  const MebResult r = weighted_meb(X, subset);
  std::vector<WeightedPoint> manual;
  for (int i : subset) manual.push_back(X[i]);
  const MebResult m = weighted_meb(WeightedCloud(std::move(manual)));
  CHECK(std::abs(r.rad_sq - m.rad_sq) <=
        1e-9 * std::max(1.0, std::abs(m.rad_sq)));
  for (const auto& [i, l] : r.support) {
    CHECK(i >= 0);
    CHECK(i < 3);
  }
}

TEST_CASE("exact solver rejects large inputs") {
  std::mt19937_64 rng(43);
  const WeightedCloud X = random_weighted(rng, 13, 2);
  CHECK_THROWS_AS(weighted_meb_exact(X), ContractViolation);
}

TEST_CASE("non convergence carries the best iterate") {
  std::mt19937_64 rng(47);
  const WeightedCloud X = random_weighted(rng, 6, 4);
  try {
    weighted_meb(X, 1e-18, 3);
    // An exact landing is possible in principle; if it happens the result
    // must still satisfy all invariants at the tiny tolerance.
  } catch (const ConvergenceFailure& e) {
    CHECK(e.best.iterations >= 1);
    CHECK(e.best.residual >= 0.0);
    CHECK(e.best.center.size() == 4);
  }
}
