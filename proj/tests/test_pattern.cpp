#include <catch2/catch_amalgamated.hpp>

#include "apc/pattern.hpp"

using namespace apc;

TEST_CASE("generate_pattern without hard core") {
  const DelonePattern p = generate_pattern({2, 4.0}, 0.0, std::nullopt, 7);
  REQUIRE(p.size() == 16);
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(p.points(i, j) >= 0.0);
      CHECK(p.points(i, j) < 4.0);
    }
  CHECK(p.kind == PatternKind::amorphous);
}

TEST_CASE("generate_pattern hard core is respected") {
  const DelonePattern p = generate_pattern({2, 20.0}, 0.83, std::nullopt, 5);
  REQUIRE(p.size() == 400);
  CHECK(p.min_pair_distance() >= 0.83);
}

TEST_CASE("generate_pattern is deterministic") {
  const DelonePattern a = generate_pattern({2, 10.0}, 0.83, std::nullopt, 42);
  const DelonePattern b = generate_pattern({2, 10.0}, 0.83, std::nullopt, 42);
  REQUIRE(a.size() == b.size());
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  const DelonePattern c = generate_pattern({2, 10.0}, 0.83, std::nullopt, 43);
  CHECK((a.points - c.points).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("generate_pattern parameter validation") {
  CHECK_THROWS_AS(generate_pattern({2, 4.0}, 1.5, std::nullopt, 1),
                  InvalidParameter);
  CHECK_THROWS_AS(generate_pattern({2, 4.0}, 0.5, 0.4, 1), InvalidParameter);
  // d_min at the hard-core limit cannot be packed at unit density
  CHECK_THROWS_AS(generate_pattern({2, 6.0}, 1.0, std::nullopt, 1, 1000, false),
                  AttemptsExhausted);
}

TEST_CASE("periodic_lattice") {
  const DelonePattern p2 = periodic_lattice({2, 3.0});
  REQUIRE(p2.size() == 9);
  CHECK(p2.kind == PatternKind::periodic);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(p2.points(i, j) == std::floor(p2.points(i, j)));

  const DelonePattern p1 = periodic_lattice({1, 3.0});
  REQUIRE(p1.size() == 3);
  CHECK(p1.points(0, 0) == 0.0);
  CHECK(p1.points(1, 0) == 1.0);
  CHECK(p1.points(2, 0) == 2.0);

  CHECK_THROWS_AS(periodic_lattice({2, 3.5}), InvalidParameter);
}

TEST_CASE("verify_delone on the unit square lattice") {
  const DelonePattern p = periodic_lattice({2, 4.0});
  const DeloneReport rep = verify_delone(p, 0.45, 0.8);
  CHECK(rep.uniform_discrete);   // nearest neighbors at distance 1 >= 2*0.45
  CHECK(rep.relatively_dense);   // farthest point at sqrt(2)/2 ~ 0.707 <= 0.8
  CHECK(rep.farthest_point_estimate <= 0.8);

  const DeloneReport tight = verify_delone(p, 0.55, 0.8);
  CHECK_FALSE(tight.uniform_discrete);  // distance-1 pairs violate 2r = 1.1
  CHECK(!tight.pair_witnesses.empty());

  CHECK_THROWS_AS(verify_delone(p, 0.9, 0.8), InvalidParameter);
}

TEST_CASE("verify_delone flags duplicate points") {
  DelonePattern p = periodic_lattice({2, 3.0});
  p.points.row(4) = p.points.row(2);
  const DeloneReport rep = verify_delone(p, 0.2, 1.0);
  CHECK_FALSE(rep.uniform_discrete);
}

TEST_CASE("amorphous hard-core pattern is uniformly discrete at r=0.4") {
  const DelonePattern p = generate_pattern({2, 20.0}, 0.83, std::nullopt, 9);
  CHECK(verify_delone(p, 0.4, 2.0).uniform_discrete);
}

TEST_CASE("translate_pattern") {
  const DelonePattern p = generate_pattern({2, 5.0}, 0.5, std::nullopt, 3);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const DelonePattern same = translate_pattern(p, zero);
  CHECK((same.points - p.points).cwiseAbs().maxCoeff() == 0.0);

  // translating by a pattern point puts the origin in the pattern
  const Eigen::VectorXd a = p.point_vec(4);
  const DelonePattern t = translate_pattern(p, a);
  CHECK(t.points.row(4).cwiseAbs().maxCoeff() == Catch::Approx(0.0).margin(1e-12));

  // distances are preserved exactly up to wrap roundoff
  for (int i = 0; i < p.size(); ++i)
    for (int j = i + 1; j < p.size(); ++j)
      CHECK(t.distance(i, j) == Catch::Approx(p.distance(i, j)).margin(1e-12));

  // composition: translate by a then b == translate by a+b (mod L)
  Eigen::VectorXd b(2);
  b << 1.25, 3.5;
  const DelonePattern lhs = translate_pattern(translate_pattern(p, a), b);
  const DelonePattern rhs = translate_pattern(p, a + b);
  CHECK((lhs.points - rhs.points).cwiseAbs().maxCoeff() ==
        Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("ensemble samples are reproducible and distinct") {
  PatternEnsemble ens;
  ens.geometry = {2, 8.0};
  ens.d_min = 0.5;
  ens.base_seed = 100;
  ens.sample_count = 3;
  const DelonePattern a0 = ens.sample(0);
  const DelonePattern a0_again = ens.sample(0);
  const DelonePattern a1 = ens.sample(1);
  CHECK((a0.points - a0_again.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a0.points - a1.points).cwiseAbs().maxCoeff() > 0.0);
}
