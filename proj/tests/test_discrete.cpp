#include "doctest.h"

#include "causelab/discrete.hpp"

using namespace causelab;

namespace {

// P(X, Y) with X binary, Y ternary, last label fastest.
DiscreteDist xy_joint() {
  DiscreteDist d = make_discrete({"X", "Y"}, {2, 3});
  d.p << 0.10, 0.20, 0.05, 0.25, 0.15, 0.25;
  return d;
}

}  // namespace

TEST_CASE("odometer layout: last label varies fastest") {
  const DiscreteDist d = xy_joint();
  CHECK(d.size() == 6);
  CHECK(d.flat_index({0, 0}) == 0);
  CHECK(d.flat_index({0, 2}) == 2);
  CHECK(d.flat_index({1, 2}) == 5);
  std::vector<int> codes;
  d.codes_of(4, codes);
  CHECK(codes == std::vector<int>{1, 1});
  for (std::size_t cell = 0; cell < d.size(); ++cell) {
    d.codes_of(cell, codes);
    CHECK(d.flat_index(codes) == cell);
  }
}

TEST_CASE("marginal sums out and follows keep order") {
  const DiscreteDist d = xy_joint();
  const DiscreteDist mx = marginal(d, {"X"});
  CHECK(mx.p(0) == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(mx.p(1) == doctest::Approx(0.65).epsilon(1e-12));
  const DiscreteDist my = marginal(d, {"Y"});
  CHECK(my.p(0) == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(my.p(2) == doctest::Approx(0.30).epsilon(1e-12));
  CHECK(marginal(d, {"Y", "X"}).flat_index({2, 1}) == 5);
  CHECK(marginal(d, {"Y", "X"}).p(5) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("condition restricts and renormalizes") {
  const DiscreteDist d = xy_joint();
  const DiscreteDist c = condition(d, {{"Y", 1}});
  REQUIRE(c.labels == std::vector<std::string>{"X"});
  CHECK(c.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.p(0) == doctest::Approx(0.20 / 0.35).epsilon(1e-12));
  CHECK(c.p(1) == doctest::Approx(0.15 / 0.35).epsilon(1e-12));
}

TEST_CASE("conditioning on zero mass or bad codes fails") {
  DiscreteDist d = make_discrete({"X", "Y"}, {2, 2});
  d.p << 0.5, 0.0, 0.5, 0.0;
  CHECK_THROWS_AS(condition(d, {{"Y", 1}}), Error);
  CHECK_THROWS_AS(condition(d, {{"Y", 2}}), Error);
  CHECK_THROWS_AS(condition(d, {{"Z", 0}}), Error);
}

TEST_CASE("make_discrete guards the cell budget") {
  CHECK_THROWS_AS(make_discrete({"A", "B", "C"}, {3000, 3000, 3000}), Error);
  CHECK_THROWS_AS(make_discrete({"A"}, {1}), Error);
  CHECK_THROWS_AS(make_discrete({"A", "A"}, {2, 2}), Error);
}
