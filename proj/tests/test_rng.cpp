#include <vector>

#include "doctest.h"

#include "causelab/rng.hpp"

using namespace causelab;

TEST_CASE("same seed reproduces the stream exactly") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
  }
  Rng c(43);
  CHECK(Rng(42).next_u64() != c.next_u64());
}

TEST_CASE("uniform stays in [0,1) with a sane mean") {
  Rng r(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("normal has mean 0 and variance 1") {
  Rng r(11);
  double sum = 0.0, sq = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("categorical follows unnormalized weights") {
  Rng r(5);
  const double w[3] = {2.0, 0.0, 6.0};
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 8000; ++i) ++counts[static_cast<std::size_t>(r.categorical(w, 3))];
  CHECK(counts[1] == 0);
  CHECK(counts[0] / 8000.0 == doctest::Approx(0.25).epsilon(0.1));
  CHECK(counts[2] / 8000.0 == doctest::Approx(0.75).epsilon(0.05));

  const double point[3] = {0.0, 1.0, 0.0};
  for (int i = 0; i < 20; ++i) CHECK(r.categorical(point, 3) == 1);
}

TEST_CASE("hash helpers are stable and sensitive") {
  CHECK(hash_bytes("") == 0xcbf29ce484222325ull);
  CHECK(hash_bytes("abc") == hash_bytes("abc"));
  CHECK(hash_bytes("abc") != hash_bytes("abd"));
  CHECK(hash_combine(1, 2) == hash_combine(1, 2));
  CHECK(hash_combine(1, 2) != hash_combine(2, 1));
  CHECK(hash_combine(0xFACADEull, 0) != hash_combine(0xFACADEull, 1));
}
