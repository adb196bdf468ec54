#include <cmath>
#include <functional>
#include <vector>

#include "causelab/oracle.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace causelab;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;  // sentinel that no test expects here
}

}  // namespace

TEST_CASE("query validation rejects malformed interventions") {
  const ScmSpec lg = fixtures::lg_shared();
  const ScmSpec disc = fixtures::discrete_null();

  CHECK(code_of([&] { validate_query(lg, {{}, ""}); }) == ErrorCode::InvalidQuery);
  CHECK(code_of([&] { validate_query(lg, {{{"Z1", 1.0}}, ""}); }) == ErrorCode::InvalidQuery);
  CHECK(code_of([&] { validate_query(lg, {{{"A1", 1.0}, {"A1", 0.0}}, ""}); }) ==
        ErrorCode::InvalidQuery);
  CHECK(code_of([&] {
          InterventionQuery q;
          for (int i = 0; i < 10; ++i) q.set_to.push_back({"A" + std::to_string(i + 1), 0.0});
          validate_query(lg, q);
        }) == ErrorCode::InvalidQuery);
  CHECK(code_of([&] { validate_query(lg, {{{"A1", 1.0}}, "A2"}); }) == ErrorCode::InvalidQuery);
  CHECK(code_of([&] { validate_query(disc, {{{"A1", 0.5}}, ""}); }) == ErrorCode::InvalidQuery);
  CHECK(code_of([&] { validate_query(disc, {{{"A1", 2.0}}, ""}); }) == ErrorCode::InvalidQuery);
  CHECK_NOTHROW(validate_query(lg, {{{"A1", 1.0}}, "Y"}));
  CHECK_NOTHROW(validate_query(disc, {{{"A1", 1.0}}, ""}));
}

TEST_CASE("query hash ignores pin order but not values") {
  const InterventionQuery a{{{"A1", 1.0}, {"A2", 0.0}}, "Y"};
  const InterventionQuery b{{{"A2", 0.0}, {"A1", 1.0}}, "Y"};
  const InterventionQuery c{{{"A1", 1.0}, {"A2", 0.5}}, "Y"};
  CHECK(query_hash(a) == query_hash(b));
  CHECK(query_hash(a) != query_hash(c));
}

TEST_CASE("pinned-cause outcome law matches the direct-effect sum") {
  const ScmSpec spec = fixtures::lg_shared();
  const Eigen::VectorXd alpha = fixtures::lg_alpha();
  for (const InterventionQuery& q : fixtures::lg_grid()) {
    double want = 0.0;
    for (const auto& [name, value] : q.set_to) want += alpha(spec.require(name) - 2) * value;
    const GaussianDist g = do_gaussian(spec, q);
    REQUIRE(g.labels == std::vector<std::string>{"Y"});
    CHECK(g.mean(0) == doctest::Approx(want).epsilon(1e-12));
    CHECK(g.cov(0, 0) > 0.0);
  }
}

TEST_CASE("post-intervention joint pins causes as point masses") {
  const ScmSpec spec = fixtures::lg_shared();
  const InterventionQuery q{{{"A1", 1.0}, {"A2", 0.0}}, "Y"};
  const GaussianDist j = do_joint_gaussian(spec, q);
  const int a1 = j.require("A1");
  const int a2 = j.require("A2");
  CHECK(j.mean(a1) == 1.0);
  CHECK(j.mean(a2) == 0.0);
  CHECK(j.cov.row(a1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(j.cov.col(a2).cwiseAbs().maxCoeff() == 0.0);

  // The one-dimensional law is the response margin of the joint.
  const GaussianDist y = do_gaussian(spec, q);
  const int yi = j.require("Y");
  CHECK(y.mean(0) == doctest::Approx(j.mean(yi)).epsilon(1e-12));
  CHECK(y.cov(0, 0) == doctest::Approx(j.cov(yi, yi)).epsilon(1e-12));

  // Free causes keep positive variance.
  const int a3 = j.require("A3");
  CHECK(j.cov(a3, a3) > 0.5);
}

TEST_CASE("discrete intervention law matches brute-force truncation") {
  const ScmSpec spec = fixtures::discrete_null();
  const double pu1 = 0.4;
  const double p1[4][2] = {{0.3, 0.7}, {0.2, 0.8}, {0.6, 0.25}, {0.35, 0.75}};
  auto py = [](int u, int a1, int a2, int a3) {
    return 0.08 + 0.3 * a1 + 0.22 * a2 - 0.06 * a3 + 0.24 * u + 0.08 * a1 * u;
  };
  for (int pin = 0; pin < 2; ++pin) {
    double want = 0.0;
    for (int u = 0; u < 2; ++u)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int a3 = 0; a3 < 2; ++a3) {
          const double w = (u ? pu1 : 1 - pu1) * (a2 ? p1[1][u] : 1 - p1[1][u]) *
                           (a3 ? p1[2][u] : 1 - p1[2][u]);
          want += w * py(u, pin, a2, a3);
        }
    const InterventionQuery q{{{"A1", static_cast<double>(pin)}}, ""};
    const DiscreteDist d = do_discrete(spec, q);
    REQUIRE(d.labels == std::vector<std::string>{"Y"});
    CHECK(d.p(1) == doctest::Approx(want).epsilon(1e-12));
    CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(do_mean(spec, q) == doctest::Approx(want).epsilon(1e-12));

    const DiscreteDist j = do_joint_discrete(spec, q);
    const DiscreteDist pa1 = marginal(j, {"A1"});
    CHECK(pa1.p(pin) == doctest::Approx(1.0).epsilon(1e-12));
    const DiscreteDist pa2 = marginal(j, {"A2"});
    CHECK(pa2.p(1) == doctest::Approx(0.6 * 0.2 + 0.4 * 0.8).epsilon(1e-12));
  }
}

TEST_CASE("do_mean dispatches on mechanism") {
  const ScmSpec lg = fixtures::lg_shared();
  const InterventionQuery q = fixtures::lg_grid().front();
  CHECK(do_mean(lg, q) == doctest::Approx(do_gaussian(lg, q).mean(0)).epsilon(1e-12));
}

TEST_CASE("summarize reports exact moments and a unit-mass histogram") {
  Eigen::VectorXd x(4);
  x << 1, 2, 3, 4;
  const SampleSummary s = summarize(x);
  CHECK(s.n == 4);
  CHECK(s.mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(s.sd == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));
  CHECK(s.se == doctest::Approx(s.sd / 2.0).epsilon(1e-12));
  REQUIRE(s.bin_edges.size() == s.bin_mass.size() + 1);
  CHECK(s.bin_mass.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.bin_mass.minCoeff() >= 0.0);

  CHECK_THROWS_AS(summarize(Eigen::VectorXd()), Error);
}

TEST_CASE("simulation and exact answers agree within sampling error") {
  const std::size_t n = 20000;
  SUBCASE("shared-confounder world") {
    const ScmSpec spec = fixtures::lg_shared();
    for (const InterventionQuery& q : fixtures::lg_grid()) {
      const SampleSummary mc = do_monte_carlo(spec, q, n, 1001);
      CHECK(std::abs(mc.mean - do_mean(spec, q)) < 4.0 * mc.se);
    }
  }
  SUBCASE("binary world") {
    const ScmSpec spec = fixtures::discrete_null();
    for (const InterventionQuery& q : fixtures::binary_first_cause_grid()) {
      const SampleSummary mc = do_monte_carlo(spec, q, n, 1002);
      CHECK(std::abs(mc.mean - do_mean(spec, q)) < 4.0 * mc.se);
    }
  }
  SUBCASE("selection world, full view") {
    const ScmSpec spec = fixtures::lg_selection();
    const InterventionQuery q{{{"A1", 1.0}}, ""};
    const SampleSummary mc = do_monte_carlo(spec, q, n, 1003);
    CHECK(std::abs(mc.mean - do_mean(spec, q)) < 4.0 * mc.se);
  }
}

TEST_CASE("simulation estimates are reproducible and seed-sensitive") {
  const ScmSpec spec = fixtures::lg_shared();
  const InterventionQuery q = fixtures::lg_grid().front();
  const SampleSummary a = do_monte_carlo(spec, q, 5000, 7);
  const SampleSummary b = do_monte_carlo(spec, q, 5000, 7);
  CHECK(a.mean == b.mean);
  CHECK(a.sd == b.sd);
  CHECK(a.bin_mass == b.bin_mass);
  CHECK(a.stream == b.stream);

  const SampleSummary c = do_monte_carlo(spec, q, 5000, 8);
  CHECK(a.mean != c.mean);
  CHECK_THROWS_AS(do_monte_carlo(spec, q, 0, 7), Error);
}
