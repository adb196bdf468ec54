#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "causelab/dataset.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace causelab;

TEST_CASE("resampling with the same key is bit-identical") {
  const ScmSpec spec = fixtures::lg_shared();
  const Dataset a = sample(spec, 500, 42);
  const Dataset b = sample(spec, 500, 42);
  CHECK(a.values == b.values);
  CHECK(a.seed == 42);

  const Dataset c = sample(spec, 500, 43);
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("column layout follows declaration order without the selection node") {
  const ScmSpec spec = fixtures::lg_selection();
  const Dataset ds = sample(spec, 50, 7);
  REQUIRE(ds.columns.size() == spec.nodes.size() - 1);
  CHECK(ds.columns.front().name == "U");
  CHECK(ds.columns.back().name == "Y");
  CHECK(ds.col("S") == -1);
  CHECK_THROWS_AS(ds.require_col("S"), Error);
  CHECK(ds.selected.size() == ds.rows());
  CHECK(ds.cols_with_role(NodeRole::Cause).size() == 10);
  CHECK(ds.names_with_role(NodeRole::Cause).front() == "A1");

  const Eigen::MatrixXd sub = ds.matrix_for({"A2", "A1"});
  CHECK(sub.col(0) == ds.values.col(ds.require_col("A2")));
  CHECK(sub.col(1) == ds.values.col(ds.require_col("A1")));
}

TEST_CASE("discrete draws are valid codes with plausible frequencies") {
  const ScmSpec spec = fixtures::discrete_null();
  const std::size_t n = 20000;
  const Dataset ds = sample(spec, n, 11);
  std::size_t bad = 0;
  for (std::size_t j = 0; j < ds.columns.size(); ++j) {
    const int support = spec.find(ds.columns[j].name)->support;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = ds.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != std::floor(v) || v < 0 || v >= support) ++bad;
    }
  }
  CHECK(bad == 0);
  const int u = ds.require_col("U");
  const double pu1 = ds.values.col(u).mean();
  CHECK(pu1 == doctest::Approx(0.4).epsilon(0.05));
  const int a1 = ds.require_col("A1");
  CHECK(ds.values.col(a1).mean() == doctest::Approx(0.46).epsilon(0.05));
}

TEST_CASE("selected-outcome view masks the outcome exactly where unselected") {
  const ScmSpec spec = fixtures::lg_selection();
  const std::size_t n = 4000;
  const Dataset full = sample(spec, n, 99, SampleView::Full);
  const Dataset sel = sample(spec, n, 99, SampleView::SelectedOutcome);

  CHECK(full.values.allFinite());
  REQUIRE(sel.selected.size() == n);
  CHECK(sel.selected == full.selected);

  const int y = sel.require_col("Y");
  std::size_t kept = 0, bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = sel.values(static_cast<Eigen::Index>(i), y);
    if (sel.selected[i]) {
      if (v != full.values(static_cast<Eigen::Index>(i), y)) ++bad;
      ++kept;
    } else if (!std::isnan(v)) {
      ++bad;
    }
  }
  CHECK(bad == 0);
  // Everything but the outcome column is identical across views.
  for (std::size_t j = 0; j < sel.columns.size(); ++j) {
    if (static_cast<int>(j) == y) continue;
    CHECK(sel.values.col(static_cast<Eigen::Index>(j)) ==
          full.values.col(static_cast<Eigen::Index>(j)));
  }
  // Tuned so roughly half the rows survive selection.
  CHECK(static_cast<double>(kept) / static_cast<double>(n) == doctest::Approx(0.498).epsilon(0.05));
}

TEST_CASE("discrete selection keeps its tuned survival rate") {
  const Dataset ds = sample(fixtures::discrete_selection(), 20000, 5);
  double frac = 0.0;
  for (const auto s : ds.selected) frac += s;
  frac /= static_cast<double>(ds.rows());
  CHECK(frac == doctest::Approx(0.565).epsilon(0.03));
}

TEST_CASE("selected_subset keeps only surviving rows and records provenance") {
  const ScmSpec spec = fixtures::lg_selection();
  const Dataset ds = sample(spec, 1000, 3, SampleView::SelectedOutcome);
  const Dataset sub = selected_subset(ds);
  CHECK(sub.selected_rows_only);
  CHECK(sub.view == ds.view);
  CHECK(sub.seed == ds.seed);
  std::size_t want = 0;
  for (const auto s : ds.selected) want += s;
  REQUIRE(sub.rows() == want);
  for (const auto s : sub.selected) CHECK(s == 1);
  CHECK(sub.values.allFinite());

  // Worlds without selection pass through unchanged.
  const Dataset plain = sample(fixtures::lg_shared(), 100, 3);
  CHECK(selected_subset(plain).rows() == 100);
}

TEST_CASE("sample_do pins exactly the requested causes") {
  const ScmSpec spec = fixtures::lg_shared();
  const Dataset ds = sample_do(spec, 300, 17, {{"A1", 1.0}, {"A2", 0.0}});
  const int a1 = ds.require_col("A1");
  const int a2 = ds.require_col("A2");
  CHECK((ds.values.col(a1).array() == 1.0).all());
  CHECK((ds.values.col(a2).array() == 0.0).all());
  // Unpinned columns still vary.
  CHECK(ds.values.col(ds.require_col("A3")).maxCoeff() >
        ds.values.col(ds.require_col("A3")).minCoeff());

  CHECK_THROWS_AS(sample_do(spec, 10, 1, {{"Y", 0.0}}), Error);
  CHECK_THROWS_AS(sample_do(spec, 10, 1, {{"Z1", 0.0}}), Error);
  std::vector<std::pair<std::string, double>> all;
  for (int i = 0; i < 10; ++i) all.push_back({"A" + std::to_string(i + 1), 0.0});
  CHECK_THROWS_AS(sample_do(spec, 10, 1, all), Error);
}

TEST_CASE("csv writer emits typed headers and blanks for missing outcomes") {
  const Dataset ds = sample(fixtures::discrete_selection(), 40, 23, SampleView::SelectedOutcome);
  std::ostringstream os;
  write_csv(ds, os);
  std::istringstream is(os.str());
  std::string header;
  REQUIRE(std::getline(is, header));
  CHECK(header.find("U:multi_cause_confounder") != std::string::npos);
  CHECK(header.find("A1:cause") != std::string::npos);
  CHECK(header.find("Y:outcome") != std::string::npos);
  CHECK(header.rfind("__selected") == header.size() - std::string("__selected").size());

  std::string line;
  std::size_t rows = 0;
  const int y = ds.require_col("Y");
  while (std::getline(is, line)) {
    // Cheap parse: the outcome field is empty iff the row was dropped.
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) fields.push_back(cell);
    if (line.back() == ',') fields.push_back("");
    REQUIRE(fields.size() == ds.columns.size() + 1);
    CHECK(fields[static_cast<std::size_t>(y)].empty() == !ds.selected[rows]);
    CHECK(fields.back() == (ds.selected[rows] ? "1" : "0"));
    ++rows;
  }
  CHECK(rows == ds.rows());

  // No __selected column for worlds without selection.
  std::ostringstream os2;
  write_csv(sample(fixtures::lg_shared(), 5, 1), os2);
  CHECK(os2.str().find("__selected") == std::string::npos);
}
