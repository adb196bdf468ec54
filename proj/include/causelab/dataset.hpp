#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "causelab/scm.hpp"

namespace causelab {

enum class SampleView { Full, SelectedOutcome };

struct Column {
  std::string name;
  NodeRole role = NodeRole::Cause;
};

// Sampled table. Columns follow the world's node declaration order (Selection
// excluded; its draw lands in `selected`). Discrete values are stored as
// 0-based codes widened to double. Under the SelectedOutcome view the outcome
// cell is NaN wherever the row was not selected; cause columns never have
// missing entries.
struct Dataset {
  std::vector<Column> columns;
  Eigen::MatrixXd values;
  std::vector<std::uint8_t> selected;
  SampleView view = SampleView::Full;
  bool selected_rows_only = false;
  std::uint64_t seed = 0;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  int col(const std::string& name) const;
  int require_col(const std::string& name) const;
  std::vector<int> cols_with_role(NodeRole role) const;
  std::vector<std::string> names_with_role(NodeRole role) const;

  Eigen::MatrixXd matrix_for(const std::vector<std::string>& names) const;
};

// Ancestral sampling in topological order, one column at a time, from a single
// stream seeded by `seed`; identical (spec, n, seed, view) gives a bit-identical
// table. The Full view exposes the outcome everywhere (simulation privilege);
// SelectedOutcome masks it where the selection draw came up 0.
Dataset sample(const ScmSpec& spec, std::size_t n, std::uint64_t seed,
               SampleView view = SampleView::Full);

// Same sampler with cause nodes in `set_to` pinned to constants: their noise is
// never drawn and edges into them are ignored. Only causes may be pinned, and
// at least one cause must stay free.
Dataset sample_do(const ScmSpec& spec, std::size_t n, std::uint64_t seed,
                  const std::vector<std::pair<std::string, double>>& set_to,
                  SampleView view = SampleView::Full);

// Rows with selection == 1 only (provenance recorded in selected_rows_only).
Dataset selected_subset(const Dataset& data);

// Header cells are name:role; a __selected column is appended when the world has
// a selection node. Unobserved outcome cells are written empty.
void write_csv(const Dataset& data, std::ostream& os);

}  // namespace causelab
