#include "causelab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "causelab/rng.hpp"

namespace causelab {

int Dataset::col(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return static_cast<int>(i);
  return -1;
}

int Dataset::require_col(const std::string& name) const {
  const int i = col(name);
  if (i < 0) raise(ErrorCode::UnknownNode, "dataset has no column '" + name + "'");
  return i;
}

std::vector<int> Dataset::cols_with_role(NodeRole role) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].role == role) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<std::string> Dataset::names_with_role(NodeRole role) const {
  std::vector<std::string> out;
  for (const auto& c : columns)
    if (c.role == role) out.push_back(c.name);
  return out;
}

Eigen::MatrixXd Dataset::matrix_for(const std::vector<std::string>& names) const {
  Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = values.col(require_col(names[j]));
  return out;
}

namespace {

std::vector<double> pin_values(const ScmSpec& spec,
                               const std::vector<std::pair<std::string, double>>& set_to) {
  std::vector<double> pinned(spec.nodes.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& [name, value] : set_to) {
    const int i = spec.require(name);
    const Node& nd = spec.nodes[static_cast<std::size_t>(i)];
    if (nd.role != NodeRole::Cause)
      raise(ErrorCode::InvalidQuery, "only cause nodes can be pinned, got '" + name + "'");
    if (!std::isnan(pinned[static_cast<std::size_t>(i)]))
      raise(ErrorCode::InvalidQuery, "node '" + name + "' pinned twice");
    if (spec.mechanism == Mechanism::TabularDiscrete &&
        (value != std::floor(value) || value < 0.0 || value >= static_cast<double>(nd.support)))
      raise(ErrorCode::InvalidQuery, "pinned value for '" + name + "' is not a code in its support");
    pinned[static_cast<std::size_t>(i)] = value;
  }
  if (!set_to.empty() && set_to.size() >= spec.cause_count())
    raise(ErrorCode::InvalidQuery, "at least one cause must stay free");
  return pinned;
}

}  // namespace

Dataset sample_do(const ScmSpec& spec, std::size_t n, std::uint64_t seed,
                  const std::vector<std::pair<std::string, double>>& set_to, SampleView view) {
  require_valid(spec);
  const std::vector<double> pinned = pin_values(spec, set_to);
  const auto n_nodes = spec.nodes.size();
  const int sel = spec.selection_index();

  std::vector<int> out_col(n_nodes, -1);
  Dataset data;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (static_cast<int>(i) == sel) continue;
    out_col[i] = static_cast<int>(data.columns.size());
    data.columns.push_back({spec.nodes[i].name, spec.nodes[i].role});
  }
  data.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(data.columns.size()));
  data.selected.assign(n, 1);
  data.view = view;
  data.seed = seed;

  // Node values are staged here (Selection included) so parents resolve by
  // node index regardless of which columns survive into the table.
  Eigen::MatrixXd staged(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_nodes));
  Rng rng(seed);
  std::vector<std::vector<int>> pa(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) pa[i] = parents_of(spec, static_cast<int>(i));

  for (const int v : topological_order(spec)) {
    if (!std::isnan(pinned[static_cast<std::size_t>(v)])) {
      staged.col(v).setConstant(pinned[static_cast<std::size_t>(v)]);
      continue;
    }
    const Node& nd = spec.nodes[static_cast<std::size_t>(v)];
    const auto& parents = pa[static_cast<std::size_t>(v)];
    auto coeff_of = [&](int p) {
      for (const auto& e : spec.edges)
        if (e.to == nd.name && e.from == spec.nodes[static_cast<std::size_t>(p)].name) return e.coeff;
      return 0.0;
    };
    if (spec.mechanism == Mechanism::LinearGaussian) {
      Eigen::VectorXd lin = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), nd.intercept);
      for (const int p : parents) lin += coeff_of(p) * staged.col(p);
      if (nd.role == NodeRole::Selection) {
        for (std::size_t r = 0; r < n; ++r) {
          const double prob = 1.0 / (1.0 + std::exp(-lin(static_cast<Eigen::Index>(r))));
          staged(static_cast<Eigen::Index>(r), v) = rng.bernoulli(prob) ? 1.0 : 0.0;
        }
      } else {
        for (std::size_t r = 0; r < n; ++r)
          staged(static_cast<Eigen::Index>(r), v) =
              lin(static_cast<Eigen::Index>(r)) + nd.noise_sd * rng.normal();
      }
    } else {
      const int support = nd.role == NodeRole::Selection ? 2 : nd.support;
      for (std::size_t r = 0; r < n; ++r) {
        std::size_t row = 0;
        for (const int p : parents) {
          const Node& pn = spec.nodes[static_cast<std::size_t>(p)];
          row = row * static_cast<std::size_t>(pn.role == NodeRole::Selection ? 2 : pn.support) +
                static_cast<std::size_t>(staged(static_cast<Eigen::Index>(r), p));
        }
        staged(static_cast<Eigen::Index>(r), v) = static_cast<double>(
            rng.categorical(nd.cpt.data() + row * static_cast<std::size_t>(support), support));
      }
    }
  }

  for (std::size_t i = 0; i < n_nodes; ++i)
    if (out_col[i] >= 0) data.values.col(out_col[i]) = staged.col(static_cast<Eigen::Index>(i));
  if (sel >= 0)
    for (std::size_t r = 0; r < n; ++r)
      data.selected[r] = staged(static_cast<Eigen::Index>(r), sel) != 0.0 ? 1 : 0;

  if (view == SampleView::SelectedOutcome) {
    const int y = data.require_col(spec.nodes[static_cast<std::size_t>(spec.outcome_index())].name);
    for (std::size_t r = 0; r < n; ++r)
      if (!data.selected[r])
        data.values(static_cast<Eigen::Index>(r), y) = std::numeric_limits<double>::quiet_NaN();
  }
  return data;
}

Dataset sample(const ScmSpec& spec, std::size_t n, std::uint64_t seed, SampleView view) {
  return sample_do(spec, n, seed, {}, view);
}

Dataset selected_subset(const Dataset& data) {
  Dataset out;
  out.columns = data.columns;
  out.view = data.view;
  out.selected_rows_only = true;
  out.seed = data.seed;
  std::size_t m = 0;
  for (const auto s : data.selected) m += s;
  out.values.resize(static_cast<Eigen::Index>(m), data.values.cols());
  out.selected.assign(m, 1);
  Eigen::Index w = 0;
  for (std::size_t r = 0; r < data.rows(); ++r)
    if (data.selected[r]) out.values.row(w++) = data.values.row(static_cast<Eigen::Index>(r));
  return out;
}

void write_csv(const Dataset& data, std::ostream& os) {
  const bool has_sel =
      std::any_of(data.selected.begin(), data.selected.end(), [](std::uint8_t s) { return s == 0; }) ||
      data.selected_rows_only;
  for (std::size_t j = 0; j < data.columns.size(); ++j) {
    if (j) os << ',';
    os << data.columns[j].name << ':' << to_string(data.columns[j].role);
  }
  if (has_sel) os << ",__selected";
  os << '\n';
  char buf[40];
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
      if (j) os << ',';
      const double v = data.values(static_cast<Eigen::Index>(r), j);
      if (std::isnan(v)) continue;  // unobserved cell stays empty
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
    }
    if (has_sel) os << ',' << (data.selected[r] ? 1 : 0);
    os << '\n';
  }
  if (!os) raise(ErrorCode::IoError, "csv write failed");
}

}  // namespace causelab
