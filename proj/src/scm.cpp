#include "causelab/scm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace causelab {

const char* to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Cause: return "cause";
    case NodeRole::Outcome: return "outcome";
    case NodeRole::MultiCauseConfounder: return "multi_cause_confounder";
    case NodeRole::SingleCauseConfounder: return "single_cause_confounder";
    case NodeRole::MultiCauseCovariate: return "multi_cause_covariate";
    case NodeRole::SingleCauseCovariate: return "single_cause_covariate";
    case NodeRole::OutcomeCovariate: return "outcome_covariate";
    case NodeRole::Selection: return "selection";
  }
  return "?";
}

std::optional<NodeRole> role_from_string(const std::string& s) {
  static const std::map<std::string, NodeRole> table = {
      {"cause", NodeRole::Cause},
      {"outcome", NodeRole::Outcome},
      {"multi_cause_confounder", NodeRole::MultiCauseConfounder},
      {"single_cause_confounder", NodeRole::SingleCauseConfounder},
      {"multi_cause_covariate", NodeRole::MultiCauseCovariate},
      {"single_cause_covariate", NodeRole::SingleCauseCovariate},
      {"outcome_covariate", NodeRole::OutcomeCovariate},
      {"selection", NodeRole::Selection},
  };
  const auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

int ScmSpec::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return static_cast<int>(i);
  return -1;
}

int ScmSpec::require(const std::string& name) const {
  const int i = index_of(name);
  if (i < 0) raise(ErrorCode::UnknownNode, "no node named '" + name + "'");
  return i;
}

const Node* ScmSpec::find(const std::string& name) const {
  const int i = index_of(name);
  return i < 0 ? nullptr : &nodes[static_cast<std::size_t>(i)];
}

std::vector<std::string> ScmSpec::names_with_role(NodeRole role) const {
  std::vector<std::string> out;
  for (const auto& n : nodes)
    if (n.role == role) out.push_back(n.name);
  return out;
}

int ScmSpec::outcome_index() const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].role == NodeRole::Outcome) return static_cast<int>(i);
  return -1;
}

int ScmSpec::selection_index() const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].role == NodeRole::Selection) return static_cast<int>(i);
  return -1;
}

std::size_t ScmSpec::cause_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(),
                    [](const Node& n) { return n.role == NodeRole::Cause; }));
}

const RuleCheck* ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.pass) return &c;
  return nullptr;
}

std::vector<int> parents_of(const ScmSpec& spec, int node) {
  std::vector<int> out;
  const std::string& name = spec.nodes[static_cast<std::size_t>(node)].name;
  for (const auto& e : spec.edges)
    if (e.to == name) out.push_back(spec.index_of(e.from));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> topological_order(const ScmSpec& spec) {
  const auto n = spec.nodes.size();
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> children(n);
  for (const auto& e : spec.edges) {
    const int a = spec.index_of(e.from);
    const int b = spec.index_of(e.to);
    if (a < 0 || b < 0) raise(ErrorCode::UnknownNode, "edge endpoint not declared");
    children[static_cast<std::size_t>(a)].push_back(b);
    ++indeg[static_cast<std::size_t>(b)];
  }
  std::vector<int> ready, order;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  while (!ready.empty()) {
    // smallest declaration index first keeps the order deterministic
    const auto it = std::min_element(ready.begin(), ready.end());
    const int v = *it;
    ready.erase(it);
    order.push_back(v);
    for (const int c : children[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
  }
  if (order.size() != n) raise(ErrorCode::CyclicGraph, "spec edges contain a directed cycle");
  return order;
}

namespace {

bool is_confounder(NodeRole r) {
  return r == NodeRole::MultiCauseConfounder || r == NodeRole::SingleCauseConfounder;
}

bool is_covariate(NodeRole r) {
  return r == NodeRole::MultiCauseCovariate || r == NodeRole::SingleCauseCovariate ||
         r == NodeRole::OutcomeCovariate;
}

struct Adjacency {
  std::vector<std::vector<int>> children;
  std::vector<std::vector<int>> parents;
};

Adjacency adjacency(const ScmSpec& spec) {
  Adjacency adj;
  adj.children.resize(spec.nodes.size());
  adj.parents.resize(spec.nodes.size());
  for (const auto& e : spec.edges) {
    const int a = spec.index_of(e.from);
    const int b = spec.index_of(e.to);
    if (a < 0 || b < 0) continue;
    adj.children[static_cast<std::size_t>(a)].push_back(b);
    adj.parents[static_cast<std::size_t>(b)].push_back(a);
  }
  return adj;
}

std::size_t count_role(const ScmSpec& spec, const std::vector<int>& idx, NodeRole r) {
  return static_cast<std::size_t>(
      std::count_if(idx.begin(), idx.end(), [&](int i) {
        return spec.nodes[static_cast<std::size_t>(i)].role == r;
      }));
}

}  // namespace

ValidationReport validate_spec(const ScmSpec& spec) {
  ValidationReport rep;
  auto check = [&rep](const std::string& rule, bool pass, const std::string& detail) {
    rep.checks.push_back({rule, pass, detail});
    return pass;
  };

  {
    std::set<std::string> seen;
    std::string bad;
    for (const auto& n : spec.nodes) {
      if (n.name.empty() || n.name.rfind("__", 0) == 0 || !seen.insert(n.name).second) {
        bad = n.name;
        break;
      }
    }
    check("unique-names", bad.empty(), bad.empty() ? "" : "bad or duplicate node name '" + bad + "'");
    if (!bad.empty()) return rep;
  }

  {
    std::string detail;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : spec.edges) {
      if (spec.index_of(e.from) < 0 || spec.index_of(e.to) < 0) {
        detail = "edge " + e.from + "->" + e.to + " references an undeclared node";
        break;
      }
      if (e.from == e.to) {
        detail = "self edge on '" + e.from + "'";
        break;
      }
      if (!seen.insert({e.from, e.to}).second) {
        detail = "duplicate edge " + e.from + "->" + e.to;
        break;
      }
    }
    if (!check("edge-endpoints", detail.empty(), detail)) return rep;
  }

  try {
    rep.topo_order = topological_order(spec);
    check("acyclic", true, "");
  } catch (const Error&) {
    check("acyclic", false, "directed cycle");
    return rep;
  }

  const auto adj = adjacency(spec);
  const std::size_t n_outcome =
      static_cast<std::size_t>(std::count_if(spec.nodes.begin(), spec.nodes.end(),
                                             [](const Node& n) { return n.role == NodeRole::Outcome; }));
  const std::size_t n_selection =
      static_cast<std::size_t>(std::count_if(spec.nodes.begin(), spec.nodes.end(),
                                             [](const Node& n) { return n.role == NodeRole::Selection; }));
  check("outcome-count", n_outcome == 1, "found " + std::to_string(n_outcome));
  check("cause-count", spec.cause_count() >= 2,
        "found " + std::to_string(spec.cause_count()) + ", need at least 2");
  check("selection-count", n_selection <= 1, "found " + std::to_string(n_selection));

  {
    std::string detail;
    if (spec.mechanism == Mechanism::LinearGaussian) {
      for (const auto& n : spec.nodes) {
        if (n.role != NodeRole::Selection && !(n.noise_sd > 0.0)) {
          detail = "node '" + n.name + "' needs noise_sd > 0";
          break;
        }
      }
    } else {
      for (std::size_t i = 0; i < spec.nodes.size() && detail.empty(); ++i) {
        const Node& n = spec.nodes[i];
        const int support = n.role == NodeRole::Selection ? 2 : n.support;
        if (support < 2) {
          detail = "node '" + n.name + "' needs support >= 2";
          break;
        }
        std::size_t rows = 1;
        for (const int p : parents_of(spec, static_cast<int>(i))) {
          const Node& pn = spec.nodes[static_cast<std::size_t>(p)];
          rows *= static_cast<std::size_t>(pn.role == NodeRole::Selection ? 2 : pn.support);
        }
        if (n.cpt.size() != rows * static_cast<std::size_t>(support)) {
          detail = "node '" + n.name + "' cpt has " + std::to_string(n.cpt.size()) +
                   " entries, expected " + std::to_string(rows * static_cast<std::size_t>(support));
          break;
        }
        for (std::size_t r = 0; r < rows; ++r) {
          double sum = 0.0;
          for (int c = 0; c < support; ++c) {
            const double v = n.cpt[r * static_cast<std::size_t>(support) + static_cast<std::size_t>(c)];
            if (v < 0.0) {
              detail = "node '" + n.name + "' cpt row " + std::to_string(r) + " has a negative entry";
              break;
            }
            sum += v;
          }
          if (!detail.empty()) break;
          if (std::abs(sum - 1.0) > kCptRowSumTol) {
            detail = "node '" + n.name + "' cpt row " + std::to_string(r) + " sums to " +
                     std::to_string(sum);
            break;
          }
        }
      }
    }
    check("mechanism-fields", detail.empty(), detail);
  }

  std::ostringstream role_bad;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const Node& n = spec.nodes[i];
    const auto& ch = adj.children[i];
    const auto& pa = adj.parents[i];
    auto complain = [&](const std::string& what) { role_bad << n.name << ": " << what << "; "; };
    const std::size_t cause_children = count_role(spec, ch, NodeRole::Cause);
    const bool outcome_child =
        std::any_of(ch.begin(), ch.end(), [&](int c) {
          return spec.nodes[static_cast<std::size_t>(c)].role == NodeRole::Outcome;
        });
    switch (n.role) {
      case NodeRole::Cause:
        for (const int c : ch) {
          const NodeRole r = spec.nodes[static_cast<std::size_t>(c)].role;
          if (r != NodeRole::Outcome && r != NodeRole::Selection)
            complain("cause may point only at the outcome or selection");
        }
        for (const int p : pa) {
          const NodeRole r = spec.nodes[static_cast<std::size_t>(p)].role;
          if (!is_confounder(r) && r != NodeRole::MultiCauseCovariate &&
              r != NodeRole::SingleCauseCovariate)
            complain("cause parents must be confounders or cause covariates");
        }
        break;
      case NodeRole::Outcome:
        if (!ch.empty()) complain("outcome must have no children");
        for (const int p : pa) {
          const NodeRole r = spec.nodes[static_cast<std::size_t>(p)].role;
          if (r != NodeRole::Cause && !is_confounder(r) && r != NodeRole::OutcomeCovariate)
            complain("outcome parents must be causes, confounders, or outcome covariates");
        }
        break;
      case NodeRole::MultiCauseConfounder:
      case NodeRole::SingleCauseConfounder:
        for (const int c : ch) {
          const NodeRole r = spec.nodes[static_cast<std::size_t>(c)].role;
          if (r != NodeRole::Cause && r != NodeRole::Outcome && r != NodeRole::Selection)
            complain("confounder may point only at causes, the outcome, or selection");
        }
        if (!outcome_child) complain("confounder lacks an edge into the outcome");
        if (n.role == NodeRole::MultiCauseConfounder && cause_children < 2)
          complain("multi-cause confounder needs at least 2 cause children");
        if (n.role == NodeRole::SingleCauseConfounder && cause_children != 1)
          complain("single-cause confounder needs exactly 1 cause child");
        break;
      case NodeRole::MultiCauseCovariate:
      case NodeRole::SingleCauseCovariate:
        for (const int c : ch)
          if (spec.nodes[static_cast<std::size_t>(c)].role != NodeRole::Cause)
            complain("cause covariate may point only at causes");
        if (n.role == NodeRole::MultiCauseCovariate && cause_children < 2)
          complain("multi-cause covariate needs at least 2 cause children");
        if (n.role == NodeRole::SingleCauseCovariate && cause_children != 1)
          complain("single-cause covariate needs exactly 1 cause child");
        break;
      case NodeRole::OutcomeCovariate:
        if (ch.empty() || !std::all_of(ch.begin(), ch.end(), [&](int c) {
              return spec.nodes[static_cast<std::size_t>(c)].role == NodeRole::Outcome;
            }))
          complain("outcome covariate must point at the outcome and nothing else");
        break;
      case NodeRole::Selection:
        if (!ch.empty()) complain("selection must have no children");
        for (const int p : pa) {
          const NodeRole r = spec.nodes[static_cast<std::size_t>(p)].role;
          if (r == NodeRole::Cause) {
            rep.selection_on_causes = true;
          } else if (!is_confounder(r)) {
            complain("selection parents must be confounders or causes");
          }
        }
        break;
    }
    if ((is_confounder(n.role) || is_covariate(n.role)) && !pa.empty())
      complain("latent confounders and covariates must be exogenous");
  }
  check("role-edges", role_bad.str().empty(), role_bad.str());

  rep.ok = std::all_of(rep.checks.begin(), rep.checks.end(),
                       [](const RuleCheck& c) { return c.pass; });
  if (!rep.ok) return rep;

  // Narrowest class first: one shared confounder into every cause and nothing
  // else latent, no selection. A vector-valued confounder appears as parallel
  // nodes; each component must still cover every cause.
  bool class_a = n_selection == 0;
  std::size_t conf_nodes = 0;
  for (std::size_t i = 0; i < spec.nodes.size() && class_a; ++i) {
    const NodeRole r = spec.nodes[i].role;
    if (r == NodeRole::MultiCauseConfounder) {
      ++conf_nodes;
      class_a = count_role(spec, adj.children[i], NodeRole::Cause) == spec.cause_count();
    } else if (r != NodeRole::Cause && r != NodeRole::Outcome) {
      class_a = false;
    }
  }
  rep.graph_class = class_a && conf_nodes > 0 ? GraphClass::ClassA : GraphClass::ClassB;
  return rep;
}

void require_valid(const ScmSpec& spec) {
  const ValidationReport rep = validate_spec(spec);
  if (rep.ok) return;
  const RuleCheck* f = rep.first_failure();
  const std::string msg = f->rule + ": " + f->detail;
  if (f->rule == "acyclic") raise(ErrorCode::CyclicGraph, msg);
  if (f->rule == "role-edges" || f->rule == "outcome-count" || f->rule == "cause-count" ||
      f->rule == "selection-count")
    raise(ErrorCode::RoleViolation, msg);
  raise(ErrorCode::InvalidSpec, msg);
}

GaussianDist joint_gaussian(const ScmSpec& spec) {
  if (spec.mechanism != Mechanism::LinearGaussian)
    raise(ErrorCode::NotLinearGaussian, "joint_gaussian needs a linear-Gaussian spec");
  require_valid(spec);

  std::vector<int> keep;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i)
    if (spec.nodes[i].role != NodeRole::Selection) keep.push_back(static_cast<int>(i));
  std::vector<int> pos(spec.nodes.size(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) pos[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);

  const auto n = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd intercept(n), noise_var(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Node& nd = spec.nodes[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])];
    intercept(i) = nd.intercept;
    noise_var(i) = nd.noise_sd * nd.noise_sd;
  }
  for (const auto& e : spec.edges) {
    const int a = pos[static_cast<std::size_t>(spec.index_of(e.from))];
    const int b = pos[static_cast<std::size_t>(spec.index_of(e.to))];
    if (a < 0 || b < 0) continue;  // edges into Selection
    coeff(b, a) = e.coeff;
  }

  // rows of (I-B)^-1 by forward substitution over a topological order
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (const int v : topological_order(spec)) {
    const int i = pos[static_cast<std::size_t>(v)];
    if (i < 0) continue;
    t.row(i) = Eigen::RowVectorXd::Unit(n, i);
    for (Eigen::Index j = 0; j < n; ++j)
      if (coeff(i, j) != 0.0) t.row(i) += coeff(i, j) * t.row(j);
  }

  GaussianDist out;
  out.mean = t * intercept;
  out.cov = t * noise_var.asDiagonal() * t.transpose();
  out.cov = ((out.cov + out.cov.transpose()) / 2.0).eval();
  for (const int i : keep) out.labels.push_back(spec.nodes[static_cast<std::size_t>(i)].name);
  return out;
}

DiscreteDist joint_discrete(const ScmSpec& spec) {
  if (spec.mechanism != Mechanism::TabularDiscrete)
    raise(ErrorCode::NotTabularDiscrete, "joint_discrete needs a tabular-discrete spec");
  require_valid(spec);

  std::vector<std::string> labels;
  std::vector<int> cards;
  for (const auto& n : spec.nodes) {
    labels.push_back(n.name);
    cards.push_back(n.role == NodeRole::Selection ? 2 : n.support);
  }
  DiscreteDist out = make_discrete(labels, cards);

  std::vector<std::vector<int>> pa(spec.nodes.size());
  for (std::size_t i = 0; i < spec.nodes.size(); ++i)
    pa[i] = parents_of(spec, static_cast<int>(i));

  std::vector<int> codes;
  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    out.codes_of(cell, codes);
    double p = 1.0;
    for (std::size_t i = 0; i < spec.nodes.size() && p > 0.0; ++i) {
      const Node& nd = spec.nodes[i];
      const int support = out.cards[i];
      std::size_t row = 0;
      for (const int par : pa[i])
        row = row * static_cast<std::size_t>(out.cards[static_cast<std::size_t>(par)]) +
              static_cast<std::size_t>(codes[static_cast<std::size_t>(par)]);
      p *= nd.cpt[row * static_cast<std::size_t>(support) + static_cast<std::size_t>(codes[i])];
    }
    out.p(static_cast<Eigen::Index>(cell)) = p;
  }
  return out;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::RoleViolation: return "RoleViolation";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NotLinearGaussian: return "NotLinearGaussian";
    case ErrorCode::NotTabularDiscrete: return "NotTabularDiscrete";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::NotAStochasticMatrix: return "NotAStochasticMatrix";
    case ErrorCode::SingularConditioningBlock: return "SingularConditioningBlock";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::DegeneratePartition: return "DegeneratePartition";
    case ErrorCode::UnsolvedKernel: return "UnsolvedKernel";
    case ErrorCode::RankDeficientCrossCovariance: return "RankDeficientCrossCovariance";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::IncompatibleModels: return "IncompatibleModels";
    case ErrorCode::WrongViewProvenance: return "WrongViewProvenance";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::NotBinary: return "NotBinary";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingMethod: return "MissingMethod";
    case ErrorCode::IoError: return "IoError";
  }
  return "?";
}

}  // namespace causelab
