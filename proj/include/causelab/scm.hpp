#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causelab/discrete.hpp"
#include "causelab/gaussian.hpp"

namespace causelab {

enum class NodeRole {
  Cause,
  Outcome,
  MultiCauseConfounder,
  SingleCauseConfounder,
  MultiCauseCovariate,
  SingleCauseCovariate,
  OutcomeCovariate,
  Selection,
};

const char* to_string(NodeRole role);
std::optional<NodeRole> role_from_string(const std::string& s);

enum class Mechanism { LinearGaussian, TabularDiscrete };

// One structural node. Linear-Gaussian nodes use {intercept, noise_sd} with the
// value intercept + sum(coeff * parent) + noise_sd * N(0,1); a Selection node
// instead draws Bernoulli(sigmoid(intercept + sum(coeff * parent))). Discrete
// nodes carry a CPT: rows enumerate parent configurations in odometer order over
// the parents sorted by declaration index (last parent fastest), columns are the
// node's categories, each row summing to 1 within 1e-12.
struct Node {
  std::string name;
  NodeRole role = NodeRole::Cause;
  double noise_sd = 1.0;
  double intercept = 0.0;
  int support = 0;
  std::vector<double> cpt;
};

struct Edge {
  std::string from;
  std::string to;
  double coeff = 0.0;
};

struct ScmSpec {
  Mechanism mechanism = Mechanism::LinearGaussian;
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  int index_of(const std::string& name) const;
  int require(const std::string& name) const;
  const Node* find(const std::string& name) const;
  std::vector<std::string> names_with_role(NodeRole role) const;
  int outcome_index() const;
  int selection_index() const;
  std::size_t cause_count() const;
};

enum class GraphClass { ClassA, ClassB, Rejected };

struct RuleCheck {
  std::string rule;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  GraphClass graph_class = GraphClass::Rejected;
  bool ok = false;
  bool selection_on_causes = false;
  std::vector<RuleCheck> checks;
  std::vector<int> topo_order;

  const RuleCheck* first_failure() const;
};

// Structural audit: every invariant is reported as its own pass/fail entry and
// nothing throws. selection_on_causes is informational; edges from causes into
// the selection node are accepted but recorded so downstream consumers can see
// that outcome-independent selection cannot be assumed to ignore the causes.
ValidationReport validate_spec(const ScmSpec& spec);

// Throwing variant used as the precondition gate by every operation that
// requires a valid spec.
void require_valid(const ScmSpec& spec);

std::vector<int> parents_of(const ScmSpec& spec, int node);
std::vector<int> topological_order(const ScmSpec& spec);

// Exact joint law of a linear-Gaussian spec over every node except Selection.
// With x = intercept + B x + e this is mean = (I-B)^-1 intercept and
// cov = (I-B)^-1 D (I-B)^-T, D = diag(noise_sd^2), solved by topological
// forward substitution.
GaussianDist joint_gaussian(const ScmSpec& spec);

// Exact joint table of a tabular-discrete spec over all nodes (Selection
// included, as an ordinary binary variable).
DiscreteDist joint_discrete(const ScmSpec& spec);

}  // namespace causelab
