#include "support/fixtures.hpp"

#include "causelab/nullfn.hpp"

namespace causelab::fixtures {

namespace {

constexpr double kLoadings[10][2] = {
    {1.0900, 0.6430},  {-0.8977, 0.7848}, {0.8378, -0.3605}, {0.0274, 0.2460},
    {-0.3868, 0.2923}, {0.5580, 0.8666},  {-0.3892, -0.1697}, {0.2260, 1.1416},
    {1.0269, -1.0596}, {0.6361, -0.8219},
};
constexpr double kAlpha[10] = {-0.3400, -0.4020, 1.3391, -1.0386, 1.0121,
                               -0.4439, 0.8780,  0.9649, -0.0221, -0.4688};
constexpr double kAlphaU[2] = {-1.5027, -0.9172};

constexpr double kSelLoadings[10][2] = {
    {0.6291, 0.1126},  {-0.5634, -0.3642}, {-0.3989, -0.2417}, {0.6629, -0.9002},
    {-0.2780, 0.6409}, {0.5691, 0.2287},   {-0.8124, -0.3083}, {0.8158, 1.0519},
    {0.4558, -0.7461}, {0.8328, -0.7438},
};
constexpr double kSelAlpha[10] = {-0.5177, -0.2172, -0.1841, -0.6326, -1.1992,
                                  0.5882,  -1.0176, -0.8458, -1.0235, 0.2533};
constexpr double kSelAlphaU = 1.1;       // shared confounder -> outcome
constexpr double kSelAlphaV = 0.9;       // single-cause confounder -> outcome
constexpr double kSelC1V = 0.5;          // single-cause confounder -> A1
constexpr double kSelLogit[3] = {0.0, 0.5, 0.35};  // intercept, U, V

std::string cause_name(int i) { return "A" + std::to_string(i + 1); }

}  // namespace

ScmSpec lg_shared() {
  ScmSpec spec;
  spec.mechanism = Mechanism::LinearGaussian;
  spec.nodes.push_back({"Z1", NodeRole::MultiCauseConfounder, 1.0, 0.0, 0, {}});
  spec.nodes.push_back({"Z2", NodeRole::MultiCauseConfounder, 1.0, 0.0, 0, {}});
  for (int i = 0; i < 10; ++i)
    spec.nodes.push_back({cause_name(i), NodeRole::Cause, 1.0, 0.0, 0, {}});
  spec.nodes.push_back({"Y", NodeRole::Outcome, 1.0, 0.0, 0, {}});
  for (int i = 0; i < 10; ++i) {
    spec.edges.push_back({"Z1", cause_name(i), kLoadings[i][0]});
    spec.edges.push_back({"Z2", cause_name(i), kLoadings[i][1]});
    spec.edges.push_back({cause_name(i), "Y", kAlpha[i]});
  }
  spec.edges.push_back({"Z1", "Y", kAlphaU[0]});
  spec.edges.push_back({"Z2", "Y", kAlphaU[1]});
  return spec;
}

Eigen::MatrixXd lg_loadings() {
  Eigen::MatrixXd l(10, 2);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 2; ++j) l(i, j) = kLoadings[i][j];
  return l;
}

Eigen::VectorXd lg_alpha() {
  return Eigen::Map<const Eigen::VectorXd>(kAlpha, 10);
}

Eigen::Vector2d lg_alpha_u() { return {kAlphaU[0], kAlphaU[1]}; }

std::vector<InterventionQuery> lg_grid() {
  std::vector<InterventionQuery> grid;
  for (const auto& [v1, v2] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}})
    grid.push_back({{{"A1", v1}, {"A2", v2}}, "Y"});
  return grid;
}

ScmSpec lg_selection() {
  ScmSpec spec;
  spec.mechanism = Mechanism::LinearGaussian;
  spec.nodes.push_back({"U", NodeRole::MultiCauseConfounder, 1.0, 0.0, 0, {}});
  spec.nodes.push_back({"W", NodeRole::MultiCauseCovariate, 1.0, 0.0, 0, {}});
  spec.nodes.push_back({"V", NodeRole::SingleCauseConfounder, 1.0, 0.0, 0, {}});
  for (int i = 0; i < 10; ++i)
    spec.nodes.push_back({cause_name(i), NodeRole::Cause, 1.0, 0.0, 0, {}});
  spec.nodes.push_back({"Y", NodeRole::Outcome, 1.0, 0.0, 0, {}});
  spec.nodes.push_back({"S", NodeRole::Selection, 1.0, kSelLogit[0], 0, {}});
  for (int i = 0; i < 10; ++i) {
    spec.edges.push_back({"U", cause_name(i), kSelLoadings[i][0]});
    spec.edges.push_back({"W", cause_name(i), kSelLoadings[i][1]});
    spec.edges.push_back({cause_name(i), "Y", kSelAlpha[i]});
  }
  spec.edges.push_back({"V", "A1", kSelC1V});
  spec.edges.push_back({"U", "Y", kSelAlphaU});
  spec.edges.push_back({"V", "Y", kSelAlphaV});
  spec.edges.push_back({"U", "S", kSelLogit[1]});
  spec.edges.push_back({"V", "S", kSelLogit[2]});
  return spec;
}

CausePartition lg_null_partition() {
  CausePartition part;
  part.intervened = {"A1", "A2"};
  part.adjusted = {"A3", "A4", "A5"};
  part.null_causes = {"A6", "A7", "A8", "A9", "A10"};
  NullFunction f1;
  f1.kind = NullFunction::Kind::Linear;
  f1.domain = {"A6", "A7"};
  f1.weights = Eigen::Vector2d{1.0, -kAlpha[5] / kAlpha[6]};
  f1.description = "outcome-null combination of A6, A7";
  NullFunction f2;
  f2.kind = NullFunction::Kind::Linear;
  f2.domain = {"A8", "A10"};
  f2.weights = Eigen::Vector2d{1.0, -kAlpha[7] / kAlpha[9]};
  f2.description = "outcome-null combination of A8, A10";
  part.f = {f1, f2};
  return part;
}

namespace {

// CPT for a binary node given one binary parent: p1[u] = P(node=1 | U=u).
std::vector<double> binary_given_binary(double p_u0, double p_u1) {
  return {1.0 - p_u0, p_u0, 1.0 - p_u1, p_u1};
}

}  // namespace

ScmSpec discrete_null() {
  ScmSpec spec;
  spec.mechanism = Mechanism::TabularDiscrete;
  spec.nodes.push_back({"U", NodeRole::MultiCauseConfounder, 1.0, 0.0, 2, {0.6, 0.4}});
  const double p1[4][2] = {{0.3, 0.7}, {0.2, 0.8}, {0.6, 0.25}, {0.35, 0.75}};
  for (int i = 0; i < 4; ++i) {
    Node node{cause_name(i), NodeRole::Cause, 1.0, 0.0, 2, {}};
    node.cpt = binary_given_binary(p1[i][0], p1[i][1]);
    spec.nodes.push_back(std::move(node));
  }
  Node y{"Y", NodeRole::Outcome, 1.0, 0.0, 2, {}};
  for (int u = 0; u < 2; ++u)  // parents (U, A1, A2, A3), last fastest
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int a3 = 0; a3 < 2; ++a3) {
          const double p = 0.08 + 0.3 * a1 + 0.22 * a2 - 0.06 * a3 + 0.24 * u + 0.08 * a1 * u;
          y.cpt.push_back(1.0 - p);
          y.cpt.push_back(p);
        }
  spec.nodes.push_back(std::move(y));
  for (int i = 0; i < 4; ++i) spec.edges.push_back({"U", cause_name(i), 0.0});
  for (int i = 0; i < 3; ++i) spec.edges.push_back({cause_name(i), "Y", 0.0});
  spec.edges.push_back({"U", "Y", 0.0});
  return spec;
}

CausePartition discrete_null_partition() {
  CausePartition part;
  part.intervened = {"A1"};
  part.adjusted = {"A2", "A3"};
  part.null_causes = {"A4"};
  part.f = {identity_null("A4", 2)};
  return part;
}

ScmSpec discrete_incomplete() {
  ScmSpec spec;
  spec.mechanism = Mechanism::TabularDiscrete;
  spec.nodes.push_back({"U", NodeRole::MultiCauseConfounder, 1.0, 0.0, 3, {0.5, 0.3, 0.2}});
  spec.nodes.push_back(
      {"A1", NodeRole::Cause, 1.0, 0.0, 2, {0.7, 0.3, 0.4, 0.6, 0.2, 0.8}});
  spec.nodes.push_back(
      {"A2", NodeRole::Cause, 1.0, 0.0, 2, {0.75, 0.25, 0.45, 0.55, 0.25, 0.75}});
  spec.nodes.push_back({"A3", NodeRole::Cause, 1.0, 0.0, 3,
                        {0.6, 0.25, 0.15, 0.2, 0.5, 0.3, 0.15, 0.25, 0.6}});
  Node y{"Y", NodeRole::Outcome, 1.0, 0.0, 2, {}};
  for (int u = 0; u < 3; ++u)  // parents (U, A1, A2), last fastest
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2) {
        const double p = 0.1 + 0.25 * a1 + 0.2 * a2 + 0.15 * u;
        y.cpt.push_back(1.0 - p);
        y.cpt.push_back(p);
      }
  spec.nodes.push_back(std::move(y));
  for (int i = 0; i < 3; ++i) spec.edges.push_back({"U", cause_name(i), 0.0});
  for (int i = 0; i < 2; ++i) spec.edges.push_back({cause_name(i), "Y", 0.0});
  spec.edges.push_back({"U", "Y", 0.0});
  return spec;
}

CausePartition discrete_incomplete_partition() {
  CausePartition part;
  part.intervened = {"A1"};
  part.adjusted = {"A2"};
  part.null_causes = {"A3"};
  part.f = {identity_null("A3", 3)};
  return part;
}

ScmSpec discrete_selection() {
  ScmSpec spec;
  spec.mechanism = Mechanism::TabularDiscrete;
  spec.nodes.push_back({"U", NodeRole::MultiCauseConfounder, 1.0, 0.0, 2, {0.55, 0.45}});
  spec.nodes.push_back({"V", NodeRole::SingleCauseConfounder, 1.0, 0.0, 2, {0.6, 0.4}});
  Node a1{"A1", NodeRole::Cause, 1.0, 0.0, 2, {}};
  for (int u = 0; u < 2; ++u)  // parents (U, V), last fastest
    for (int v = 0; v < 2; ++v) {
      const double p = 0.25 + 0.35 * u + 0.2 * v;
      a1.cpt.push_back(1.0 - p);
      a1.cpt.push_back(p);
    }
  spec.nodes.push_back(std::move(a1));
  spec.nodes.push_back({"A2", NodeRole::Cause, 1.0, 0.0, 2, binary_given_binary(0.3, 0.75)});
  spec.nodes.push_back({"A3", NodeRole::Cause, 1.0, 0.0, 2, binary_given_binary(0.65, 0.25)});
  Node y{"Y", NodeRole::Outcome, 1.0, 0.0, 2, {}};
  for (int u = 0; u < 2; ++u)  // parents (U, V, A1, A2), last fastest
    for (int v = 0; v < 2; ++v)
      for (int a1v = 0; a1v < 2; ++a1v)
        for (int a2 = 0; a2 < 2; ++a2) {
          const double p = 0.1 + 0.25 * a1v + 0.18 * a2 + 0.2 * u + 0.12 * v;
          y.cpt.push_back(1.0 - p);
          y.cpt.push_back(p);
        }
  spec.nodes.push_back(std::move(y));
  Node s{"S", NodeRole::Selection, 1.0, 0.0, 2, {}};
  for (int u = 0; u < 2; ++u)  // parents (U, V), last fastest
    for (int v = 0; v < 2; ++v) {
      const double p = 0.35 + 0.3 * u + 0.2 * v;
      s.cpt.push_back(1.0 - p);
      s.cpt.push_back(p);
    }
  spec.nodes.push_back(std::move(s));
  for (int i = 0; i < 3; ++i) spec.edges.push_back({"U", cause_name(i), 0.0});
  spec.edges.push_back({"V", "A1", 0.0});
  for (int i = 0; i < 2; ++i) spec.edges.push_back({cause_name(i), "Y", 0.0});
  spec.edges.push_back({"U", "Y", 0.0});
  spec.edges.push_back({"V", "Y", 0.0});
  spec.edges.push_back({"U", "S", 0.0});
  spec.edges.push_back({"V", "S", 0.0});
  return spec;
}

CausePartition discrete_selection_partition() {
  CausePartition part;
  part.intervened = {"A1"};
  part.adjusted = {"A2"};
  part.null_causes = {"A3"};
  part.f = {identity_null("A3", 2)};
  return part;
}

std::vector<InterventionQuery> binary_first_cause_grid() {
  return {{{{"A1", 0.0}}, "Y"}, {{{"A1", 1.0}}, "Y"}};
}

}  // namespace causelab::fixtures
