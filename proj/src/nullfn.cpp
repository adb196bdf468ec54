#include "causelab/nullfn.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "causelab/linalg.hpp"

namespace causelab {

double NullFunction::evaluate(const Eigen::VectorXd& a) const {
  if (a.size() != static_cast<Eigen::Index>(domain.size()))
    raise(ErrorCode::InvalidQuery, "argument length does not match the function domain");
  switch (kind) {
    case Kind::Linear:
      return offset + weights.dot(a);
    case Kind::Ratio: {
      double v = offset;
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (!(a(i) > 0.0)) raise(ErrorCode::InvalidQuery, "ratio form needs positive arguments");
        v += weights(i) * std::log(a(i));
      }
      return v;
    }
    case Kind::Xor:
      return static_cast<double>(static_cast<int>(a(0)) ^ static_cast<int>(a(1)));
    case Kind::Table: {
      std::size_t flat = 0;
      for (std::size_t i = 0; i < cards.size(); ++i) {
        const auto code = static_cast<int>(a(static_cast<Eigen::Index>(i)));
        if (code < 0 || code >= cards[i])
          raise(ErrorCode::InvalidQuery, "code outside the table support");
        flat = flat * static_cast<std::size_t>(cards[i]) + static_cast<std::size_t>(code);
      }
      return table[flat];
    }
  }
  return 0.0;
}

NullFunction identity_null(const std::string& name, int support) {
  if (support < 2) raise(ErrorCode::InvalidSpec, "identity null needs support >= 2");
  NullFunction f;
  f.kind = NullFunction::Kind::Table;
  f.domain = {name};
  f.cards = {support};
  f.table.resize(static_cast<std::size_t>(support));
  for (int c = 0; c < support; ++c) f.table[static_cast<std::size_t>(c)] = c;
  f.description = "identity on " + name;
  return f;
}

NullFunction construct_linear_null(const OutcomeModel& outcome, const Eigen::MatrixXd& cause_cov,
                                   const std::string& cause_i, const std::string& cause_j) {
  const auto m = static_cast<Eigen::Index>(outcome.cause_names.size());
  if (cause_cov.rows() != m || cause_cov.cols() != m)
    raise(ErrorCode::InvalidSpec, "cause covariance does not match the outcome head");
  auto index = [&](const std::string& name) {
    const auto it = std::find(outcome.cause_names.begin(), outcome.cause_names.end(), name);
    if (it == outcome.cause_names.end())
      raise(ErrorCode::UnknownNode, "no cause named '" + name + "'");
    return static_cast<Eigen::Index>(it - outcome.cause_names.begin());
  };
  const Eigen::Index i = index(cause_i), j = index(cause_j);
  if (i == j) raise(ErrorCode::InvalidQuery, "the pair must name two distinct causes");
  const double bi = outcome.cause_coef(i), bj = outcome.cause_coef(j);
  const double vii = cause_cov(i, i), vjj = cause_cov(j, j), cij = cause_cov(i, j);
  const double denom = bi * cij + bj * vjj;
  if (std::abs(denom) <= kNullDenomTol)
    raise(ErrorCode::DegenerateDirection,
          "outcome head loads only on the direction a pair function over (" + cause_i + ", " +
              cause_j + ") could use");
  NullFunction f;
  f.kind = NullFunction::Kind::Linear;
  f.domain = {cause_i, cause_j};
  f.weights = Eigen::Vector2d(1.0, -(bi * vii + bj * cij) / denom);
  f.description = cause_i + " + (" + std::to_string(f.weights(1)) + ") * " + cause_j;
  return f;
}

NullFunction construct_xor_null(const ScmSpec& spec, const std::string& cause_i,
                                const std::string& cause_j) {
  for (const std::string* name : {&cause_i, &cause_j}) {
    const Node& nd = spec.nodes[static_cast<std::size_t>(spec.require(*name))];
    if (spec.mechanism != Mechanism::TabularDiscrete || nd.support != 2)
      raise(ErrorCode::NotBinary, "'" + *name + "' is not a binary variable");
  }
  if (cause_i == cause_j) raise(ErrorCode::InvalidQuery, "the pair must name two distinct causes");
  NullFunction f;
  f.kind = NullFunction::Kind::Xor;
  f.domain = {cause_i, cause_j};
  f.cards = {2, 2};
  f.description = cause_i + " XOR " + cause_j;
  return f;
}

CITestReport test_null(const NullFunction& f, const Dataset& data,
                       const std::vector<std::string>& given, bool condition_on_selection) {
  const auto y_cols = data.cols_with_role(NodeRole::Outcome);
  if (y_cols.size() != 1) raise(ErrorCode::InvalidSpec, "dataset needs exactly one outcome column");

  std::vector<Eigen::Index> rows;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (condition_on_selection && !data.selected[r]) continue;
    if (std::isnan(data.values(static_cast<Eigen::Index>(r), y_cols[0]))) continue;
    rows.push_back(static_cast<Eigen::Index>(r));
  }
  CITestReport rep;
  rep.mode = "fisher_z";
  rep.threshold = kFisherZThreshold;
  rep.n_effective = rows.size();
  if (rows.size() < kMinCiRows)
    raise(ErrorCode::InsufficientData,
          std::to_string(rows.size()) + " effective rows, need " + std::to_string(kMinCiRows));

  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::MatrixXd dom_full = data.matrix_for(f.domain);
  const Eigen::MatrixXd giv_full = data.matrix_for(given);
  Eigen::VectorXd y(n), fv(n);
  Eigen::MatrixXd cond(n, 1 + giv_full.cols());
  cond.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = data.values(rows[static_cast<std::size_t>(i)], y_cols[0]);
    fv(i) = f.evaluate(dom_full.row(rows[static_cast<std::size_t>(i)]).transpose());
    cond.row(i).tail(giv_full.cols()) = giv_full.row(rows[static_cast<std::size_t>(i)]);
  }

  Eigen::MatrixXd yf(n, 2);
  yf.col(0) = y;
  yf.col(1) = fv;
  const Eigen::MatrixXd resid = yf - cond * pinv_solve(cond, yf);
  const double denom = resid.col(0).norm() * resid.col(1).norm();
  const double r = denom > 0.0 ? resid.col(0).dot(resid.col(1)) / denom : 0.0;
  const double clamped = std::clamp(r, -1.0 + 1e-15, 1.0 - 1e-15);
  const double dof = static_cast<double>(n) - static_cast<double>(given.size()) - 3.0;
  rep.statistic = std::abs(std::atanh(clamped)) * std::sqrt(std::max(dof, 1.0));
  rep.pass = rep.statistic < rep.threshold;
  return rep;
}

CITestReport test_null(const NullFunction& f, const DiscreteDist& joint,
                       const std::string& outcome, const std::vector<std::string>& given) {
  CITestReport rep;
  rep.mode = "exact";
  rep.threshold = kExactCiTol;

  std::vector<int> dom_idx;
  for (const auto& name : f.domain) dom_idx.push_back(joint.require(name));
  const int y_idx = joint.require(outcome);
  std::vector<int> giv_idx;
  std::size_t n_strata = 1;
  for (const auto& name : given) {
    giv_idx.push_back(joint.require(name));
    n_strata *= static_cast<std::size_t>(joint.cards[static_cast<std::size_t>(giv_idx.back())]);
  }
  const auto n_y = static_cast<std::size_t>(joint.cards[static_cast<std::size_t>(y_idx)]);

  // Map f outputs to dense level ids (values compared exactly; discrete
  // evaluations are integer-valued by construction).
  std::map<double, int> levels;
  std::vector<int> codes;
  Eigen::VectorXd arg(static_cast<Eigen::Index>(dom_idx.size()));
  std::vector<double> cell_f(joint.size());
  for (std::size_t cell = 0; cell < joint.size(); ++cell) {
    joint.codes_of(cell, codes);
    for (std::size_t i = 0; i < dom_idx.size(); ++i)
      arg(static_cast<Eigen::Index>(i)) = codes[static_cast<std::size_t>(dom_idx[i])];
    const double v = f.evaluate(arg);
    levels.emplace(v, 0);
    cell_f[cell] = v;
  }
  int next = 0;
  for (auto& [value, id] : levels) id = next++;
  const auto n_f = static_cast<std::size_t>(levels.size());

  std::vector<double> pyf(n_strata * n_y * n_f, 0.0);
  std::vector<double> ps(n_strata, 0.0);
  for (std::size_t cell = 0; cell < joint.size(); ++cell) {
    joint.codes_of(cell, codes);
    std::size_t stratum = 0;
    for (const int gi : giv_idx)
      stratum = stratum * static_cast<std::size_t>(joint.cards[static_cast<std::size_t>(gi)]) +
                static_cast<std::size_t>(codes[static_cast<std::size_t>(gi)]);
    const auto yv = static_cast<std::size_t>(codes[static_cast<std::size_t>(y_idx)]);
    const auto fl = static_cast<std::size_t>(levels[cell_f[cell]]);
    const double mass = joint.p(static_cast<Eigen::Index>(cell));
    pyf[(stratum * n_y + yv) * n_f + fl] += mass;
    ps[stratum] += mass;
  }

  double worst = 0.0;
  for (std::size_t s = 0; s < n_strata; ++s) {
    if (ps[s] <= 0.0) continue;
    std::vector<double> py(n_y, 0.0), pf(n_f, 0.0);
    for (std::size_t yv = 0; yv < n_y; ++yv)
      for (std::size_t fl = 0; fl < n_f; ++fl) {
        const double v = pyf[(s * n_y + yv) * n_f + fl] / ps[s];
        py[yv] += v;
        pf[fl] += v;
      }
    for (std::size_t yv = 0; yv < n_y; ++yv)
      for (std::size_t fl = 0; fl < n_f; ++fl)
        worst = std::max(worst,
                         std::abs(pyf[(s * n_y + yv) * n_f + fl] / ps[s] - py[yv] * pf[fl]));
  }
  rep.statistic = worst;
  rep.pass = worst <= rep.threshold;
  rep.n_effective = joint.size();
  return rep;
}

}  // namespace causelab
