#include "causelab/proxy_id.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "causelab/linalg.hpp"

namespace causelab {

namespace {

void check_partition_names(const std::set<std::string>& causes, const CausePartition& part) {
  auto require_block = [&](const std::vector<std::string>& block, const char* label) {
    if (block.empty())
      raise(ErrorCode::DegeneratePartition, std::string(label) + " part must not be empty");
    for (const auto& name : block)
      if (!causes.count(name))
        raise(ErrorCode::DegeneratePartition, "'" + name + "' is not a cause");
  };
  require_block(part.intervened, "intervened");
  require_block(part.adjusted, "adjusted");
  require_block(part.null_causes, "null");
  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto* block : {&part.intervened, &part.adjusted, &part.null_causes}) {
    for (const auto& name : *block) {
      if (!seen.insert(name).second)
        raise(ErrorCode::DegeneratePartition, "'" + name + "' appears in two parts");
      ++total;
    }
  }
  if (total != causes.size())
    raise(ErrorCode::DegeneratePartition, "parts do not cover every cause");
  if (part.f.empty())
    raise(ErrorCode::DegeneratePartition, "partition carries no null-function component");
  const std::set<std::string> null_set(part.null_causes.begin(), part.null_causes.end());
  for (const auto& comp : part.f) {
    if (comp.domain.empty())
      raise(ErrorCode::DegeneratePartition, "null-function component with empty domain");
    for (const auto& name : comp.domain)
      if (!null_set.count(name))
        raise(ErrorCode::DegeneratePartition,
              "null-function domain reaches outside the null part ('" + name + "')");
  }
}

}  // namespace

void validate_partition(const ScmSpec& spec, const CausePartition& part) {
  const auto names = spec.names_with_role(NodeRole::Cause);
  check_partition_names({names.begin(), names.end()}, part);
}

CompletenessReport check_completeness_matrix(const Eigen::MatrixXd& rows_are_conditionals,
                                             int required_rank) {
  for (Eigen::Index r = 0; r < rows_are_conditionals.rows(); ++r) {
    if (rows_are_conditionals.row(r).minCoeff() < -1e-12)
      raise(ErrorCode::NotAStochasticMatrix, "row " + std::to_string(r) + " has a negative entry");
    if (std::abs(rows_are_conditionals.row(r).sum() - 1.0) > kStochasticRowTol)
      raise(ErrorCode::NotAStochasticMatrix,
            "row " + std::to_string(r) + " sums to " +
                std::to_string(rows_are_conditionals.row(r).sum()));
  }
  CompletenessReport rep;
  rep.required_rank = required_rank;
  rep.slices = 1;
  rep.matrix_rank = svd_rank(rows_are_conditionals, kRankRtol, &rep.min_singular_value);
  if (required_rank >= 1 && rows_are_conditionals.size() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(rows_are_conditionals);
    rep.min_singular_value = svd.singularValues().size() >= required_rank
                                 ? svd.singularValues()(required_rank - 1)
                                 : 0.0;
  }
  rep.verdict = rep.matrix_rank >= required_rank ? CompletenessReport::Verdict::Complete
                                                 : CompletenessReport::Verdict::Incomplete;
  return rep;
}

namespace {

struct TensorIndex {
  std::vector<int> idx;    // joint column per variable
  std::vector<int> cards;  // per variable
  std::size_t configs = 1;

  static TensorIndex over(const DiscreteDist& joint, const std::vector<std::string>& names) {
    TensorIndex t;
    for (const auto& name : names) {
      const int i = joint.require(name);
      t.idx.push_back(i);
      t.cards.push_back(joint.cards[static_cast<std::size_t>(i)]);
      t.configs *= static_cast<std::size_t>(joint.cards[static_cast<std::size_t>(i)]);
    }
    return t;
  }

  std::size_t config_of(const std::vector<int>& codes) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < idx.size(); ++i)
      c = c * static_cast<std::size_t>(cards[i]) +
          static_cast<std::size_t>(codes[static_cast<std::size_t>(idx[i])]);
    return c;
  }
};

// Level id per null-cause configuration under the stacked f. Exact values
// group exactly; if more than kMaxNullLevels distinct tuples appear, each
// component is quantile-binned so the level count stays within budget.
std::vector<int> f_levels_per_config(const DiscreteDist& joint, const CausePartition& part,
                                     const TensorIndex& null_t, int* count) {
  const auto d = part.f.size();
  std::vector<std::vector<double>> tuples(null_t.configs, std::vector<double>(d));
  std::vector<int> codes(null_t.cards.size());
  for (std::size_t cfg = 0; cfg < null_t.configs; ++cfg) {
    std::size_t rem = cfg;
    for (std::size_t i = null_t.cards.size(); i-- > 0;) {
      codes[i] = static_cast<int>(rem % static_cast<std::size_t>(null_t.cards[i]));
      rem /= static_cast<std::size_t>(null_t.cards[i]);
    }
    for (std::size_t c = 0; c < d; ++c) {
      const NullFunction& comp = part.f[c];
      Eigen::VectorXd arg(static_cast<Eigen::Index>(comp.domain.size()));
      for (std::size_t a = 0; a < comp.domain.size(); ++a) {
        const auto it = std::find(part.null_causes.begin(), part.null_causes.end(), comp.domain[a]);
        if (it == part.null_causes.end())
          raise(ErrorCode::DegeneratePartition,
                "null-function domain reaches outside the null part ('" + comp.domain[a] + "')");
        arg(static_cast<Eigen::Index>(a)) =
            codes[static_cast<std::size_t>(it - part.null_causes.begin())];
      }
      tuples[cfg][c] = comp.evaluate(arg);
    }
  }
  (void)joint;

  std::map<std::vector<double>, int> ids;
  for (const auto& t : tuples) ids.emplace(t, 0);
  if (ids.size() > static_cast<std::size_t>(kMaxNullLevels)) {
    // Quantile binning per component, coarse enough that the product of bin
    // counts stays within the level budget.
    int per = kMaxNullLevels;
    if (d > 1)
      per = std::max(2, static_cast<int>(std::floor(
                            std::pow(static_cast<double>(kMaxNullLevels), 1.0 / static_cast<double>(d)))));
    for (std::size_t c = 0; c < d; ++c) {
      std::vector<double> vals;
      vals.reserve(tuples.size());
      for (const auto& t : tuples) vals.push_back(t[c]);
      std::sort(vals.begin(), vals.end());
      for (auto& t : tuples) {
        const auto pos = static_cast<std::size_t>(
            std::lower_bound(vals.begin(), vals.end(), t[c]) - vals.begin());
        t[c] = static_cast<double>(std::min<std::size_t>(
            pos * static_cast<std::size_t>(per) / vals.size(), static_cast<std::size_t>(per - 1)));
      }
    }
    ids.clear();
    for (const auto& t : tuples) ids.emplace(t, 0);
  }
  int next = 0;
  for (auto& [tuple, id] : ids) id = next++;
  std::vector<int> out(null_t.configs);
  for (std::size_t cfg = 0; cfg < null_t.configs; ++cfg) out[cfg] = ids[tuples[cfg]];
  *count = next;
  return out;
}

}  // namespace

CompletenessReport check_completeness_discrete(const DiscreteDist& joint,
                                               const CausePartition& part,
                                               CompletenessDirection direction,
                                               const std::string& nuisance) {
  std::set<std::string> causes;
  for (const auto* block : {&part.intervened, &part.adjusted, &part.null_causes})
    causes.insert(block->begin(), block->end());
  check_partition_names(causes, part);

  const TensorIndex c_t = TensorIndex::over(joint, part.intervened);
  const TensorIndex x_t = TensorIndex::over(joint, part.adjusted);
  const TensorIndex n_t = TensorIndex::over(joint, part.null_causes);
  int nf = 0;
  const std::vector<int> level = f_levels_per_config(joint, part, n_t, &nf);

  const bool u_dir = direction == CompletenessDirection::ConfounderGivenNull;
  int nu = 0;
  int u_idx = -1;
  if (u_dir) {
    if (nuisance.empty())
      raise(ErrorCode::InvalidQuery, "the confounder direction needs a nuisance column name");
    u_idx = joint.require(nuisance);
    nu = joint.cards[static_cast<std::size_t>(u_idx)];
  }

  // Accumulate mass per (a_C slice, row, column): rows are f levels against
  // the confounder, or a_X configurations against f levels.
  const std::size_t n_rows = u_dir ? static_cast<std::size_t>(nf) : x_t.configs;
  const std::size_t n_cols = u_dir ? static_cast<std::size_t>(nu) : static_cast<std::size_t>(nf);
  std::vector<double> mass(c_t.configs * n_rows * n_cols, 0.0);
  std::vector<int> codes;
  for (std::size_t cell = 0; cell < joint.size(); ++cell) {
    const double p = joint.p(static_cast<Eigen::Index>(cell));
    if (p == 0.0) continue;
    joint.codes_of(cell, codes);
    const std::size_t slice = c_t.config_of(codes);
    const auto fl = static_cast<std::size_t>(level[n_t.config_of(codes)]);
    const std::size_t row = u_dir ? fl : x_t.config_of(codes);
    const std::size_t col =
        u_dir ? static_cast<std::size_t>(codes[static_cast<std::size_t>(u_idx)]) : fl;
    mass[(slice * n_rows + row) * n_cols + col] += p;
  }

  CompletenessReport worst;
  worst.required_rank = u_dir ? nu : nf;
  worst.verdict = CompletenessReport::Verdict::Complete;
  worst.min_singular_value = std::numeric_limits<double>::infinity();
  int slices = 0;
  for (std::size_t s = 0; s < c_t.configs; ++s) {
    std::vector<std::size_t> live;
    for (std::size_t r = 0; r < n_rows; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < n_cols; ++c) sum += mass[(s * n_rows + r) * n_cols + c];
      if (sum > 0.0) live.push_back(r);
    }
    if (live.empty()) continue;
    ++slices;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(live.size()), static_cast<Eigen::Index>(n_cols));
    for (std::size_t r = 0; r < live.size(); ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < n_cols; ++c) sum += mass[(s * n_rows + live[r]) * n_cols + c];
      for (std::size_t c = 0; c < n_cols; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            mass[(s * n_rows + live[r]) * n_cols + c] / sum;
    }
    CompletenessReport rep = check_completeness_matrix(m, worst.required_rank);
    if (!rep.complete()) worst.verdict = CompletenessReport::Verdict::Incomplete;
    if (rep.min_singular_value < worst.min_singular_value) {
      worst.min_singular_value = rep.min_singular_value;
      worst.matrix_rank = rep.matrix_rank;
    }
  }
  worst.slices = slices;
  if (slices == 0) {
    worst.verdict = CompletenessReport::Verdict::Incomplete;
    worst.min_singular_value = 0.0;
  }
  return worst;
}

KernelSolution solve_integral_equation_discrete(const DiscreteDist& joint,
                                                const CausePartition& part,
                                                const SolveOptions& options) {
  std::set<std::string> causes;
  for (const auto* block : {&part.intervened, &part.adjusted, &part.null_causes})
    causes.insert(block->begin(), block->end());
  check_partition_names(causes, part);

  const DiscreteDist j0 = options.condition_on_selection
                              ? condition(joint, {{options.selection_label, 1}})
                              : joint;
  const int y_idx = j0.require(options.outcome_label);
  const int ny = j0.cards[static_cast<std::size_t>(y_idx)];
  const TensorIndex c_t = TensorIndex::over(j0, part.intervened);
  const TensorIndex x_t = TensorIndex::over(j0, part.adjusted);
  const TensorIndex n_t = TensorIndex::over(j0, part.null_causes);
  int u_idx = -1, nu = 1;
  if (options.u_sng) {
    u_idx = j0.require(*options.u_sng);
    nu = j0.cards[static_cast<std::size_t>(u_idx)];
  }

  KernelSolution sol;
  const std::vector<int> level = f_levels_per_config(j0, part, n_t, &sol.f_levels);
  const auto nf = static_cast<std::size_t>(sol.f_levels);
  const std::size_t n_slices = c_t.configs * static_cast<std::size_t>(nu);
  const std::size_t nx = x_t.configs;

  std::vector<double> fx(n_slices * nf * nx, 0.0);
  std::vector<double> fy(n_slices * nf * static_cast<std::size_t>(ny), 0.0);
  std::vector<double> fmass(n_slices * nf, 0.0);
  std::vector<int> codes;
  for (std::size_t cell = 0; cell < j0.size(); ++cell) {
    const double p = j0.p(static_cast<Eigen::Index>(cell));
    if (p == 0.0) continue;
    j0.codes_of(cell, codes);
    std::size_t slice = c_t.config_of(codes);
    if (u_idx >= 0)
      slice = slice * static_cast<std::size_t>(nu) +
              static_cast<std::size_t>(codes[static_cast<std::size_t>(u_idx)]);
    const auto fl = static_cast<std::size_t>(level[n_t.config_of(codes)]);
    const auto yv = static_cast<std::size_t>(codes[static_cast<std::size_t>(y_idx)]);
    fx[(slice * nf + fl) * nx + x_t.config_of(codes)] += p;
    fy[(slice * nf + fl) * static_cast<std::size_t>(ny) + yv] += p;
    fmass[slice * nf + fl] += p;
  }

  // Output tensor layout: [y, intervened..., adjusted..., u_sng?].
  std::vector<std::string> labels{options.outcome_label};
  std::vector<int> cards{ny};
  for (std::size_t i = 0; i < part.intervened.size(); ++i) {
    labels.push_back(part.intervened[i]);
    cards.push_back(c_t.cards[i]);
  }
  for (std::size_t i = 0; i < part.adjusted.size(); ++i) {
    labels.push_back(part.adjusted[i]);
    cards.push_back(x_t.cards[i]);
  }
  if (options.u_sng) {
    labels.push_back(*options.u_sng);
    cards.push_back(nu);
  }
  sol.h = make_discrete(labels, cards);

  double worst = 0.0;
  std::vector<int> hcodes(labels.size());
  for (std::size_t slice = 0; slice < n_slices; ++slice) {
    std::vector<std::size_t> live;
    for (std::size_t fl = 0; fl < nf; ++fl)
      if (fmass[slice * nf + fl] > 0.0) live.push_back(fl);
    if (live.empty()) continue;  // slice never observed; kernel stays 0 there

    Eigen::MatrixXd m(static_cast<Eigen::Index>(live.size()), static_cast<Eigen::Index>(nx));
    Eigen::MatrixXd b(static_cast<Eigen::Index>(live.size()), ny);
    for (std::size_t r = 0; r < live.size(); ++r) {
      const double total = fmass[slice * nf + live[r]];
      for (std::size_t x = 0; x < nx; ++x)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(x)) =
            fx[(slice * nf + live[r]) * nx + x] / total;
      for (int y = 0; y < ny; ++y)
        b(static_cast<Eigen::Index>(r), y) =
            fy[(slice * nf + live[r]) * static_cast<std::size_t>(ny) +
               static_cast<std::size_t>(y)] /
            total;
    }
    const Eigen::MatrixXd h = pinv_solve(m, b);  // nx x ny
    worst = std::max(worst, (m * h - b).cwiseAbs().maxCoeff());

    // Scatter into the tensor: decode slice into intervened codes (+ u code).
    std::size_t rem = slice;
    int u_code = 0;
    if (u_idx >= 0) {
      u_code = static_cast<int>(rem % static_cast<std::size_t>(nu));
      rem /= static_cast<std::size_t>(nu);
    }
    for (std::size_t i = part.intervened.size(); i-- > 0;) {
      hcodes[1 + i] = static_cast<int>(rem % static_cast<std::size_t>(c_t.cards[i]));
      rem /= static_cast<std::size_t>(c_t.cards[i]);
    }
    if (options.u_sng) hcodes.back() = u_code;
    for (std::size_t x = 0; x < nx; ++x) {
      std::size_t xr = x;
      for (std::size_t i = part.adjusted.size(); i-- > 0;) {
        hcodes[1 + part.intervened.size() + i] =
            static_cast<int>(xr % static_cast<std::size_t>(x_t.cards[i]));
        xr /= static_cast<std::size_t>(x_t.cards[i]);
      }
      for (int y = 0; y < ny; ++y) {
        hcodes[0] = y;
        sol.h.p(static_cast<Eigen::Index>(sol.h.flat_index(hcodes))) =
            h(static_cast<Eigen::Index>(x), y);
      }
    }
  }
  sol.residual = worst;
  sol.status = worst <= kKernelResidTol ? KernelStatus::Solved : KernelStatus::NoSolution;
  return sol;
}

DiscreteDist identify_do_discrete(const KernelSolution& h, const DiscreteDist& marginals,
                                  const CausePartition& part, const InterventionQuery& q,
                                  double* mass_deviation) {
  if (h.gaussian)
    raise(ErrorCode::NotTabularDiscrete, "identify_do_discrete needs a tabular kernel");
  if (h.status != KernelStatus::Solved)
    raise(ErrorCode::UnsolvedKernel,
          "kernel residual " + std::to_string(h.residual) + " exceeds tolerance");

  const std::size_t nc = part.intervened.size();
  const std::size_t nxv = part.adjusted.size();
  const bool has_u = h.h.labels.size() == 1 + nc + nxv + 1;
  if (h.h.labels.size() != 1 + nc + nxv + (has_u ? 1 : 0))
    raise(ErrorCode::InvalidQuery, "kernel shape does not match the partition");

  std::vector<int> hcodes(h.h.labels.size(), 0);
  std::set<std::string> pinned;
  for (const auto& [name, value] : q.set_to) {
    const auto it = std::find(part.intervened.begin(), part.intervened.end(), name);
    if (it == part.intervened.end())
      raise(ErrorCode::InvalidQuery, "'" + name + "' is not in the intervened part");
    const auto i = static_cast<std::size_t>(it - part.intervened.begin());
    const int card = h.h.cards[1 + i];
    if (value != std::floor(value) || value < 0.0 || value >= card)
      raise(ErrorCode::InvalidQuery, "value for '" + name + "' is not a code in its support");
    hcodes[1 + i] = static_cast<int>(value);
    pinned.insert(name);
  }
  if (pinned.size() != nc)
    raise(ErrorCode::InvalidQuery, "query must pin every intervened cause exactly once");

  const DiscreteDist px = marginal(marginals, part.adjusted);
  DiscreteDist pu;
  if (has_u) pu = marginal(marginals, {h.h.labels.back()});

  const int ny = h.h.cards[0];
  DiscreteDist out = make_discrete({h.h.labels[0]}, {ny});
  std::vector<int> xcodes;
  for (std::size_t x = 0; x < px.size(); ++x) {
    px.codes_of(x, xcodes);
    for (std::size_t i = 0; i < nxv; ++i) hcodes[1 + nc + i] = xcodes[i];
    const auto nu = static_cast<std::size_t>(has_u ? pu.p.size() : 1);
    for (std::size_t u = 0; u < nu; ++u) {
      if (has_u) hcodes.back() = static_cast<int>(u);
      const double w = px.p(static_cast<Eigen::Index>(x)) *
                       (has_u ? pu.p(static_cast<Eigen::Index>(u)) : 1.0);
      for (int y = 0; y < ny; ++y) {
        hcodes[0] = y;
        out.p(y) += w * h.h.p(static_cast<Eigen::Index>(h.h.flat_index(hcodes)));
      }
    }
  }

  const double mass = out.p.sum();
  const double dev = std::abs(mass - 1.0);
  if (mass_deviation) *mass_deviation = dev;
  if (dev > kPmfSumTol) {
    if (mass <= 0.0) raise(ErrorCode::InvalidQuery, "identified pmf has no mass");
    out.p /= mass;
  }
  return out;
}

LinearGaussianSummary summarize_spec(const ScmSpec& spec) {
  LinearGaussianSummary s;
  s.causes = spec.names_with_role(NodeRole::Cause);
  s.outcome = spec.nodes[static_cast<std::size_t>(spec.outcome_index())].name;
  std::vector<std::string> keep{s.outcome};
  keep.insert(keep.end(), s.causes.begin(), s.causes.end());
  s.joint = marginal(joint_gaussian(spec), keep);
  return s;
}

LinearGaussianSummary summarize_data(const Dataset& data) {
  LinearGaussianSummary s;
  s.causes = data.names_with_role(NodeRole::Cause);
  const auto y_cols = data.cols_with_role(NodeRole::Outcome);
  if (y_cols.size() != 1) raise(ErrorCode::InvalidSpec, "dataset needs exactly one outcome column");
  s.outcome = data.columns[static_cast<std::size_t>(y_cols[0])].name;

  std::vector<std::string> keep{s.outcome};
  keep.insert(keep.end(), s.causes.begin(), s.causes.end());
  const Eigen::MatrixXd all = data.matrix_for(keep);
  std::vector<Eigen::Index> rows;
  for (std::size_t r = 0; r < data.rows(); ++r)
    if (data.selected[r] && !std::isnan(all(static_cast<Eigen::Index>(r), 0)))
      rows.push_back(static_cast<Eigen::Index>(r));
  if (rows.size() < 2) raise(ErrorCode::EmptySample, "need at least two rows with an outcome");

  Eigen::MatrixXd used(static_cast<Eigen::Index>(rows.size()), all.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    used.row(static_cast<Eigen::Index>(i)) = all.row(rows[i]);
  s.joint.labels = keep;
  s.joint.mean = used.colwise().mean();
  const Eigen::MatrixXd centered = used.rowwise() - s.joint.mean.transpose();
  s.joint.cov = centered.transpose() * centered / static_cast<double>(rows.size());
  return s;
}

KernelSolution solve_gaussian_kernel(const LinearGaussianSummary& summary,
                                     const CausePartition& part) {
  check_partition_names({summary.causes.begin(), summary.causes.end()}, part);
  for (const auto& comp : part.f)
    if (comp.kind != NullFunction::Kind::Linear)
      raise(ErrorCode::InvalidQuery, "the gaussian solver needs linear null-function components");

  const GaussianDist& g = summary.joint;
  const auto d = static_cast<Eigen::Index>(part.f.size());
  const auto ncv = static_cast<Eigen::Index>(part.intervened.size());
  const auto nxv = static_cast<Eigen::Index>(part.adjusted.size());

  // Rows of the lift [A_C..., F...] as affine functionals of the joint's
  // coordinates (outcome first, then causes).
  Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(ncv + d, g.dim());
  Eigen::VectorXd lift_off = Eigen::VectorXd::Zero(ncv + d);
  for (Eigen::Index i = 0; i < ncv; ++i)
    lift(i, g.require(part.intervened[static_cast<std::size_t>(i)])) = 1.0;
  for (Eigen::Index c = 0; c < d; ++c) {
    const NullFunction& comp = part.f[static_cast<std::size_t>(c)];
    lift_off(ncv + c) = comp.offset;
    for (std::size_t a = 0; a < comp.domain.size(); ++a)
      lift(ncv + c, g.require(comp.domain[a])) = comp.weights(static_cast<Eigen::Index>(a));
  }

  std::vector<int> x_idx;
  for (const auto& name : part.adjusted) x_idx.push_back(g.require(name));
  const int y_idx = g.require(summary.outcome);

  const Eigen::VectorXd mu_cf = lift * g.mean + lift_off;
  const Eigen::MatrixXd s_cfcf = lift * g.cov * lift.transpose();
  const Eigen::VectorXd s_cf_y = lift * g.cov.col(y_idx);
  Eigen::MatrixXd s_cf_x(ncv + d, nxv);
  Eigen::VectorXd mu_x(nxv);
  Eigen::MatrixXd s_xx(nxv, nxv);
  for (Eigen::Index j = 0; j < nxv; ++j) {
    s_cf_x.col(j) = lift * g.cov.col(x_idx[static_cast<std::size_t>(j)]);
    mu_x(j) = g.mean(x_idx[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < nxv; ++i)
      s_xx(i, j) = g.cov(x_idx[static_cast<std::size_t>(i)], x_idx[static_cast<std::size_t>(j)]);
  }

  const Eigen::VectorXd beta = pinv_solve(s_cfcf, s_cf_y);
  const Eigen::MatrixXd gamma = pinv_solve(s_cfcf, s_cf_x);
  const Eigen::VectorXd beta_f = beta.tail(d);
  const Eigen::MatrixXd gamma_f = gamma.bottomRows(d);

  double min_sv = 0.0;
  if (svd_rank(gamma_f, kRankRtol, &min_sv) < d)
    raise(ErrorCode::RankDeficientCrossCovariance,
          "Cov(f(A_N), A_X) has rank below " + std::to_string(d) +
              "; the adjusted causes carry no usable confounder signal");

  KernelSolution sol;
  sol.gaussian = true;
  sol.f_levels = static_cast<int>(d);
  sol.c_names = part.intervened;
  sol.x_names = part.adjusted;
  sol.outcome_name = summary.outcome;
  sol.g_x = pinv_solve(gamma_f, beta_f);
  sol.g_c = beta.head(ncv) - gamma.topRows(ncv) * sol.g_x;
  const double b0 = g.mean(y_idx) - beta.dot(mu_cf);
  const Eigen::VectorXd gamma0 = mu_x - gamma.transpose() * mu_cf;
  sol.g0 = b0 - sol.g_x.dot(gamma0);
  sol.g_var = std::max(0.0, g.cov(y_idx, y_idx) - beta.dot(s_cf_y));
  sol.residual = (gamma_f * sol.g_x - beta_f).cwiseAbs().maxCoeff();
  sol.status =
      sol.residual <= kKernelResidTol ? KernelStatus::Solved : KernelStatus::NoSolution;
  return sol;
}

GaussianDist solve_identify_gaussian(const LinearGaussianSummary& summary,
                                     const CausePartition& part, const InterventionQuery& q) {
  const KernelSolution sol = solve_gaussian_kernel(summary, part);
  if (sol.status != KernelStatus::Solved)
    raise(ErrorCode::UnsolvedKernel,
          "kernel residual " + std::to_string(sol.residual) + " exceeds tolerance");

  Eigen::VectorXd a_c(static_cast<Eigen::Index>(part.intervened.size()));
  std::set<std::string> pinned;
  for (const auto& [name, value] : q.set_to) {
    const auto it = std::find(part.intervened.begin(), part.intervened.end(), name);
    if (it == part.intervened.end())
      raise(ErrorCode::InvalidQuery, "'" + name + "' is not in the intervened part");
    a_c(static_cast<Eigen::Index>(it - part.intervened.begin())) = value;
    pinned.insert(name);
  }
  if (pinned.size() != part.intervened.size())
    raise(ErrorCode::InvalidQuery, "query must pin every intervened cause exactly once");

  const GaussianDist& g = summary.joint;
  const auto nxv = static_cast<Eigen::Index>(part.adjusted.size());
  Eigen::VectorXd mu_x(nxv);
  Eigen::MatrixXd s_xx(nxv, nxv);
  for (Eigen::Index j = 0; j < nxv; ++j) {
    const int xj = g.require(part.adjusted[static_cast<std::size_t>(j)]);
    mu_x(j) = g.mean(xj);
    for (Eigen::Index i = 0; i < nxv; ++i)
      s_xx(i, j) = g.cov(g.require(part.adjusted[static_cast<std::size_t>(i)]), xj);
  }

  GaussianDist out;
  out.labels = {summary.outcome};
  out.mean = Eigen::VectorXd::Constant(1, sol.g0 + sol.g_c.dot(a_c) + sol.g_x.dot(mu_x));
  out.cov = Eigen::MatrixXd::Constant(1, 1, sol.g_var + sol.g_x.dot(s_xx * sol.g_x));
  return out;
}

}  // namespace causelab
