#include "causelab/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "causelab/rng.hpp"

namespace causelab {

void validate_query(const ScmSpec& spec, const InterventionQuery& q) {
  if (q.set_to.empty()) raise(ErrorCode::InvalidQuery, "query pins no causes");
  std::set<std::string> seen;
  for (const auto& [name, value] : q.set_to) {
    const Node& nd = spec.nodes[static_cast<std::size_t>(spec.require(name))];
    if (nd.role != NodeRole::Cause)
      raise(ErrorCode::InvalidQuery, "'" + name + "' is not a cause");
    if (!seen.insert(name).second) raise(ErrorCode::InvalidQuery, "'" + name + "' pinned twice");
    if (spec.mechanism == Mechanism::TabularDiscrete &&
        (value != std::floor(value) || value < 0.0 || value >= static_cast<double>(nd.support)))
      raise(ErrorCode::InvalidQuery, "value for '" + name + "' is not a code in its support");
    if (!std::isfinite(value)) raise(ErrorCode::InvalidQuery, "value for '" + name + "' is not finite");
  }
  if (q.set_to.size() >= spec.cause_count())
    raise(ErrorCode::InvalidQuery, "at least one cause must stay free");
  if (!q.response.empty() &&
      spec.require(q.response) != spec.outcome_index())
    raise(ErrorCode::InvalidQuery, "response must be the outcome node");
}

std::uint64_t query_hash(const InterventionQuery& q) {
  auto sorted = q.set_to;
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [name, value] : sorted) {
    h = hash_bytes(name, h);
    h = hash_combine(h, std::bit_cast<std::uint64_t>(value));
  }
  return h;
}

GaussianDist do_joint_gaussian(const ScmSpec& spec, const InterventionQuery& q) {
  if (spec.mechanism != Mechanism::LinearGaussian)
    raise(ErrorCode::NotLinearGaussian, "do_gaussian needs a linear-Gaussian spec");
  require_valid(spec);
  validate_query(spec, q);

  std::vector<int> keep;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i)
    if (spec.nodes[i].role != NodeRole::Selection) keep.push_back(static_cast<int>(i));
  std::vector<int> pos(spec.nodes.size(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i)
    pos[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);

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
    if (a < 0 || b < 0) continue;
    coeff(b, a) = e.coeff;
  }
  // Mutilation: a pinned node keeps no parents and no noise, just its value.
  for (const auto& [name, value] : q.set_to) {
    const int i = pos[static_cast<std::size_t>(spec.require(name))];
    coeff.row(i).setZero();
    intercept(i) = value;
    noise_var(i) = 0.0;
  }

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

DiscreteDist do_joint_discrete(const ScmSpec& spec, const InterventionQuery& q) {
  if (spec.mechanism != Mechanism::TabularDiscrete)
    raise(ErrorCode::NotTabularDiscrete, "do_discrete needs a tabular-discrete spec");
  require_valid(spec);
  validate_query(spec, q);

  std::vector<std::string> labels;
  std::vector<int> cards;
  std::vector<int> keep;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    if (spec.nodes[i].role == NodeRole::Selection) continue;
    keep.push_back(static_cast<int>(i));
    labels.push_back(spec.nodes[i].name);
    cards.push_back(spec.nodes[i].support);
  }
  std::vector<int> pos(spec.nodes.size(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i)
    pos[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);

  std::vector<int> pin(keep.size(), -1);
  for (const auto& [name, value] : q.set_to)
    pin[static_cast<std::size_t>(pos[static_cast<std::size_t>(spec.require(name))])] =
        static_cast<int>(value);

  DiscreteDist out = make_discrete(labels, cards);
  std::vector<std::vector<int>> pa(spec.nodes.size());
  for (const int i : keep) pa[static_cast<std::size_t>(i)] = parents_of(spec, i);

  // Truncated factorization: factors of pinned nodes drop out, and mass sits
  // only on cells agreeing with the pinned codes.
  std::vector<int> codes;
  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    out.codes_of(cell, codes);
    double p = 1.0;
    for (std::size_t j = 0; j < keep.size() && p > 0.0; ++j) {
      if (pin[j] >= 0) {
        if (codes[j] != pin[j]) p = 0.0;
        continue;
      }
      const Node& nd = spec.nodes[static_cast<std::size_t>(keep[j])];
      std::size_t row = 0;
      for (const int par : pa[static_cast<std::size_t>(keep[j])]) {
        const int pj = pos[static_cast<std::size_t>(par)];
        row = row * static_cast<std::size_t>(out.cards[static_cast<std::size_t>(pj)]) +
              static_cast<std::size_t>(codes[static_cast<std::size_t>(pj)]);
      }
      p *= nd.cpt[row * static_cast<std::size_t>(nd.support) + static_cast<std::size_t>(codes[j])];
    }
    out.p(static_cast<Eigen::Index>(cell)) = p;
  }
  return out;
}

GaussianDist do_gaussian(const ScmSpec& spec, const InterventionQuery& q) {
  const std::string y = spec.nodes[static_cast<std::size_t>(spec.outcome_index())].name;
  return marginal(do_joint_gaussian(spec, q), {y});
}

DiscreteDist do_discrete(const ScmSpec& spec, const InterventionQuery& q) {
  const std::string y = spec.nodes[static_cast<std::size_t>(spec.outcome_index())].name;
  return marginal(do_joint_discrete(spec, q), {y});
}

double do_mean(const ScmSpec& spec, const InterventionQuery& q) {
  if (spec.mechanism == Mechanism::LinearGaussian) return do_gaussian(spec, q).mean(0);
  const DiscreteDist m = do_discrete(spec, q);
  double mean = 0.0;
  for (Eigen::Index c = 0; c < m.p.size(); ++c) mean += static_cast<double>(c) * m.p(c);
  return mean;
}

SampleSummary summarize(const Eigen::VectorXd& x) {
  const auto n = static_cast<std::size_t>(x.size());
  if (n == 0) raise(ErrorCode::EmptySample, "nothing to summarize");
  SampleSummary s;
  s.n = n;
  s.mean = x.mean();
  if (n > 1) {
    s.sd = std::sqrt((x.array() - s.mean).square().sum() / static_cast<double>(n - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(n));
  }

  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double h = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
  };
  const double lo = sorted.front(), hi = sorted.back();
  const double iqr = quantile(0.75) - quantile(0.25);
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  Eigen::Index bins = 1;
  if (width > 0.0 && hi > lo)
    bins = std::clamp<Eigen::Index>(
        static_cast<Eigen::Index>(std::ceil((hi - lo) / width)), 1, 512);
  const double left = hi > lo ? lo : lo - 0.5;
  const double right = hi > lo ? hi : hi + 0.5;
  s.bin_edges.resize(bins + 1);
  for (Eigen::Index b = 0; b <= bins; ++b)
    s.bin_edges(b) = left + (right - left) * static_cast<double>(b) / static_cast<double>(bins);
  s.bin_mass = Eigen::VectorXd::Zero(bins);
  for (const double v : sorted) {
    auto b = static_cast<Eigen::Index>((v - left) / (right - left) * static_cast<double>(bins));
    b = std::clamp<Eigen::Index>(b, 0, bins - 1);
    s.bin_mass(b) += 1.0 / static_cast<double>(n);
  }
  return s;
}

SampleSummary do_monte_carlo(const ScmSpec& spec, const InterventionQuery& q, std::size_t n,
                             std::uint64_t seed) {
  require_valid(spec);
  validate_query(spec, q);
  if (n == 0) raise(ErrorCode::EmptySample, "monte carlo needs n > 0");
  const std::uint64_t stream = hash_combine(seed, query_hash(q));
  const Dataset data = sample_do(spec, n, stream, q.set_to, SampleView::Full);
  const std::string y = spec.nodes[static_cast<std::size_t>(spec.outcome_index())].name;
  SampleSummary s = summarize(data.values.col(data.require_col(y)));
  s.stream = stream;
  return s;
}

}  // namespace causelab
