#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "causelab/dataset.hpp"
#include "causelab/discrete.hpp"
#include "causelab/gaussian.hpp"
#include "causelab/scm.hpp"

namespace causelab {

// do(a_C = v) on a nonempty strict subset of the causes. The complement stays
// free so downstream averaging over it is meaningful. response defaults to the
// spec's outcome; naming any other node is rejected.
struct InterventionQuery {
  std::vector<std::pair<std::string, double>> set_to;
  std::string response;
};

void validate_query(const ScmSpec& spec, const InterventionQuery& q);

// Stable under reordering of set_to; mixes node names with value bit patterns.
std::uint64_t query_hash(const InterventionQuery& q);

// Exact outcome law under the mutilated graph (edges into the pinned causes
// cut, their values fixed), reduced to the one-dimensional response margin.
GaussianDist do_gaussian(const ScmSpec& spec, const InterventionQuery& q);
DiscreteDist do_discrete(const ScmSpec& spec, const InterventionQuery& q);

// Post-intervention joint over every non-selection node. Pinned causes appear
// as point masses (zero variance, a one-hot marginal), so marginal/condition
// calls work unchanged downstream.
GaussianDist do_joint_gaussian(const ScmSpec& spec, const InterventionQuery& q);
DiscreteDist do_joint_discrete(const ScmSpec& spec, const InterventionQuery& q);

// E[Y | do(a_C)], dispatching on the mechanism. Discrete outcomes average
// their codes, which for a binary outcome is P(Y = 1 | do).
double do_mean(const ScmSpec& spec, const InterventionQuery& q);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // n-1 denominator
  double se = 0.0;
  Eigen::VectorXd bin_edges;  // bins + 1 entries
  Eigen::VectorXd bin_mass;   // sums to 1
  std::uint64_t stream = 0;
};

// Mean, spread, and a Freedman-Diaconis histogram (bin count clamped to 512).
SampleSummary summarize(const Eigen::VectorXd& x);

// Simulation estimate of the outcome under do(a_C): n rows from the pinned
// sampler on a stream derived from (seed, query), summarized over the outcome
// column. Identical (spec, q, n, seed) reproduces the summary bit for bit.
SampleSummary do_monte_carlo(const ScmSpec& spec, const InterventionQuery& q, std::size_t n,
                             std::uint64_t seed);

}  // namespace causelab
