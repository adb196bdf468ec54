#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "causelab/dataset.hpp"
#include "causelab/deconfounder.hpp"
#include "causelab/discrete.hpp"
#include "causelab/scm.hpp"

namespace causelab {

inline constexpr double kNullDenomTol = 1e-10;
inline constexpr double kFisherZThreshold = 1.96;
inline constexpr double kExactCiTol = 1e-10;
inline constexpr std::size_t kMinCiRows = 50;

/**
 * A candidate function of some causes that the outcome is supposed to ignore
 * once the confounder and the remaining causes are held fixed. Kinds:
 *   Linear  offset + weights . a          (Gaussian worlds)
 *   Ratio   offset + weights . log(a)     (log-normal worlds, exact in log space)
 *   Xor     a_0 XOR a_1                   (binary pair)
 *   Table   lookup over the domain's codes, odometer order, last fastest
 */
struct NullFunction {
  enum class Kind { Linear, Ratio, Xor, Table };
  Kind kind = Kind::Linear;
  std::vector<std::string> domain;
  Eigen::VectorXd weights;
  double offset = 0.0;
  std::vector<int> cards;       // Table/Xor domains
  std::vector<double> table;    // Table values, odometer over cards
  std::string description;

  // a holds the domain variables, in domain order.
  double evaluate(const Eigen::VectorXd& a) const;
};

// f(a) = a, for a single discrete cause acting as its own null proxy.
NullFunction identity_null(const std::string& name, int support);

// The fitted-model construction: weight 1 on cause_i and
// -(b_i var_i + b_j cov) / (b_i cov + b_j var_j) on cause_j, which makes f
// uncorrelated with the outcome head's load b_i a_i + b_j a_j under cause_cov.
// A vanishing denominator means the head loads only on the direction f would
// need, and no such pair function exists.
NullFunction construct_linear_null(const OutcomeModel& outcome, const Eigen::MatrixXd& cause_cov,
                                   const std::string& cause_i, const std::string& cause_j);

NullFunction construct_xor_null(const ScmSpec& spec, const std::string& cause_i,
                                const std::string& cause_j);

struct CITestReport {
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::size_t n_effective = 0;
  std::string mode;  // "fisher_z" or "exact"
};

// Sample mode: Fisher-z partial correlation of (outcome, f(a_N)) given the
// conditioning columns; independence holds when |z| stays under 1.96. With
// condition_on_selection only selected rows enter.
CITestReport test_null(const NullFunction& f, const Dataset& data,
                       const std::vector<std::string>& given, bool condition_on_selection = false);

// Exact mode: worst-stratum deviation of P(y, f | given) from
// P(y | given) P(f | given) computed on the joint table.
CITestReport test_null(const NullFunction& f, const DiscreteDist& joint,
                       const std::string& outcome, const std::vector<std::string>& given);

}  // namespace causelab
