#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "causelab/dataset.hpp"
#include "causelab/discrete.hpp"
#include "causelab/gaussian.hpp"
#include "causelab/nullfn.hpp"
#include "causelab/oracle.hpp"
#include "causelab/scm.hpp"

namespace causelab {

inline constexpr double kKernelResidTol = 1e-8;
inline constexpr double kStochasticRowTol = 1e-9;
inline constexpr int kMaxNullLevels = 16;

/**
 * Split of the causes for identification: intervened (the do-targets), null
 * causes (the outcome ignores them through f), and the adjusted remainder,
 * which carries the confounder information. f is a stack of scalar components
 * over the null causes; a multidimensional confounder needs at least as many
 * components as it has dimensions, or the rank conditions below cannot hold.
 */
struct CausePartition {
  std::vector<std::string> intervened;
  std::vector<std::string> adjusted;
  std::vector<std::string> null_causes;
  std::vector<NullFunction> f;
};

// Disjoint, each part non-empty, union exactly the causes, f domains inside
// the null part. Violations raise DegeneratePartition.
void validate_partition(const ScmSpec& spec, const CausePartition& part);

struct CompletenessReport {
  enum class Verdict { Complete, Incomplete };
  Verdict verdict = Verdict::Incomplete;
  int matrix_rank = 0;
  int required_rank = 0;
  double min_singular_value = 0.0;
  int slices = 0;  // conditioning configurations examined

  bool complete() const { return verdict == Verdict::Complete; }
};

enum class CompletenessDirection {
  ConfounderGivenNull,  // rows are f levels, entries P(u | a_C, f)
  NullGivenAdjusted,    // rows are a_X configurations, entries P(f | a_C, a_X)
};

// Rank of a conditional-probability matrix whose rows each sum to 1, at
// relative tolerance 1e-8. Complete means the rank reaches required_rank.
CompletenessReport check_completeness_matrix(const Eigen::MatrixXd& rows_are_conditionals,
                                             int required_rank);

// Slice the joint per intervened-cause configuration, run the matrix check on
// each slice, and keep the worst. nuisance names the confounder column for the
// ConfounderGivenNull direction and is ignored otherwise.
CompletenessReport check_completeness_discrete(const DiscreteDist& joint,
                                               const CausePartition& part,
                                               CompletenessDirection direction,
                                               const std::string& nuisance = "");

enum class KernelStatus { Solved, NoSolution };

/**
 * A solution h of the identification equation
 *   P(y | a_C, f) = sum_x h(y, a_C, x) P(x | a_C, f)
 * per (a_C [, u_sng]) slice. Tabular form stores h as a labeled tensor in the
 * DiscreteDist container (entries are kernel values, not probabilities), label
 * order [y, C..., X..., u_sng?]. Gaussian form is an affine conditional mean
 * with fixed variance. residual is the worst slice's reconstruction error.
 */
struct KernelSolution {
  KernelStatus status = KernelStatus::NoSolution;
  double residual = 0.0;
  int f_levels = 0;

  DiscreteDist h;  // tabular payload

  bool gaussian = false;  // payload below when set
  double g0 = 0.0;
  double g_var = 0.0;
  Eigen::VectorXd g_c;
  Eigen::VectorXd g_x;
  std::vector<std::string> c_names, x_names;
  std::string outcome_name;
};

struct SolveOptions {
  bool condition_on_selection = false;
  std::string selection_label = "S";
  std::optional<std::string> u_sng;  // condition slices on this column too
  std::string outcome_label = "Y";
};

// Exact per-slice least-squares solve on the joint table: for each intervened
// configuration (and u_sng level when present) build M = P(a_X | a_C, f) and
// b_y = P(y | a_C, f), take the minimum-norm solution through the truncated
// pseudoinverse, and report the worst reconstruction residual. Solved iff the
// residual stays within 1e-8. With condition_on_selection every conditional
// comes from the S = 1 slice of the joint.
KernelSolution solve_integral_equation_discrete(const DiscreteDist& joint,
                                                const CausePartition& part,
                                                const SolveOptions& options = {});

// Plug a solved kernel into the adjustment sum: p(y) = sum over a_X (and
// u_sng) of h(y, a*_C, a_X, u) P(a_X) P(u), with the marginals taken from the
// non-selection-biased joint. The result is renormalized when its mass drifts
// past 1e-9; the drift lands in *mass_deviation when given. Unsolved kernels
// are a hard error, not a number.
DiscreteDist identify_do_discrete(const KernelSolution& h, const DiscreteDist& marginals,
                                  const CausePartition& part, const InterventionQuery& q,
                                  double* mass_deviation = nullptr);

// Second-moment view of a linear-Gaussian world over (outcome, causes), either
// exact from the structural description or estimated from rows with an observed outcome.
struct LinearGaussianSummary {
  GaussianDist joint;
  std::string outcome;
  std::vector<std::string> causes;
};

LinearGaussianSummary summarize_spec(const ScmSpec& spec);
LinearGaussianSummary summarize_data(const Dataset& data);

// Closed-form kernel in the linear-Gaussian world: with F = f(A_N) stacked,
// regress Y and A_X on (A_C, F); the X coefficients solve
// gamma_F c_X = beta_F through the minimum-norm pseudoinverse, which needs
// Cov(F, A_X) at full rank, and the C coefficients absorb the remainder.
KernelSolution solve_gaussian_kernel(const LinearGaussianSummary& summary,
                                     const CausePartition& part);

// One-dimensional identified outcome law: mean g0 + g_c' a*_C + g_x' E[A_X],
// variance g_var + g_x' Cov(A_X) g_x.
GaussianDist solve_identify_gaussian(const LinearGaussianSummary& summary,
                                     const CausePartition& part, const InterventionQuery& q);

}  // namespace causelab
