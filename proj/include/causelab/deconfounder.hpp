#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "causelab/dataset.hpp"
#include "causelab/gaussian.hpp"
#include "causelab/oracle.hpp"

namespace causelab {

inline constexpr double kEmRelTol = 1e-9;
inline constexpr int kEmMaxIters = 2000;
inline constexpr double kEmMonotoneSlack = 1e-10;

/**
 * Probabilistic PCA over the causes, fitted by EM: a ~ N(mean + loadings z,
 * noise_var I) with z standard normal. This is the substitute-confounder
 * model: given z the causes are independent by construction (diagonal noise),
 * so the factorized form of the cause law holds structurally.
 *
 * Provenance matters downstream: fitted_on_selected_rows records whether the
 * training causes were restricted to selected rows, which the selection-aware
 * estimator must reject.
 */
struct SubstituteModel {
  Eigen::MatrixXd loadings;  // m x k
  Eigen::VectorXd mean;      // m
  double noise_var = 1.0;
  int k = 0;
  std::vector<double> fit_log;  // per-iteration mean log-likelihood
  std::vector<std::string> cause_names;
  bool fitted_on_selected_rows = false;
};

// Linear outcome head on (causes, posterior mean of z, single-cause
// confounders). Coefficient blocks are kept separate so the estimators can
// integrate each block against its own measure.
struct OutcomeModel {
  double intercept = 0.0;
  Eigen::VectorXd cause_coef;
  Eigen::VectorXd z_coef;
  Eigen::VectorXd u_sng_coef;
  double residual_var = 0.0;
  bool fitted_on_selected = false;
  std::vector<std::string> cause_names;
  std::vector<std::string> u_sng_names;
  std::string outcome_name;
};

struct CheckReport {
  enum class Status { Pass, Fail, Inconclusive };
  Status status = Status::Inconclusive;
  double score = 0.0;  // predictive p-value-like fraction in [0, 1]
  double stat_observed = 0.0;
  double stat_replicate_mean = 0.0;
  int replicates = 0;
};

struct ProxyRankReport {
  int rank = 0;
  int required_rank = 0;
  double min_singular_value = 0.0;
};

struct DeconfounderEstimate {
  InterventionQuery query;
  double mean = 0.0;
  double variance = 0.0;
  double mc_se = 0.0;  // 0 in analytic mode
  std::size_t n_integration = 0;
  double factor_check_score = -1.0;  // -1 until a check is attached
  ProxyRankReport proxy_rank;
};

// Either the closed-form Gaussian integral or seeded Monte Carlo over the
// substitute joint.
struct Integration {
  enum class Mode { Analytic, MonteCarlo };
  Mode mode = Mode::Analytic;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  static Integration analytic() { return {}; }
  static Integration mc(std::size_t n, std::uint64_t seed) {
    return {Mode::MonteCarlo, n, seed};
  }
};

// EM fit of the substitute model on the dataset's cause columns. Deterministic:
// the initializer draws from a fixed internal stream, and iteration stops when
// the relative log-likelihood gain drops below 1e-9 (or at 2000 iterations).
SubstituteModel fit_substitute(const Dataset& data, int k);

// Posterior over z at one cause row: with M = loadings' loadings + noise_var I,
// mean = M^-1 loadings' (a - mean) and cov = noise_var M^-1 (same for every a).
GaussianDist posterior_z(const SubstituteModel& model, const Eigen::VectorXd& a);

// Row-wise posterior means for a whole cause matrix (n x k).
Eigen::MatrixXd posterior_mean_z(const SubstituteModel& model, const Eigen::MatrixXd& a);

// Posterior-predictive check on held-out rows: the statistic is the mean
// conditional log-likelihood of each cause given the others, compared against
// `replicates` datasets drawn from the fitted model itself. score is the
// fraction of replicate statistics below the observed one; the model passes
// when the observed data is not in either 1% tail.
CheckReport check_factor(const SubstituteModel& model, const Dataset& holdout,
                         int replicates = 200, std::uint64_t seed = 0xFACADEull);

// Least squares of Y on [1, causes, E[z|a], u_sng]. The posterior-mean block is
// an exact linear function of the causes, so that design is singular by
// construction; attribution is therefore confounder-first: Y and the causes are
// first projected off [1, E[z|a], u_sng], the cause block is fitted on the
// residuals (minimum-norm), and the confounder block absorbs the remainder.
// Rank deficiency WITHIN [1, causes, u_sng] is a hard error naming the
// offending direction.
OutcomeModel fit_outcome(const Dataset& data, const SubstituteModel& substitute,
                         bool include_u_sng = false);

// The estimation integral: clamp a_C, integrate the outcome head against the
// substitute joint of (free causes, z). Analytic mode evaluates the Gaussian
// integral exactly; mc mode averages over draws and reports mc_se.
DeconfounderEstimate estimate_do(const SubstituteModel& substitute, const OutcomeModel& outcome,
                                 const InterventionQuery& q,
                                 const Integration& integration = Integration::analytic());

// Selection-aware variant: outcome head from the selected view, integration
// measure (free causes, z) from the non-selection-biased substitute, and the
// single-cause confounder block integrated against its full-view marginal.
// View provenance is enforced, not trusted.
DeconfounderEstimate estimate_do_selected(const SubstituteModel& substitute_unbiased,
                                          const OutcomeModel& outcome_selected,
                                          const GaussianDist& u_sng_marginal,
                                          const InterventionQuery& q,
                                          const Integration& integration = Integration::analytic());

// Standing negative control: plain least squares of Y on the causes with the
// free causes held at their sample means. No substitute, no adjustment.
double naive_conditional_mean(const Dataset& data, const InterventionQuery& q);

}  // namespace causelab
