#pragma once

#include <vector>

#include "causelab/oracle.hpp"
#include "causelab/proxy_id.hpp"
#include "causelab/scm.hpp"

namespace causelab::fixtures {

// Linear-Gaussian world: 2-dim shared confounder into all 10 causes and the
// outcome. Cause coefficients are orthogonal to the loading span, so the
// adjusted do-mean is exactly alpha' a*. Coefficients frozen once.
ScmSpec lg_shared();
Eigen::MatrixXd lg_loadings();   // 10 x 2
Eigen::VectorXd lg_alpha();      // direct cause effects
Eigen::Vector2d lg_alpha_u();    // confounder effects on the outcome
std::vector<InterventionQuery> lg_grid();  // do(A1,A2) over {(1,0),(0,1),(1,1)}

// Selection world: shared confounder, a cause-only covariate, a single-cause
// confounder on A1, and logistic selection driven by the two confounders.
ScmSpec lg_selection();

// Partition of lg_shared's causes with two linear null components over
// A6..A10, weighted so each is outcome-null.
CausePartition lg_null_partition();

// Four binary causes under a binary shared confounder; A4 has no outcome
// edge, so it serves as its own null proxy.
ScmSpec discrete_null();
CausePartition discrete_null_partition();

// Ternary confounder against a binary adjusted cause: the conditional system
// is rank-deficient and the effect is not identified.
ScmSpec discrete_incomplete();
CausePartition discrete_incomplete_partition();

// Discrete selection world with a single-cause confounder on A1; selection
// depends on both confounders only.
ScmSpec discrete_selection();
CausePartition discrete_selection_partition();

// do(A1=a) queries for the binary-cause worlds.
std::vector<InterventionQuery> binary_first_cause_grid();

}  // namespace causelab::fixtures
