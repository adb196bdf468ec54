#pragma once

#include <Eigen/Dense>

namespace causelab {

inline constexpr double kPinvRcond = 1e-10;
inline constexpr double kRankRtol = 1e-8;

// Minimum-norm least-squares solve of A X = B: singular values below
// rcond * sigma_max are truncated rather than inverted, so rank-deficient
// systems return the canonical (shortest) solution instead of noise.
inline Eigen::MatrixXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                  double rcond = kPinvRcond) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = s.size() > 0 ? rcond * s(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * b);
}

inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rcond = kPinvRcond) {
  return pinv_solve(a, Eigen::MatrixXd::Identity(a.rows(), a.rows()), rcond);
}

// Numerical rank at relative tolerance rtol * sigma_max. When sv_at_rank is
// given it receives the smallest singular value still counted into the rank
// (0 if the rank is 0).
inline int svd_rank(const Eigen::MatrixXd& a, double rtol = kRankRtol,
                    double* sv_at_rank = nullptr) {
  if (a.size() == 0) {
    if (sv_at_rank) *sv_at_rank = 0.0;
    return 0;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = rtol * s(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  if (sv_at_rank) *sv_at_rank = rank > 0 ? s(rank - 1) : 0.0;
  return rank;
}

}  // namespace causelab
