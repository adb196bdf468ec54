#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "causelab/errors.hpp"

namespace causelab {

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPsdTol = -1e-10;
inline constexpr double kConditioningMinEig = 1e-10;

/**
 * Labeled multivariate normal. The label vector names the coordinates; every
 * operation below addresses coordinates by label so callers never juggle raw
 * indices across marginalization and conditioning.
 *
 * Invariants (checked by validated()): cov symmetric within 1e-10 and positive
 * semidefinite with eigenvalue slack -1e-10, labels unique and sized to mean.
 */
template <typename Scalar>
struct Gaussian {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector mean;
  Matrix cov;
  std::vector<std::string> labels;

  Eigen::Index dim() const { return mean.size(); }

  int index_of(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
  }

  Scalar var(const std::string& label) const {
    const int i = require(label);
    return cov(i, i);
  }

  int require(const std::string& label) const {
    const int i = index_of(label);
    if (i < 0) raise(ErrorCode::UnknownNode, "no coordinate named '" + label + "'");
    return i;
  }
};

using GaussianDist = Gaussian<double>;

template <typename Scalar>
Gaussian<Scalar> validated(Gaussian<Scalar> g) {
  const auto n = g.mean.size();
  if (g.cov.rows() != n || g.cov.cols() != n)
    raise(ErrorCode::InvalidSpec, "covariance shape does not match mean length");
  if (static_cast<Eigen::Index>(g.labels.size()) != n)
    raise(ErrorCode::InvalidSpec, "label count does not match dimension");
  for (std::size_t i = 0; i < g.labels.size(); ++i)
    for (std::size_t j = i + 1; j < g.labels.size(); ++j)
      if (g.labels[i] == g.labels[j])
        raise(ErrorCode::InvalidSpec, "duplicate coordinate label '" + g.labels[i] + "'");
  const Scalar asym = (g.cov - g.cov.transpose()).template lpNorm<Eigen::Infinity>();
  if (asym > kSymmetryTol)
    raise(ErrorCode::InvalidSpec, "covariance asymmetric by " + std::to_string(asym));
  g.cov = ((g.cov + g.cov.transpose()) / Scalar(2)).eval();
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<typename Gaussian<Scalar>::Matrix> es(g.cov);
    if (es.eigenvalues().minCoeff() < kPsdTol)
      raise(ErrorCode::InvalidSpec,
            "covariance not positive semidefinite (min eigenvalue " +
                std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
  return g;
}

template <typename Scalar>
Gaussian<Scalar> marginal(const Gaussian<Scalar>& g, const std::vector<std::string>& keep) {
  Gaussian<Scalar> out;
  out.labels = keep;
  out.mean.resize(static_cast<Eigen::Index>(keep.size()));
  out.cov.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
  std::vector<int> idx(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) idx[i] = g.require(keep[i]);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.mean(static_cast<Eigen::Index>(i)) = g.mean(idx[i]);
    for (std::size_t j = 0; j < keep.size(); ++j)
      out.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g.cov(idx[i], idx[j]);
  }
  return out;
}

/**
 * Condition on an assignment to a subset of coordinates.
 *
 * With the usual block partition (1 = kept, 2 = given),
 *   mean_1|2 = mu_1 + S12 S22^-1 (x2 - mu_2)
 *   cov_1|2  = S11 - S12 S22^-1 S21.
 * S22 must be well separated from singular: its smallest eigenvalue has to exceed
 * 1e-10 or the solve amplifies noise past any meaningful precision.
 */
template <typename Scalar>
Gaussian<Scalar> condition(const Gaussian<Scalar>& g,
                           const std::vector<std::pair<std::string, Scalar>>& given) {
  using Matrix = typename Gaussian<Scalar>::Matrix;
  using Vector = typename Gaussian<Scalar>::Vector;
  std::vector<int> gi;
  std::vector<char> is_given(static_cast<std::size_t>(g.dim()), 0);
  Vector x2(static_cast<Eigen::Index>(given.size()));
  for (std::size_t i = 0; i < given.size(); ++i) {
    const int idx = g.require(given[i].first);
    if (is_given[static_cast<std::size_t>(idx)])
      raise(ErrorCode::InvalidQuery, "coordinate '" + given[i].first + "' conditioned twice");
    is_given[static_cast<std::size_t>(idx)] = 1;
    gi.push_back(idx);
    x2(static_cast<Eigen::Index>(i)) = given[i].second;
  }
  std::vector<int> ki;
  for (int i = 0; i < g.dim(); ++i)
    if (!is_given[static_cast<std::size_t>(i)]) ki.push_back(i);

  const auto n1 = static_cast<Eigen::Index>(ki.size());
  const auto n2 = static_cast<Eigen::Index>(gi.size());
  Matrix s11(n1, n1), s12(n1, n2), s22(n2, n2);
  Vector mu1(n1), mu2(n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    mu1(i) = g.mean(ki[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n1; ++j)
      s11(i, j) = g.cov(ki[static_cast<std::size_t>(i)], ki[static_cast<std::size_t>(j)]);
    for (Eigen::Index j = 0; j < n2; ++j)
      s12(i, j) = g.cov(ki[static_cast<std::size_t>(i)], gi[static_cast<std::size_t>(j)]);
  }
  for (Eigen::Index i = 0; i < n2; ++i) {
    mu2(i) = g.mean(gi[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n2; ++j)
      s22(i, j) = g.cov(gi[static_cast<std::size_t>(i)], gi[static_cast<std::size_t>(j)]);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(s22);
  if (es.eigenvalues().minCoeff() <= kConditioningMinEig)
    raise(ErrorCode::SingularConditioningBlock,
          "conditioning block min eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
  const Matrix s22_inv =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();

  Gaussian<Scalar> out;
  out.mean = mu1 + s12 * (s22_inv * (x2 - mu2));
  out.cov = s11 - s12 * s22_inv * s12.transpose();
  out.cov = ((out.cov + out.cov.transpose()) / Scalar(2)).eval();
  out.labels.reserve(ki.size());
  for (const int i : ki) out.labels.push_back(g.labels[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace causelab
