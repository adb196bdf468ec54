#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "causelab/errors.hpp"

namespace causelab {

inline constexpr std::size_t kMaxJointCells = 10'000'000;
inline constexpr double kPmfSumTol = 1e-9;
inline constexpr double kCptRowSumTol = 1e-12;

// Dense joint table over labeled categorical variables. Cells are stored in
// odometer order with the LAST label varying fastest; codes are 0-based.
struct DiscreteDist {
  std::vector<std::string> labels;
  std::vector<int> cards;
  Eigen::VectorXd p;

  std::size_t size() const { return static_cast<std::size_t>(p.size()); }
  int index_of(const std::string& label) const;
  int require(const std::string& label) const;

  std::size_t flat_index(const std::vector<int>& codes) const;
  void codes_of(std::size_t flat, std::vector<int>& codes) const;

  double total_mass() const { return p.sum(); }
};

DiscreteDist make_discrete(std::vector<std::string> labels, std::vector<int> cards);

// Sum out everything except `keep` (result labels follow `keep` order).
DiscreteDist marginal(const DiscreteDist& d, const std::vector<std::string>& keep);

// Restrict to an assignment and renormalize. Zero conditioning mass is an error.
DiscreteDist condition(const DiscreteDist& d,
                       const std::vector<std::pair<std::string, int>>& given);

}  // namespace causelab
