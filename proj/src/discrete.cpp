#include "causelab/discrete.hpp"

#include <algorithm>

namespace causelab {

int DiscreteDist::index_of(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

int DiscreteDist::require(const std::string& label) const {
  const int i = index_of(label);
  if (i < 0) raise(ErrorCode::UnknownNode, "no variable named '" + label + "'");
  return i;
}

std::size_t DiscreteDist::flat_index(const std::vector<int>& codes) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    idx = idx * static_cast<std::size_t>(cards[i]) + static_cast<std::size_t>(codes[i]);
  }
  return idx;
}

void DiscreteDist::codes_of(std::size_t flat, std::vector<int>& codes) const {
  codes.resize(cards.size());
  for (std::size_t i = cards.size(); i-- > 0;) {
    codes[i] = static_cast<int>(flat % static_cast<std::size_t>(cards[i]));
    flat /= static_cast<std::size_t>(cards[i]);
  }
}

DiscreteDist make_discrete(std::vector<std::string> labels, std::vector<int> cards) {
  if (labels.size() != cards.size())
    raise(ErrorCode::InvalidSpec, "label/cardinality count mismatch");
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j])
        raise(ErrorCode::InvalidSpec, "duplicate coordinate label '" + labels[i] + "'");
  std::size_t cells = 1;
  for (const int c : cards) {
    if (c < 2) raise(ErrorCode::InvalidSpec, "cardinality must be at least 2");
    cells *= static_cast<std::size_t>(c);
    if (cells > kMaxJointCells)
      raise(ErrorCode::SupportTooLarge,
            "joint support exceeds " + std::to_string(kMaxJointCells) + " cells");
  }
  DiscreteDist d;
  d.labels = std::move(labels);
  d.cards = std::move(cards);
  d.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells));
  return d;
}

DiscreteDist marginal(const DiscreteDist& d, const std::vector<std::string>& keep) {
  std::vector<int> src(keep.size());
  std::vector<int> keep_cards(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    src[i] = d.require(keep[i]);
    keep_cards[i] = d.cards[static_cast<std::size_t>(src[i])];
  }
  DiscreteDist out = make_discrete(keep, keep_cards);
  std::vector<int> codes, out_codes(keep.size());
  for (std::size_t cell = 0; cell < d.size(); ++cell) {
    d.codes_of(cell, codes);
    for (std::size_t i = 0; i < keep.size(); ++i) out_codes[i] = codes[static_cast<std::size_t>(src[i])];
    out.p(static_cast<Eigen::Index>(out.flat_index(out_codes))) += d.p(static_cast<Eigen::Index>(cell));
  }
  return out;
}

DiscreteDist condition(const DiscreteDist& d,
                       const std::vector<std::pair<std::string, int>>& given) {
  std::vector<int> fixed(d.labels.size(), -1);
  for (const auto& [label, code] : given) {
    const int i = d.require(label);
    if (code < 0 || code >= d.cards[static_cast<std::size_t>(i)])
      raise(ErrorCode::InvalidQuery,
            "code " + std::to_string(code) + " outside support of '" + label + "'");
    fixed[static_cast<std::size_t>(i)] = code;
  }
  std::vector<std::string> keep_labels;
  std::vector<int> keep_cards;
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    if (fixed[i] < 0) {
      keep_labels.push_back(d.labels[i]);
      keep_cards.push_back(d.cards[i]);
    }
  }
  DiscreteDist out = make_discrete(keep_labels, keep_cards);
  std::vector<int> codes, out_codes(keep_labels.size());
  double mass = 0.0;
  for (std::size_t cell = 0; cell < d.size(); ++cell) {
    d.codes_of(cell, codes);
    bool match = true;
    std::size_t j = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (fixed[i] >= 0) {
        if (codes[i] != fixed[i]) {
          match = false;
          break;
        }
      } else {
        out_codes[j++] = codes[i];
      }
    }
    if (!match) continue;
    const double v = d.p(static_cast<Eigen::Index>(cell));
    mass += v;
    out.p(static_cast<Eigen::Index>(out.flat_index(out_codes))) += v;
  }
  if (mass <= 0.0) raise(ErrorCode::InvalidQuery, "conditioning event has zero probability");
  out.p /= mass;
  return out;
}

}  // namespace causelab
