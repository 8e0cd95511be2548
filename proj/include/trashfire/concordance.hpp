#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "trashfire/error.hpp"
#include "trashfire/math/linalg.hpp"

namespace trashfire {

struct ConcordanceCounts {
  std::uint64_t concordant = 0;
  std::uint64_t discordant = 0;
  std::uint64_t tied_score = 0;

  std::uint64_t comparable() const { return concordant + discordant + tied_score; }
};

inline double concordance_from_counts(const ConcordanceCounts& c) {
  if (c.comparable() == 0)
    throw ContractError("concordance: no comparable pairs (metric undefined)");
  return static_cast<double>(2 * c.concordant + c.tied_score) /
         static_cast<double>(2 * c.comparable());
}

namespace detail {

class Fenwick {
public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t idx, std::int64_t delta) {
    for (std::size_t i = idx + 1; i < tree_.size(); i += i & (~i + 1))
      tree_[i] += delta;
  }

  // Sum of counts over ranks [0, idx].
  std::int64_t prefix(std::size_t idx) const {
    std::int64_t s = 0;
    for (std::size_t i = idx + 1; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

private:
  std::vector<std::int64_t> tree_;
};

}  // namespace detail

/// Harrell's concordance counts over comparable pairs. A pair is comparable
/// iff the two observed times differ and the earlier one is an event; it is
/// concordant when the longer-lived subject has the higher predicted
/// survival score, and score ties earn half credit. Runs in O(n log n) by
/// sweeping times in ascending order against a Fenwick tree of score ranks.
inline ConcordanceCounts concordance_counts(const math::Vector& scores,
                                            const math::Vector& times,
                                            const std::vector<std::uint8_t>& events) {
  const std::size_t n = scores.size();
  if (times.size() != n || events.size() != n)
    throw ContractError("concordance: input lengths differ");
  if (n < 2) throw ContractError("concordance: need at least two subjects");

  // Rank-compress scores.
  std::vector<double> sorted_scores(scores.begin(), scores.end());
  std::sort(sorted_scores.begin(), sorted_scores.end());
  sorted_scores.erase(std::unique(sorted_scores.begin(), sorted_scores.end()),
                      sorted_scores.end());
  auto rank_of = [&](double s) {
    return static_cast<std::size_t>(
        std::lower_bound(sorted_scores.begin(), sorted_scores.end(), s) -
        sorted_scores.begin());
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  detail::Fenwick tree(sorted_scores.size());
  for (std::size_t i = 0; i < n; ++i) tree.add(rank_of(scores[i]), 1);
  std::int64_t remaining = static_cast<std::int64_t>(n);

  ConcordanceCounts out;
  std::size_t i = 0;
  while (i < n) {
    const double t = times[order[i]];
    std::size_t j = i;
    // Same-time pairs are never comparable: drop the whole tie group from
    // the tree before scoring its events against strictly later subjects.
    while (j < n && times[order[j]] == t) {
      tree.add(rank_of(scores[order[j]]), -1);
      --remaining;
      ++j;
    }
    for (std::size_t e = i; e < j; ++e) {
      const std::size_t row = order[e];
      if (!events[row]) continue;
      const std::size_t r = rank_of(scores[row]);
      const std::int64_t below = r > 0 ? tree.prefix(r - 1) : 0;
      const std::int64_t at_or_below = tree.prefix(r);
      const std::int64_t equal = at_or_below - below;
      const std::int64_t above = remaining - at_or_below;
      out.concordant += static_cast<std::uint64_t>(above);
      out.discordant += static_cast<std::uint64_t>(below);
      out.tied_score += static_cast<std::uint64_t>(equal);
    }
    i = j;
  }
  return out;
}

/// Harrell's C: (concordant + tied/2) / comparable.
inline double concordance(const math::Vector& scores, const math::Vector& times,
                          const std::vector<std::uint8_t>& events) {
  return concordance_from_counts(concordance_counts(scores, times, events));
}

}  // namespace trashfire
