#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icmup/pattern_store.hpp"

namespace icmup {

/// Order-preserving one-to-one matching between two patterns.
struct PairwiseAlignment {
  std::vector<std::pair<std::size_t, std::size_t>> links;
  double matched_bits = 0.0;
};

/// Heaviest common subsequence of `a` and `b`, each matched pair weighted by
/// the cost of its symbol.
///
/// Among optimal matchings the traceback prefers, from the right end, to
/// match the current pair, then to skip a symbol of `a`, then one of `b`.
inline PairwiseAlignment align_pairwise(std::span<const std::string> a, std::span<const std::string> b,
                                        const CostModel& cost) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) weight[i] = cost.cost_or_fresh(a[i]);

  std::vector<double> dp((n + 1) * (m + 1), 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return dp[i * (m + 1) + j]; };
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      double best = std::max(at(i - 1, j), at(i, j - 1));
      if (a[i - 1] == b[j - 1]) best = std::max(best, at(i - 1, j - 1) + weight[i - 1]);
      at(i, j) = best;
    }
  }

  PairwiseAlignment out;
  out.matched_bits = at(n, m);
  for (std::size_t i = n, j = m; i > 0 && j > 0;) {
    if (a[i - 1] == b[j - 1] && at(i, j) == at(i - 1, j - 1) + weight[i - 1]) {
      out.links.emplace_back(i - 1, j - 1);
      --i;
      --j;
    } else if (at(i, j) == at(i - 1, j)) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(out.links.begin(), out.links.end());
  return out;
}

/// Checks the pairwise invariants: links strictly increasing in both
/// coordinates (hence one-to-one) and joining equal symbols.
inline bool is_valid_pairwise(const PairwiseAlignment& pa, std::span<const std::string> a,
                              std::span<const std::string> b) {
  for (std::size_t k = 0; k < pa.links.size(); ++k) {
    const auto [i, j] = pa.links[k];
    if (i >= a.size() || j >= b.size() || a[i] != b[j]) return false;
    if (k > 0 && (i <= pa.links[k - 1].first || j <= pa.links[k - 1].second)) return false;
  }
  return true;
}

}  // namespace icmup
