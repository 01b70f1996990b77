#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reid/ranking.hpp"

namespace reid {

/// Pairwise preference counts over a set of base rankings: counts(j, k) is
/// the number of rankings that place gallery j before gallery k. For j != k,
/// counts(j, k) + counts(k, j) equals the number of rankings; the diagonal
/// stays zero.
class PairwisePreference {
 public:
  PairwisePreference(std::size_t num_items, std::uint32_t total_rankings);

  std::size_t size() const { return num_items_; }
  std::uint32_t total() const { return total_rankings_; }

  std::uint32_t at(std::size_t j, std::size_t k) const {
    return counts_[j * num_items_ + k];
  }
  void add(std::size_t j, std::size_t k, std::uint32_t count) {
    counts_[j * num_items_ + k] += count;
  }

  const std::vector<std::uint32_t>& raw() const { return counts_; }

 private:
  std::size_t num_items_;
  std::uint32_t total_rankings_;
  std::vector<std::uint32_t> counts_;  // row-major N x N
};

/// Consensus permutation plus per-identity scores (higher = more favored).
/// `scores` is indexed by gallery index.
struct AggregatedRanking {
  std::vector<std::size_t> order;
  std::vector<double> scores;

  friend bool operator==(const AggregatedRanking&, const AggregatedRanking&) = default;
};

/// Cross-Entropy Monte Carlo search parameters.
struct CEMCConfig {
  std::size_t samples = 200;     // permutations sampled per iteration
  double elite_fraction = 0.1;   // share of best samples reinforced
  double alpha = 0.7;            // matrix update weight: (1-a)*old + a*elite
  std::size_t max_iters = 100;
  std::size_t patience = 10;     // stop after this many non-improving iters
};

inline constexpr std::size_t kDefaultKemenyCap = 10;

/// Counts, over all rankings, how often each gallery index precedes each
/// other one. Partial counts from parallel workers are merged by integer
/// addition, so the result is exact and order-independent.
PairwisePreference pairwise_counts(std::span<const BaseRanking> rankings);

/// Majority verdict: true iff strictly more than half of the rankings place
/// j before k. At an exact tie both directions are false.
bool majority(const PairwisePreference& pref, std::size_t j, std::size_t k);

/// Number of discordant pairs between two permutations of the same N.
std::uint64_t kendall_distance(const BaseRanking& a, const BaseRanking& b);

/// Sum of Kendall distances from `order` to every counted ranking, computed
/// from the preference matrix: each pair (a before b) in `order` disagrees
/// with exactly counts(b, a) rankings.
std::uint64_t total_kendall_distance(const PairwisePreference& pref,
                                     std::span<const std::size_t> order);

/// Consensus by summed pairwise counts: score(j) = sum_k counts(j, k), order
/// by descending score with ascending-index tie break.
AggregatedRanking aggregate_count(std::span<const BaseRanking> rankings);
AggregatedRanking aggregate_count(const PairwisePreference& pref);

/// Exact Kemeny consensus: the permutation minimizing the total Kendall
/// distance to all rankings, lexicographically smallest among co-optima.
/// Scores are rank-derived (N - position). Throws CapacityError when the
/// gallery size exceeds `max_exact_n`.
AggregatedRanking aggregate_kemeny_exact(std::span<const BaseRanking> rankings,
                                         std::size_t max_exact_n = kDefaultKemenyCap);
AggregatedRanking aggregate_kemeny_exact(const PairwisePreference& pref,
                                         std::size_t max_exact_n = kDefaultKemenyCap);

/// Cross-Entropy Monte Carlo consensus search. Keeps an N x N
/// position-probability matrix, initialized uniform; each iteration samples
/// permutations from it, reinforces the elite fraction, and tracks the best
/// permutation seen. The counting consensus is evaluated as the initial
/// candidate, so the result is never worse than aggregate_count. Scores are
/// the final per-identity position probabilities. Deterministic given seed;
/// sample s of iteration i always uses the substream (seed, i, s).
AggregatedRanking aggregate_cemc(std::span<const BaseRanking> rankings,
                                 const CEMCConfig& config, std::uint64_t seed);
AggregatedRanking aggregate_cemc(const PairwisePreference& pref,
                                 const CEMCConfig& config, std::uint64_t seed);

namespace detail {

void validate_cemc_config(const CEMCConfig& config);
std::size_t cemc_elite_count(const CEMCConfig& config);

/// Samples a permutation position by position from a row-major
/// position-probability matrix, renormalizing over the items still unplaced.
std::vector<std::size_t> sample_permutation(std::span<const double> position_probs,
                                            std::size_t n, SplitMix64& rng);

/// Blends the elite empirical position frequencies into the matrix.
void cemc_update_matrix(std::vector<double>& position_probs, std::size_t n,
                        std::span<const std::vector<std::size_t>> elites,
                        double alpha);

}  // namespace detail

}  // namespace reid
