#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "reid/rng.hpp"

namespace reid {

/// Synthetic base-ranker ensemble: T independent rankers that each decide a
/// pairwise preference wrongly with probability `error_rate`.
struct SyntheticRankerConfig {
  double error_rate = 0.0;   // r, per-ranker pairwise error probability
  double epsilon = 0.0;      // margin below a coin flip, r <= 1/2 - epsilon
  std::size_t num_rankers = 1;  // T
  std::size_t trials = 1;
  std::uint64_t seed = 0;

  /// Boundary-case config with r = 1/2 - epsilon.
  static SyntheticRankerConfig from_epsilon(double epsilon, std::size_t num_rankers,
                                            std::size_t trials, std::uint64_t seed);

  void validate() const;
};

struct BoundReport {
  double empirical_error = 0.0;    // estimated Pr(majority verdict is wrong)
  double theoretical_bound = 0.0;  // exp(-2 eps^2 T)
  std::size_t trials = 0;
  double standard_error = 0.0;     // binomial stderr of empirical_error
};

/// exp(-2 * epsilon^2 * T). Requires 0 < epsilon < 1/2 and T >= 1.
double hoeffding_bound(double epsilon, std::size_t num_rankers);

/// Monte Carlo estimate of the probability that the strict majority of T
/// rankers decides a pair wrongly, each ranker erring independently with
/// probability r. Trials run in parallel on substreams indexed by trial, so
/// the estimate is identical at any thread count.
BoundReport simulate_pairwise_error(const SyntheticRankerConfig& config);

/// Fraction of item triples whose majority verdicts form a cycle, averaged
/// over trials. Each trial draws `num_rankers` rankings of N items by
/// corrupting the identity order with adjacent-swap passes whose swap
/// probability is calibrated so the mean pairwise inversion rate matches
/// `error_rate`.
double simulate_consistency(std::size_t num_items,
                            const SyntheticRankerConfig& config);

namespace detail {

/// One corrupted ranking: `passes` sweeps over the identity permutation,
/// swapping each adjacent pair with probability `swap_prob`.
std::vector<std::size_t> corrupt_ranking(std::size_t num_items, double swap_prob,
                                         std::size_t passes, SplitMix64& rng);

/// Swap probability whose mean pairwise inversion rate is closest to
/// `target_error` (bisection against a fixed Monte Carlo sample).
double calibrate_swap_probability(std::size_t num_items, double target_error,
                                  std::uint64_t seed);

}  // namespace detail

}  // namespace reid
