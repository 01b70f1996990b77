#include "reid/bound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace reid {

namespace {
constexpr std::uint64_t kCalibrationStream = 0xca11b;
constexpr std::size_t kCalibrationSamples = 512;
constexpr double kMaxSwapProbability = 0.5;
}  // namespace

SyntheticRankerConfig SyntheticRankerConfig::from_epsilon(double epsilon,
                                                          std::size_t num_rankers,
                                                          std::size_t trials,
                                                          std::uint64_t seed) {
  SyntheticRankerConfig config;
  config.error_rate = 0.5 - epsilon;
  config.epsilon = epsilon;
  config.num_rankers = num_rankers;
  config.trials = trials;
  config.seed = seed;
  return config;
}

void SyntheticRankerConfig::validate() const {
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
    throw std::invalid_argument(
        "SyntheticRankerConfig: epsilon must be in (0, 1/2)");
  }
  if (!(error_rate >= 0.0) || error_rate >= 0.5) {
    throw std::invalid_argument(
        "SyntheticRankerConfig: error rate must satisfy 0 <= r < 1/2 "
        "(the bound is vacuous otherwise)");
  }
  if (num_rankers < 1) {
    throw std::invalid_argument("SyntheticRankerConfig: need at least one ranker");
  }
  if (trials < 1) {
    throw std::invalid_argument("SyntheticRankerConfig: need at least one trial");
  }
}

double hoeffding_bound(double epsilon, std::size_t num_rankers) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
    throw std::invalid_argument("hoeffding_bound: epsilon must be in (0, 1/2)");
  }
  if (num_rankers < 1) {
    throw std::invalid_argument("hoeffding_bound: T must be >= 1");
  }
  return std::exp(-2.0 * epsilon * epsilon * static_cast<double>(num_rankers));
}

BoundReport simulate_pairwise_error(const SyntheticRankerConfig& config) {
  config.validate();
  const std::size_t t = config.num_rankers;
  const double r = config.error_rate;

  std::uint64_t failures = 0;
  const std::int64_t trials = static_cast<std::int64_t>(config.trials);
#pragma omp parallel for schedule(static) reduction(+ : failures)
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(trial)));
    std::size_t correct = 0;
    for (std::size_t vote = 0; vote < t; ++vote) {
      correct += (rng.next_double() >= r);
    }
    // Strict majority; an exact tie counts as a wrong verdict.
    failures += (2 * correct <= t);
  }

  BoundReport report;
  report.trials = config.trials;
  report.empirical_error =
      static_cast<double>(failures) / static_cast<double>(config.trials);
  report.theoretical_bound = hoeffding_bound(config.epsilon, t);
  report.standard_error =
      std::sqrt(report.empirical_error * (1.0 - report.empirical_error) /
                static_cast<double>(config.trials));
  return report;
}

namespace detail {

std::vector<std::size_t> corrupt_ranking(std::size_t num_items, double swap_prob,
                                         std::size_t passes, SplitMix64& rng) {
  std::vector<std::size_t> perm(num_items);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t pass = 0; pass < passes; ++pass) {
    for (std::size_t i = 0; i + 1 < num_items; ++i) {
      if (rng.next_double() < swap_prob) std::swap(perm[i], perm[i + 1]);
    }
  }
  return perm;
}

namespace {

// Mean pairwise inversion rate of corrupted rankings at a given swap
// probability, on a fixed sample so bisection sees a deterministic curve.
double mean_inversion_rate(std::size_t num_items, double swap_prob,
                           std::uint64_t seed) {
  const std::size_t pairs = num_items * (num_items - 1) / 2;
  std::uint64_t inversions = 0;
  for (std::size_t s = 0; s < kCalibrationSamples; ++s) {
    SplitMix64 rng(derive_seed(seed, kCalibrationStream, s));
    const auto perm = corrupt_ranking(num_items, swap_prob, num_items, rng);
    std::vector<std::size_t> pos(num_items);
    for (std::size_t p = 0; p < num_items; ++p) pos[perm[p]] = p;
    for (std::size_t i = 0; i < num_items; ++i) {
      for (std::size_t j = i + 1; j < num_items; ++j) {
        inversions += (pos[i] > pos[j]);
      }
    }
  }
  return static_cast<double>(inversions) /
         static_cast<double>(kCalibrationSamples * pairs);
}

}  // namespace

double calibrate_swap_probability(std::size_t num_items, double target_error,
                                  std::uint64_t seed) {
  if (target_error <= 0.0) return 0.0;
  if (mean_inversion_rate(num_items, kMaxSwapProbability, seed) < target_error) {
    throw std::invalid_argument(
        "simulate_consistency: error rate " + std::to_string(target_error) +
        " is not reachable by the adjacent-swap corruption model");
  }
  double lo = 0.0;
  double hi = kMaxSwapProbability;
  for (int iter = 0; iter < 40; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mean_inversion_rate(num_items, mid, seed) < target_error) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

double simulate_consistency(std::size_t num_items,
                            const SyntheticRankerConfig& config) {
  config.validate();
  if (num_items < 3) {
    throw std::invalid_argument("simulate_consistency: need at least 3 items");
  }

  const double swap_prob = detail::calibrate_swap_probability(
      num_items, config.error_rate, config.seed);
  const std::size_t n = num_items;
  const std::size_t t = config.num_rankers;

  std::uint64_t intransitive = 0;
  const std::int64_t trials = static_cast<std::int64_t>(config.trials);
#pragma omp parallel for schedule(static) reduction(+ : intransitive)
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(trial)));
    std::vector<std::uint32_t> counts(n * n, 0);  // counts[i*n+j]: i before j
    std::vector<std::size_t> pos(n);
    for (std::size_t ranker = 0; ranker < t; ++ranker) {
      const auto perm = detail::corrupt_ranking(n, swap_prob, n, rng);
      for (std::size_t p = 0; p < n; ++p) pos[perm[p]] = p;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (pos[i] < pos[j]) {
            ++counts[i * n + j];
          } else {
            ++counts[j * n + i];
          }
        }
      }
    }
    const auto wins = [&](std::size_t a, std::size_t b) {
      return 2ull * counts[a * n + b] > t;
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          const bool cycle = (wins(i, j) && wins(j, k) && wins(k, i)) ||
                             (wins(j, i) && wins(k, j) && wins(i, k));
          intransitive += cycle;
        }
      }
    }
  }

  const double triples = static_cast<double>(n) * static_cast<double>(n - 1) *
                         static_cast<double>(n - 2) / 6.0;
  return static_cast<double>(intransitive) /
         (static_cast<double>(config.trials) * triples);
}

}  // namespace reid
