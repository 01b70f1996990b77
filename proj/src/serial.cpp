#include "reid/serial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reid::serial {

std::vector<FrameGalleryDistances> distance_matrix(
    const VideoSequence& probe_seq, std::span<const VideoSequence> gallery,
    DistanceMode mode, std::size_t probe_index) {
  if (gallery.empty()) {
    throw std::invalid_argument("ranking: gallery must be nonempty");
  }
  std::vector<FrameGalleryDistances> out(probe_seq.length());
  for (std::size_t t = 0; t < probe_seq.length(); ++t) {
    out[t].probe_index = probe_index;
    out[t].frame_index = t;
    out[t].distances.resize(gallery.size());
    for (std::size_t j = 0; j < gallery.size(); ++j) {
      out[t].distances[j] =
          frame_to_video_distance(probe_seq.frames()[t], gallery[j], mode);
    }
  }
  return out;
}

std::vector<BaseRanking> all_base_rankings(const VideoSequence& probe_seq,
                                           std::span<const VideoSequence> gallery,
                                           DistanceMode mode) {
  const auto dm = serial::distance_matrix(probe_seq, gallery, mode);
  std::vector<BaseRanking> rankings;
  rankings.reserve(dm.size());
  for (const auto& row : dm) {
    rankings.push_back(ranking_from_distances(row.distances));
  }
  return rankings;
}

PairwisePreference pairwise_counts(std::span<const BaseRanking> rankings) {
  if (rankings.empty()) {
    throw std::invalid_argument("aggregate: ranking list must be nonempty");
  }
  const std::size_t n = rankings.front().order.size();
  PairwisePreference pref(n, static_cast<std::uint32_t>(rankings.size()));
  for (const auto& r : rankings) {
    if (r.order.size() != n) {
      throw std::invalid_argument("aggregate: rankings have mixed sizes");
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        pref.add(r.order[a], r.order[b], 1);
      }
    }
  }
  return pref;
}

BoundReport simulate_pairwise_error(const SyntheticRankerConfig& config) {
  config.validate();
  std::uint64_t failures = 0;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    SplitMix64 rng(derive_seed(config.seed, trial));
    std::size_t correct = 0;
    for (std::size_t vote = 0; vote < config.num_rankers; ++vote) {
      correct += (rng.next_double() >= config.error_rate);
    }
    failures += (2 * correct <= config.num_rankers);
  }
  BoundReport report;
  report.trials = config.trials;
  report.empirical_error =
      static_cast<double>(failures) / static_cast<double>(config.trials);
  report.theoretical_bound = hoeffding_bound(config.epsilon, config.num_rankers);
  report.standard_error =
      std::sqrt(report.empirical_error * (1.0 - report.empirical_error) /
                static_cast<double>(config.trials));
  return report;
}

AggregatedRanking aggregate_cemc(std::span<const BaseRanking> rankings,
                                 const CEMCConfig& config, std::uint64_t seed) {
  detail::validate_cemc_config(config);
  const PairwisePreference pref = serial::pairwise_counts(rankings);
  const std::size_t n = pref.size();

  AggregatedRanking seed_candidate = aggregate_count(pref);
  std::vector<std::size_t> best_order = seed_candidate.order;
  std::uint64_t best_cost = total_kendall_distance(pref, best_order);

  std::vector<double> position_probs(n * n, 1.0 / static_cast<double>(n));
  const std::size_t elite_count = detail::cemc_elite_count(config);

  std::vector<std::vector<std::size_t>> orders(config.samples);
  std::vector<std::uint64_t> costs(config.samples);
  std::vector<std::size_t> by_cost(config.samples);

  std::size_t stall = 0;
  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    for (std::size_t s = 0; s < config.samples; ++s) {
      SplitMix64 rng(derive_seed(seed, iter, s));
      orders[s] = detail::sample_permutation(position_probs, n, rng);
      costs[s] = total_kendall_distance(pref, orders[s]);
    }

    std::iota(by_cost.begin(), by_cost.end(), std::size_t{0});
    std::sort(by_cost.begin(), by_cost.end(), [&](std::size_t a, std::size_t b) {
      return costs[a] != costs[b] ? costs[a] < costs[b] : a < b;
    });

    if (costs[by_cost.front()] < best_cost) {
      best_cost = costs[by_cost.front()];
      best_order = orders[by_cost.front()];
      stall = 0;
    } else {
      ++stall;
      if (stall >= config.patience) break;
    }

    std::vector<std::vector<std::size_t>> elites;
    elites.reserve(elite_count);
    for (std::size_t e = 0; e < elite_count; ++e) {
      elites.push_back(orders[by_cost[e]]);
    }
    detail::cemc_update_matrix(position_probs, n, elites, config.alpha);
  }

  AggregatedRanking result;
  result.order = std::move(best_order);
  result.scores.resize(n);
  std::vector<std::size_t> position(n);
  for (std::size_t pos = 0; pos < n; ++pos) position[result.order[pos]] = pos;
  for (std::size_t item = 0; item < n; ++item) {
    result.scores[item] = position_probs[position[item] * n + item];
  }
  return result;
}

}  // namespace reid::serial
