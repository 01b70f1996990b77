#include "reid/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace reid {

PairwisePreference::PairwisePreference(std::size_t num_items,
                                       std::uint32_t total_rankings)
    : num_items_(num_items),
      total_rankings_(total_rankings),
      counts_(num_items * num_items, 0) {
  if (num_items == 0) {
    throw std::invalid_argument("PairwisePreference: N must be >= 1");
  }
}

namespace {

std::size_t checked_common_size(std::span<const BaseRanking> rankings) {
  if (rankings.empty()) {
    throw std::invalid_argument("aggregate: ranking list must be nonempty");
  }
  const std::size_t n = rankings.front().order.size();
  std::vector<char> seen(n);
  for (const auto& r : rankings) {
    if (r.order.size() != n) {
      throw std::invalid_argument("aggregate: rankings have mixed sizes (" +
                                  std::to_string(r.order.size()) + " vs " +
                                  std::to_string(n) + ")");
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t item : r.order) {
      if (item >= n || seen[item]) {
        throw std::invalid_argument("aggregate: ranking is not a permutation");
      }
      seen[item] = 1;
    }
  }
  return n;
}

}  // namespace

PairwisePreference pairwise_counts(std::span<const BaseRanking> rankings) {
  const std::size_t n = checked_common_size(rankings);
  if (rankings.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("pairwise_counts: too many rankings");
  }
  PairwisePreference pref(n, static_cast<std::uint32_t>(rankings.size()));

  const std::int64_t num_rankings = static_cast<std::int64_t>(rankings.size());
#pragma omp parallel
  {
    std::vector<std::uint32_t> local(n * n, 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t t = 0; t < num_rankings; ++t) {
      const auto& order = rankings[static_cast<std::size_t>(t)].order;
      for (std::size_t a = 0; a < n; ++a) {
        const std::size_t row = order[a] * n;
        for (std::size_t b = a + 1; b < n; ++b) {
          ++local[row + order[b]];
        }
      }
    }
#pragma omp critical(reid_pairwise_counts_merge)
    {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          pref.add(j, k, local[j * n + k]);
        }
      }
    }
  }
  return pref;
}

bool majority(const PairwisePreference& pref, std::size_t j, std::size_t k) {
  if (j >= pref.size() || k >= pref.size()) {
    throw std::invalid_argument("majority: index out of range");
  }
  if (j == k) {
    throw std::invalid_argument("majority: indices must differ");
  }
  // Strict test 2*M > T in integers; an exact tie is false both ways.
  return 2ull * pref.at(j, k) > pref.total();
}

std::uint64_t kendall_distance(const BaseRanking& a, const BaseRanking& b) {
  const std::size_t n = a.order.size();
  if (b.order.size() != n) {
    throw std::invalid_argument("kendall_distance: rankings have different sizes");
  }
  std::vector<std::size_t> pos_a(n), pos_b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (a.order[i] >= n || b.order[i] >= n) {
      throw std::invalid_argument("kendall_distance: ranking is not a permutation");
    }
    pos_a[a.order[i]] = i;
    pos_b[b.order[i]] = i;
  }
  std::uint64_t discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((pos_a[i] < pos_a[j]) != (pos_b[i] < pos_b[j])) ++discordant;
    }
  }
  return discordant;
}

std::uint64_t total_kendall_distance(const PairwisePreference& pref,
                                     std::span<const std::size_t> order) {
  if (order.size() != pref.size()) {
    throw std::invalid_argument("total_kendall_distance: size mismatch");
  }
  std::uint64_t cost = 0;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      cost += pref.at(order[b], order[a]);
    }
  }
  return cost;
}

AggregatedRanking aggregate_count(const PairwisePreference& pref) {
  const std::size_t n = pref.size();
  AggregatedRanking result;
  result.scores.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::uint64_t row = 0;
    for (std::size_t k = 0; k < n; ++k) row += pref.at(j, k);
    result.scores[j] = static_cast<double>(row);
  }
  result.order.resize(n);
  std::iota(result.order.begin(), result.order.end(), std::size_t{0});
  std::stable_sort(result.order.begin(), result.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return result.scores[a] > result.scores[b];
                   });
  return result;
}

AggregatedRanking aggregate_count(std::span<const BaseRanking> rankings) {
  return aggregate_count(pairwise_counts(rankings));
}

// ---------------------------------------------------------------------------
// Exact Kemeny consensus.
//
// Appending item a to a partial order with remaining set S costs
// sum_{b in S, b != a} counts(b, a): a is placed before every remaining b and
// disagrees with exactly the rankings preferring b. The cost of an optimal
// arrangement of S therefore depends on S alone, which admits a
// subset-dynamic program over the 2^N remaining sets instead of scanning all
// N! permutations. Reconstruction picks the smallest feasible item at each
// position, giving the lexicographically smallest co-optimal permutation.
// ---------------------------------------------------------------------------

namespace {

AggregatedRanking kemeny_from_pref(const PairwisePreference& pref,
                                   std::size_t max_exact_n) {
  const std::size_t n = pref.size();
  if (n > max_exact_n) {
    throw CapacityError(
        "aggregate_kemeny_exact: gallery size " + std::to_string(n) +
        " exceeds the exact-solver cap " + std::to_string(max_exact_n) +
        "; use aggregate_count or aggregate_cemc instead");
  }
  if (n > 25) {  // subset table is 2^N entries
    throw CapacityError(
        "aggregate_kemeny_exact: exact solver supports at most 25 items");
  }

  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<std::uint64_t> best(full + 1, 0);

  // append_cost(a, mask) = sum over remaining b of counts(b, a)
  const auto append_cost = [&](std::size_t a, std::size_t mask) {
    std::uint64_t c = 0;
    std::size_t rest = mask & ~(std::size_t{1} << a);
    while (rest) {
      const std::size_t b = static_cast<std::size_t>(std::countr_zero(rest));
      rest &= rest - 1;
      c += pref.at(b, a);
    }
    return c;
  };

  for (std::size_t mask = 1; mask <= full; ++mask) {
    std::uint64_t m = std::numeric_limits<std::uint64_t>::max();
    std::size_t items = mask;
    while (items) {
      const std::size_t a = static_cast<std::size_t>(std::countr_zero(items));
      items &= items - 1;
      m = std::min(m, append_cost(a, mask) + best[mask & ~(std::size_t{1} << a)]);
    }
    best[mask] = m;
  }

  AggregatedRanking result;
  result.order.reserve(n);
  std::size_t mask = full;
  while (mask) {
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t bit = std::size_t{1} << a;
      if (!(mask & bit)) continue;
      if (append_cost(a, mask) + best[mask & ~bit] == best[mask]) {
        result.order.push_back(a);
        mask &= ~bit;
        break;
      }
    }
  }

  result.scores.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    result.scores[result.order[pos]] = static_cast<double>(n - pos);
  }
  return result;
}

}  // namespace

AggregatedRanking aggregate_kemeny_exact(const PairwisePreference& pref,
                                         std::size_t max_exact_n) {
  return kemeny_from_pref(pref, max_exact_n);
}

AggregatedRanking aggregate_kemeny_exact(std::span<const BaseRanking> rankings,
                                         std::size_t max_exact_n) {
  if (rankings.empty()) {
    throw std::invalid_argument("aggregate: ranking list must be nonempty");
  }
  if (rankings.front().order.size() > max_exact_n) {
    throw CapacityError(
        "aggregate_kemeny_exact: gallery size " +
        std::to_string(rankings.front().order.size()) +
        " exceeds the exact-solver cap " + std::to_string(max_exact_n) +
        "; use aggregate_count or aggregate_cemc instead");
  }
  return kemeny_from_pref(pairwise_counts(rankings), max_exact_n);
}

// ---------------------------------------------------------------------------
// Cross-Entropy Monte Carlo consensus search.
// ---------------------------------------------------------------------------

namespace detail {

void validate_cemc_config(const CEMCConfig& config) {
  if (config.samples < 1) {
    throw std::invalid_argument("CEMCConfig: samples must be >= 1");
  }
  if (!(config.elite_fraction > 0.0) || config.elite_fraction > 1.0) {
    throw std::invalid_argument("CEMCConfig: elite_fraction must be in (0, 1]");
  }
  if (!(config.alpha > 0.0) || config.alpha > 1.0) {
    throw std::invalid_argument("CEMCConfig: alpha must be in (0, 1]");
  }
  if (config.max_iters < 1) {
    throw std::invalid_argument("CEMCConfig: max_iters must be >= 1");
  }
  if (config.patience < 1) {
    throw std::invalid_argument("CEMCConfig: patience must be >= 1");
  }
}

std::size_t cemc_elite_count(const CEMCConfig& config) {
  const double raw =
      std::ceil(static_cast<double>(config.samples) * config.elite_fraction - 1e-9);
  const auto count = static_cast<std::size_t>(raw);
  return std::clamp<std::size_t>(count, 1, config.samples);
}

std::vector<std::size_t> sample_permutation(std::span<const double> position_probs,
                                            std::size_t n, SplitMix64& rng) {
  std::vector<std::size_t> order(n);
  std::vector<char> used(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const double* row = position_probs.data() + pos * n;
    double total = 0.0;
    for (std::size_t item = 0; item < n; ++item) {
      if (!used[item]) total += row[item];
    }
    std::size_t picked = n;
    if (total > 0.0) {
      const double u = rng.next_double() * total;
      double cum = 0.0;
      for (std::size_t item = 0; item < n; ++item) {
        if (used[item]) continue;
        cum += row[item];
        picked = item;  // last unused item wins if rounding spills past total
        if (cum > u) break;
      }
    } else {
      // Degenerate row: fall back to a uniform pick among the leftovers.
      std::size_t remaining = 0;
      for (std::size_t item = 0; item < n; ++item) remaining += !used[item];
      std::uint64_t k = rng.next_below(remaining);
      for (std::size_t item = 0; item < n; ++item) {
        if (used[item]) continue;
        if (k == 0) {
          picked = item;
          break;
        }
        --k;
      }
    }
    used[picked] = 1;
    order[pos] = picked;
  }
  return order;
}

void cemc_update_matrix(std::vector<double>& position_probs, std::size_t n,
                        std::span<const std::vector<std::size_t>> elites,
                        double alpha) {
  const double weight = 1.0 / static_cast<double>(elites.size());
  std::vector<double> freq(n * n, 0.0);
  for (const auto& order : elites) {
    for (std::size_t pos = 0; pos < n; ++pos) {
      freq[pos * n + order[pos]] += weight;
    }
  }
  for (std::size_t i = 0; i < n * n; ++i) {
    position_probs[i] = (1.0 - alpha) * position_probs[i] + alpha * freq[i];
  }
}

}  // namespace detail

AggregatedRanking aggregate_cemc(const PairwisePreference& pref,
                                 const CEMCConfig& config, std::uint64_t seed) {
  detail::validate_cemc_config(config);
  const std::size_t n = pref.size();

  // Initial candidate: the counting consensus. Tracking it as the first
  // "seen" permutation guarantees the search never returns anything worse.
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
    const std::int64_t num_samples = static_cast<std::int64_t>(config.samples);
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < num_samples; ++s) {
      SplitMix64 rng(derive_seed(seed, iter, static_cast<std::uint64_t>(s)));
      auto order = detail::sample_permutation(position_probs, n, rng);
      costs[static_cast<std::size_t>(s)] = total_kendall_distance(pref, order);
      orders[static_cast<std::size_t>(s)] = std::move(order);
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

AggregatedRanking aggregate_cemc(std::span<const BaseRanking> rankings,
                                 const CEMCConfig& config, std::uint64_t seed) {
  detail::validate_cemc_config(config);
  return aggregate_cemc(pairwise_counts(rankings), config, seed);
}

}  // namespace reid
