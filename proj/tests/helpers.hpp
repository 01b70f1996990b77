#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "reid/aggregate.hpp"
#include "reid/core.hpp"
#include "reid/metrics.hpp"
#include "reid/ranking.hpp"
#include "reid/rng.hpp"

namespace testutil {

inline reid::BaseRanking random_ranking(std::size_t n, reid::SplitMix64& rng) {
  reid::BaseRanking r;
  r.order.resize(n);
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(r.order[i - 1], r.order[rng.next_below(i)]);
  }
  return r;
}

inline std::vector<reid::BaseRanking> random_rankings(std::size_t n, std::size_t t,
                                                      reid::SplitMix64& rng) {
  std::vector<reid::BaseRanking> out;
  out.reserve(t);
  for (std::size_t i = 0; i < t; ++i) out.push_back(random_ranking(n, rng));
  return out;
}

inline reid::VideoSequence random_sequence(const std::string& identity,
                                           const std::string& camera,
                                           std::size_t frames, std::size_t dim,
                                           reid::SplitMix64& rng) {
  std::vector<reid::FrameEmbedding> fs;
  fs.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.next_gaussian();
    fs.emplace_back(std::move(v));
  }
  return reid::VideoSequence(identity, camera, std::move(fs));
}

inline reid::Dataset random_dataset(std::size_t persons, std::size_t frames,
                                    std::size_t dim, reid::SplitMix64& rng) {
  std::vector<reid::VideoSequence> probe, gallery;
  for (std::size_t p = 0; p < persons; ++p) {
    const std::string id = "p" + std::to_string(p);
    probe.push_back(random_sequence(id, "cam0", frames, dim, rng));
    gallery.push_back(random_sequence(id, "cam1", frames, dim, rng));
  }
  return reid::Dataset(std::move(probe), std::move(gallery));
}

// Number of discordant pairs, written independently of the library
// implementation so it can serve as an oracle.
inline std::uint64_t kendall_oracle(const std::vector<std::size_t>& a,
                                    const std::vector<std::size_t>& b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> pa(n), pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[a[i]] = i;
    pb[b[i]] = i;
  }
  std::uint64_t bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool da = pa[i] < pa[j];
      const bool db = pb[i] < pb[j];
      if (da != db) ++bad;
    }
  }
  return bad;
}

inline std::uint64_t total_distance_oracle(
    const std::vector<std::size_t>& order,
    const std::vector<reid::BaseRanking>& rankings) {
  std::uint64_t sum = 0;
  for (const auto& r : rankings) sum += kendall_oracle(order, r.order);
  return sum;
}

struct EnumeratedOptimum {
  std::vector<std::size_t> order;  // lexicographically smallest optimum
  std::uint64_t cost = 0;
};

// Exhaustive N! search for the Kemeny consensus.
inline EnumeratedOptimum enumerate_kemeny(const std::vector<reid::BaseRanking>& rankings) {
  const std::size_t n = rankings.front().order.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  EnumeratedOptimum best;
  best.cost = ~std::uint64_t{0};
  do {
    const std::uint64_t cost = total_distance_oracle(perm, rankings);
    if (cost < best.cost) {
      best.cost = cost;
      best.order = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline bool is_permutation_of_n(const std::vector<std::size_t>& order) {
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) return false;
  }
  return true;
}

}  // namespace testutil
