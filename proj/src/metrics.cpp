#include "reid/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace reid {

namespace {

struct QueryStats {
  // 1-based position of the best true match; SIZE_MAX when the order never
  // reaches a relevant index (malformed order), so it never counts as a hit.
  std::size_t best_match_pos = std::numeric_limits<std::size_t>::max();
  double average_precision = 0.0;
};

std::size_t validate_inputs(std::span<const AggregatedRanking> rankings,
                            const GroundTruth& truth) {
  if (rankings.empty()) {
    throw std::invalid_argument("metrics: no queries");
  }
  if (truth.size() != rankings.size()) {
    throw std::invalid_argument("metrics: need exactly one truth set per query");
  }
  const std::size_t n = rankings.front().order.size();
  for (const auto& r : rankings) {
    if (r.order.size() != n) {
      throw std::invalid_argument("metrics: rankings have mixed gallery sizes");
    }
  }
  for (const auto& t : truth) {
    if (t.empty()) {
      throw std::invalid_argument("metrics: truth set is empty");
    }
    for (std::size_t idx : t) {
      if (idx >= n) {
        throw std::invalid_argument("metrics: truth index out of gallery range");
      }
    }
  }
  return n;
}

QueryStats query_stats(const AggregatedRanking& ranking,
                       const std::set<std::size_t>& relevant) {
  QueryStats stats;
  std::size_t hits = 0;
  double precision_sum = 0.0;
  for (std::size_t pos = 0; pos < ranking.order.size(); ++pos) {
    if (relevant.contains(ranking.order[pos])) {
      ++hits;
      precision_sum +=
          static_cast<double>(hits) / static_cast<double>(pos + 1);
      if (hits == 1) stats.best_match_pos = pos + 1;
    }
  }
  stats.average_precision = precision_sum / static_cast<double>(relevant.size());
  return stats;
}

}  // namespace

EvaluationResult evaluate(std::span<const AggregatedRanking> rankings,
                          const GroundTruth& truth,
                          std::span<const std::size_t> cutoffs) {
  const std::size_t n = validate_inputs(rankings, truth);
  for (std::size_t k : cutoffs) {
    if (k == 0 || k > n) {
      throw std::invalid_argument("metrics: cutoff must be in 1..N");
    }
  }

  const std::size_t q = rankings.size();
  std::vector<QueryStats> stats(q);
  const std::int64_t num_queries = static_cast<std::int64_t>(q);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < num_queries; ++i) {
    stats[static_cast<std::size_t>(i)] =
        query_stats(rankings[static_cast<std::size_t>(i)],
                    truth[static_cast<std::size_t>(i)]);
  }

  EvaluationResult result;
  result.num_queries = q;
  result.per_query_ap.resize(q);
  double ap_sum = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    result.per_query_ap[i] = stats[i].average_precision;
    ap_sum += stats[i].average_precision;
  }
  result.map_score = ap_sum / static_cast<double>(q);

  for (std::size_t k : cutoffs) {
    std::size_t within = 0;
    for (const auto& s : stats) within += (s.best_match_pos <= k);
    result.cmc[k] = static_cast<double>(within) / static_cast<double>(q);
  }
  return result;
}

std::map<std::size_t, double> cmc(std::span<const AggregatedRanking> rankings,
                                  const GroundTruth& truth,
                                  std::span<const std::size_t> cutoffs) {
  return evaluate(rankings, truth, cutoffs).cmc;
}

double mean_average_precision(std::span<const AggregatedRanking> rankings,
                              const GroundTruth& truth) {
  return evaluate(rankings, truth, {}).map_score;
}

}  // namespace reid
