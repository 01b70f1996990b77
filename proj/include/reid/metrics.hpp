#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "reid/aggregate.hpp"

namespace reid {

/// Gallery indices holding a true match, one set per query.
using GroundTruth = std::vector<std::set<std::size_t>>;

struct EvaluationResult {
  std::map<std::size_t, double> cmc;  // rank cutoff -> proportion in [0, 1]
  double map_score = 0.0;
  std::vector<double> per_query_ap;
  std::size_t num_queries = 0;
};

/// Cumulative Match Characteristic: value at cutoff k is the fraction of
/// queries whose best true match sits at 1-based position <= k.
std::map<std::size_t, double> cmc(std::span<const AggregatedRanking> rankings,
                                  const GroundTruth& truth,
                                  std::span<const std::size_t> cutoffs);

/// Mean over queries of Average Precision; per query, AP averages the
/// precision at each relevant item's position over the number of relevant
/// items (standard uninterpolated retrieval AP).
double mean_average_precision(std::span<const AggregatedRanking> rankings,
                              const GroundTruth& truth);

/// CMC and mAP in one pass. Per-query work runs in parallel; the mean uses a
/// fixed summation order so results do not depend on thread count.
EvaluationResult evaluate(std::span<const AggregatedRanking> rankings,
                          const GroundTruth& truth,
                          std::span<const std::size_t> cutoffs);

}  // namespace reid
