#pragma once

#include "reid/aggregate.hpp"
#include "reid/bound.hpp"
#include "reid/ranking.hpp"

// Plain single-threaded implementations of the OpenMP kernels. They are the
// reference the parallel versions are tested against (results must match
// bit for bit) and the baseline for the kernel benchmark.
namespace reid::serial {

std::vector<FrameGalleryDistances> distance_matrix(
    const VideoSequence& probe_seq, std::span<const VideoSequence> gallery,
    DistanceMode mode, std::size_t probe_index = 0);

std::vector<BaseRanking> all_base_rankings(const VideoSequence& probe_seq,
                                           std::span<const VideoSequence> gallery,
                                           DistanceMode mode);

PairwisePreference pairwise_counts(std::span<const BaseRanking> rankings);

BoundReport simulate_pairwise_error(const SyntheticRankerConfig& config);

AggregatedRanking aggregate_cemc(std::span<const BaseRanking> rankings,
                                 const CEMCConfig& config, std::uint64_t seed);

}  // namespace reid::serial
