#pragma once

#include <span>
#include <vector>

#include "reid/core.hpp"

namespace reid {

/// How a probe frame's distance to a gallery *video* is reduced over the
/// gallery frames. Min is the default; mean is an ablation alternative.
enum class DistanceMode { kMin, kMean };

DistanceMode parse_distance_mode(const std::string& text);
std::string to_string(DistanceMode mode);

/// Distances of one probe frame to every gallery video.
struct FrameGalleryDistances {
  std::size_t probe_index = 0;
  std::size_t frame_index = 0;
  std::vector<double> distances;  // entry j = distance to gallery video j
};

/// Gallery indices sorted most-similar first; always a permutation of 0..N-1.
struct BaseRanking {
  std::vector<std::size_t> order;

  friend bool operator==(const BaseRanking&, const BaseRanking&) = default;
};

/// L2 distance. Throws std::invalid_argument on dimension mismatch.
double euclidean(const FrameEmbedding& a, const FrameEmbedding& b);

/// Reduces per-frame Euclidean distances over the gallery video's frames.
double frame_to_video_distance(const FrameEmbedding& probe_frame,
                               const VideoSequence& gallery_seq,
                               DistanceMode mode);

/// Stable argsort by ascending distance; ties break toward the lower gallery
/// index, which makes rankings deterministic and order-invariant.
BaseRanking ranking_from_distances(std::span<const double> distances);

BaseRanking base_ranking(const FrameEmbedding& probe_frame,
                         std::span<const VideoSequence> gallery,
                         DistanceMode mode);

/// Distances of every probe frame against every gallery video. Parallelized
/// over (frame, gallery video) pairs; each pair's reduction runs in a fixed
/// order, so results are bit-identical to sequential execution.
std::vector<FrameGalleryDistances> distance_matrix(
    const VideoSequence& probe_seq, std::span<const VideoSequence> gallery,
    DistanceMode mode, std::size_t probe_index = 0);

/// One base ranking per probe frame, in frame order.
std::vector<BaseRanking> all_base_rankings(const VideoSequence& probe_seq,
                                           std::span<const VideoSequence> gallery,
                                           DistanceMode mode);

}  // namespace reid
