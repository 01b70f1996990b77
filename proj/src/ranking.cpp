#include "reid/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace reid {

DistanceMode parse_distance_mode(const std::string& text) {
  if (text == "min") return DistanceMode::kMin;
  if (text == "mean") return DistanceMode::kMean;
  throw std::invalid_argument("distance mode must be 'min' or 'mean', got '" +
                              text + "'");
}

std::string to_string(DistanceMode mode) {
  return mode == DistanceMode::kMin ? "min" : "mean";
}

double euclidean(const FrameEmbedding& a, const FrameEmbedding& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("euclidean: dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
  }
  const auto& av = a.values();
  const auto& bv = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double frame_to_video_distance(const FrameEmbedding& probe_frame,
                               const VideoSequence& gallery_seq,
                               DistanceMode mode) {
  const auto& frames = gallery_seq.frames();
  if (mode == DistanceMode::kMin) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : frames) best = std::min(best, euclidean(probe_frame, g));
    return best;
  }
  double sum = 0.0;
  for (const auto& g : frames) sum += euclidean(probe_frame, g);
  return sum / static_cast<double>(frames.size());
}

BaseRanking ranking_from_distances(std::span<const double> distances) {
  BaseRanking r;
  r.order.resize(distances.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return distances[a] < distances[b];
                   });
  return r;
}

namespace {

void check_gallery(const std::size_t probe_dim,
                   std::span<const VideoSequence> gallery) {
  if (gallery.empty()) {
    throw std::invalid_argument("ranking: gallery must be nonempty");
  }
  for (const auto& g : gallery) {
    if (g.dim() != probe_dim) {
      throw std::invalid_argument("ranking: gallery dimension mismatch (" +
                                  std::to_string(g.dim()) + " vs probe " +
                                  std::to_string(probe_dim) + ")");
    }
  }
}

}  // namespace

BaseRanking base_ranking(const FrameEmbedding& probe_frame,
                         std::span<const VideoSequence> gallery,
                         DistanceMode mode) {
  check_gallery(probe_frame.dim(), gallery);
  std::vector<double> d(gallery.size());
  for (std::size_t j = 0; j < gallery.size(); ++j) {
    d[j] = frame_to_video_distance(probe_frame, gallery[j], mode);
  }
  return ranking_from_distances(d);
}

std::vector<FrameGalleryDistances> distance_matrix(
    const VideoSequence& probe_seq, std::span<const VideoSequence> gallery,
    DistanceMode mode, std::size_t probe_index) {
  check_gallery(probe_seq.dim(), gallery);

  const std::int64_t num_frames = static_cast<std::int64_t>(probe_seq.length());
  const std::int64_t num_gallery = static_cast<std::int64_t>(gallery.size());

  std::vector<FrameGalleryDistances> out(probe_seq.length());
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t].probe_index = probe_index;
    out[t].frame_index = t;
    out[t].distances.resize(gallery.size());
  }

  // Dimensions were validated above; the loop body cannot throw.
#pragma omp parallel for collapse(2) schedule(static)
  for (std::int64_t t = 0; t < num_frames; ++t) {
    for (std::int64_t j = 0; j < num_gallery; ++j) {
      out[static_cast<std::size_t>(t)].distances[static_cast<std::size_t>(j)] =
          frame_to_video_distance(probe_seq.frames()[static_cast<std::size_t>(t)],
                                  gallery[static_cast<std::size_t>(j)], mode);
    }
  }
  return out;
}

std::vector<BaseRanking> all_base_rankings(const VideoSequence& probe_seq,
                                           std::span<const VideoSequence> gallery,
                                           DistanceMode mode) {
  const auto dm = distance_matrix(probe_seq, gallery, mode);
  std::vector<BaseRanking> rankings(dm.size());
  const std::int64_t num_frames = static_cast<std::int64_t>(dm.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < num_frames; ++t) {
    rankings[static_cast<std::size_t>(t)] =
        ranking_from_distances(dm[static_cast<std::size_t>(t)].distances);
  }
  return rankings;
}

}  // namespace reid
