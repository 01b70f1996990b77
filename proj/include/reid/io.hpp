#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "reid/core.hpp"

namespace reid {

/// One video collection on disk: a manifest.json next to one `.femb`
/// embedding file per video (paths relative to the manifest's directory).
struct ManifestEntry {
  std::string identity;
  std::string camera;
  std::size_t frames = 0;
  std::string file;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::string version = "1";
  std::size_t dim = 0;
  std::vector<ManifestEntry> videos;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Manifest paths of a dataset written as two collections.
struct DatasetPaths {
  std::filesystem::path probe_manifest;
  std::filesystem::path gallery_manifest;
};

/// Writes one `.femb` file per video plus `manifest.json` into `directory`
/// (created if missing). Values are stored as 32-bit floats; writing fails if
/// a value is not representable.
Manifest write_collection(const std::vector<VideoSequence>& videos,
                          const std::filesystem::path& directory);

/// Loads and fully validates a collection; errors name the offending file.
std::vector<VideoSequence> read_collection(const std::filesystem::path& manifest_path);

Manifest read_manifest(const std::filesystem::path& manifest_path);

/// Writes the probe and gallery collections under `directory`/probe and
/// `directory`/gallery.
DatasetPaths write_dataset(const Dataset& dataset,
                           const std::filesystem::path& directory);

Dataset read_dataset(const std::filesystem::path& probe_manifest,
                     const std::filesystem::path& gallery_manifest);

/// Convenience for the layout produced by write_dataset.
Dataset read_dataset(const std::filesystem::path& dataset_directory);

// --------------------------------------------------------------------------
// Synthetic datasets
// --------------------------------------------------------------------------

/// Generator layout: one centroid per identity on a sphere of radius
/// `identity_separation`, a per-camera offset of that centroid, and isotropic
/// per-frame noise of scale `frame_noise`. Camera 0 sequences form the probe
/// set and camera 1 sequences the gallery. Values are quantized to 32-bit
/// floats so datasets survive disk round trips exactly.
struct SyntheticSpec {
  std::size_t persons = 2;
  std::size_t cameras = 2;  // fixed at 2
  std::size_t frames_per_video = 1;
  std::size_t dim = 1;
  double identity_separation = 1.0;
  double frame_noise = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Ratio of the camera offset magnitude to the identity separation.
inline constexpr double kCameraShiftRatio = 0.3;

Dataset generate_synthetic(const SyntheticSpec& spec);

// --------------------------------------------------------------------------
// Rankings output
// --------------------------------------------------------------------------

struct GalleryRef {
  std::string identity;
  std::string camera;

  friend bool operator==(const GalleryRef&, const GalleryRef&) = default;
};

struct QueryRanking {
  std::string identity;
  std::string camera;
  std::vector<std::size_t> order;  // gallery indices, best first
  std::vector<double> scores;      // aligned with `order`

  friend bool operator==(const QueryRanking&, const QueryRanking&) = default;
};

/// Consensus rankings of a full run plus everything needed to reproduce it:
/// aggregation method, its parameters, distance mode, sample rate, and seed.
struct RankingsDocument {
  std::string method;         // count | kemeny | cemc
  std::string distance_mode;  // min | mean
  std::string sample_rate;    // "1", "10", ..., or "inf"
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
  std::vector<GalleryRef> gallery;
  std::vector<QueryRanking> queries;

  friend bool operator==(const RankingsDocument&, const RankingsDocument&) = default;
};

void write_rankings(const std::filesystem::path& path, const RankingsDocument& doc);
RankingsDocument read_rankings(const std::filesystem::path& path);

}  // namespace reid
