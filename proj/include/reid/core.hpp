#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "reid/rng.hpp"

namespace reid {

/// Thrown when a request exceeds a configured solver capacity (e.g. the exact
/// Kemeny gallery-size cap).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown on file/parse problems; the message names the offending path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// D-dimensional feature vector of a single frame. Values are checked to be
/// finite once at construction so every downstream distance is total.
class FrameEmbedding {
 public:
  explicit FrameEmbedding(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t dim() const { return values_.size(); }

  friend bool operator==(const FrameEmbedding&, const FrameEmbedding&) = default;

 private:
  std::vector<double> values_;
};

/// An identity/camera-labelled sequence of frame embeddings. Immutable after
/// construction; at least one frame, all frames of identical dimension.
class VideoSequence {
 public:
  VideoSequence(std::string identity, std::string camera,
                std::vector<FrameEmbedding> frames);

  const std::string& identity() const { return identity_; }
  const std::string& camera() const { return camera_; }
  const std::vector<FrameEmbedding>& frames() const { return frames_; }
  std::size_t length() const { return frames_.size(); }
  std::size_t dim() const { return frames_.front().dim(); }

  friend bool operator==(const VideoSequence&, const VideoSequence&) = default;

 private:
  std::string identity_;
  std::string camera_;
  std::vector<FrameEmbedding> frames_;
};

/// Probe and gallery collections sharing one embedding dimension. Gallery
/// identities are unique (one sequence per gallery slot) and every probe
/// identity must appear in the gallery so evaluation is well-defined.
class Dataset {
 public:
  Dataset(std::vector<VideoSequence> probe, std::vector<VideoSequence> gallery);

  const std::vector<VideoSequence>& probe() const { return probe_; }
  const std::vector<VideoSequence>& gallery() const { return gallery_; }
  std::size_t dim() const { return probe_.front().dim(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<VideoSequence> probe_;
  std::vector<VideoSequence> gallery_;
};

/// Keep-one-in-K subsampling rate; the infinite rate keeps only the first
/// frame (single-image matching).
class SampleRate {
 public:
  static SampleRate every(std::size_t k);
  static SampleRate infinite();
  /// Accepts "inf" (case-insensitive) or a positive integer.
  static SampleRate parse(const std::string& text);

  bool is_infinite() const { return stride_ == 0; }
  std::size_t stride() const;
  std::string str() const;

  friend bool operator==(const SampleRate&, const SampleRate&) = default;

 private:
  explicit SampleRate(std::size_t stride) : stride_(stride) {}
  std::size_t stride_;  // 0 encodes infinite
};

/// Uniformly random permutation of the frames (Fisher-Yates over the seeded
/// generator). Identity and camera labels are preserved; input is unchanged.
VideoSequence shuffle(const VideoSequence& seq, std::uint64_t seed);

/// Keeps frames 0, K, 2K, ... (first frame only for the infinite rate), so
/// the output length is ceil(T/K).
VideoSequence subsample(const VideoSequence& seq, SampleRate rate);

}  // namespace reid
