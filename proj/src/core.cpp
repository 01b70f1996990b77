#include "reid/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace reid {

FrameEmbedding::FrameEmbedding(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw std::invalid_argument("FrameEmbedding: dimension must be >= 1");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("FrameEmbedding: values must be finite");
    }
  }
}

VideoSequence::VideoSequence(std::string identity, std::string camera,
                             std::vector<FrameEmbedding> frames)
    : identity_(std::move(identity)),
      camera_(std::move(camera)),
      frames_(std::move(frames)) {
  if (frames_.empty()) {
    throw std::invalid_argument("VideoSequence: needs at least one frame");
  }
  const std::size_t d = frames_.front().dim();
  for (const auto& f : frames_) {
    if (f.dim() != d) {
      throw std::invalid_argument("VideoSequence: frames have mixed dimensions");
    }
  }
}

Dataset::Dataset(std::vector<VideoSequence> probe,
                 std::vector<VideoSequence> gallery)
    : probe_(std::move(probe)), gallery_(std::move(gallery)) {
  if (probe_.empty() || gallery_.empty()) {
    throw std::invalid_argument("Dataset: probe and gallery must be nonempty");
  }
  const std::size_t d = probe_.front().dim();
  for (const auto& s : probe_) {
    if (s.dim() != d) {
      throw std::invalid_argument("Dataset: probe dimension mismatch");
    }
  }
  std::unordered_set<std::string> gallery_ids;
  for (const auto& s : gallery_) {
    if (s.dim() != d) {
      throw std::invalid_argument("Dataset: gallery dimension mismatch");
    }
    if (!gallery_ids.insert(s.identity()).second) {
      throw std::invalid_argument("Dataset: duplicate gallery identity '" +
                                  s.identity() + "'");
    }
  }
  for (const auto& s : probe_) {
    if (!gallery_ids.contains(s.identity())) {
      throw std::invalid_argument("Dataset: probe identity '" + s.identity() +
                                  "' missing from gallery");
    }
  }
}

SampleRate SampleRate::every(std::size_t k) {
  if (k == 0) {
    throw std::invalid_argument("SampleRate: K must be a positive integer");
  }
  return SampleRate(k);
}

SampleRate SampleRate::infinite() { return SampleRate(0); }

SampleRate SampleRate::parse(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinite") return infinite();
  std::size_t pos = 0;
  unsigned long long k = 0;
  try {
    k = std::stoull(lower, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("SampleRate: cannot parse '" + text + "'");
  }
  if (pos != lower.size()) {
    throw std::invalid_argument("SampleRate: cannot parse '" + text + "'");
  }
  return every(static_cast<std::size_t>(k));
}

std::size_t SampleRate::stride() const {
  if (is_infinite()) {
    throw std::logic_error("SampleRate: infinite rate has no stride");
  }
  return stride_;
}

std::string SampleRate::str() const {
  return is_infinite() ? "inf" : std::to_string(stride_);
}

VideoSequence shuffle(const VideoSequence& seq, std::uint64_t seed) {
  std::vector<FrameEmbedding> frames = seq.frames();
  SplitMix64 rng(seed);
  for (std::size_t i = frames.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(frames[i - 1], frames[j]);
  }
  return VideoSequence(seq.identity(), seq.camera(), std::move(frames));
}

VideoSequence subsample(const VideoSequence& seq, SampleRate rate) {
  const auto& in = seq.frames();
  std::vector<FrameEmbedding> kept;
  if (rate.is_infinite()) {
    kept.push_back(in.front());
  } else {
    const std::size_t k = rate.stride();
    kept.reserve((in.size() + k - 1) / k);
    for (std::size_t t = 0; t < in.size(); t += k) kept.push_back(in[t]);
  }
  return VideoSequence(seq.identity(), seq.camera(), std::move(kept));
}

}  // namespace reid
