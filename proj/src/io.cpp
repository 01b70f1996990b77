#include "reid/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace reid {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'M', 'B'};
constexpr std::uint16_t kFembVersion = 1;

void append_u16le(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void append_u32le(std::string& buf, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    buf.push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

void append_f32le(std::string& buf, float v) {
  append_u32le(buf, std::bit_cast<std::uint32_t>(v));
}

std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

float read_f32le(const unsigned char* p) {
  return std::bit_cast<float>(read_u32le(p));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw IoError("read failure: " + path.string());
  }
  return std::move(buf).str();
}

void spit(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open file for writing: " + path.string());
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out.good()) {
    throw IoError("write failure: " + path.string());
  }
}

void write_embedding_file(const fs::path& path, const VideoSequence& seq) {
  std::string buf;
  buf.reserve(14 + seq.length() * seq.dim() * 4);
  buf.append(kMagic, 4);
  append_u16le(buf, kFembVersion);
  append_u32le(buf, static_cast<std::uint32_t>(seq.length()));
  append_u32le(buf, static_cast<std::uint32_t>(seq.dim()));
  for (const auto& frame : seq.frames()) {
    for (double v : frame.values()) {
      const float f = static_cast<float>(v);
      if (!std::isfinite(f)) {
        throw IoError("value not representable as 32-bit float while writing " +
                      path.string());
      }
      append_f32le(buf, f);
    }
  }
  spit(path, buf);
}

VideoSequence read_embedding_file(const fs::path& path, const ManifestEntry& entry,
                                  std::size_t expected_dim) {
  const std::string data = slurp(path);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  if (data.size() < 14) {
    throw IoError("truncated header in " + path.string());
  }
  if (std::memcmp(data.data(), kMagic, 4) != 0) {
    throw IoError("bad magic bytes in " + path.string());
  }
  const std::uint16_t version = read_u16le(p + 4);
  if (version != kFembVersion) {
    throw IoError("unsupported format version " + std::to_string(version) +
                  " in " + path.string());
  }
  const std::uint32_t frames = read_u32le(p + 6);
  const std::uint32_t dim = read_u32le(p + 10);
  if (frames != entry.frames) {
    throw IoError("frame count mismatch in " + path.string() + ": header says " +
                  std::to_string(frames) + ", manifest says " +
                  std::to_string(entry.frames));
  }
  if (dim != expected_dim) {
    throw IoError("dimension mismatch in " + path.string() + ": header says " +
                  std::to_string(dim) + ", manifest says " +
                  std::to_string(expected_dim));
  }
  const std::size_t expected_bytes =
      14 + static_cast<std::size_t>(frames) * dim * 4;
  if (data.size() < expected_bytes) {
    throw IoError("truncated payload in " + path.string() + ": expected " +
                  std::to_string(expected_bytes) + " bytes, found " +
                  std::to_string(data.size()));
  }
  if (data.size() > expected_bytes) {
    throw IoError("trailing bytes in " + path.string());
  }

  std::vector<FrameEmbedding> out;
  out.reserve(frames);
  const unsigned char* cursor = p + 14;
  for (std::uint32_t t = 0; t < frames; ++t) {
    std::vector<double> values(dim);
    for (std::uint32_t d = 0; d < dim; ++d, cursor += 4) {
      const float f = read_f32le(cursor);
      if (!std::isfinite(f)) {
        throw IoError("non-finite value in " + path.string());
      }
      values[d] = static_cast<double>(f);
    }
    out.emplace_back(std::move(values));
  }
  return VideoSequence(entry.identity, entry.camera, std::move(out));
}

json manifest_to_json(const Manifest& manifest) {
  json videos = json::array();
  for (const auto& v : manifest.videos) {
    videos.push_back({{"identity", v.identity},
                      {"camera", v.camera},
                      {"frames", v.frames},
                      {"file", v.file}});
  }
  return json{{"version", manifest.version},
              {"dim", manifest.dim},
              {"videos", videos}};
}

json parse_json_file(const fs::path& path) {
  const std::string text = slurp(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw IoError("invalid JSON in " + path.string());
  }
  return doc;
}

Manifest manifest_from_json(const json& doc, const fs::path& path) {
  try {
    Manifest manifest;
    manifest.version = doc.at("version").get<std::string>();
    manifest.dim = doc.at("dim").get<std::size_t>();
    for (const auto& v : doc.at("videos")) {
      ManifestEntry entry;
      entry.identity = v.at("identity").get<std::string>();
      entry.camera = v.at("camera").get<std::string>();
      entry.frames = v.at("frames").get<std::size_t>();
      entry.file = v.at("file").get<std::string>();
      manifest.videos.push_back(std::move(entry));
    }
    return manifest;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace

Manifest write_collection(const std::vector<VideoSequence>& videos,
                          const fs::path& directory) {
  if (videos.empty()) {
    throw std::invalid_argument("write_collection: no videos");
  }
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw IoError("cannot create directory " + directory.string() + ": " +
                  ec.message());
  }

  Manifest manifest;
  manifest.dim = videos.front().dim();
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const auto& seq = videos[i];
    if (seq.dim() != manifest.dim) {
      throw std::invalid_argument("write_collection: mixed dimensions");
    }
    char name[32];
    std::snprintf(name, sizeof(name), "video_%05zu.femb", i);
    write_embedding_file(directory / name, seq);
    manifest.videos.push_back(
        {seq.identity(), seq.camera(), seq.length(), name});
  }

  spit(directory / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
  return manifest;
}

Manifest read_manifest(const fs::path& manifest_path) {
  return manifest_from_json(parse_json_file(manifest_path), manifest_path);
}

std::vector<VideoSequence> read_collection(const fs::path& manifest_path) {
  const Manifest manifest = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  std::vector<VideoSequence> videos;
  videos.reserve(manifest.videos.size());
  for (const auto& entry : manifest.videos) {
    videos.push_back(
        read_embedding_file(base / entry.file, entry, manifest.dim));
  }
  return videos;
}

DatasetPaths write_dataset(const Dataset& dataset, const fs::path& directory) {
  write_collection(dataset.probe(), directory / "probe");
  write_collection(dataset.gallery(), directory / "gallery");
  return {directory / "probe" / "manifest.json",
          directory / "gallery" / "manifest.json"};
}

Dataset read_dataset(const fs::path& probe_manifest,
                     const fs::path& gallery_manifest) {
  return Dataset(read_collection(probe_manifest),
                 read_collection(gallery_manifest));
}

Dataset read_dataset(const fs::path& dataset_directory) {
  return read_dataset(dataset_directory / "probe" / "manifest.json",
                      dataset_directory / "gallery" / "manifest.json");
}

// --------------------------------------------------------------------------
// Synthetic datasets
// --------------------------------------------------------------------------

void SyntheticSpec::validate() const {
  if (persons < 2) {
    throw std::invalid_argument("SyntheticSpec: persons must be >= 2");
  }
  if (cameras != 2) {
    throw std::invalid_argument("SyntheticSpec: exactly 2 cameras supported");
  }
  if (frames_per_video < 1 || dim < 1) {
    throw std::invalid_argument("SyntheticSpec: frames and dim must be >= 1");
  }
  if (!(identity_separation >= 0.0) || !(frame_noise >= 0.0)) {
    throw std::invalid_argument(
        "SyntheticSpec: separation and noise must be nonnegative");
  }
}

namespace {

// Uniform direction scaled to `radius`; always consumes D gaussians so the
// stream layout is independent of the radius.
std::vector<double> random_point_on_sphere(std::size_t dim, double radius,
                                           SplitMix64& rng) {
  std::vector<double> v(dim);
  double norm_sq = 0.0;
  for (auto& x : v) {
    x = rng.next_gaussian();
    norm_sq += x * x;
  }
  if (norm_sq == 0.0) {
    v[0] = 1.0;
    norm_sq = 1.0;
  }
  const double scale = radius / std::sqrt(norm_sq);
  for (auto& x : v) x *= scale;
  return v;
}

double quantize_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);

  std::vector<VideoSequence> probe;
  std::vector<VideoSequence> gallery;
  probe.reserve(spec.persons);
  gallery.reserve(spec.persons);

  for (std::size_t p = 0; p < spec.persons; ++p) {
    const auto centroid =
        random_point_on_sphere(spec.dim, spec.identity_separation, rng);
    char identity[16];
    std::snprintf(identity, sizeof(identity), "id%04zu", p);

    for (std::size_t cam = 0; cam < spec.cameras; ++cam) {
      const auto shift = random_point_on_sphere(
          spec.dim, kCameraShiftRatio * spec.identity_separation, rng);
      std::vector<FrameEmbedding> frames;
      frames.reserve(spec.frames_per_video);
      for (std::size_t t = 0; t < spec.frames_per_video; ++t) {
        std::vector<double> values(spec.dim);
        for (std::size_t d = 0; d < spec.dim; ++d) {
          values[d] = quantize_f32(centroid[d] + shift[d] +
                                   spec.frame_noise * rng.next_gaussian());
        }
        frames.emplace_back(std::move(values));
      }
      auto seq = VideoSequence(identity, cam == 0 ? "cam0" : "cam1",
                               std::move(frames));
      (cam == 0 ? probe : gallery).push_back(std::move(seq));
    }
  }
  return Dataset(std::move(probe), std::move(gallery));
}

// --------------------------------------------------------------------------
// Rankings output
// --------------------------------------------------------------------------

void write_rankings(const fs::path& path, const RankingsDocument& doc) {
  json gallery = json::array();
  for (const auto& g : doc.gallery) {
    gallery.push_back({{"identity", g.identity}, {"camera", g.camera}});
  }
  json queries = json::array();
  for (const auto& q : doc.queries) {
    queries.push_back({{"identity", q.identity},
                       {"camera", q.camera},
                       {"order", q.order},
                       {"scores", q.scores}});
  }
  const json out{{"format", "reid-rankings"},
                 {"version", 1},
                 {"method", doc.method},
                 {"distance_mode", doc.distance_mode},
                 {"sample_rate", doc.sample_rate},
                 {"seed", doc.seed},
                 {"params", doc.params},
                 {"gallery", gallery},
                 {"queries", queries}};
  spit(path, out.dump(2) + "\n");
}

RankingsDocument read_rankings(const fs::path& path) {
  const json doc = parse_json_file(path);
  try {
    if (doc.at("format").get<std::string>() != "reid-rankings") {
      throw IoError("not a rankings file: " + path.string());
    }
    RankingsDocument out;
    out.method = doc.at("method").get<std::string>();
    out.distance_mode = doc.at("distance_mode").get<std::string>();
    out.sample_rate = doc.at("sample_rate").get<std::string>();
    out.seed = doc.at("seed").get<std::uint64_t>();
    out.params = doc.at("params").get<std::map<std::string, double>>();
    for (const auto& g : doc.at("gallery")) {
      out.gallery.push_back({g.at("identity").get<std::string>(),
                             g.at("camera").get<std::string>()});
    }
    for (const auto& q : doc.at("queries")) {
      QueryRanking query;
      query.identity = q.at("identity").get<std::string>();
      query.camera = q.at("camera").get<std::string>();
      query.order = q.at("order").get<std::vector<std::size_t>>();
      query.scores = q.at("scores").get<std::vector<double>>();
      out.queries.push_back(std::move(query));
    }
    return out;
  } catch (const json::exception& e) {
    throw IoError("malformed rankings file " + path.string() + ": " + e.what());
  }
}

}  // namespace reid
