#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "salsum/error.hpp"
#include "salsum/image.hpp"
#include "salsum/image_io.hpp"
#include "salsum/parallel.hpp"

namespace salsum {

namespace fs = std::filesystem;

struct VideoManifest {
  std::string video_id;
  fs::path frame_dir;
  std::optional<fs::path> saliency_dir;
  double fps = 0.0;
  int width = 0;
  int height = 0;
  std::vector<fs::path> gt_dirs;  // one per annotator
};

/// Sampled, timestamped frames of one video.
struct FrameSequence {
  std::string video_id;
  std::vector<RgbImage> frames;
  std::vector<int> indices;  // original frame numbers
  std::vector<fs::path> paths;
  int sample_stride = 1;
  double fps = 0.0;

  std::size_t size() const noexcept { return frames.size(); }
  double seconds_of(std::size_t position) const { return indices.at(position) / fps; }
};

struct SaliencySequence {
  std::string video_id;
  std::vector<SaliencyMap> maps;
  std::vector<int> indices;
  std::string provider;
};

namespace detail {

inline bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".pgm" || ext == ".ppm" ||
         ext == ".bmp";
}

/// Frame number carried by a filename: the last run of digits in the stem.
inline std::optional<int> index_from_filename(const fs::path& p) {
  const std::string stem = p.stem().string();
  auto end = stem.find_last_of("0123456789");
  if (end == std::string::npos) return std::nullopt;
  auto begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  return std::stoi(stem.substr(begin, end - begin + 1));
}

struct IndexedFile {
  int index;
  fs::path path;
};

/// Image files of a directory ordered by the frame number in their name.
inline std::vector<IndexedFile> list_indexed_images(const fs::path& dir, const std::string& module) {
  std::vector<IndexedFile> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file() || !is_image_file(entry.path())) continue;
    if (auto idx = index_from_filename(entry.path())) files.push_back({*idx, entry.path()});
  }
  if (ec) throw Error(ErrorCode::BadPath, module, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(), [](const IndexedFile& a, const IndexedFile& b) {
    return a.index != b.index ? a.index < b.index : a.path < b.path;
  });
  for (std::size_t i = 1; i < files.size(); ++i) {
    if (files[i].index == files[i - 1].index)
      throw Error(ErrorCode::InvalidField, module,
                  "duplicate frame index " + std::to_string(files[i].index) + " in " + dir.string());
  }
  return files;
}

inline std::string frame_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d", index);
  return buf;
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

inline void require_dir(const fs::path& dir, const std::string& field) {
  if (!fs::is_directory(dir))
    throw Error(ErrorCode::BadPath, "ingestion", field + ": not a directory: " + dir.string());
}

}  // namespace detail

/// Validates one manifest object. Relative paths resolve against base_dir.
inline VideoManifest manifest_from_json(const nlohmann::json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidField, "ingestion", "manifest must be a JSON object");
  for (const char* key : {"video_id", "frame_dir", "fps", "width", "height", "gt_dirs"}) {
    if (!doc.contains(key)) throw Error(ErrorCode::MissingField, "ingestion", key);
  }
  VideoManifest m;
  try {
    m.video_id = doc.at("video_id").get<std::string>();
    m.fps = doc.at("fps").get<double>();
    m.width = doc.at("width").get<int>();
    m.height = doc.at("height").get<int>();
    m.frame_dir = detail::resolve(base_dir, doc.at("frame_dir").get<std::string>());
    if (doc.contains("saliency_dir") && !doc.at("saliency_dir").is_null())
      m.saliency_dir = detail::resolve(base_dir, doc.at("saliency_dir").get<std::string>());
    for (const auto& g : doc.at("gt_dirs")) m.gt_dirs.push_back(detail::resolve(base_dir, g.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidField, "ingestion", std::string("malformed manifest field: ") + e.what());
  }
  if (!(m.fps > 0.0) || !std::isfinite(m.fps))
    throw Error(ErrorCode::NonPositiveFps, "ingestion", "fps must be > 0 (got " + std::to_string(m.fps) + ")");
  if (m.width <= 0) throw Error(ErrorCode::InvalidField, "ingestion", "width must be positive");
  if (m.height <= 0) throw Error(ErrorCode::InvalidField, "ingestion", "height must be positive");
  detail::require_dir(m.frame_dir, "frame_dir");
  if (m.saliency_dir) detail::require_dir(*m.saliency_dir, "saliency_dir");
  std::set<fs::path> seen;
  for (const auto& g : m.gt_dirs) {
    detail::require_dir(g, "gt_dirs");
    if (!seen.insert(fs::weakly_canonical(g)).second)
      throw Error(ErrorCode::BadPath, "ingestion", "gt_dirs: duplicate entry " + g.string());
  }
  return m;
}

inline nlohmann::json read_json_file(const fs::path& path, const std::string& module) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadPath, module, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidField, module, path.string() + ": " + e.what());
  }
}

inline VideoManifest load_manifest(const fs::path& path) {
  return manifest_from_json(read_json_file(path, "ingestion"), path.parent_path());
}

/// A dataset manifest is an array of video manifests; a single object is
/// accepted as a one-video dataset.
inline std::vector<VideoManifest> load_dataset_manifest(const fs::path& path) {
  const auto doc = read_json_file(path, "ingestion");
  std::vector<VideoManifest> out;
  if (doc.is_array()) {
    for (const auto& item : doc) out.push_back(manifest_from_json(item, path.parent_path()));
  } else {
    out.push_back(manifest_from_json(doc, path.parent_path()));
  }
  return out;
}

inline nlohmann::json manifest_to_json(const VideoManifest& m) {
  nlohmann::json doc{{"video_id", m.video_id},
                     {"frame_dir", m.frame_dir.generic_string()},
                     {"fps", m.fps},
                     {"width", m.width},
                     {"height", m.height},
                     {"gt_dirs", nlohmann::json::array()}};
  if (m.saliency_dir) doc["saliency_dir"] = m.saliency_dir->generic_string();
  for (const auto& g : m.gt_dirs) doc["gt_dirs"].push_back(g.generic_string());
  return doc;
}

/// Source-frame step for a sampling period, never below one frame.
inline int sampling_step(double fps, double stride_seconds) {
  return std::max(1, static_cast<int>(std::lround(fps * stride_seconds)));
}

/// Positions (into the ordered source listing) kept by temporal sampling.
inline std::vector<std::size_t> sample_positions(std::size_t source_count, int step) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < source_count; p += static_cast<std::size_t>(step)) out.push_back(p);
  return out;
}

inline FrameSequence load_frames(const VideoManifest& manifest, double stride_seconds) {
  if (!(stride_seconds > 0.0))
    throw Error(ErrorCode::InvalidField, "ingestion", "stride_seconds must be > 0");
  const auto files = detail::list_indexed_images(manifest.frame_dir, "ingestion");
  FrameSequence seq;
  seq.video_id = manifest.video_id;
  seq.fps = manifest.fps;
  seq.sample_stride = sampling_step(manifest.fps, stride_seconds);
  const auto keep = sample_positions(files.size(), seq.sample_stride);
  if (keep.size() < 2)
    throw Error(ErrorCode::TooFewFrames, "ingestion",
                manifest.video_id + ": " + std::to_string(keep.size()) + " frame(s) after sampling " +
                    manifest.frame_dir.string());
  seq.frames.resize(keep.size());
  for (std::size_t p : keep) {
    seq.indices.push_back(files[p].index);
    seq.paths.push_back(files[p].path);
  }
  parallel_for(keep.size(), [&](std::size_t i) { seq.frames[i] = io::read_rgb(seq.paths[i]); });
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.frames[i].width() != manifest.width || seq.frames[i].height() != manifest.height)
      throw Error(ErrorCode::SizeMismatch, "ingestion",
                  seq.paths[i].string() + " is " + std::to_string(seq.frames[i].width()) + "x" +
                      std::to_string(seq.frames[i].height()) + ", manifest says " +
                      std::to_string(manifest.width) + "x" + std::to_string(manifest.height));
  }
  return seq;
}

/// Path of the interchange map for a frame index, preferring PGM over PNG.
inline std::optional<fs::path> find_saliency_file(const fs::path& dir, int index) {
  const std::string stem = detail::frame_stem(index);
  for (const char* ext : {".pgm", ".png"}) {
    fs::path p = dir / (stem + ext);
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

inline SaliencyMap saliency_from_levels(const Grid<std::uint8_t>& levels) {
  SaliencyMap map(levels.width(), levels.height());
  auto src = levels.pixels();
  auto dst = map.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] / 255.0;
  return map;
}

inline SaliencySequence load_saliency(const VideoManifest& manifest, const FrameSequence& frames) {
  if (!manifest.saliency_dir)
    throw Error(ErrorCode::MissingMap, "ingestion",
                manifest.video_id + ": no saliency_dir in manifest (frame " +
                    std::to_string(frames.indices.empty() ? 0 : frames.indices.front()) + ")");
  SaliencySequence seq;
  seq.video_id = manifest.video_id;
  seq.indices = frames.indices;
  seq.provider = "precomputed";
  seq.maps.resize(frames.size());
  std::vector<fs::path> paths(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    auto p = find_saliency_file(*manifest.saliency_dir, frames.indices[i]);
    if (!p)
      throw Error(ErrorCode::MissingMap, "ingestion",
                  "frame " + std::to_string(frames.indices[i]) + " has no map in " +
                      manifest.saliency_dir->string());
    paths[i] = *p;
  }
  parallel_for(frames.size(), [&](std::size_t i) { seq.maps[i] = saliency_from_levels(io::read_gray8(paths[i])); });
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!seq.maps[i].same_shape(frames.frames[i]))
      throw Error(ErrorCode::SizeMismatch, "ingestion",
                  paths[i].string() + " is " + std::to_string(seq.maps[i].width()) + "x" +
                      std::to_string(seq.maps[i].height()) + ", frame is " +
                      std::to_string(frames.frames[i].width()) + "x" + std::to_string(frames.frames[i].height()));
  }
  return seq;
}

struct GroundTruthSet {
  std::string user_id;
  std::vector<int> frame_indices;
  std::vector<RgbImage> frames;
};

/// One annotator's summary: a directory of keyframe images named by frame number.
inline GroundTruthSet load_ground_truth(const fs::path& dir) {
  const auto files = detail::list_indexed_images(dir, "ingestion");
  if (files.empty()) throw Error(ErrorCode::ZeroGroundTruth, "ingestion", "no keyframes in " + dir.string());
  GroundTruthSet gt;
  gt.user_id = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  gt.frames.resize(files.size());
  for (const auto& f : files) gt.frame_indices.push_back(f.index);
  parallel_for(files.size(), [&](std::size_t i) { gt.frames[i] = io::read_rgb(files[i].path); });
  return gt;
}

}  // namespace salsum
