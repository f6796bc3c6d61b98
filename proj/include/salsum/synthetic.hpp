#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "salsum/image.hpp"
#include "salsum/image_io.hpp"
#include "salsum/ingestion.hpp"

namespace salsum::synthetic {

namespace fs = std::filesystem;

/// Scenes of solid colour, each with a bright blob that sweeps across the
/// frame quickly near the scene boundaries and comes to rest mid-scene.
struct VideoSpec {
  std::string video_id = "synthetic";
  int width = 160;
  int height = 120;
  double fps = 5.0;
  double scene_seconds = 8.0;
  std::vector<Rgb> scene_colors{{220, 30, 30}, {30, 200, 40}, {40, 60, 220}};
  double blob_sigma = 9.0;   // pixels
  double blob_travel = 6.0;  // pixels from rest position at scene edges
  int gt_users = 3;
};

struct Video {
  VideoSpec spec;
  std::vector<RgbImage> frames;
  std::vector<SaliencyMap> saliency;  // ideal attention: the blob itself
  std::vector<int> scene_of_frame;

  int frames_per_scene() const { return static_cast<int>(std::lround(spec.fps * spec.scene_seconds)); }
  /// First frame of each scene.
  std::vector<int> change_points() const {
    std::vector<int> out;
    for (std::size_t s = 0; s < spec.scene_colors.size(); ++s) out.push_back(static_cast<int>(s) * frames_per_scene());
    return out;
  }
  int scene_center(int scene) const { return scene * frames_per_scene() + frames_per_scene() / 2; }
};

inline Video generate(const VideoSpec& spec) {
  Video v;
  v.spec = spec;
  const int per_scene = v.frames_per_scene();
  const int total = per_scene * static_cast<int>(spec.scene_colors.size());
  for (int f = 0; f < total; ++f) {
    const int scene = f / per_scene;
    const double tau = ((f % per_scene) + 0.5) / per_scene * 2.0 - 1.0;
    const double offset = spec.blob_travel * tau * std::abs(tau);
    const double cx = spec.width / 2.0 + offset;
    const double cy = spec.height / 2.0 + 0.5 * offset;
    const Rgb bg = spec.scene_colors[static_cast<std::size_t>(scene)];
    RgbImage img(spec.width, spec.height);
    SaliencyMap sal(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double alpha = std::exp(-r2 / (2.0 * spec.blob_sigma * spec.blob_sigma));
        auto mix = [&](std::uint8_t c) {
          return static_cast<std::uint8_t>(std::lround(c * (1.0 - alpha) + 255.0 * alpha));
        };
        img(x, y) = Rgb{mix(bg.r), mix(bg.g), mix(bg.b)};
        sal(x, y) = alpha;
      }
    }
    v.frames.push_back(std::move(img));
    v.saliency.push_back(std::move(sal));
    v.scene_of_frame.push_back(scene);
  }
  return v;
}

inline Grid<std::uint8_t> quantize(const SaliencyMap& map) {
  Grid<std::uint8_t> out(map.width(), map.height());
  auto src = map.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<std::uint8_t>(std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0));
  return out;
}

/// Writes frames/, gt/user*/, optionally saliency/, and manifest.json under
/// root/<video_id>. Returns the manifest JSON with paths relative to root.
inline nlohmann::json write_video(const Video& v, const fs::path& root, bool with_saliency) {
  const fs::path dir = root / v.spec.video_id;
  fs::create_directories(dir / "frames");
  for (std::size_t f = 0; f < v.frames.size(); ++f)
    io::write_rgb(dir / "frames" / (detail::frame_stem(static_cast<int>(f)) + ".png"), v.frames[f]);
  if (with_saliency) {
    fs::create_directories(dir / "saliency");
    for (std::size_t f = 0; f < v.saliency.size(); ++f)
      io::write_gray8(dir / "saliency" / (detail::frame_stem(static_cast<int>(f)) + ".pgm"), quantize(v.saliency[f]));
  }
  nlohmann::json gt_dirs = nlohmann::json::array();
  const int scenes = static_cast<int>(v.spec.scene_colors.size());
  for (int u = 0; u < v.spec.gt_users; ++u) {
    const std::string name = "user" + std::to_string(u + 1);
    fs::create_directories(dir / "gt" / name);
    for (int s = 0; s < scenes; ++s) {
      // Annotators agree on the scene but not on the exact frame.
      const int f = std::clamp(v.scene_center(s) + (u - v.spec.gt_users / 2), s * v.frames_per_scene(),
                               (s + 1) * v.frames_per_scene() - 1);
      io::write_rgb(dir / "gt" / name / (detail::frame_stem(f) + ".png"), v.frames[static_cast<std::size_t>(f)]);
    }
    gt_dirs.push_back((fs::path(v.spec.video_id) / "gt" / name).generic_string());
  }
  nlohmann::json manifest{{"video_id", v.spec.video_id},
                          {"frame_dir", (fs::path(v.spec.video_id) / "frames").generic_string()},
                          {"fps", v.spec.fps},
                          {"width", v.spec.width},
                          {"height", v.spec.height},
                          {"gt_dirs", gt_dirs}};
  if (with_saliency) manifest["saliency_dir"] = (fs::path(v.spec.video_id) / "saliency").generic_string();
  std::ofstream(root / (v.spec.video_id + ".json")) << manifest.dump(2) << "\n";
  return manifest;
}

/// Palette rotated per video so that different videos differ in colour.
inline std::vector<Rgb> rotated_palette(int video, int scenes) {
  static const std::vector<Rgb> palette{{220, 30, 30},  {30, 200, 40},  {40, 60, 220},
                                        {230, 200, 20}, {150, 40, 190}, {20, 190, 200}};
  std::vector<Rgb> out;
  for (int s = 0; s < scenes; ++s) out.push_back(palette[static_cast<std::size_t>(video + s) % palette.size()]);
  return out;
}

struct DatasetSpec {
  int videos = 1;
  int scenes = 3;
  VideoSpec base;
  bool with_saliency = false;
};

/// Writes every video plus dataset.json (an array of manifests) under root.
inline fs::path write_dataset(const DatasetSpec& spec, const fs::path& root) {
  fs::create_directories(root);
  nlohmann::json dataset = nlohmann::json::array();
  for (int i = 0; i < spec.videos; ++i) {
    VideoSpec vs = spec.base;
    char id[32];
    std::snprintf(id, sizeof id, "syn%03d", i + 1);
    vs.video_id = spec.videos == 1 && !spec.base.video_id.empty() ? spec.base.video_id : id;
    vs.scene_colors = rotated_palette(i, spec.scenes);
    dataset.push_back(write_video(generate(vs), root, spec.with_saliency));
  }
  const fs::path out = root / "dataset.json";
  std::ofstream(out) << dataset.dump(2) << "\n";
  return out;
}

}  // namespace salsum::synthetic
