#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "salsum/error.hpp"
#include "salsum/image.hpp"
#include "salsum/ingestion.hpp"
#include "salsum/parallel.hpp"

namespace salsum {

/// One value per consecutive frame pair.
struct ScoreSeries {
  std::vector<double> values;
  std::vector<std::pair<int, int>> pair_indices;
  std::string label;

  std::size_t size() const noexcept { return values.size(); }
};

inline std::vector<std::pair<int, int>> consecutive_pairs(const std::vector<int>& indices) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i + 1 < indices.size(); ++i) out.emplace_back(indices[i], indices[i + 1]);
  return out;
}

struct Hsv {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;
  double v = 0.0;
};

/// Hexcone conversion. Achromatic pixels get H = 0.
inline Hsv rgb_to_hsv(Rgb p) {
  const double r = p.r / 255.0;
  const double g = p.g / 255.0;
  const double b = p.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double chroma = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? chroma / mx : 0.0;
  if (chroma <= 0.0) return out;
  double h;
  if (mx == r) {
    h = 60.0 * std::fmod((g - b) / chroma, 6.0);
  } else if (mx == g) {
    h = 60.0 * ((b - r) / chroma + 2.0);
  } else {
    h = 60.0 * ((r - g) / chroma + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

inline Grid<Hsv> rgb_to_hsv(const RgbImage& img) {
  Grid<Hsv> out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = rgb_to_hsv(src[i]);
  return out;
}

inline constexpr std::array<int, 5> kAllowedHueBins{4, 8, 16, 32, 64};

inline bool valid_bin_count(int n) {
  return std::find(kAllowedHueBins.begin(), kAllowedHueBins.end(), n) != kAllowedHueBins.end();
}

struct HueHistogram {
  std::vector<double> bins;

  int n() const noexcept { return static_cast<int>(bins.size()); }
};

inline int hue_bin(double hue, int n) {
  const int b = static_cast<int>(std::floor(hue / (360.0 / n)));
  return std::clamp(b, 0, n - 1);
}

inline HueHistogram hue_histogram(const RgbImage& frame, int n) {
  if (!valid_bin_count(n))
    throw Error(ErrorCode::BadBinCount, "color_features", "hue bin count " + std::to_string(n) +
                                                              " not in {4,8,16,32,64}");
  HueHistogram hist{std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  for (const Rgb p : frame.pixels()) hist.bins[static_cast<std::size_t>(hue_bin(rgb_to_hsv(p).h, n))] += 1.0;
  if (!frame.empty()) {
    const double total = static_cast<double>(frame.size());
    for (double& b : hist.bins) b /= total;
  }
  return hist;
}

/// Normalized histogram-intersection dissimilarity: one minus the mean of
/// min/max over the bins occupied in either histogram. Bins empty in both
/// carry no evidence and are left out; two empty histograms are identical.
inline double histogram_dissimilarity(const HueHistogram& a, const HueHistogram& b) {
  if (a.n() != b.n() || a.n() == 0)
    throw Error(ErrorCode::BinMismatch, "color_features",
                "histograms have " + std::to_string(a.n()) + " and " + std::to_string(b.n()) + " bins");
  double ratio_sum = 0.0;
  int occupied = 0;
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    const double hi = std::max(a.bins[i], b.bins[i]);
    if (!(hi > 0.0)) continue;
    ratio_sum += std::min(a.bins[i], b.bins[i]) / hi;
    ++occupied;
  }
  if (occupied == 0) return 0.0;
  return std::clamp(1.0 - ratio_sum / occupied, 0.0, 1.0);
}

inline std::string hue_label(int n) { return "hue" + std::to_string(n); }

inline ScoreSeries static_score(const FrameSequence& frames, int n) {
  if (frames.size() < 2) throw Error(ErrorCode::TooFewFrames, "color_features", "static score needs >= 2 frames");
  if (!valid_bin_count(n))
    throw Error(ErrorCode::BadBinCount, "color_features", "hue bin count " + std::to_string(n));
  std::vector<HueHistogram> hists(frames.size());
  parallel_for(frames.size(), [&](std::size_t i) { hists[i] = hue_histogram(frames.frames[i], n); });
  ScoreSeries out;
  out.label = hue_label(n);
  out.pair_indices = consecutive_pairs(frames.indices);
  for (std::size_t i = 0; i + 1 < hists.size(); ++i)
    out.values.push_back(histogram_dissimilarity(hists[i], hists[i + 1]));
  return out;
}

}  // namespace salsum
