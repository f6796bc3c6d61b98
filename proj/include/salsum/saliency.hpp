#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "salsum/error.hpp"
#include "salsum/image.hpp"
#include "salsum/ingestion.hpp"
#include "salsum/parallel.hpp"

namespace salsum {

enum class SaliencyKind { precomputed, spectral_residual };

inline std::string to_string(SaliencyKind k) {
  return k == SaliencyKind::precomputed ? "precomputed" : "spectral_residual";
}

inline SaliencyKind parse_saliency_kind(std::string_view name) {
  if (name == "precomputed") return SaliencyKind::precomputed;
  if (name == "spectral_residual" || name == "spectral-residual") return SaliencyKind::spectral_residual;
  throw Error(ErrorCode::ConfigError, "saliency", "unknown saliency provider '" + std::string(name) + "'");
}

struct SaliencyProviderSpec {
  SaliencyKind kind = SaliencyKind::spectral_residual;
  double sigma = 2.5;  // fallback blur, pixels

  void validate() const {
    if (!(sigma > 0.0)) throw Error(ErrorCode::ConfigError, "saliency", "sigma must be > 0");
  }
};

inline void normalize_min_max_inplace(SaliencyMap& map) {
  auto px = map.pixels();
  if (px.empty()) return;
  const auto [lo, hi] = std::minmax_element(px.begin(), px.end());
  const double mn = *lo;
  const double range = *hi - mn;
  if (!(range > 1e-12 * std::max(1.0, std::abs(*hi)))) {
    std::fill(px.begin(), px.end(), 0.0);
    return;
  }
  for (double& v : px) v = (v - mn) / range;
}

namespace detail {

inline double luma(Rgb p) { return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b; }

/// 3x3 mean with periodic borders; the spectrum wraps around.
inline cv::Mat wrapped_mean3(const cv::Mat& src) {
  cv::Mat out(src.size(), CV_64F);
  const int rows = src.rows;
  const int cols = src.cols;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int yy = (y + dy + rows) % rows;
        for (int dx = -1; dx <= 1; ++dx) acc += src.at<double>(yy, (x + dx + cols) % cols);
      }
      out.at<double>(y, x) = acc / 9.0;
    }
  }
  return out;
}

}  // namespace detail

/// Classical spectral-residual saliency: the log-amplitude spectrum minus its
/// local average, recombined with the original phase.
inline SaliencyMap spectral_residual_saliency(const RgbImage& frame, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::ConfigError, "saliency", "sigma must be > 0");
  const int w = frame.width();
  const int h = frame.height();
  SaliencyMap out(w, h, 0.0);
  if (frame.empty()) return out;

  cv::Mat gray(h, w, CV_64F);
  double gmin = 1e300, gmax = -1e300;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = detail::luma(frame(x, y));
      gray.at<double>(y, x) = v;
      gmin = std::min(gmin, v);
      gmax = std::max(gmax, v);
    }
  }
  if (gmax - gmin <= 1e-9) return out;

  cv::Mat spectrum;
  cv::dft(gray, spectrum, cv::DFT_COMPLEX_OUTPUT);
  cv::Mat planes[2];
  cv::split(spectrum, planes);
  cv::Mat amplitude, phase;
  cv::cartToPolar(planes[0], planes[1], amplitude, phase);

  double amp_max = 0.0;
  cv::minMaxLoc(amplitude, nullptr, &amp_max);
  // Spectral nulls (sharp edges) would otherwise dominate the residual.
  const double floor = amp_max * 1e-3;
  cv::Mat log_amp(amplitude.size(), CV_64F);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) log_amp.at<double>(y, x) = std::log(std::max(amplitude.at<double>(y, x), floor));

  cv::Mat residual = log_amp - detail::wrapped_mean3(log_amp);
  cv::Mat residual_amp;
  cv::exp(residual, residual_amp);
  cv::polarToCart(residual_amp, phase, planes[0], planes[1]);
  cv::merge(planes, 2, spectrum);

  cv::Mat back;
  cv::dft(spectrum, back, cv::DFT_INVERSE | cv::DFT_SCALE | cv::DFT_COMPLEX_OUTPUT);
  cv::split(back, planes);
  cv::Mat energy = planes[0].mul(planes[0]) + planes[1].mul(planes[1]);
  cv::GaussianBlur(energy, energy, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT);

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(x, y) = energy.at<double>(y, x);
  normalize_min_max_inplace(out);
  return out;
}

inline SaliencySequence provide_saliency(const SaliencyProviderSpec& spec, const FrameSequence& frames,
                                         const VideoManifest& manifest) {
  spec.validate();
  if (spec.kind == SaliencyKind::precomputed) return load_saliency(manifest, frames);
  SaliencySequence seq;
  seq.video_id = frames.video_id;
  seq.indices = frames.indices;
  seq.provider = to_string(spec.kind);
  seq.maps.resize(frames.size());
  parallel_for(frames.size(),
               [&](std::size_t i) { seq.maps[i] = spectral_residual_saliency(frames.frames[i], spec.sigma); });
  return seq;
}

}  // namespace salsum
