#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "salsum/color_features.hpp"
#include "salsum/error.hpp"
#include "salsum/image.hpp"
#include "salsum/ingestion.hpp"
#include "salsum/parallel.hpp"

namespace salsum {

struct LkParams {
  int window = 21;         // side length, odd
  double min_eigen = 1e-4;  // on A^T A / N
  int grid_stride = 4;

  void validate() const {
    if (window < 3 || window % 2 == 0)
      throw Error(ErrorCode::ConfigError, "optical_flow", "LK window must be odd and >= 3");
    if (grid_stride < 1) throw Error(ErrorCode::ConfigError, "optical_flow", "grid_stride must be >= 1");
    if (!(min_eigen >= 0.0)) throw Error(ErrorCode::ConfigError, "optical_flow", "min_eigen must be >= 0");
  }
};

/// Spatial derivatives of the first map and the temporal difference.
struct Gradients {
  ScalarGrid dx;
  ScalarGrid dy;
  ScalarGrid dt;
};

inline void require_same_shape(const ScalarGrid& a, const ScalarGrid& b, const char* what) {
  if (!a.same_shape(b))
    throw Error(ErrorCode::SizeMismatch, "optical_flow",
                std::string(what) + ": " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                    " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
}

/// Central differences, one-sided at the borders.
inline Gradients gradients(const SaliencyMap& map_t, const SaliencyMap& map_t1) {
  require_same_shape(map_t, map_t1, "gradients");
  const int w = map_t.width();
  const int h = map_t.height();
  Gradients g{ScalarGrid(w, h), ScalarGrid(w, h), ScalarGrid(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (w > 1) {
        if (x == 0) g.dx(x, y) = map_t(1, y) - map_t(0, y);
        else if (x == w - 1) g.dx(x, y) = map_t(x, y) - map_t(x - 1, y);
        else g.dx(x, y) = 0.5 * (map_t(x + 1, y) - map_t(x - 1, y));
      }
      if (h > 1) {
        if (y == 0) g.dy(x, y) = map_t(x, 1) - map_t(x, 0);
        else if (y == h - 1) g.dy(x, y) = map_t(x, y) - map_t(x, y - 1);
        else g.dy(x, y) = 0.5 * (map_t(x, y + 1) - map_t(x, y - 1));
      }
      g.dt(x, y) = map_t1(x, y) - map_t(x, y);
    }
  }
  return g;
}

struct FlowVector {
  double ux = 0.0;
  double uy = 0.0;
  bool valid = false;

  double magnitude() const { return std::sqrt(ux * ux + uy * uy); }
};

/// Smaller eigenvalue of the symmetric matrix [[a, b], [b, c]].
inline double min_eigenvalue(double a, double b, double c) {
  const double half_trace = 0.5 * (a + c);
  const double half_diff = 0.5 * (a - c);
  return half_trace - std::sqrt(half_diff * half_diff + b * b);
}

/// Least-squares flow for the window around (cx, cy): every window pixel
/// contributes one row dx*ux + dy*uy = -dt. The window is clipped at borders.
inline FlowVector lk_solve(const Gradients& g, int cx, int cy, const LkParams& params) {
  const int half = params.window / 2;
  const int x0 = std::max(0, cx - half);
  const int x1 = std::min(g.dx.width() - 1, cx + half);
  const int y0 = std::max(0, cy - half);
  const int y1 = std::min(g.dx.height() - 1, cy + half);
  double sxx = 0.0, sxy = 0.0, syy = 0.0, sxt = 0.0, syt = 0.0;
  int count = 0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double ix = g.dx(x, y);
      const double iy = g.dy(x, y);
      const double it = g.dt(x, y);
      sxx += ix * ix;
      sxy += ix * iy;
      syy += iy * iy;
      sxt += ix * it;
      syt += iy * it;
      ++count;
    }
  }
  FlowVector out;
  if (count == 0) return out;
  const double inv_n = 1.0 / count;
  if (min_eigenvalue(sxx * inv_n, sxy * inv_n, syy * inv_n) < params.min_eigen) return out;
  const double det = sxx * syy - sxy * sxy;
  if (!(std::abs(det) > 0.0)) return out;
  out.ux = (-syy * sxt + sxy * syt) / det;
  out.uy = (sxy * sxt - sxx * syt) / det;
  out.valid = std::isfinite(out.ux) && std::isfinite(out.uy);
  if (!out.valid) out.ux = out.uy = 0.0;
  return out;
}

struct FlowField {
  ScalarGrid ux;
  ScalarGrid uy;
  Grid<std::uint8_t> valid_mask;
  int grid_stride = 1;

  /// Magnitudes of the valid samples, in row-major order.
  std::vector<double> valid_magnitudes() const {
    std::vector<double> out;
    for (int y = 0; y < ux.height(); ++y)
      for (int x = 0; x < ux.width(); ++x)
        if (valid_mask(x, y)) out.push_back(std::hypot(ux(x, y), uy(x, y)));
    return out;
  }
  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto v : valid_mask.pixels()) n += v ? 1 : 0;
    return n;
  }
};

/// Sample coordinate of grid cell k along an axis.
inline int flow_sample_coord(int k, int stride) { return stride / 2 + k * stride; }

inline int flow_grid_extent(int pixels, int stride) {
  return pixels <= stride / 2 ? 0 : (pixels - stride / 2 + stride - 1) / stride;
}

inline FlowField flow_field(const SaliencyMap& map_t, const SaliencyMap& map_t1, const LkParams& params) {
  params.validate();
  const Gradients g = gradients(map_t, map_t1);
  const int gw = flow_grid_extent(map_t.width(), params.grid_stride);
  const int gh = flow_grid_extent(map_t.height(), params.grid_stride);
  FlowField f{ScalarGrid(gw, gh), ScalarGrid(gw, gh), Grid<std::uint8_t>(gw, gh, 0), params.grid_stride};
  for (int ky = 0; ky < gh; ++ky) {
    for (int kx = 0; kx < gw; ++kx) {
      const FlowVector v = lk_solve(g, flow_sample_coord(kx, params.grid_stride),
                                    flow_sample_coord(ky, params.grid_stride), params);
      f.ux(kx, ky) = v.ux;
      f.uy(kx, ky) = v.uy;
      f.valid_mask(kx, ky) = v.valid ? 1 : 0;
    }
  }
  return f;
}

/// Overlap of two maps: sum of pointwise minima over sum of pointwise maxima.
inline double saliency_iou(const SaliencyMap& a, const SaliencyMap& b) {
  require_same_shape(a, b, "saliency_iou");
  double inter = 0.0, uni = 0.0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    inter += std::min(pa[i], pb[i]);
    uni += std::max(pa[i], pb[i]);
  }
  return uni > 0.0 ? inter / uni : 1.0;
}

enum class TemporalNorm { iou_complement, iou_divide, none };

inline std::string to_string(TemporalNorm n) {
  switch (n) {
    case TemporalNorm::iou_complement: return "iou_complement";
    case TemporalNorm::iou_divide: return "iou_divide";
    case TemporalNorm::none: return "none";
  }
  return "none";
}

inline TemporalNorm parse_temporal_norm(std::string_view name) {
  if (name == "iou_complement" || name == "iou-complement") return TemporalNorm::iou_complement;
  if (name == "iou_divide" || name == "iou-divide") return TemporalNorm::iou_divide;
  if (name == "none") return TemporalNorm::none;
  throw Error(ErrorCode::ConfigError, "optical_flow", "unknown temporal norm '" + std::string(name) + "'");
}

/// Mean magnitude over valid samples; 0 when none is valid.
inline double mean_valid_magnitude(const FlowField& f) {
  const auto mags = f.valid_magnitudes();
  if (mags.empty()) return 0.0;
  double s = 0.0;
  for (double m : mags) s += m;
  return s / static_cast<double>(mags.size());
}

inline double combine_motion(double mean_magnitude, double iou, TemporalNorm norm) {
  switch (norm) {
    case TemporalNorm::iou_complement: return mean_magnitude * (1.0 - iou);
    case TemporalNorm::iou_divide: return mean_magnitude / (iou + 1e-6);
    case TemporalNorm::none: return mean_magnitude;
  }
  return mean_magnitude;
}

inline ScoreSeries temporal_score(const SaliencySequence& sal, const LkParams& params, TemporalNorm norm) {
  params.validate();
  if (sal.maps.size() < 2) throw Error(ErrorCode::TooFewFrames, "optical_flow", "temporal score needs >= 2 maps");
  ScoreSeries out;
  out.label = "flow_" + to_string(norm);
  out.pair_indices = consecutive_pairs(sal.indices);
  out.values.assign(sal.maps.size() - 1, 0.0);
  parallel_for(out.values.size(), [&](std::size_t i) {
    const FlowField f = flow_field(sal.maps[i], sal.maps[i + 1], params);
    out.values[i] = combine_motion(mean_valid_magnitude(f), saliency_iou(sal.maps[i], sal.maps[i + 1]), norm);
  });
  return out;
}

}  // namespace salsum
