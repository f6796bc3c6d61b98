#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "salsum/error.hpp"
#include "salsum/fusion.hpp"
#include "salsum/ingestion.hpp"

namespace salsum {

struct Minimum {
  int pair_index = 0;
  double value = 0.0;
  double prominence = 0.0;
};

/// j is a minimum iff v[j] < v[j-1] and v[j] <= v[j+1]; endpoints never are.
/// Prominence is the lower of the two highest points reached before the
/// signal drops below v[j] on either side (or hits the end), minus v[j].
inline std::vector<Minimum> local_minima(const std::vector<double>& v) {
  if (v.size() < 3)
    throw Error(ErrorCode::SeriesTooShort, "selection", "need >= 3 samples, got " + std::to_string(v.size()));
  std::vector<Minimum> out;
  const std::size_t n = v.size();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (!(v[j] < v[j - 1] && v[j] <= v[j + 1])) continue;
    double left_peak = v[j];
    for (std::size_t k = j; k-- > 0;) {
      if (v[k] < v[j]) break;
      left_peak = std::max(left_peak, v[k]);
    }
    double right_peak = v[j];
    for (std::size_t k = j + 1; k < n; ++k) {
      if (v[k] < v[j]) break;
      right_peak = std::max(right_peak, v[k]);
    }
    out.push_back({static_cast<int>(j), v[j], std::min(left_peak, right_peak) - v[j]});
  }
  return out;
}

inline std::vector<Minimum> local_minima(const FinalScore& score) { return local_minima(score.values.values); }

inline std::vector<Minimum> filter_by_prominence(const std::vector<Minimum>& minima, double threshold) {
  std::vector<Minimum> out;
  std::copy_if(minima.begin(), minima.end(), std::back_inserter(out),
               [&](const Minimum& m) { return m.prominence >= threshold; });
  return out;
}

struct KeyframeSet {
  std::vector<int> frame_indices;
  std::vector<int> pair_indices;
  std::vector<double> scores;
  std::vector<double> prominences;
  int k_requested = 0;

  std::size_t size() const noexcept { return frame_indices.size(); }
  bool short_of_request() const noexcept { return static_cast<int>(size()) < k_requested; }
};

/// Candidate order: prominence descending, then lower value, then earlier index.
/// Prominences equal to within 1e-9 of the largest one are treated as ties.
inline std::vector<Minimum> rank_minima(std::vector<Minimum> minima) {
  double pmax = 0.0;
  for (const auto& m : minima) pmax = std::max(pmax, m.prominence);
  const double unit = pmax > 0.0 ? pmax * 1e-9 : 1.0;
  auto key = [&](const Minimum& m) { return std::llround(m.prominence / unit); };
  std::sort(minima.begin(), minima.end(), [&](const Minimum& a, const Minimum& b) {
    const auto ka = key(a), kb = key(b);
    if (ka != kb) return ka > kb;
    if (a.value != b.value) return a.value < b.value;
    return a.pair_index < b.pair_index;
  });
  return minima;
}

/// Greedy pick of the k best-ranked minima, skipping any closer than
/// min_separation seconds to one already chosen. Pair j maps to frame j+1.
inline KeyframeSet select_keyframes(const std::vector<Minimum>& minima, int k, double min_separation,
                                    const FrameSequence& frames) {
  if (k < 1) throw Error(ErrorCode::ConfigError, "selection", "k must be >= 1");
  KeyframeSet out;
  out.k_requested = k;
  std::vector<Minimum> accepted;
  std::vector<double> times;
  for (const auto& m : rank_minima(minima)) {
    if (static_cast<int>(accepted.size()) >= k) break;
    const auto pos = static_cast<std::size_t>(m.pair_index) + 1;
    if (pos >= frames.indices.size())
      throw Error(ErrorCode::InvalidField, "selection", "pair index " + std::to_string(m.pair_index) + " out of range");
    const double t = frames.seconds_of(pos);
    const bool too_close = std::any_of(times.begin(), times.end(),
                                       [&](double other) { return std::abs(other - t) < min_separation; });
    if (too_close) continue;
    accepted.push_back(m);
    times.push_back(t);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Minimum& a, const Minimum& b) { return a.pair_index < b.pair_index; });
  for (const auto& m : accepted) {
    out.pair_indices.push_back(m.pair_index);
    out.frame_indices.push_back(frames.indices[static_cast<std::size_t>(m.pair_index) + 1]);
    out.scores.push_back(m.value);
    out.prominences.push_back(m.prominence);
  }
  return out;
}

struct SelectionParams {
  int k = 5;
  double min_separation = 1.0;  // seconds
  double prominence_min = 0.05;  // fraction of the final score range
};

/// Minima of the smoothed final score, noise valleys removed, then selected.
inline KeyframeSet select_from_score(const FinalScore& score, const SelectionParams& params,
                                     const FrameSequence& frames) {
  const auto& v = score.values.values;
  if (v.size() < 3) {
    KeyframeSet empty;
    empty.k_requested = params.k;
    return empty;
  }
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double threshold = params.prominence_min * (*hi - *lo);
  return select_keyframes(filter_by_prominence(local_minima(v), threshold), params.k, params.min_separation,
                          frames);
}

}  // namespace salsum
