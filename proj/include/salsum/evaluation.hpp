#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "salsum/color_features.hpp"
#include "salsum/error.hpp"
#include "salsum/ingestion.hpp"
#include "salsum/selection.hpp"

namespace salsum {

inline constexpr int kMatchHueBins = 16;

/// Row i = automatic frame, column j = ground-truth frame.
using DistanceMatrix = std::vector<std::vector<double>>;

struct MatchPair {
  int auto_index;
  int gt_index;
  double distance;
};

/// One-to-one greedy matching over admissible pairs (distance < delta) in
/// ascending distance, ties broken by (auto, gt) index.
inline std::vector<MatchPair> greedy_match(const DistanceMatrix& d, double delta) {
  std::vector<MatchPair> candidates;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d[i].size(); ++j)
      if (d[i][j] < delta) candidates.push_back({static_cast<int>(i), static_cast<int>(j), d[i][j]});
  std::sort(candidates.begin(), candidates.end(), [](const MatchPair& a, const MatchPair& b) {
    return std::tie(a.distance, a.auto_index, a.gt_index) < std::tie(b.distance, b.auto_index, b.gt_index);
  });
  const std::size_t n_gt = d.empty() ? 0 : d.front().size();
  std::vector<bool> auto_used(d.size(), false), gt_used(n_gt, false);
  std::vector<MatchPair> out;
  for (const auto& c : candidates) {
    if (auto_used[c.auto_index] || gt_used[c.gt_index]) continue;
    auto_used[c.auto_index] = gt_used[c.gt_index] = true;
    out.push_back(c);
  }
  return out;
}

namespace detail {

inline bool augment(int a, const DistanceMatrix& d, double delta, std::vector<int>& gt_owner,
                    std::vector<bool>& visited) {
  for (std::size_t j = 0; j < d[a].size(); ++j) {
    if (!(d[a][j] < delta) || visited[j]) continue;
    visited[j] = true;
    if (gt_owner[j] < 0 || augment(gt_owner[j], d, delta, gt_owner, visited)) {
      gt_owner[j] = a;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Greedy matching extended along augmenting paths, so the count is the
/// maximum number of disjoint admissible pairs.
inline int match_count_from_distances(const DistanceMatrix& d, double delta) {
  const std::size_t n_gt = d.empty() ? 0 : d.front().size();
  std::vector<int> gt_owner(n_gt, -1);
  std::vector<bool> auto_matched(d.size(), false);
  for (const auto& p : greedy_match(d, delta)) {
    gt_owner[p.gt_index] = p.auto_index;
    auto_matched[p.auto_index] = true;
  }
  for (std::size_t a = 0; a < d.size(); ++a) {
    if (auto_matched[a]) continue;
    std::vector<bool> visited(n_gt, false);
    if (detail::augment(static_cast<int>(a), d, delta, gt_owner, visited)) auto_matched[a] = true;
  }
  return static_cast<int>(std::count(auto_matched.begin(), auto_matched.end(), true));
}

inline DistanceMatrix match_distances(const std::vector<RgbImage>& auto_frames, const std::vector<RgbImage>& gt_frames) {
  std::vector<HueHistogram> ha, hg;
  for (const auto& f : auto_frames) ha.push_back(hue_histogram(f, kMatchHueBins));
  for (const auto& f : gt_frames) hg.push_back(hue_histogram(f, kMatchHueBins));
  DistanceMatrix d(ha.size(), std::vector<double>(hg.size(), 0.0));
  for (std::size_t i = 0; i < ha.size(); ++i)
    for (std::size_t j = 0; j < hg.size(); ++j) d[i][j] = histogram_dissimilarity(ha[i], hg[j]);
  return d;
}

inline int match_count(const std::vector<RgbImage>& auto_frames, const GroundTruthSet& gt, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw Error(ErrorCode::ConfigError, "evaluation", "match delta must lie in [0,1]");
  return match_count_from_distances(match_distances(auto_frames, gt.frames), delta);
}

inline double precision(int n_match, int n_candidate) {
  if (n_candidate < 1) throw Error(ErrorCode::ZeroCandidates, "evaluation", "no automatic keyframes");
  if (n_match < 0 || n_match > n_candidate)
    throw Error(ErrorCode::InvalidField, "evaluation", "n_match out of range for precision");
  return static_cast<double>(n_match) / n_candidate;
}

inline double recall(int n_match, int n_gt) {
  if (n_gt < 1) throw Error(ErrorCode::ZeroGroundTruth, "evaluation", "empty ground truth");
  if (n_match < 0 || n_match > n_gt) throw Error(ErrorCode::InvalidField, "evaluation", "n_match out of range for recall");
  return static_cast<double>(n_match) / n_gt;
}

inline double f_measure(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

struct UserScore {
  std::string user_id;
  int n_match = 0;
  int n_candidate = 0;
  int n_gt = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

struct EvalReport {
  std::string video_id;
  std::vector<UserScore> per_user;
  double mean_f = 0.0;
  std::string config_digest;
  std::string k_mode;
};

/// Scores one user's summary. An empty automatic summary scores zero.
inline UserScore evaluate_user(const std::vector<RgbImage>& auto_frames, const GroundTruthSet& gt, double delta) {
  UserScore s;
  s.user_id = gt.user_id;
  s.n_candidate = static_cast<int>(auto_frames.size());
  s.n_gt = static_cast<int>(gt.frames.size());
  if (s.n_gt < 1) throw Error(ErrorCode::ZeroGroundTruth, "evaluation", "user " + gt.user_id + " has no frames");
  if (s.n_candidate == 0) return s;
  s.n_match = match_count(auto_frames, gt, delta);
  s.precision = precision(s.n_match, s.n_candidate);
  s.recall = recall(s.n_match, s.n_gt);
  s.f_measure = f_measure(s.precision, s.recall);
  return s;
}

inline std::vector<RgbImage> keyframe_images(const KeyframeSet& keys, const FrameSequence& frames) {
  std::vector<RgbImage> out;
  for (int idx : keys.frame_indices) {
    auto it = std::find(frames.indices.begin(), frames.indices.end(), idx);
    if (it == frames.indices.end())
      throw Error(ErrorCode::InvalidField, "evaluation", "keyframe " + std::to_string(idx) + " not in sequence");
    out.push_back(frames.frames[static_cast<std::size_t>(it - frames.indices.begin())]);
  }
  return out;
}

inline double mean_f_of(const std::vector<UserScore>& users) {
  if (users.empty()) return 0.0;
  double s = 0.0;
  for (const auto& u : users) s += u.f_measure;
  return s / static_cast<double>(users.size());
}

inline EvalReport evaluate_video(const KeyframeSet& keys, const FrameSequence& frames,
                                 const std::vector<GroundTruthSet>& gts, double delta) {
  if (gts.empty()) throw Error(ErrorCode::ZeroGroundTruth, "evaluation", frames.video_id + ": no ground-truth sets");
  EvalReport report;
  report.video_id = frames.video_id;
  report.k_mode = "fixed";
  const auto images = keyframe_images(keys, frames);
  for (const auto& gt : gts) report.per_user.push_back(evaluate_user(images, gt, delta));
  report.mean_f = mean_f_of(report.per_user);
  return report;
}

}  // namespace salsum
