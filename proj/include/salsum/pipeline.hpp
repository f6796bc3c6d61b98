#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "salsum/color_features.hpp"
#include "salsum/error.hpp"
#include "salsum/evaluation.hpp"
#include "salsum/fusion.hpp"
#include "salsum/ingestion.hpp"
#include "salsum/optical_flow.hpp"
#include "salsum/parallel.hpp"
#include "salsum/saliency.hpp"
#include "salsum/selection.hpp"

namespace salsum {

inline constexpr int kSchemaVersion = 1;

enum class KMode { per_user, fixed };

inline std::string to_string(KMode m) { return m == KMode::per_user ? "per-user" : "fixed"; }

inline KMode parse_k_mode(std::string_view s) {
  if (s == "per-user" || s == "per_user") return KMode::per_user;
  if (s == "fixed") return KMode::fixed;
  throw Error(ErrorCode::ConfigError, "cli_experiments", "unknown k mode '" + std::string(s) + "'");
}

/// Every tunable of the pipeline. Serializes to JSON with snake_case keys.
struct PipelineConfig {
  std::string manifest_path;
  double stride_seconds = 1.0;
  int hue_bins = 8;
  std::vector<std::string> features{"hue", "flow"};
  SaliencyProviderSpec provider;
  LkParams lk;
  TemporalNorm temporal_norm = TemporalNorm::iou_complement;
  FusionSpec fusion;
  int k = 5;
  double min_separation = 1.0;
  double prominence_min = 0.05;
  double match_delta = 0.5;
  KMode k_mode = KMode::per_user;
  std::string output_path;

  bool uses(std::string_view feature) const {
    return std::find(features.begin(), features.end(), feature) != features.end();
  }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, "cli_experiments", what); };
    if (!(stride_seconds > 0.0)) fail("stride_seconds must be > 0");
    if (!valid_bin_count(hue_bins)) throw Error(ErrorCode::BadBinCount, "color_features", "hue_bins " + std::to_string(hue_bins));
    if (features.empty()) fail("features must not be empty");
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i] != "hue" && features[i] != "flow") fail("unknown feature '" + features[i] + "'");
      if (std::count(features.begin(), features.end(), features[i]) > 1) fail("duplicate feature '" + features[i] + "'");
    }
    provider.validate();
    lk.validate();
    fusion.validate();
    if (fusion.op == FusionOperator::linear) {
      if (!fusion.weights) throw Error(ErrorCode::MissingWeights, "fusion", "linear fusion requires weights");
      if (fusion.weights->size() != features.size())
        throw Error(ErrorCode::MissingWeights, "fusion", "one weight per feature required");
    }
    if (fusion.op == FusionOperator::complex && features.size() != 2)
      throw Error(ErrorCode::WrongArity, "fusion", "complex fusion needs exactly two features");
    if (k < 1) fail("k must be >= 1");
    if (!(min_separation >= 0.0)) fail("min_separation must be >= 0");
    if (!(prominence_min >= 0.0)) fail("prominence_min must be >= 0");
    if (!(match_delta >= 0.0 && match_delta <= 1.0)) fail("match_delta must lie in [0,1]");
  }
};

inline nlohmann::json config_to_json(const PipelineConfig& c, bool include_output = true) {
  nlohmann::json fusion{{"operator", to_string(c.fusion.op)},
                        {"epsilon", c.fusion.epsilon},
                        {"normalize_inputs", c.fusion.normalize_inputs},
                        {"smooth_window", c.fusion.smooth_window},
                        {"smooth_before_fusion", c.fusion.smooth_before_fusion}};
  fusion["weights"] = c.fusion.weights ? nlohmann::json(*c.fusion.weights) : nlohmann::json(nullptr);
  nlohmann::json doc{
      {"manifest_path", c.manifest_path},
      {"stride_seconds", c.stride_seconds},
      {"hue_bins", c.hue_bins},
      {"features", c.features},
      {"provider", {{"kind", to_string(c.provider.kind)}, {"sigma", c.provider.sigma}}},
      {"lk", {{"window", c.lk.window}, {"min_eigen", c.lk.min_eigen}, {"grid_stride", c.lk.grid_stride}}},
      {"temporal_norm", to_string(c.temporal_norm)},
      {"fusion", fusion},
      {"k", c.k},
      {"min_separation", c.min_separation},
      {"prominence_min", c.prominence_min},
      {"match_delta", c.match_delta},
      {"k_mode", to_string(c.k_mode)},
  };
  if (include_output) doc["output_path"] = c.output_path;
  return doc;
}

namespace detail {

template <typename T>
void take(const nlohmann::json& doc, const char* key, T& into) {
  if (!doc.contains(key)) return;
  try {
    into = doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, "cli_experiments", std::string("config key '") + key + "': " + e.what());
  }
}

inline void reject_unknown(const nlohmann::json& doc, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : doc.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw Error(ErrorCode::ConfigError, "cli_experiments", "unknown config key '" + where + key + "'");
  }
}

}  // namespace detail

/// Applies the keys present in doc on top of base; absent keys keep base values.
inline PipelineConfig apply_config_json(PipelineConfig c, const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "cli_experiments", "config must be a JSON object");
  detail::reject_unknown(doc,
                         {"manifest_path", "stride_seconds", "hue_bins", "features", "provider", "lk", "temporal_norm",
                          "fusion", "k", "min_separation", "prominence_min", "match_delta", "k_mode", "output_path",
                          "schema_version"},
                         "");
  detail::take(doc, "manifest_path", c.manifest_path);
  detail::take(doc, "stride_seconds", c.stride_seconds);
  detail::take(doc, "hue_bins", c.hue_bins);
  detail::take(doc, "features", c.features);
  detail::take(doc, "k", c.k);
  detail::take(doc, "min_separation", c.min_separation);
  detail::take(doc, "prominence_min", c.prominence_min);
  detail::take(doc, "match_delta", c.match_delta);
  detail::take(doc, "output_path", c.output_path);
  if (doc.contains("temporal_norm")) c.temporal_norm = parse_temporal_norm(doc.at("temporal_norm").get<std::string>());
  if (doc.contains("k_mode")) c.k_mode = parse_k_mode(doc.at("k_mode").get<std::string>());
  if (doc.contains("provider")) {
    const auto& p = doc.at("provider");
    detail::reject_unknown(p, {"kind", "sigma"}, "provider.");
    if (p.contains("kind")) c.provider.kind = parse_saliency_kind(p.at("kind").get<std::string>());
    detail::take(p, "sigma", c.provider.sigma);
  }
  if (doc.contains("lk")) {
    const auto& l = doc.at("lk");
    detail::reject_unknown(l, {"window", "min_eigen", "grid_stride"}, "lk.");
    detail::take(l, "window", c.lk.window);
    detail::take(l, "min_eigen", c.lk.min_eigen);
    detail::take(l, "grid_stride", c.lk.grid_stride);
  }
  if (doc.contains("fusion")) {
    const auto& f = doc.at("fusion");
    detail::reject_unknown(f, {"operator", "weights", "epsilon", "normalize_inputs", "smooth_window", "smooth_before_fusion"},
                           "fusion.");
    if (f.contains("operator")) c.fusion.op = parse_fusion_operator(f.at("operator").get<std::string>());
    if (f.contains("weights")) {
      if (f.at("weights").is_null()) c.fusion.weights.reset();
      else c.fusion.weights = f.at("weights").get<std::vector<double>>();
    }
    detail::take(f, "epsilon", c.fusion.epsilon);
    detail::take(f, "normalize_inputs", c.fusion.normalize_inputs);
    detail::take(f, "smooth_window", c.fusion.smooth_window);
    detail::take(f, "smooth_before_fusion", c.fusion.smooth_before_fusion);
  }
  return c;
}

inline PipelineConfig config_from_json(const nlohmann::json& doc) { return apply_config_json(PipelineConfig{}, doc); }

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "cli_experiments", "sha256 failed");
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

/// Stable hash of every decision in the config. The output location is not a
/// decision and is left out.
inline std::string config_digest(const PipelineConfig& c) { return sha256_hex(config_to_json(c, false).dump()); }

/// Notes on choices the pipeline makes that a reader of results must know.
inline nlohmann::json interpretation_metadata(const PipelineConfig& c) {
  return {{"achromatic_hue", "binned_at_0"},
          {"histogram_dissimilarity", "1 - mean over bins occupied in either histogram of min/max"},
          {"flow_aggregation", "mean magnitude over well-conditioned samples"},
          {"temporal_norm", to_string(c.temporal_norm)},
          {"variance", "population, denominator max(var, epsilon)"},
          {"exponential", "w_t = d e^(1-d), d_t = max_i S_i,t - min_i S_i,t"},
          {"logarithmic", "min_i(S_i,t - w_i) + max_i w_i, w_i = log(1/var(S_i))"},
          {"smoothing", c.fusion.smooth_before_fusion ? "before_fusion" : "after_fusion"},
          {"match", "hue16 dissimilarity < match_delta, one-to-one, maximum cardinality"}};
}

/// Per-video intermediate results shared by summarization and evaluation.
struct ScoredVideo {
  FrameSequence frames;
  std::string provider = "none";
  std::optional<ScoreSeries> static_series;
  std::optional<ScoreSeries> temporal_series;
};

inline ScoredVideo score_video(const VideoManifest& manifest, const PipelineConfig& c) {
  ScoredVideo sv;
  sv.frames = load_frames(manifest, c.stride_seconds);
  if (c.uses("hue")) sv.static_series = static_score(sv.frames, c.hue_bins);
  if (c.uses("flow")) {
    const SaliencySequence sal = provide_saliency(c.provider, sv.frames, manifest);
    sv.provider = sal.provider;
    sv.temporal_series = temporal_score(sal, c.lk, c.temporal_norm);
  }
  return sv;
}

inline FinalScore final_score(const ScoredVideo& sv, const PipelineConfig& c) {
  std::vector<ScoreSeries> inputs;
  for (const auto& f : c.features) {
    if (f == "hue") inputs.push_back(*sv.static_series);
    else inputs.push_back(*sv.temporal_series);
  }
  return fuse(inputs, c.fusion);
}

inline KeyframeSet select_for(const FinalScore& score, const PipelineConfig& c, const FrameSequence& frames, int k) {
  return select_from_score(score, SelectionParams{k, c.min_separation, c.prominence_min}, frames);
}

struct Summary {
  std::string video_id;
  ScoredVideo scored;
  FinalScore final;
  KeyframeSet keyframes;
};

inline Summary summarize_video(const VideoManifest& manifest, const PipelineConfig& c) {
  c.validate();
  Summary s;
  s.video_id = manifest.video_id;
  s.scored = score_video(manifest, c);
  s.final = final_score(s.scored, c);
  s.keyframes = select_for(s.final, c, s.scored.frames, c.k);
  return s;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline nlohmann::json summary_to_json(const Summary& s, const PipelineConfig& c) {
  nlohmann::json keys = nlohmann::json::array();
  for (std::size_t i = 0; i < s.keyframes.size(); ++i) {
    keys.push_back({{"frame_index", s.keyframes.frame_indices[i]},
                    {"pair_index", s.keyframes.pair_indices[i]},
                    {"score", s.keyframes.scores[i]},
                    {"prominence", s.keyframes.prominences[i]}});
  }
  return {{"schema_version", kSchemaVersion},
          {"video_id", s.video_id},
          {"config_digest", config_digest(c)},
          {"config", config_to_json(c, false)},
          {"provider", s.scored.provider},
          {"sample_stride_frames", s.scored.frames.sample_stride},
          {"stride_seconds", c.stride_seconds},
          {"frame_count", s.scored.frames.size()},
          {"components", s.final.components},
          {"interpretation", interpretation_metadata(c)},
          {"k_requested", s.keyframes.k_requested},
          {"short_of_request", s.keyframes.short_of_request()},
          {"keyframes", keys}};
}

/// Static, temporal and final traces, one row per frame pair.
inline std::string traces_csv(const Summary& s) {
  std::ostringstream out;
  out << "schema_version,pair_index,frame_a,frame_b,static,temporal,final_raw,final\n";
  const auto& pairs = s.final.values.pair_indices;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out << kSchemaVersion << ',' << i << ',' << pairs[i].first << ',' << pairs[i].second << ','
        << (s.scored.static_series ? format_double(s.scored.static_series->values[i]) : "") << ','
        << (s.scored.temporal_series ? format_double(s.scored.temporal_series->values[i]) : "") << ','
        << format_double(s.final.raw[i]) << ',' << format_double(s.final.values.values[i]) << '\n';
  }
  return out.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cli_experiments", "cannot write " + path.string());
  out << text;
}

/// Writes summary.json, traces.csv and keyframes/ into out_dir.
inline void write_summary(const Summary& s, const PipelineConfig& c, const fs::path& out_dir) {
  fs::create_directories(out_dir / "keyframes");
  write_text(out_dir / "summary.json", summary_to_json(s, c).dump(2) + "\n");
  write_text(out_dir / "traces.csv", traces_csv(s));
  for (int idx : s.keyframes.frame_indices) {
    const auto& idxs = s.scored.frames.indices;
    const auto pos = static_cast<std::size_t>(std::find(idxs.begin(), idxs.end(), idx) - idxs.begin());
    const fs::path src = s.scored.frames.paths[pos];
    fs::copy_file(src, out_dir / "keyframes" / src.filename(), fs::copy_options::overwrite_existing);
  }
}

/// Summarizes every video of a manifest. A single video writes straight into
/// output_path; several videos get one subdirectory each.
inline std::vector<Summary> run_summarize(const PipelineConfig& c) {
  c.validate();
  if (c.output_path.empty()) throw Error(ErrorCode::ConfigError, "cli_experiments", "output_path is required");
  const auto videos = load_dataset_manifest(c.manifest_path);
  std::vector<Summary> out(videos.size());
  parallel_for(videos.size(), [&](std::size_t i) { out[i] = summarize_video(videos[i], c); });
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const fs::path dir = videos.size() == 1 ? fs::path(c.output_path) : fs::path(c.output_path) / videos[i].video_id;
    write_summary(out[i], c, dir);
  }
  return out;
}

inline std::vector<GroundTruthSet> load_all_ground_truth(const VideoManifest& m) {
  if (m.gt_dirs.empty())
    throw Error(ErrorCode::ConfigError, "cli_experiments", m.video_id + ": gt_dirs is empty, nothing to evaluate against");
  std::vector<GroundTruthSet> out;
  for (const auto& d : m.gt_dirs) out.push_back(load_ground_truth(d));
  return out;
}

/// Per-user k selects |GT_u| keyframes for user u; fixed k uses one summary.
inline EvalReport evaluate_scored(const ScoredVideo& sv, const std::vector<GroundTruthSet>& gts, const PipelineConfig& c) {
  if (gts.empty()) throw Error(ErrorCode::ZeroGroundTruth, "evaluation", sv.frames.video_id + ": no ground truth");
  const FinalScore score = final_score(sv, c);
  EvalReport report;
  if (c.k_mode == KMode::fixed) {
    report = evaluate_video(select_for(score, c, sv.frames, c.k), sv.frames, gts, c.match_delta);
  } else {
    report.video_id = sv.frames.video_id;
    for (const auto& gt : gts) {
      const auto keys = select_for(score, c, sv.frames, static_cast<int>(gt.frames.size()));
      report.per_user.push_back(evaluate_user(keyframe_images(keys, sv.frames), gt, c.match_delta));
    }
    report.mean_f = mean_f_of(report.per_user);
  }
  report.k_mode = to_string(c.k_mode);
  report.config_digest = config_digest(c);
  return report;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : r.per_user) {
    users.push_back({{"user_id", u.user_id},
                     {"n_match", u.n_match},
                     {"n_candidate", u.n_candidate},
                     {"n_gt", u.n_gt},
                     {"precision", u.precision},
                     {"recall", u.recall},
                     {"f_measure", u.f_measure}});
  }
  return {{"schema_version", kSchemaVersion}, {"video_id", r.video_id},         {"mean_f", r.mean_f},
          {"k_mode", r.k_mode},                {"config_digest", r.config_digest}, {"per_user", users}};
}

inline double dataset_mean(const std::vector<EvalReport>& reports) {
  if (reports.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : reports) s += r.mean_f;
  return s / static_cast<double>(reports.size());
}

/// One row per video with each user's f-measure, then a dataset mean row.
inline std::string eval_csv(const std::vector<EvalReport>& reports) {
  std::size_t users = 0;
  for (const auto& r : reports) users = std::max(users, r.per_user.size());
  std::ostringstream out;
  out << "schema_version,video_id";
  for (std::size_t u = 0; u < users; ++u) out << ",f_user" << (u + 1);
  out << ",mean_f\n";
  for (const auto& r : reports) {
    out << kSchemaVersion << ',' << r.video_id;
    for (std::size_t u = 0; u < users; ++u) out << ',' << (u < r.per_user.size() ? format_double(r.per_user[u].f_measure) : "");
    out << ',' << format_double(r.mean_f) << '\n';
  }
  out << kSchemaVersion << ",mean";
  for (std::size_t u = 0; u < users; ++u) out << ',';
  out << ',' << format_double(dataset_mean(reports)) << '\n';
  return out.str();
}

inline std::vector<EvalReport> evaluate_dataset(const std::vector<VideoManifest>& videos, const PipelineConfig& c) {
  c.validate();
  for (const auto& v : videos) {
    if (v.gt_dirs.empty())
      throw Error(ErrorCode::ConfigError, "cli_experiments", v.video_id + ": gt_dirs is empty, nothing to evaluate against");
  }
  std::vector<EvalReport> reports(videos.size());
  parallel_for(videos.size(), [&](std::size_t i) {
    reports[i] = evaluate_scored(score_video(videos[i], c), load_all_ground_truth(videos[i]), c);
  });
  return reports;
}

/// Evaluates the dataset and writes eval.json and eval.csv to output_path.
inline std::vector<EvalReport> run_eval(const PipelineConfig& c) {
  c.validate();
  if (c.output_path.empty()) throw Error(ErrorCode::ConfigError, "cli_experiments", "output_path is required");
  const auto reports = evaluate_dataset(load_dataset_manifest(c.manifest_path), c);
  nlohmann::json videos = nlohmann::json::array();
  for (const auto& r : reports) videos.push_back(report_to_json(r));
  const nlohmann::json doc{{"schema_version", kSchemaVersion},
                           {"config_digest", config_digest(c)},
                           {"config", config_to_json(c, false)},
                           {"interpretation", interpretation_metadata(c)},
                           {"k_mode", to_string(c.k_mode)},
                           {"dataset_mean_f", dataset_mean(reports)},
                           {"videos", videos}};
  fs::create_directories(c.output_path);
  write_text(fs::path(c.output_path) / "eval.json", doc.dump(2) + "\n");
  write_text(fs::path(c.output_path) / "eval.csv", eval_csv(reports));
  return reports;
}

}  // namespace salsum
