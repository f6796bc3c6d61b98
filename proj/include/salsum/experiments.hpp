#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "salsum/pipeline.hpp"

namespace salsum {

struct GridRow {
  std::string label;
  nlohmann::json overrides = nlohmann::json::object();  // applied on the baseline
  bool implemented = true;
};

struct ExperimentGrid {
  std::string name;
  PipelineConfig baseline;
  std::vector<GridRow> rows;

  void validate() const {
    std::set<std::string> seen;
    for (const auto& r : rows)
      if (!seen.insert(r.label).second)
        throw Error(ErrorCode::ConfigError, "cli_experiments", "duplicate grid row label '" + r.label + "'");
  }
};

/// The eight fusion operators over hue + saliency flow.
inline ExperimentGrid fusion_table(const PipelineConfig& baseline) {
  ExperimentGrid g{"fusion-table", baseline, {}};
  for (FusionOperator op : kAllFusionOperators) {
    nlohmann::json fusion{{"operator", to_string(op)}};
    if (op == FusionOperator::linear) fusion["weights"] = {0.5, 0.5};
    g.rows.push_back({to_string(op), {{"features", {"hue", "flow"}}, {"fusion", fusion}}, true});
  }
  return g;
}

/// Feature combinations, variance-fused. Rows relying on texture, full-HSV,
/// saliency-intensity or frame-flow features are listed but not run.
inline ExperimentGrid feature_table(const PipelineConfig& baseline) {
  ExperimentGrid g{"feature-table", baseline, {}};
  auto hue_only = [](int n) {
    return nlohmann::json{{"features", {"hue"}}, {"hue_bins", n}, {"fusion", {{"operator", "variance"}}}};
  };
  auto hue_flow = [](int n) {
    return nlohmann::json{{"features", {"hue", "flow"}}, {"hue_bins", n}, {"fusion", {{"operator", "variance"}}}};
  };
  auto missing = [&](const std::string& label) { g.rows.push_back({label, nlohmann::json::object(), false}); };
  missing("Static (saliency maps)");
  missing("Optical flow (video frames)");
  g.rows.push_back({"Optical flow (saliency maps)",
                    {{"features", {"flow"}}, {"fusion", {{"operator", "variance"}}}},
                    true});
  g.rows.push_back({"Hue8 (video frames)", hue_only(8), true});
  g.rows.push_back({"Hue16 (video frames)", hue_only(16), true});
  missing("LBP (video frames)");
  missing("LBP (saliency maps)");
  missing("Hue16 (video frames) + Optical flow (video frames)");
  missing("Hue32 (video frames) + Optical flow (video frames)");
  missing("Hue16 (video frames) + Static (saliency maps) + Optical flow (video frames)");
  missing("Hue32 (video frames) + Static (saliency maps) + Optical flow (video frames)");
  for (int n : {4, 8, 16, 32, 64})
    g.rows.push_back({"Hue" + std::to_string(n) + " (video frames) + Optical flow (saliency maps)", hue_flow(n), true});
  missing("Hue16 (video frames) + Static (saliency maps) + Optical flow (saliency maps)");
  missing("Hue32 (video frames) + Static (saliency maps) + Optical flow (saliency maps)");
  for (int n : {8, 16, 32, 64}) missing("HSV" + std::to_string(n) + " (video frames) + Optical flow (saliency maps)");
  return g;
}

/// Custom grid file: {"name": ..., "rows": [{"label": ..., "overrides": {...}}]}.
inline ExperimentGrid grid_from_json(const nlohmann::json& doc, const PipelineConfig& baseline) {
  ExperimentGrid g;
  g.baseline = baseline;
  try {
    g.name = doc.value("name", std::string("custom"));
    if (doc.contains("baseline")) g.baseline = apply_config_json(baseline, doc.at("baseline"));
    for (const auto& r : doc.at("rows")) {
      g.rows.push_back({r.at("label").get<std::string>(), r.value("overrides", nlohmann::json::object()),
                        r.value("implemented", true)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, "cli_experiments", std::string("grid file: ") + e.what());
  }
  g.validate();
  return g;
}

inline ExperimentGrid builtin_or_file_grid(const std::string& name, const PipelineConfig& baseline) {
  if (name == "fusion-table") return fusion_table(baseline);
  if (name == "feature-table") return feature_table(baseline);
  return grid_from_json(read_json_file(name, "cli_experiments"), baseline);
}

struct GridRowResult {
  std::string label;
  std::string status;  // ok | failed | not-implemented
  double mean_f = 0.0;
  std::string config_digest;
  std::string detail;
};

namespace detail {

/// Parameters that determine the per-video score series.
inline std::string scoring_key(const PipelineConfig& c) {
  nlohmann::json k{{"stride", c.stride_seconds}, {"features", c.features}};
  if (c.uses("hue")) k["hue_bins"] = c.hue_bins;
  if (c.uses("flow")) {
    const auto full = config_to_json(c, false);
    k["provider"] = full["provider"];
    k["lk"] = full["lk"];
    k["temporal_norm"] = full["temporal_norm"];
  }
  return k.dump();
}

}  // namespace detail

/// Runs every row over the dataset. A row that cannot be configured or fails
/// on any video is reported as failed; the others still run.
inline std::vector<GridRowResult> run_grid(const ExperimentGrid& grid, const std::vector<VideoManifest>& videos) {
  grid.validate();
  const std::size_t n_rows = grid.rows.size();
  std::vector<GridRowResult> results(n_rows);
  std::vector<std::optional<PipelineConfig>> configs(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    results[r].label = grid.rows[r].label;
    if (!grid.rows[r].implemented) {
      results[r].status = "not-implemented";
      continue;
    }
    try {
      PipelineConfig c = apply_config_json(grid.baseline, grid.rows[r].overrides);
      c.validate();
      results[r].config_digest = config_digest(c);
      configs[r] = std::move(c);
    } catch (const Error& e) {
      results[r].status = "failed";
      results[r].detail = e.what();
    }
  }

  // reports[video][row]; a failing cell carries its message instead.
  std::vector<std::vector<std::optional<EvalReport>>> reports(videos.size(),
                                                              std::vector<std::optional<EvalReport>>(n_rows));
  std::vector<std::vector<std::string>> errors(videos.size(), std::vector<std::string>(n_rows));
  parallel_for(videos.size(), [&](std::size_t v) {
    std::vector<GroundTruthSet> gts;
    std::string gt_error;
    try {
      gts = load_all_ground_truth(videos[v]);
    } catch (const Error& e) {
      gt_error = e.what();
    }
    std::map<std::string, ScoredVideo> cache;
    std::map<std::string, std::string> cache_errors;
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (!configs[r]) continue;
      if (!gt_error.empty()) {
        errors[v][r] = gt_error;
        continue;
      }
      const auto& c = *configs[r];
      const std::string key = detail::scoring_key(c);
      if (!cache.count(key) && !cache_errors.count(key)) {
        try {
          cache.emplace(key, score_video(videos[v], c));
        } catch (const Error& e) {
          cache_errors.emplace(key, e.what());
        }
      }
      if (auto it = cache_errors.find(key); it != cache_errors.end()) {
        errors[v][r] = it->second;
        continue;
      }
      try {
        reports[v][r] = evaluate_scored(cache.at(key), gts, c);
      } catch (const Error& e) {
        errors[v][r] = e.what();
      }
    }
  });

  for (std::size_t r = 0; r < n_rows; ++r) {
    if (!configs[r]) continue;
    std::vector<EvalReport> row_reports;
    for (std::size_t v = 0; v < videos.size(); ++v) {
      if (!errors[v][r].empty()) {
        results[r].status = "failed";
        results[r].detail = videos[v].video_id + ": " + errors[v][r];
        break;
      }
      row_reports.push_back(*reports[v][r]);
    }
    if (results[r].status.empty()) {
      results[r].status = "ok";
      results[r].mean_f = dataset_mean(row_reports);
    }
  }
  return results;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string grid_csv(const ExperimentGrid& grid, const std::vector<GridRowResult>& results) {
  std::ostringstream out;
  out << "schema_version,grid,row,status,mean_f,config_digest,detail\n";
  for (const auto& r : results) {
    out << kSchemaVersion << ',' << csv_field(grid.name) << ',' << csv_field(r.label) << ',' << r.status << ','
        << (r.status == "ok" ? format_double(r.mean_f) : "") << ',' << r.config_digest << ',' << csv_field(r.detail)
        << '\n';
  }
  return out.str();
}

}  // namespace salsum
