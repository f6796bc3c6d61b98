// Command-line front end: summarize, eval, grid, gen-synthetic.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "salsum.hpp"

namespace fs = std::filesystem;
using namespace salsum;

namespace {

/// Flags mirror PipelineConfig; only flags given on the command line override
/// the config file, which in turn overrides the defaults.
struct ConfigFlags {
  std::string config_file;
  std::optional<std::string> manifest;
  std::optional<double> stride_seconds;
  std::optional<int> hue_bins;
  std::optional<std::vector<std::string>> features;
  std::optional<std::string> provider;
  std::optional<double> saliency_sigma;
  std::optional<int> lk_window;
  std::optional<double> lk_min_eigen;
  std::optional<int> lk_grid_stride;
  std::optional<std::string> temporal_norm;
  std::optional<std::string> fusion;
  std::optional<std::vector<double>> weights;
  std::optional<double> epsilon;
  std::optional<bool> normalize_inputs;
  std::optional<int> smooth_window;
  std::optional<bool> smooth_before_fusion;
  std::optional<int> k;
  std::optional<double> min_separation;
  std::optional<double> prominence_min;
  std::optional<double> match_delta;
  std::optional<std::string> k_mode;
  std::optional<std::string> output;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--manifest", manifest, "video or dataset manifest (JSON)");
    app->add_option("--stride-seconds", stride_seconds, "temporal sampling period");
    app->add_option("--hue-bins", hue_bins, "hue histogram bins (4, 8, 16, 32, 64)");
    app->add_option("--features", features, "score features to fuse: hue, flow")->delimiter(',');
    app->add_option("--provider", provider, "saliency provider: precomputed | spectral-residual");
    app->add_option("--saliency-sigma", saliency_sigma, "blur sigma of the spectral-residual provider");
    app->add_option("--lk-window", lk_window, "Lucas-Kanade window side (odd)");
    app->add_option("--lk-min-eigen", lk_min_eigen, "conditioning threshold");
    app->add_option("--lk-grid-stride", lk_grid_stride, "pixels between flow samples");
    app->add_option("--temporal-norm", temporal_norm, "iou-complement | iou-divide | none");
    app->add_option("--fusion", fusion, "linear|min|max|exponential|logarithmic|complex|harmonic|variance");
    app->add_option("--weights", weights, "linear fusion weights, comma separated")->delimiter(',');
    app->add_option("--epsilon", epsilon, "variance guard");
    app->add_option("--normalize-inputs", normalize_inputs, "min-max normalize series before fusion");
    app->add_option("--smooth-window", smooth_window, "moving-average window (odd)");
    app->add_option("--smooth-before-fusion", smooth_before_fusion, "smooth inputs instead of the fused series");
    app->add_option("--k", k, "keyframes to select");
    app->add_option("--min-separation", min_separation, "seconds between keyframes");
    app->add_option("--prominence-min", prominence_min, "minimum prominence, fraction of score range");
    app->add_option("--match-delta", match_delta, "hue16 dissimilarity below which frames match");
    app->add_option("--k-mode", k_mode, "per-user | fixed");
    app->add_option("--output", output, "output directory");
  }

  PipelineConfig resolve() const {
    PipelineConfig c;
    if (!config_file.empty()) c = apply_config_json(c, read_json_file(config_file, "cli_experiments"));
    if (manifest) c.manifest_path = *manifest;
    if (stride_seconds) c.stride_seconds = *stride_seconds;
    if (hue_bins) c.hue_bins = *hue_bins;
    if (features) c.features = *features;
    if (provider) c.provider.kind = parse_saliency_kind(*provider);
    if (saliency_sigma) c.provider.sigma = *saliency_sigma;
    if (lk_window) c.lk.window = *lk_window;
    if (lk_min_eigen) c.lk.min_eigen = *lk_min_eigen;
    if (lk_grid_stride) c.lk.grid_stride = *lk_grid_stride;
    if (temporal_norm) c.temporal_norm = parse_temporal_norm(*temporal_norm);
    if (fusion) c.fusion.op = parse_fusion_operator(*fusion);
    if (weights) c.fusion.weights = *weights;
    if (epsilon) c.fusion.epsilon = *epsilon;
    if (normalize_inputs) c.fusion.normalize_inputs = *normalize_inputs;
    if (smooth_window) c.fusion.smooth_window = *smooth_window;
    if (smooth_before_fusion) c.fusion.smooth_before_fusion = *smooth_before_fusion;
    if (k) c.k = *k;
    if (min_separation) c.min_separation = *min_separation;
    if (prominence_min) c.prominence_min = *prominence_min;
    if (match_delta) c.match_delta = *match_delta;
    if (k_mode) c.k_mode = parse_k_mode(*k_mode);
    if (output) c.output_path = *output;
    if (c.manifest_path.empty()) throw Error(ErrorCode::ConfigError, "cli_experiments", "--manifest is required");
    if (c.output_path.empty()) throw Error(ErrorCode::ConfigError, "cli_experiments", "--output is required");
    return c;
  }
};

int run_summarize_cmd(const ConfigFlags& flags) {
  const PipelineConfig c = flags.resolve();
  for (const auto& s : run_summarize(c)) {
    std::cout << s.video_id << ":";
    for (int idx : s.keyframes.frame_indices) std::cout << ' ' << idx;
    if (s.keyframes.short_of_request())
      std::cout << "  (" << s.keyframes.size() << " of " << s.keyframes.k_requested << " requested)";
    std::cout << '\n';
  }
  return 0;
}

int run_eval_cmd(const ConfigFlags& flags) {
  const PipelineConfig c = flags.resolve();
  const auto reports = run_eval(c);
  for (const auto& r : reports) std::cout << r.video_id << " mean_f=" << format_double(r.mean_f) << '\n';
  std::cout << "dataset mean_f=" << format_double(dataset_mean(reports)) << " (" << to_string(c.k_mode) << " k)\n";
  return 0;
}

int run_grid_cmd(const ConfigFlags& flags, const std::string& grid_name) {
  const PipelineConfig c = flags.resolve();
  const ExperimentGrid grid = builtin_or_file_grid(grid_name, c);
  const auto results = run_grid(grid, load_dataset_manifest(c.manifest_path));
  fs::create_directories(c.output_path);
  const std::string csv = grid_csv(grid, results);
  write_text(fs::path(c.output_path) / (grid.name + ".csv"), csv);
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"salsum: saliency- and colour-driven keyframe summaries"};
  app.require_subcommand(1);

  ConfigFlags summarize_flags, eval_flags, grid_flags;
  auto* summarize = app.add_subcommand("summarize", "select keyframes for each video of a manifest");
  summarize_flags.attach(summarize);

  auto* eval = app.add_subcommand("eval", "precision / recall / f-measure against ground-truth summaries");
  eval_flags.attach(eval);

  std::string grid_name = "fusion-table";
  auto* grid = app.add_subcommand("grid", "run a comparison grid over a dataset");
  grid_flags.attach(grid);
  grid->add_option("--grid", grid_name, "fusion-table | feature-table | path to grid JSON");

  synthetic::DatasetSpec syn;
  std::string syn_out;
  auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic dataset with known scene changes");
  gen->add_option("--out", syn_out, "output directory")->required();
  gen->add_option("--videos", syn.videos, "number of videos")->check(CLI::PositiveNumber);
  gen->add_option("--scenes", syn.scenes, "scenes per video")->check(CLI::PositiveNumber);
  gen->add_option("--fps", syn.base.fps, "frame rate")->check(CLI::PositiveNumber);
  gen->add_option("--scene-seconds", syn.base.scene_seconds, "scene duration")->check(CLI::PositiveNumber);
  gen->add_option("--width", syn.base.width, "frame width")->check(CLI::PositiveNumber);
  gen->add_option("--height", syn.base.height, "frame height")->check(CLI::PositiveNumber);
  gen->add_option("--users", syn.base.gt_users, "ground-truth annotators")->check(CLI::NonNegativeNumber);
  gen->add_flag("--with-saliency", syn.with_saliency, "also write ideal saliency maps (PGM)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*summarize) return run_summarize_cmd(summarize_flags);
    if (*eval) return run_eval_cmd(eval_flags);
    if (*grid) return run_grid_cmd(grid_flags, grid_name);
    if (*gen) {
      if (syn.videos > 1) syn.base.video_id.clear();
      const fs::path manifest = synthetic::write_dataset(syn, syn_out);
      std::cout << manifest.string() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << e.module() << "] " << to_string(e.code()) << ": " << e.detail() << '\n';
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
