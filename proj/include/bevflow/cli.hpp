#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bevflow/assoc.hpp"
#include "bevflow/metrics.hpp"
#include "bevflow/perturb.hpp"
#include "bevflow/sim.hpp"

namespace bevflow::cli {

/// Window presets: "long" = 200x200 at 0.5 m, "short" = 200x200 at 0.15 m.
GridSpec preset_spec(const std::string& name);
/// Max-pool kernel per preset: 7 under the short scope, 23 under the long.
int preset_pool_kernel(const std::string& name);
double preset_spawn_radius(const std::string& name);
double preset_speed_max(const std::string& name);

struct SimulateOptions {
  SimConfig sim;
  std::filesystem::path out_dir;
};
int cmd_simulate(const SimulateOptions& opt);

struct LabelsOptions {
  std::filesystem::path scenario_path;
  std::string preset = "long";
  double centerness_sigma = 3.0;
  double flow_threshold = 0.2;
  std::filesystem::path out_dir;
};
int cmd_labels(const LabelsOptions& opt);

struct PredictOptions {
  std::filesystem::path labels_dir;
  NoiseConfig noise;
  std::filesystem::path out_dir;
};
int cmd_predict(const PredictOptions& opt);

struct AssociateOptions {
  std::filesystem::path pred_dir;
  AssocMode mode = AssocMode::warp;
  std::optional<int> pool_kernel;  // default: from the preset recorded upstream
  std::filesystem::path out_dir;
};
int cmd_associate(const AssociateOptions& opt);

struct EvalOptions {
  std::filesystem::path inst_dir;      // associated instances
  std::filesystem::path gt_labels_dir;
  bool losses = false;
  std::filesystem::path pred_dir;      // needed for --losses
  std::filesystem::path out_path;      // optional metrics file
};
MetricsReport run_eval(const EvalOptions& opt);
int cmd_eval(const EvalOptions& opt);

struct BenchOptions {
  std::string preset = "long";
  int t_in = 3;
  std::vector<int> t_outs = {4, 16};
  std::vector<double> flow_sigmas = {0.5, 1.0, 2.0};
  double boundary_flip_prob = 0.05;
  double dropout = 0.0;
  double fp_rate = 0.0;
  int agents = 10;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  /// Keep agents far apart over the whole horizon (the regime where both
  /// pipelines must reproduce ground truth exactly at zero noise).
  bool separated = false;
  std::filesystem::path out_dir;  // empty: print only
};

struct BenchCell {
  int t_out = 0;
  double flow_sigma = 0.0;
  AssocMode mode = AssocMode::warp;
  double vpq_mean = 0.0, vpq_std = 0.0;
  double iou_mean = 0.0, iou_std = 0.0;
  std::vector<double> per_frame_pq;   // mean over seeds, one entry per frame
  std::int64_t pp_usec = 0;           // post-processing wall clock, all seeds
};

/// Full comparison matrix (mode x noise x horizon). Deterministic given the
/// seed list; wall-clock numbers go to a separate runtime report so the
/// metric outputs are byte-identical across reruns.
std::vector<BenchCell> run_bench(const BenchOptions& opt);
int cmd_bench(const BenchOptions& opt);

struct RenderOptions {
  std::filesystem::path in_dir;
  std::filesystem::path out_dir;
};
int cmd_render(const RenderOptions& opt);

}  // namespace bevflow::cli
