#include "bevflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bevflow/dataset.hpp"
#include "bevflow/grid_io.hpp"
#include "bevflow/labels.hpp"
#include "bevflow/losses.hpp"
#include "bevflow/render.hpp"

namespace bevflow::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f << text;
}

int pool_kernel_for(const GridSpec& spec) {
  return spec.resolution <= 0.25 ? preset_pool_kernel("short") : preset_pool_kernel("long");
}

struct Welford {
  std::vector<double> xs;
  void add(double x) { xs.push_back(x); }
  double mean() const {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
  }
  double stddev() const {
    if (xs.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size()));
  }
};

}  // namespace

GridSpec preset_spec(const std::string& name) {
  GridSpec spec;
  spec.height_cells = 200;
  spec.width_cells = 200;
  if (name == "long")
    spec.resolution = 0.5;
  else if (name == "short")
    spec.resolution = 0.15;
  else
    throw std::invalid_argument("unknown preset: " + name + " (expected long|short)");
  return spec;
}

int preset_pool_kernel(const std::string& name) {
  if (name == "long") return 23;
  if (name == "short") return 7;
  throw std::invalid_argument("unknown preset: " + name);
}

double preset_spawn_radius(const std::string& name) {
  return name == "short" ? 10.0 : 35.0;
}

double preset_speed_max(const std::string& name) { return name == "short" ? 2.5 : 8.0; }

int cmd_simulate(const SimulateOptions& opt) {
  const Scenario scenario = simulate(opt.sim);
  fs::create_directories(opt.out_dir);
  write_scenario(scenario, opt.out_dir / "scenario.txt");
  std::cout << "wrote " << (opt.out_dir / "scenario.txt").string() << " (" << scenario.frames.size()
            << " frames, " << opt.sim.agent_count << " agents)\n";
  return 0;
}

int cmd_labels(const LabelsOptions& opt) {
  const Scenario scenario = read_scenario(opt.scenario_path);
  LabelParams params;
  params.grid = preset_spec(opt.preset);
  params.centerness_sigma = opt.centerness_sigma;
  params.flow_threshold = opt.flow_threshold;
  const LabelSet labels = generate_labels(scenario, params);
  write_labels_dir(labels, opt.out_dir, scenario.seed);
  std::cout << "wrote " << labels.stored_frames() << " label frames to " << opt.out_dir.string()
            << "\n";
  return 0;
}

int cmd_predict(const PredictOptions& opt) {
  const LabelSet labels = read_labels_dir(opt.labels_dir);
  const PredictionSet pred = perturb(labels, opt.noise);
  write_predictions_dir(pred, opt.noise, opt.out_dir);
  std::cout << "wrote " << pred.stored_frames() << " prediction frames to "
            << opt.out_dir.string() << "\n";
  return 0;
}

int cmd_associate(const AssociateOptions& opt) {
  const PredictionSet pred = read_predictions_dir(opt.pred_dir);
  AssocConfig cfg;
  cfg.mode = opt.mode;
  cfg.pool_kernel = opt.pool_kernel.value_or(pool_kernel_for(pred.spec));
  const PipelineResult result = run_pipeline(pred, cfg);
  write_instances_dir(result.inst, result.timing, cfg.mode, pred.spec, opt.out_dir);
  std::cout << "wrote " << result.inst.size() << " instance frames to " << opt.out_dir.string()
            << " (post-processing " << result.timing.total_usec() << " us)\n";
  return 0;
}

MetricsReport run_eval(const EvalOptions& opt) {
  const std::vector<InstanceGrid> inst = read_instances_dir(opt.inst_dir);
  const LabelSet labels = read_labels_dir(opt.gt_labels_dir);
  if (static_cast<int>(inst.size()) != labels.t_out)
    throw std::runtime_error("eval: instance frame count " + std::to_string(inst.size()) +
                             " does not match ground-truth t_out " + std::to_string(labels.t_out));
  const std::vector<InstanceGrid> gt(labels.inst.begin() + 1, labels.inst.end());
  return evaluate_instances(inst, gt);
}

int cmd_eval(const EvalOptions& opt) {
  const MetricsReport report = run_eval(opt);
  std::string text = report.to_text();

  if (opt.losses) {
    if (opt.pred_dir.empty())
      throw std::runtime_error("eval --losses needs the prediction directory");
    const PredictionSet pred = read_predictions_dir(opt.pred_dir);
    const LabelSet labels = read_labels_dir(opt.gt_labels_dir);
    LossConfig cfg;
    std::vector<double> seg_losses, flow_losses;
    for (int j = 1; j <= labels.t_out; ++j) {
      seg_losses.push_back(topk_ce(pred.seg[j], labels.seg[j], cfg.top_k_fraction));
      flow_losses.push_back(smooth_l1(pred.back_flow[j], labels.back_flow[j]));
    }
    const TotalLoss total = total_loss(seg_losses, flow_losses, cfg);
    for (std::size_t t = 0; t < seg_losses.size(); ++t)
      text += fmt("loss frame=%zu seg_ce=%.6f flow_l1=%.6f\n", t, seg_losses[t], flow_losses[t]);
    text += fmt("loss total=%.6f lambda_seg=%.6f lambda_flow=%.6f\n", total.value,
                total.lambda_seg_eff, total.lambda_flow_eff);
  }

  std::cout << text;
  if (!opt.out_path.empty()) write_text(opt.out_path, text);
  return 0;
}

std::vector<BenchCell> run_bench(const BenchOptions& opt) {
  LabelParams label_params;
  label_params.grid = preset_spec(opt.preset);
  const int kernel = preset_pool_kernel(opt.preset);

  std::vector<BenchCell> cells;
  for (const int t_out : opt.t_outs) {
    for (const double sigma : opt.flow_sigmas) {
      BenchCell warp_cell, hm_cell;
      warp_cell.t_out = hm_cell.t_out = t_out;
      warp_cell.flow_sigma = hm_cell.flow_sigma = sigma;
      warp_cell.mode = AssocMode::warp;
      hm_cell.mode = AssocMode::hm;
      warp_cell.per_frame_pq.assign(static_cast<std::size_t>(t_out), 0.0);
      hm_cell.per_frame_pq.assign(static_cast<std::size_t>(t_out), 0.0);
      Welford vpq_w, vpq_h, iou_w, iou_h;

      for (const std::uint64_t seed : opt.seeds) {
        SimConfig sim;
        sim.agent_count = opt.agents;
        sim.t_in = opt.t_in;
        sim.t_out = t_out;
        sim.seed = seed;
        sim.spawn_radius = preset_spawn_radius(opt.preset);
        sim.speed_max = preset_speed_max(opt.preset);
        if (opt.separated) {
          sim.aim_fraction = 0.0;
          sim.min_clearance = sim.observed_clearance;
        }
        const Scenario scenario = simulate(sim);
        const LabelSet labels = generate_labels(scenario, label_params);

        NoiseConfig noise;
        noise.flow_sigma = sigma;
        noise.boundary_flip_prob = opt.boundary_flip_prob;
        noise.instance_dropout_prob = opt.dropout;
        noise.false_positive_rate = opt.fp_rate;
        noise.seed = seed;
        const PredictionSet pred = perturb(labels, noise);
        const std::vector<InstanceGrid> gt(labels.inst.begin() + 1, labels.inst.end());

        for (BenchCell* cell : {&warp_cell, &hm_cell}) {
          AssocConfig cfg;
          cfg.mode = cell->mode;
          cfg.pool_kernel = kernel;
          const PipelineResult result = run_pipeline(pred, cfg);
          const MetricsReport report = evaluate_instances(result.inst, gt);
          cell->pp_usec += result.timing.total_usec();
          (cell->mode == AssocMode::warp ? vpq_w : vpq_h).add(report.vpq);
          (cell->mode == AssocMode::warp ? iou_w : iou_h).add(report.iou);
          for (int t = 0; t < t_out; ++t)
            cell->per_frame_pq[static_cast<std::size_t>(t)] += report.per_frame[t].pq();
        }
      }

      const double inv_seeds = 1.0 / static_cast<double>(opt.seeds.size());
      for (double& v : warp_cell.per_frame_pq) v *= inv_seeds;
      for (double& v : hm_cell.per_frame_pq) v *= inv_seeds;
      warp_cell.vpq_mean = vpq_w.mean();
      warp_cell.vpq_std = vpq_w.stddev();
      warp_cell.iou_mean = iou_w.mean();
      warp_cell.iou_std = iou_w.stddev();
      hm_cell.vpq_mean = vpq_h.mean();
      hm_cell.vpq_std = vpq_h.stddev();
      hm_cell.iou_mean = iou_h.mean();
      hm_cell.iou_std = iou_h.stddev();
      cells.push_back(std::move(warp_cell));
      cells.push_back(std::move(hm_cell));
    }
  }
  return cells;
}

int cmd_bench(const BenchOptions& opt) {
  const std::vector<BenchCell> cells = run_bench(opt);

  std::string metrics = fmt("preset=%s tin=%d agents=%d seeds=%zu flip=%.3f dropout=%.3f fp=%.3f\n",
                            opt.preset.c_str(), opt.t_in, opt.agents, opt.seeds.size(),
                            opt.boundary_flip_prob, opt.dropout, opt.fp_rate);
  std::string runtime;
  for (const BenchCell& c : cells) {
    metrics += fmt("tout=%d sigma=%.2f mode=%s vpq_mean=%.4f vpq_std=%.4f iou_mean=%.4f iou_std=%.4f\n",
                   c.t_out, c.flow_sigma, to_string(c.mode).c_str(), c.vpq_mean, c.vpq_std,
                   c.iou_mean, c.iou_std);
    metrics += fmt("curve tout=%d sigma=%.2f mode=%s pq=", c.t_out, c.flow_sigma,
                   to_string(c.mode).c_str());
    for (double v : c.per_frame_pq) metrics += fmt(" %.4f", v);
    metrics += "\n";
    runtime += fmt("tout=%d sigma=%.2f mode=%s pp_usec=%lld\n", c.t_out, c.flow_sigma,
                   to_string(c.mode).c_str(), static_cast<long long>(c.pp_usec));
  }

  std::cout << metrics << "--- runtime (wall clock) ---\n" << runtime;
  if (!opt.out_dir.empty()) {
    fs::create_directories(opt.out_dir);
    write_text(opt.out_dir / "bench_metrics.txt", metrics);
    write_text(opt.out_dir / "bench_runtime.txt", runtime);
  }
  return 0;
}

int cmd_render(const RenderOptions& opt) {
  fs::create_directories(opt.out_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(opt.in_dir))
    if (entry.path().extension() == ".bgrd") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  int written = 0;
  for (const fs::path& path : files) {
    const std::string stem = path.stem().string();
    Image img;
    if (stem.rfind("inst", 0) == 0) {
      img = render_instances(read_inst(path));
    } else if (stem.rfind("seg", 0) == 0 || stem.rfind("centerness", 0) == 0) {
      img = render_seg(read_seg(path));
    } else {
      continue;
    }
    write_ppm(img, opt.out_dir / (stem + ".ppm"));
    ++written;
  }
  std::cout << "rendered " << written << " frames to " << opt.out_dir.string() << "\n";
  return 0;
}

}  // namespace bevflow::cli
