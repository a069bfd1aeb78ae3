#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bevflow/cli.hpp"

namespace {

using namespace bevflow;

int run(int argc, char** argv) {
  CLI::App app{"bevflow: synthetic BEV instance prediction post-processing testbed"};
  app.require_subcommand(1);

  // simulate
  cli::SimulateOptions sim_opt;
  std::string sim_profile = "straight";
  std::string sim_preset = "long";
  bool spawn_radius_set = false, speed_max_set = false;
  auto* sim_cmd = app.add_subcommand("simulate", "generate a deterministic scenario");
  sim_cmd->add_option("--agents", sim_opt.sim.agent_count, "agent count");
  sim_cmd->add_option("--tin", sim_opt.sim.t_in, "observed frames (incl. reference)");
  sim_cmd->add_option("--tout", sim_opt.sim.t_out, "predicted frames");
  sim_cmd->add_option("--dt", sim_opt.sim.dt, "frame period in seconds");
  sim_cmd->add_option("--seed", sim_opt.sim.seed, "random seed");
  sim_cmd->add_option("--ego-profile", sim_profile, "straight|turn|stopgo");
  sim_cmd->add_option("--ego-speed", sim_opt.sim.ego_speed, "ego speed m/s");
  sim_cmd->add_option("--preset", sim_preset, "long|short (sets spawn radius and speeds)");
  sim_cmd->add_option("--spawn-radius", sim_opt.sim.spawn_radius, "agent spawn radius m")
      ->each([&](const std::string&) { spawn_radius_set = true; });
  sim_cmd->add_option("--speed-max", sim_opt.sim.speed_max, "max agent speed m/s")
      ->each([&](const std::string&) { speed_max_set = true; });
  sim_cmd->add_option("--aim-fraction", sim_opt.sim.aim_fraction,
                      "fraction of agents aimed through the window center");
  sim_cmd->add_option("--out", sim_opt.out_dir, "output directory")->required();

  // labels
  cli::LabelsOptions lab_opt;
  auto* lab_cmd = app.add_subcommand("labels", "render ground-truth label modalities");
  lab_cmd->add_option("--scenario", lab_opt.scenario_path, "scenario.txt path")->required();
  lab_cmd->add_option("--preset", lab_opt.preset, "long|short");
  lab_cmd->add_option("--sigma", lab_opt.centerness_sigma, "centerness sigma in cells");
  lab_cmd->add_option("--flow-threshold", lab_opt.flow_threshold, "flow zeroing threshold");
  lab_cmd->add_option("--out", lab_opt.out_dir, "output directory")->required();

  // predict
  cli::PredictOptions pred_opt;
  auto* pred_cmd = app.add_subcommand("predict", "corrupt labels into model-like predictions");
  pred_cmd->add_option("--labels", pred_opt.labels_dir, "labels directory")->required();
  pred_cmd->add_option("--flow-sigma", pred_opt.noise.flow_sigma, "flow noise sigma (cells)");
  pred_cmd->add_option("--flip-prob", pred_opt.noise.boundary_flip_prob,
                       "boundary erode/dilate probability");
  pred_cmd->add_option("--dropout", pred_opt.noise.instance_dropout_prob,
                       "instance dropout probability");
  pred_cmd->add_option("--fp-rate", pred_opt.noise.false_positive_rate,
                       "expected spurious blobs per frame");
  pred_cmd->add_option("--seed", pred_opt.noise.seed, "noise seed");
  pred_cmd->add_option("--out", pred_opt.out_dir, "output directory")->required();

  // associate
  cli::AssociateOptions assoc_opt;
  std::string assoc_mode = "warp";
  int assoc_kernel = 0;
  auto* assoc_cmd = app.add_subcommand("associate", "recover instance IDs from predictions");
  assoc_cmd->add_option("--pred", assoc_opt.pred_dir, "predictions directory")->required();
  assoc_cmd->add_option("--mode", assoc_mode, "warp|hm");
  assoc_cmd->add_option("--kernel", assoc_kernel, "max-pool kernel override (odd)");
  assoc_cmd->add_option("--out", assoc_opt.out_dir, "output directory")->required();

  // eval
  cli::EvalOptions eval_opt;
  auto* eval_cmd = app.add_subcommand("eval", "score instances against ground truth");
  eval_cmd->add_option("--inst", eval_opt.inst_dir, "associated instances directory")->required();
  eval_cmd->add_option("--gt", eval_opt.gt_labels_dir, "ground-truth labels directory")->required();
  eval_cmd->add_flag("--losses", eval_opt.losses, "also print forward loss components");
  eval_cmd->add_option("--pred", eval_opt.pred_dir, "predictions directory (for --losses)");
  eval_cmd->add_option("--out", eval_opt.out_path, "metrics output file");

  // bench
  cli::BenchOptions bench_opt;
  auto* bench_cmd = app.add_subcommand("bench", "mode x noise x horizon comparison matrix");
  bench_cmd->add_option("--preset", bench_opt.preset, "long|short");
  bench_cmd->add_option("--tin", bench_opt.t_in, "observed frames");
  bench_cmd->add_option("--touts", bench_opt.t_outs, "prediction horizons (frames)");
  bench_cmd->add_option("--flow-sigmas", bench_opt.flow_sigmas, "flow noise sweep");
  bench_cmd->add_option("--flip-prob", bench_opt.boundary_flip_prob, "boundary flip probability");
  bench_cmd->add_option("--dropout", bench_opt.dropout, "instance dropout probability");
  bench_cmd->add_option("--fp-rate", bench_opt.fp_rate, "spurious blobs per frame");
  bench_cmd->add_option("--agents", bench_opt.agents, "agent count");
  bench_cmd->add_option("--seeds", bench_opt.seeds, "seed list");
  bench_cmd->add_flag("--separated", bench_opt.separated,
                      "keep agents apart over the whole horizon");
  bench_cmd->add_option("--out", bench_opt.out_dir, "output directory");

  // render
  cli::RenderOptions render_opt;
  auto* render_cmd = app.add_subcommand("render", "write PPM images for grid files");
  render_cmd->add_option("--in", render_opt.in_dir, "directory with .bgrd files")->required();
  render_cmd->add_option("--out", render_opt.out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (sim_cmd->parsed()) {
    sim_opt.sim.ego_profile = ego_profile_from_string(sim_profile);
    if (!spawn_radius_set) sim_opt.sim.spawn_radius = cli::preset_spawn_radius(sim_preset);
    if (!speed_max_set) sim_opt.sim.speed_max = cli::preset_speed_max(sim_preset);
    return cli::cmd_simulate(sim_opt);
  }
  if (lab_cmd->parsed()) return cli::cmd_labels(lab_opt);
  if (pred_cmd->parsed()) return cli::cmd_predict(pred_opt);
  if (assoc_cmd->parsed()) {
    assoc_opt.mode = assoc_mode_from_string(assoc_mode);
    if (assoc_kernel > 0) assoc_opt.pool_kernel = assoc_kernel;
    return cli::cmd_associate(assoc_opt);
  }
  if (eval_cmd->parsed()) return cli::cmd_eval(eval_opt);
  if (bench_cmd->parsed()) return cli::cmd_bench(bench_opt);
  if (render_cmd->parsed()) return cli::cmd_render(render_opt);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
