#include "bevflow/dataset.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "bevflow/grid_io.hpp"

namespace bevflow {

namespace {

using Json = nlohmann::ordered_json;

std::string frame_file(const char* stem, int j) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.bgrd", stem, j);
  return buf;
}

Json grid_json(const GridSpec& spec) {
  return Json{{"h", spec.height_cells},
              {"w", spec.width_cells},
              {"resolution", spec.resolution},
              {"anchor", Json{{"x", spec.anchor.x}, {"y", spec.anchor.y}, {"yaw", spec.anchor.yaw}}}};
}

GridSpec grid_from_json(const Json& j) {
  GridSpec spec;
  spec.height_cells = j.at("h").get<int>();
  spec.width_cells = j.at("w").get<int>();
  spec.resolution = j.at("resolution").get<double>();
  spec.anchor.x = j.at("anchor").at("x").get<double>();
  spec.anchor.y = j.at("anchor").at("y").get<double>();
  spec.anchor.yaw = j.at("anchor").at("yaw").get<double>();
  spec.validate();
  return spec;
}

void write_manifest(const Json& j, const std::filesystem::path& dir) {
  std::ofstream f(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write manifest in " + dir.string());
  f << j.dump(2) << "\n";
}

Json read_manifest(const std::filesystem::path& dir, const std::string& expected_type) {
  const auto path = dir / "manifest.json";
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("missing manifest: " + path.string());
  Json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("corrupt manifest " + path.string() + ": " + e.what());
  }
  if (j.value("type", "") != expected_type)
    throw std::runtime_error("manifest " + path.string() + " is not of type '" + expected_type +
                             "'");
  return j;
}

}  // namespace

void write_labels_dir(const LabelSet& labels, const std::filesystem::path& dir,
                      std::uint64_t scenario_seed) {
  std::filesystem::create_directories(dir);
  Json manifest{{"type", "labels"},
                {"grid", grid_json(labels.spec)},
                {"t_in", labels.t_in},
                {"t_out", labels.t_out},
                {"stored_frames", labels.stored_frames()},
                {"centerness_sigma", labels.centerness_sigma},
                {"flow_threshold", labels.flow_threshold},
                {"scenario_seed", scenario_seed},
                {"modalities", Json::array({"seg", "inst", "centerness", "offset", "fwd", "back"})}};
  write_manifest(manifest, dir);
  for (int j = 0; j < labels.stored_frames(); ++j) {
    write_grid(labels.seg[j], dir / frame_file("seg", j));
    write_grid(labels.inst[j], dir / frame_file("inst", j));
    write_grid(labels.centerness[j], dir / frame_file("centerness", j));
    write_grid(labels.offset[j], dir / frame_file("offset", j));
    write_grid(labels.fwd_flow[j], dir / frame_file("fwd", j));
    write_grid(labels.back_flow[j], dir / frame_file("back", j));
  }
}

LabelSet read_labels_dir(const std::filesystem::path& dir) {
  const Json manifest = read_manifest(dir, "labels");
  LabelSet labels;
  labels.spec = grid_from_json(manifest.at("grid"));
  labels.t_in = manifest.at("t_in").get<int>();
  labels.t_out = manifest.at("t_out").get<int>();
  labels.centerness_sigma = manifest.at("centerness_sigma").get<double>();
  labels.flow_threshold = manifest.at("flow_threshold").get<double>();
  for (int j = 0; j < labels.stored_frames(); ++j) {
    labels.seg.push_back(read_seg(dir / frame_file("seg", j)));
    labels.inst.push_back(read_inst(dir / frame_file("inst", j)));
    labels.centers.push_back(compute_centers(labels.inst.back()));
    labels.centerness.push_back(read_seg(dir / frame_file("centerness", j)));
    labels.offset.push_back(read_flow(dir / frame_file("offset", j)));
    labels.fwd_flow.push_back(read_flow(dir / frame_file("fwd", j)));
    labels.back_flow.push_back(read_flow(dir / frame_file("back", j)));
  }
  return labels;
}

void write_predictions_dir(const PredictionSet& pred, const NoiseConfig& noise,
                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Json manifest{{"type", "predictions"},
                {"grid", grid_json(pred.spec)},
                {"t_in", pred.t_in},
                {"t_out", pred.t_out},
                {"stored_frames", pred.stored_frames()},
                {"noise", Json{{"flow_sigma", noise.flow_sigma},
                               {"boundary_flip_prob", noise.boundary_flip_prob},
                               {"instance_dropout_prob", noise.instance_dropout_prob},
                               {"false_positive_rate", noise.false_positive_rate},
                               {"seed", noise.seed}}}};
  write_manifest(manifest, dir);
  for (int j = 0; j < pred.stored_frames(); ++j) {
    write_grid(pred.seg[j], dir / frame_file("seg", j));
    write_grid(pred.centerness[j], dir / frame_file("centerness", j));
    write_grid(pred.offset[j], dir / frame_file("offset", j));
    write_grid(pred.fwd_flow[j], dir / frame_file("fwd", j));
    write_grid(pred.back_flow[j], dir / frame_file("back", j));
  }
}

PredictionSet read_predictions_dir(const std::filesystem::path& dir) {
  const Json manifest = read_manifest(dir, "predictions");
  PredictionSet pred;
  pred.spec = grid_from_json(manifest.at("grid"));
  pred.t_in = manifest.at("t_in").get<int>();
  pred.t_out = manifest.at("t_out").get<int>();
  for (int j = 0; j < pred.stored_frames(); ++j) {
    pred.seg.push_back(read_seg(dir / frame_file("seg", j)));
    pred.centerness.push_back(read_seg(dir / frame_file("centerness", j)));
    pred.offset.push_back(read_flow(dir / frame_file("offset", j)));
    pred.fwd_flow.push_back(read_flow(dir / frame_file("fwd", j)));
    pred.back_flow.push_back(read_flow(dir / frame_file("back", j)));
  }
  return pred;
}

void write_instances_dir(const std::vector<InstanceGrid>& inst, const TimingReport& timing,
                         AssocMode mode, const GridSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Json manifest{{"type", "instances"},
                {"grid", grid_json(spec)},
                {"frames", inst.size()},
                {"mode", to_string(mode)}};
  write_manifest(manifest, dir);
  for (std::size_t j = 0; j < inst.size(); ++j)
    write_grid(inst[j], dir / frame_file("inst", static_cast<int>(j)));
  // Timing is measurement, not derived data; it lives in its own file so the
  // grid outputs stay byte-identical across reruns.
  std::ofstream f(dir / "timing.txt", std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write timing in " + dir.string());
  f << timing.to_text();
}

std::vector<InstanceGrid> read_instances_dir(const std::filesystem::path& dir) {
  const Json manifest = read_manifest(dir, "instances");
  const auto frames = manifest.at("frames").get<std::size_t>();
  std::vector<InstanceGrid> out;
  out.reserve(frames);
  for (std::size_t j = 0; j < frames; ++j)
    out.push_back(read_inst(dir / frame_file("inst", static_cast<int>(j))));
  return out;
}

}  // namespace bevflow
