#pragma once

#include <cstdint>

#include "bevflow/labels.hpp"

namespace bevflow {

/// Corruption model standing in for an imperfect predictor. All draws come
/// from named sub-streams of `seed`, so changing one knob leaves the other
/// corruption patterns untouched.
struct NoiseConfig {
  double flow_sigma = 0.0;            // cells; i.i.d. Gaussian on flow channels (foreground)
  double boundary_flip_prob = 0.0;    // erode/dilate probability per boundary cell
  double instance_dropout_prob = 0.0; // per instance per frame
  double false_positive_rate = 0.0;   // expected spurious blobs per frame
  std::uint64_t seed = 0;

  void validate() const;
};

/// Model-output surrogate: everything the network would predict, and nothing
/// it would not (no instance IDs).
struct PredictionSet {
  GridSpec spec;
  int t_in = 3;
  int t_out = 4;

  std::vector<SegGrid> seg;
  std::vector<SegGrid> centerness;
  std::vector<FlowGrid> offset;
  std::vector<FlowGrid> fwd_flow;
  std::vector<FlowGrid> back_flow;

  int stored_frames() const { return t_out + 1; }
};

/// With an all-zero NoiseConfig the output equals the labels exactly.
/// Corruption is geometric and per-instance only: dropped instances vanish
/// from every modality at once, boundary cells erode/dilate consistently
/// across modalities, and IDs are never moved between instances.
PredictionSet perturb(const LabelSet& labels, const NoiseConfig& noise);

}  // namespace bevflow
