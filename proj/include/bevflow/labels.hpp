#pragma once

#include <utility>
#include <vector>

#include "bevflow/grid.hpp"
#include "bevflow/sim.hpp"

namespace bevflow {

struct LabelParams {
  GridSpec grid;              // anchor is overwritten with the reference ego pose
  int t_in = -1;              // -1: take the scenario's value
  int t_out = -1;
  double centerness_sigma = 3.0;  // cells
  double flow_threshold = 0.2;    // cells; vectors below this magnitude are zeroed

  void validate() const;
};

/// All label modalities for one prediction window. Stored frame j corresponds
/// to scenario frame t_in - 1 + j: stored frame 0 is the reference frame (the
/// extra segmentation used to seed first-frame grouping) and stored frames
/// 1..t_out are the predicted frames. Every frame is rendered into the same
/// window, anchored at the reference frame's ego pose.
struct LabelSet {
  GridSpec spec;
  int t_in = 3;
  int t_out = 4;
  double centerness_sigma = 3.0;
  double flow_threshold = 0.2;

  std::vector<SegGrid> seg;          // binary-valued
  std::vector<InstanceGrid> inst;
  std::vector<CenterList> centers;   // per-ID centroids of occupied cells
  std::vector<SegGrid> centerness;
  std::vector<FlowGrid> offset;      // same-frame vector to own center
  std::vector<FlowGrid> fwd_flow;    // per-instance center displacement to next frame
  std::vector<FlowGrid> back_flow;   // pixel-to-previous-center displacement

  int stored_frames() const { return t_out + 1; }
};

/// Render every cell whose center lies inside an agent's oriented rectangle.
/// Containment uses half-open intervals in the agent frame (min edge
/// inclusive, max edge exclusive); overlaps resolve to the smaller agent ID.
std::pair<InstanceGrid, SegGrid> rasterize_frame(const std::vector<AgentState>& agents,
                                                 const Pose2D& ego, GridSpec spec);

/// Per-ID centroid of occupied cells, ascending by ID.
CenterList compute_centers(const InstanceGrid& inst);

/// Gaussian heatmap exp(-d^2 / (2 sigma^2)) toward each cell's own instance
/// center, clamped to the instance mask; the foreground cell nearest each
/// center is forced to exactly 1 so every instance has a strict peak.
SegGrid compute_centerness(const InstanceGrid& inst, const CenterList& centers, double sigma);

/// Foreground cell (r, c) with ID i gets (center_i.row - r, center_i.col - c).
FlowGrid compute_offsets(const InstanceGrid& inst, const CenterList& centers);

/// All pixels of an instance share its centroid displacement to the next
/// frame; instances absent next frame (or a null next frame) get zero.
FlowGrid compute_forward_flow(const InstanceGrid& inst_t, const InstanceGrid* inst_next);

/// Vector from each foreground pixel to its instance's centroid in the
/// previous frame; instances absent there (or a null previous frame) fall
/// back to the same-frame centroid, degenerating to the offset field.
FlowGrid compute_backward_centripetal_flow(const InstanceGrid& inst_t,
                                           const InstanceGrid* inst_prev);

/// Zero every vector with magnitude < eps.
FlowGrid threshold_flow(const FlowGrid& flow, double eps);

LabelSet generate_labels(const Scenario& scenario, const LabelParams& params);

}  // namespace bevflow
