#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bevflow/grid.hpp"
#include "bevflow/perturb.hpp"

namespace bevflow {

enum class AssocMode { warp, hm };

AssocMode assoc_mode_from_string(const std::string& s);
std::string to_string(AssocMode m);

struct AssocConfig {
  int pool_kernel = 7;                // odd, >= 3
  double center_threshold = 0.1;
  double seg_binarize_threshold = 0.5;
  AssocMode mode = AssocMode::warp;
  double gate_radius = 8.0;           // cells; HM matches beyond this are rejected

  void validate() const;
};

/// Local maxima of a map under k x k max-pooling: a cell is a center iff its
/// value equals the window max and clears center_threshold. Connected plateaus
/// of equal value keep only their lexicographically smallest cell. Centers are
/// returned in scan order with fresh sequential IDs starting at 1; score is
/// the map value.
CenterList extract_centers(const SegGrid& seg, const AssocConfig& cfg);

/// First-frame grouping: every cell with seg >= seg_binarize_threshold follows
/// its backward flow and adopts the ID of the Euclidean-nearest center
/// (ties -> smallest center ID). With no centers, each connected foreground
/// component gets a fresh ID.
InstanceGrid assign_first_frame(const SegGrid& seg, const FlowGrid& back_flow,
                                const CenterList& centers_prev, const AssocConfig& cfg);

/// Pixel-level ID propagation: each foreground cell copies the previous
/// frame's ID at its flow destination (nearest cell). Cells whose destination
/// is background or out of bounds are resolved per 8-connected foreground
/// component: majority ID of the component's resolved cells, or a fresh ID
/// from id_counter when the component has none.
InstanceGrid warp_associate(const SegGrid& seg, const FlowGrid& back_flow,
                            const InstanceGrid& inst_prev, const AssocConfig& cfg,
                            std::uint32_t& id_counter);

/// Instance-level baseline: per frame, centers come from the centerness map
/// and pixels cluster to the center nearest (pixel + offset); across frames,
/// centers projected by the forward flow at the center cell are matched to the
/// next frame's centers by Hungarian assignment on Euclidean distance, gated
/// by gate_radius. Unmatched centers start fresh tracks.
std::vector<InstanceGrid> hm_associate(const std::vector<SegGrid>& seg,
                                       const std::vector<SegGrid>& centerness,
                                       const std::vector<FlowGrid>& offset,
                                       const std::vector<FlowGrid>& fwd_flow,
                                       const AssocConfig& cfg);

struct StageTiming {
  std::string stage;
  int frame = 0;  // prediction frame index; -1 is the reference frame
  std::int64_t usec = 0;
};

struct TimingReport {
  std::vector<StageTiming> entries;

  std::int64_t total_usec() const;
  /// One line per entry: "<stage> <frame> <usec>".
  std::string to_text() const;
};

struct PipelineResult {
  std::vector<InstanceGrid> inst;  // one per prediction frame
  TimingReport timing;
};

/// Dispatch to the warp or HM pipeline and record wall-clock per stage.
/// Throws std::invalid_argument when the modalities required by cfg.mode are
/// missing.
PipelineResult run_pipeline(const PredictionSet& pred, const AssocConfig& cfg);

/// 8-connected component labeling of mask (nonzero = foreground). Returns
/// labels (0 background, components numbered from 1 in scan order) and the
/// component count.
std::pair<std::vector<std::int32_t>, int> label_components(const std::vector<std::uint8_t>& mask,
                                                           int h, int w);

}  // namespace bevflow
