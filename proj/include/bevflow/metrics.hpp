#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bevflow/assoc.hpp"
#include "bevflow/grid.hpp"

namespace bevflow {

struct PanopticPair {
  std::uint32_t pred_id = 0;
  std::uint32_t gt_id = 0;
  double iou = 0.0;
};

struct PanopticMatch {
  std::vector<PanopticPair> tp;          // sorted by (pred_id, gt_id)
  std::vector<std::uint32_t> fp_pred;    // unmatched prediction IDs
  std::vector<std::uint32_t> fn_gt;      // unmatched ground-truth IDs
};

/// Match instances whose pairwise mask IoU exceeds 0.5 (such a matching is
/// unique); everything else is a false positive / false negative.
PanopticMatch panoptic_match(const InstanceGrid& pred, const InstanceGrid& gt);

/// Mean per-frame intersection-over-union of the binarized maps. Frames where
/// both maps are empty count as 1. Throws on length or shape mismatch.
double iou_seq(const std::vector<SegGrid>& pred, const std::vector<SegGrid>& gt,
               double binarize_threshold);

struct FrameStats {
  int tp = 0, fp = 0, fn = 0;
  double soft_iou_sum = 0.0;

  double pq() const {
    if (tp + fp + fn == 0) return 1.0;
    return soft_iou_sum / (tp + 0.5 * fp + 0.5 * fn);
  }
};

struct VpqResult {
  double vpq = 0.0;
  std::vector<FrameStats> per_frame;
};

/// Video panoptic quality: per-frame panoptic matching where a matched pair
/// only counts as TP if it repeats the (pred ID, gt ID) correspondence fixed
/// at its first co-occurrence (persisting across gaps); inconsistent pairs
/// count as FP + FN. The per-frame scores are averaged so a perfect,
/// ID-consistent sequence scores 1.
VpqResult vpq_seq(const std::vector<InstanceGrid>& pred, const std::vector<InstanceGrid>& gt);

struct MetricsReport {
  double iou = 0.0;
  double vpq = 0.0;
  std::vector<FrameStats> per_frame;
  std::optional<TimingReport> runtime;

  /// key=value lines, stable across runs.
  std::string to_text() const;
};

MetricsReport evaluate_instances(const std::vector<InstanceGrid>& pred,
                                 const std::vector<InstanceGrid>& gt);

}  // namespace bevflow
