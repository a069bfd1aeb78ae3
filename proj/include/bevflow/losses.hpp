#pragma once

#include <span>
#include <variant>

#include "bevflow/grid.hpp"

namespace bevflow {

struct FixedWeights {
  double lambda_seg = 1.0;
  double lambda_flow = 1.0;
};

/// Frozen-parameter uncertainty weighting: each task contributes
/// exp(-s) * loss + s with caller-supplied s.
struct UncertaintyWeights {
  double s_seg = 0.0;
  double s_flow = 0.0;
};

struct LossConfig {
  double top_k_fraction = 0.25;  // (0, 1]
  double gamma = 0.95;           // future discount, (0, 1]
  std::variant<FixedWeights, UncertaintyWeights> weighting = FixedWeights{};

  void validate() const;
};

/// Mean of the ceil(k * H * W) largest per-cell cross-entropies, with
/// probabilities clamped to [1e-6, 1 - 1e-6]. k_fraction = 1 reduces to plain
/// mean cross-entropy. Throws on k out of range or shape mismatch.
double topk_ce(const SegGrid& pred_prob, const SegGrid& gt_binary, double k_fraction);

/// Mean over cells and channels of the piecewise residual
/// 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise. Throws on shape mismatch.
double smooth_l1(const FlowGrid& pred, const FlowGrid& gt);

struct TotalLoss {
  double value = 0.0;
  double lambda_seg_eff = 0.0;
  double lambda_flow_eff = 0.0;
};

/// Discounted multi-task objective: mean over frames of
/// gamma^t (lambda_seg * seg_loss_t + lambda_flow * flow_loss_t), plus
/// s_seg + s_flow under uncertainty weighting (where lambda_i = exp(-s_i)).
TotalLoss total_loss(std::span<const double> seg_losses,
                     std::span<const double> flow_losses, const LossConfig& cfg);

}  // namespace bevflow
