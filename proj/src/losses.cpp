#include "bevflow/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bevflow {

namespace {

constexpr double kProbClamp = 1e-6;

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double smooth_l1_term(double x) {
  const double ax = std::abs(x);
  return ax < 1.0 ? 0.5 * x * x : ax - 0.5;
}

}  // namespace

void LossConfig::validate() const {
  if (top_k_fraction <= 0.0 || top_k_fraction > 1.0)
    throw std::invalid_argument("LossConfig: top_k_fraction must lie in (0,1]");
  if (gamma <= 0.0 || gamma > 1.0)
    throw std::invalid_argument("LossConfig: gamma must lie in (0,1]");
  if (const auto* fixed = std::get_if<FixedWeights>(&weighting))
    if (fixed->lambda_seg < 0.0 || fixed->lambda_flow < 0.0)
      throw std::invalid_argument("LossConfig: fixed weights must be non-negative");
}

double topk_ce(const SegGrid& pred_prob, const SegGrid& gt_binary, double k_fraction) {
  if (k_fraction <= 0.0 || k_fraction > 1.0)
    throw std::invalid_argument("topk_ce: k_fraction must lie in (0,1]");
  if (pred_prob.h != gt_binary.h || pred_prob.w != gt_binary.w)
    throw std::invalid_argument("topk_ce: shape mismatch");
  if (pred_prob.v.empty()) throw std::invalid_argument("topk_ce: empty grid");

  std::vector<double> ce(pred_prob.v.size());
  for (std::size_t i = 0; i < ce.size(); ++i) {
    const double p = clamp_prob(static_cast<double>(pred_prob.v[i]));
    const bool positive = gt_binary.v[i] >= 0.5f;
    ce[i] = positive ? -std::log(p) : -std::log(1.0 - p);
  }
  const std::size_t k =
      static_cast<std::size_t>(std::ceil(k_fraction * static_cast<double>(ce.size())));
  std::sort(ce.begin(), ce.end(), std::greater<double>());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += ce[i];
  return sum / static_cast<double>(k);
}

double smooth_l1(const FlowGrid& pred, const FlowGrid& gt) {
  if (pred.h != gt.h || pred.w != gt.w) throw std::invalid_argument("smooth_l1: shape mismatch");
  if (pred.dy.empty()) throw std::invalid_argument("smooth_l1: empty grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.dy.size(); ++i) {
    sum += smooth_l1_term(static_cast<double>(pred.dy[i]) - static_cast<double>(gt.dy[i]));
    sum += smooth_l1_term(static_cast<double>(pred.dx[i]) - static_cast<double>(gt.dx[i]));
  }
  return sum / (2.0 * static_cast<double>(pred.dy.size()));
}

TotalLoss total_loss(std::span<const double> seg_losses, std::span<const double> flow_losses,
                     const LossConfig& cfg) {
  cfg.validate();
  if (seg_losses.size() != flow_losses.size())
    throw std::invalid_argument("total_loss: per-frame loss lists must have equal length");
  if (seg_losses.empty()) throw std::invalid_argument("total_loss: empty loss lists");

  TotalLoss out;
  double constant = 0.0;
  if (const auto* fixed = std::get_if<FixedWeights>(&cfg.weighting)) {
    out.lambda_seg_eff = fixed->lambda_seg;
    out.lambda_flow_eff = fixed->lambda_flow;
  } else {
    const auto& u = std::get<UncertaintyWeights>(cfg.weighting);
    out.lambda_seg_eff = std::exp(-u.s_seg);
    out.lambda_flow_eff = std::exp(-u.s_flow);
    constant = u.s_seg + u.s_flow;
  }

  double discount = 1.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < seg_losses.size(); ++t) {
    sum += discount * (out.lambda_seg_eff * seg_losses[t] + out.lambda_flow_eff * flow_losses[t]);
    discount *= cfg.gamma;
  }
  out.value = sum / static_cast<double>(seg_losses.size()) + constant;
  return out;
}

}  // namespace bevflow
