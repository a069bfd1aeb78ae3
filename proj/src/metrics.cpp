#include "bevflow/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace bevflow {

namespace {

std::uint64_t pair_key(std::uint32_t pred, std::uint32_t gt) {
  return (static_cast<std::uint64_t>(pred) << 32) | gt;
}

}  // namespace

PanopticMatch panoptic_match(const InstanceGrid& pred, const InstanceGrid& gt) {
  if (pred.h != gt.h || pred.w != gt.w)
    throw std::invalid_argument("panoptic_match: shape mismatch");

  std::unordered_map<std::uint32_t, std::size_t> pred_size, gt_size;
  std::unordered_map<std::uint64_t, std::size_t> inter;
  for (std::size_t i = 0; i < pred.id.size(); ++i) {
    const std::uint32_t p = pred.id[i], g = gt.id[i];
    if (p != 0) ++pred_size[p];
    if (g != 0) ++gt_size[g];
    if (p != 0 && g != 0) ++inter[pair_key(p, g)];
  }

  PanopticMatch out;
  std::unordered_set<std::uint32_t> matched_pred, matched_gt;
  for (const auto& [key, overlap] : inter) {
    const std::uint32_t p = static_cast<std::uint32_t>(key >> 32);
    const std::uint32_t g = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
    const double uni = static_cast<double>(pred_size[p] + gt_size[g] - overlap);
    const double iou = static_cast<double>(overlap) / uni;
    if (iou > 0.5) {
      out.tp.push_back({p, g, iou});
      matched_pred.insert(p);
      matched_gt.insert(g);
    }
  }
  std::sort(out.tp.begin(), out.tp.end(), [](const PanopticPair& a, const PanopticPair& b) {
    return a.pred_id != b.pred_id ? a.pred_id < b.pred_id : a.gt_id < b.gt_id;
  });
  for (const auto& [p, n] : pred_size)
    if (!matched_pred.count(p)) out.fp_pred.push_back(p);
  for (const auto& [g, n] : gt_size)
    if (!matched_gt.count(g)) out.fn_gt.push_back(g);
  std::sort(out.fp_pred.begin(), out.fp_pred.end());
  std::sort(out.fn_gt.begin(), out.fn_gt.end());
  return out;
}

double iou_seq(const std::vector<SegGrid>& pred, const std::vector<SegGrid>& gt,
               double binarize_threshold) {
  if (pred.size() != gt.size()) throw std::invalid_argument("iou_seq: length mismatch");
  if (pred.empty()) throw std::invalid_argument("iou_seq: empty sequence");
  double total = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const SegGrid& a = pred[t];
    const SegGrid& b = gt[t];
    if (a.h != b.h || a.w != b.w) throw std::invalid_argument("iou_seq: shape mismatch");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
      const bool pa = a.v[i] >= static_cast<float>(binarize_threshold);
      const bool pb = b.v[i] >= static_cast<float>(binarize_threshold);
      inter += pa && pb;
      uni += pa || pb;
    }
    total += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  return total / static_cast<double>(pred.size());
}

VpqResult vpq_seq(const std::vector<InstanceGrid>& pred, const std::vector<InstanceGrid>& gt) {
  if (pred.size() != gt.size()) throw std::invalid_argument("vpq_seq: length mismatch");
  if (pred.empty()) throw std::invalid_argument("vpq_seq: empty sequence");

  // ID correspondences are fixed at a pair's first co-occurrence and persist
  // across gaps; a later match of either instance to anything else counts as
  // FP + FN.
  std::unordered_map<std::uint32_t, std::uint32_t> gt2pred, pred2gt;
  VpqResult out;
  out.per_frame.reserve(pred.size());

  for (std::size_t t = 0; t < pred.size(); ++t) {
    const PanopticMatch match = panoptic_match(pred[t], gt[t]);
    FrameStats fs;
    fs.fp = static_cast<int>(match.fp_pred.size());
    fs.fn = static_cast<int>(match.fn_gt.size());
    for (const PanopticPair& pair : match.tp) {
      const auto git = gt2pred.find(pair.gt_id);
      const auto pit = pred2gt.find(pair.pred_id);
      const bool gt_free = git == gt2pred.end();
      const bool pred_free = pit == pred2gt.end();
      const bool consistent =
          (gt_free && pred_free) ||
          (!gt_free && !pred_free && git->second == pair.pred_id && pit->second == pair.gt_id);
      if (consistent) {
        if (gt_free) {
          gt2pred.emplace(pair.gt_id, pair.pred_id);
          pred2gt.emplace(pair.pred_id, pair.gt_id);
        }
        ++fs.tp;
        fs.soft_iou_sum += pair.iou;
      } else {
        ++fs.fp;
        ++fs.fn;
      }
    }
    out.per_frame.push_back(fs);
    out.vpq += fs.pq();
  }
  out.vpq /= static_cast<double>(pred.size());
  return out;
}

std::string MetricsReport::to_text() const {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "iou=%.4f\n", iou);
  out += buf;
  std::snprintf(buf, sizeof(buf), "vpq=%.4f\n", vpq);
  out += buf;
  for (std::size_t t = 0; t < per_frame.size(); ++t) {
    const FrameStats& fs = per_frame[t];
    std::snprintf(buf, sizeof(buf), "frame=%zu tp=%d fp=%d fn=%d soft_iou_sum=%.6f pq=%.6f\n", t,
                  fs.tp, fs.fp, fs.fn, fs.soft_iou_sum, fs.pq());
    out += buf;
  }
  return out;
}

MetricsReport evaluate_instances(const std::vector<InstanceGrid>& pred,
                                 const std::vector<InstanceGrid>& gt) {
  MetricsReport report;
  const VpqResult v = vpq_seq(pred, gt);
  report.vpq = v.vpq;
  report.per_frame = v.per_frame;

  auto masks = [](const std::vector<InstanceGrid>& seq) {
    std::vector<SegGrid> out;
    out.reserve(seq.size());
    for (const InstanceGrid& g : seq) {
      SegGrid s(g.h, g.w);
      for (std::size_t i = 0; i < g.id.size(); ++i) s.v[i] = g.id[i] != 0 ? 1.0f : 0.0f;
      out.push_back(std::move(s));
    }
    return out;
  };
  report.iou = iou_seq(masks(pred), masks(gt), 0.5);
  return report;
}

}  // namespace bevflow
