#include "bevflow/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "bevflow/rng.hpp"

namespace bevflow {

namespace {

constexpr std::uint64_t kDropoutStream = 1;
constexpr std::uint64_t kBoundaryStream = 2;
constexpr std::uint64_t kFalsePositiveStream = 3;
constexpr std::uint64_t kFlowStream = 4;

bool has_foreign_neighbor(const InstanceGrid& g, int r, int c, std::uint32_t id) {
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int k = 0; k < 4; ++k) {
    const int rr = r + dr[k], cc = c + dc[k];
    if (!g.in_bounds(rr, cc)) return true;  // window edge counts as background
    if (g.at(rr, cc) != id) return true;
  }
  return false;
}

std::uint32_t smallest_fg_neighbor(const InstanceGrid& g, int r, int c) {
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  std::uint32_t best = 0;
  for (int k = 0; k < 4; ++k) {
    const int rr = r + dr[k], cc = c + dc[k];
    if (!g.in_bounds(rr, cc)) continue;
    const std::uint32_t id = g.at(rr, cc);
    if (id != 0 && (best == 0 || id < best)) best = id;
  }
  return best;
}

struct FlowRef {
  Vec2 center;       // own-frame centroid
  Vec2 back_target;  // previous-frame centroid, or own when absent
  Vec2 fwd_delta;    // centroid displacement to next frame, zero when absent
};

}  // namespace

void NoiseConfig::validate() const {
  if (flow_sigma < 0.0) throw std::invalid_argument("NoiseConfig: flow_sigma must be >= 0");
  for (double p : {boundary_flip_prob, instance_dropout_prob})
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("NoiseConfig: probabilities must lie in [0,1]");
  if (false_positive_rate < 0.0)
    throw std::invalid_argument("NoiseConfig: false_positive_rate must be >= 0");
}

PredictionSet perturb(const LabelSet& labels, const NoiseConfig& noise) {
  noise.validate();
  const int H = labels.spec.height_cells, W = labels.spec.width_cells;
  const int n = labels.stored_frames();
  const double sigma = labels.centerness_sigma;
  const double flow_eps = labels.flow_threshold;

  Rng drop_rng(substream_seed(noise.seed, kDropoutStream));
  Rng flip_rng(substream_seed(noise.seed, kBoundaryStream));
  Rng fp_rng(substream_seed(noise.seed, kFalsePositiveStream));
  Rng flow_rng(substream_seed(noise.seed, kFlowStream));

  std::uint32_t fp_id = 0;
  for (const InstanceGrid& g : labels.inst)
    for (std::uint32_t id : g.id) fp_id = std::max(fp_id, id);
  ++fp_id;

  PredictionSet out;
  out.spec = labels.spec;
  out.t_in = labels.t_in;
  out.t_out = labels.t_out;

  for (int j = 0; j < n; ++j) {
    const InstanceGrid& gt = labels.inst[j];
    InstanceGrid eff = gt;

    // Instance dropout, decided per (frame, instance), IDs ascending.
    std::unordered_set<std::uint32_t> dropped;
    if (noise.instance_dropout_prob > 0.0)
      for (const Center& c : labels.centers[j])
        if (drop_rng.bernoulli(noise.instance_dropout_prob)) dropped.insert(c.id);
    if (!dropped.empty())
      for (auto& id : eff.id)
        if (id != 0 && dropped.count(id)) id = 0;

    // Boundary erosion/dilation; candidates come from the pre-flip map.
    if (noise.boundary_flip_prob > 0.0) {
      const InstanceGrid before = eff;
      for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
          const std::uint32_t id = before.at(r, c);
          if (id == 0 || !has_foreign_neighbor(before, r, c, id)) continue;
          if (flip_rng.bernoulli(noise.boundary_flip_prob)) eff.at(r, c) = 0;
        }
      for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
          if (before.at(r, c) != 0) continue;
          const std::uint32_t neighbor = smallest_fg_neighbor(before, r, c);
          if (neighbor == 0) continue;
          if (flip_rng.bernoulli(noise.boundary_flip_prob)) eff.at(r, c) = neighbor;
        }
    }

    // Spurious blobs with self-consistent modalities.
    std::unordered_map<std::uint32_t, Vec2> blob_centers;
    if (noise.false_positive_rate > 0.0) {
      int count = static_cast<int>(std::floor(noise.false_positive_rate));
      if (fp_rng.bernoulli(noise.false_positive_rate - std::floor(noise.false_positive_rate)))
        ++count;
      for (int b = 0; b < count; ++b) {
        const int bh = 2 + static_cast<int>(fp_rng.uniform_int(3));
        const int bw = 2 + static_cast<int>(fp_rng.uniform_int(3));
        const int r0 = static_cast<int>(fp_rng.uniform_int(static_cast<std::uint64_t>(H - bh)));
        const int c0 = static_cast<int>(fp_rng.uniform_int(static_cast<std::uint64_t>(W - bw)));
        bool clear = true;
        for (int r = r0; r < r0 + bh && clear; ++r)
          for (int c = c0; c < c0 + bw && clear; ++c)
            if (eff.at(r, c) != 0) clear = false;
        if (!clear) continue;
        for (int r = r0; r < r0 + bh; ++r)
          for (int c = c0; c < c0 + bw; ++c) eff.at(r, c) = fp_id;
        blob_centers[fp_id] = {r0 + (bh - 1) / 2.0, c0 + (bw - 1) / 2.0};
        ++fp_id;
      }
    }

    // Per-instance flow references for cells that are not plain copies.
    std::unordered_map<std::uint32_t, FlowRef> refs;
    for (const Center& c : labels.centers[j]) {
      FlowRef ref;
      ref.center = {c.row, c.col};
      ref.back_target = ref.center;
      if (j > 0)
        for (const Center& p : labels.centers[j - 1])
          if (p.id == c.id) ref.back_target = {p.row, p.col};
      if (j + 1 < n)
        for (const Center& q : labels.centers[j + 1])
          if (q.id == c.id)
            ref.fwd_delta = {q.row - c.row, q.col - c.col};
      refs[c.id] = ref;
    }
    for (const auto& [id, center] : blob_centers) {
      FlowRef ref;
      ref.center = center;
      ref.back_target = center;
      refs[id] = ref;
    }

    SegGrid seg(H, W);
    SegGrid cent(H, W);
    FlowGrid off(H, W), fwd(H, W), back(H, W);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    auto thresholded = [flow_eps](double dy, double dx) -> std::pair<float, float> {
      if (std::hypot(dy, dx) < flow_eps) return {0.0f, 0.0f};
      return {static_cast<float>(dy), static_cast<float>(dx)};
    };

    struct Best {
      double d2 = 1e300;
      int r = -1, c = -1;
    };
    std::unordered_map<std::uint32_t, Best> blob_peak;

    for (int r = 0; r < H; ++r)
      for (int c = 0; c < W; ++c) {
        const std::uint32_t id = eff.at(r, c);
        if (id == 0) continue;
        const std::size_t i = off.idx(r, c);
        seg.v[i] = 1.0f;
        if (gt.at(r, c) == id) {
          // Surviving ground-truth cell: copy the stored modalities.
          cent.v[i] = labels.centerness[j].at(r, c);
          off.dy[i] = labels.offset[j].dy[i];
          off.dx[i] = labels.offset[j].dx[i];
          fwd.dy[i] = labels.fwd_flow[j].dy[i];
          fwd.dx[i] = labels.fwd_flow[j].dx[i];
          back.dy[i] = labels.back_flow[j].dy[i];
          back.dx[i] = labels.back_flow[j].dx[i];
          continue;
        }
        // Dilated or spurious cell: synthesize from the instance references.
        const auto it = refs.find(id);
        if (it == refs.end()) throw std::logic_error("perturb: missing flow reference");
        const FlowRef& ref = it->second;
        const double dr = ref.center.x - r, dc = ref.center.y - c;
        cent.v[i] = static_cast<float>(std::exp(-(dr * dr + dc * dc) * inv));
        off.dy[i] = static_cast<float>(dr);
        off.dx[i] = static_cast<float>(dc);
        std::tie(fwd.dy[i], fwd.dx[i]) = thresholded(ref.fwd_delta.x, ref.fwd_delta.y);
        std::tie(back.dy[i], back.dx[i]) = thresholded(ref.back_target.x - r, ref.back_target.y - c);
        if (blob_centers.count(id)) {
          Best& b = blob_peak[id];
          const double d2 = dr * dr + dc * dc;
          if (d2 < b.d2) b = {d2, r, c};
        }
      }

    // Blobs need a strict peak so center extraction treats them as instances.
    for (const auto& [id, b] : blob_peak)
      if (b.r >= 0) cent.at(b.r, b.c) = 1.0f;

    if (noise.flow_sigma > 0.0) {
      for (FlowGrid* g : {&back, &fwd, &off})
        for (int r = 0; r < H; ++r)
          for (int c = 0; c < W; ++c) {
            const std::size_t i = g->idx(r, c);
            if (eff.at(r, c) == 0) continue;
            g->dy[i] += static_cast<float>(flow_rng.normal(0.0, noise.flow_sigma));
            g->dx[i] += static_cast<float>(flow_rng.normal(0.0, noise.flow_sigma));
          }
    }

    out.seg.push_back(std::move(seg));
    out.centerness.push_back(std::move(cent));
    out.offset.push_back(std::move(off));
    out.fwd_flow.push_back(std::move(fwd));
    out.back_flow.push_back(std::move(back));
  }
  return out;
}

}  // namespace bevflow
