#include "bevflow/labels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace bevflow {

namespace {

/// Rotations used by the rasterizer snap values within 1e-12 of {0, +-1} so
/// quarter-turn poses rasterize exactly.
double snap_trig(double t) {
  if (std::abs(t) < 1e-12) return 0.0;
  if (std::abs(t - 1.0) < 1e-12) return 1.0;
  if (std::abs(t + 1.0) < 1e-12) return -1.0;
  return t;
}

struct CentroidAccum {
  double sum_r = 0.0, sum_c = 0.0;
  std::size_t n = 0;
};

std::unordered_map<std::uint32_t, Vec2> center_lookup(const CenterList& centers) {
  std::unordered_map<std::uint32_t, Vec2> out;
  out.reserve(centers.size());
  for (const Center& c : centers) out[c.id] = {c.row, c.col};
  return out;
}

}  // namespace

void LabelParams::validate() const {
  grid.validate();
  if (centerness_sigma <= 0.0)
    throw std::invalid_argument("LabelParams: centerness_sigma must be positive");
  if (flow_threshold < 0.0)
    throw std::invalid_argument("LabelParams: flow_threshold must be non-negative");
}

std::pair<InstanceGrid, SegGrid> rasterize_frame(const std::vector<AgentState>& agents,
                                                 const Pose2D& ego, GridSpec spec) {
  spec.anchor = ego;
  spec.validate();
  const int H = spec.height_cells, W = spec.width_cells;
  InstanceGrid inst(H, W);
  SegGrid seg(H, W);

  const double ec = snap_trig(std::cos(ego.yaw));
  const double es = snap_trig(std::sin(ego.yaw));

  for (const AgentState& a : agents) {
    if (a.id == 0) throw std::invalid_argument("rasterize_frame: agent ID 0 is reserved");
    const double hl = a.length / 2.0, hw = a.width / 2.0;
    const double ac = snap_trig(std::cos(a.pose.yaw));
    const double as = snap_trig(std::sin(a.pose.yaw));

    // Candidate range from the rectangle's corners.
    double rmin = 1e300, rmax = -1e300, cmin = 1e300, cmax = -1e300;
    for (const Vec2 corner : {Vec2{hl, hw}, Vec2{hl, -hw}, Vec2{-hl, -hw}, Vec2{-hl, hw}}) {
      const Vec2 p{a.pose.x + ac * corner.x - as * corner.y,
                   a.pose.y + as * corner.x + ac * corner.y};
      const GridCoord g = world_to_grid_unbounded(p, spec);
      rmin = std::min(rmin, g.row);
      rmax = std::max(rmax, g.row);
      cmin = std::min(cmin, g.col);
      cmax = std::max(cmax, g.col);
    }
    const int r0 = std::max(0, static_cast<int>(std::floor(rmin)) - 1);
    const int r1 = std::min(H - 1, static_cast<int>(std::ceil(rmax)) + 1);
    const int c0 = std::max(0, static_cast<int>(std::floor(cmin)) - 1);
    const int c1 = std::min(W - 1, static_cast<int>(std::ceil(cmax)) + 1);

    for (int r = r0; r <= r1; ++r) {
      const double qx = (H / 2.0 - r) * spec.resolution;
      for (int c = c0; c <= c1; ++c) {
        const double qy = (W / 2.0 - c) * spec.resolution;
        // Cell center in world coordinates, then in the agent frame.
        const double px = ego.x + ec * qx - es * qy;
        const double py = ego.y + es * qx + ec * qy;
        const double dx = px - a.pose.x;
        const double dy = py - a.pose.y;
        const double u = ac * dx + as * dy;
        const double v = -as * dx + ac * dy;
        if (u >= -hl && u < hl && v >= -hw && v < hw) {
          std::uint32_t& cell = inst.at(r, c);
          if (cell == 0 || a.id < cell) cell = a.id;
        }
      }
    }
  }

  for (std::size_t i = 0; i < inst.id.size(); ++i) seg.v[i] = inst.id[i] != 0 ? 1.0f : 0.0f;
  return {std::move(inst), std::move(seg)};
}

CenterList compute_centers(const InstanceGrid& inst) {
  std::map<std::uint32_t, CentroidAccum> acc;
  for (int r = 0; r < inst.h; ++r)
    for (int c = 0; c < inst.w; ++c) {
      const std::uint32_t id = inst.at(r, c);
      if (id == 0) continue;
      CentroidAccum& a = acc[id];
      a.sum_r += r;
      a.sum_c += c;
      ++a.n;
    }
  CenterList out;
  out.reserve(acc.size());
  for (const auto& [id, a] : acc)
    out.push_back({id, a.sum_r / static_cast<double>(a.n), a.sum_c / static_cast<double>(a.n), 1.0});
  return out;
}

SegGrid compute_centerness(const InstanceGrid& inst, const CenterList& centers, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("compute_centerness: sigma must be positive");
  SegGrid out(inst.h, inst.w);
  const auto lut = center_lookup(centers);
  const double inv = 1.0 / (2.0 * sigma * sigma);

  struct Best {
    double d2 = 1e300;
    int r = -1, c = -1;
  };
  std::unordered_map<std::uint32_t, Best> best;
  best.reserve(lut.size());

  for (int r = 0; r < inst.h; ++r)
    for (int c = 0; c < inst.w; ++c) {
      const std::uint32_t id = inst.at(r, c);
      if (id == 0) continue;
      const auto it = lut.find(id);
      if (it == lut.end())
        throw std::logic_error("compute_centerness: instance without a center entry");
      const double dr = it->second.x - r;
      const double dc = it->second.y - c;
      const double d2 = dr * dr + dc * dc;
      out.at(r, c) = static_cast<float>(std::exp(-d2 * inv));
      Best& b = best[id];
      if (d2 < b.d2) b = {d2, r, c};  // row-major scan keeps the smallest (r, c) on ties
    }

  for (const auto& [id, b] : best)
    if (b.r >= 0) out.at(b.r, b.c) = 1.0f;
  return out;
}

FlowGrid compute_offsets(const InstanceGrid& inst, const CenterList& centers) {
  FlowGrid out(inst.h, inst.w);
  const auto lut = center_lookup(centers);
  for (int r = 0; r < inst.h; ++r)
    for (int c = 0; c < inst.w; ++c) {
      const std::uint32_t id = inst.at(r, c);
      if (id == 0) continue;
      const auto it = lut.find(id);
      if (it == lut.end()) throw std::logic_error("compute_offsets: instance without a center entry");
      out.dy[out.idx(r, c)] = static_cast<float>(it->second.x - r);
      out.dx[out.idx(r, c)] = static_cast<float>(it->second.y - c);
    }
  return out;
}

FlowGrid compute_forward_flow(const InstanceGrid& inst_t, const InstanceGrid* inst_next) {
  FlowGrid out(inst_t.h, inst_t.w);
  std::unordered_map<std::uint32_t, Vec2> delta;
  if (inst_next != nullptr) {
    const auto cur = center_lookup(compute_centers(inst_t));
    const auto nxt = center_lookup(compute_centers(*inst_next));
    for (const auto& [id, c] : cur) {
      const auto it = nxt.find(id);
      if (it != nxt.end()) delta[id] = {it->second.x - c.x, it->second.y - c.y};
    }
  }
  for (int r = 0; r < inst_t.h; ++r)
    for (int c = 0; c < inst_t.w; ++c) {
      const std::uint32_t id = inst_t.at(r, c);
      if (id == 0) continue;
      const auto it = delta.find(id);
      if (it == delta.end()) continue;  // absent next frame: zero
      out.dy[out.idx(r, c)] = static_cast<float>(it->second.x);
      out.dx[out.idx(r, c)] = static_cast<float>(it->second.y);
    }
  return out;
}

FlowGrid compute_backward_centripetal_flow(const InstanceGrid& inst_t,
                                           const InstanceGrid* inst_prev) {
  FlowGrid out(inst_t.h, inst_t.w);
  const auto cur = center_lookup(compute_centers(inst_t));
  std::unordered_map<std::uint32_t, Vec2> prev;
  if (inst_prev != nullptr) prev = center_lookup(compute_centers(*inst_prev));

  for (int r = 0; r < inst_t.h; ++r)
    for (int c = 0; c < inst_t.w; ++c) {
      const std::uint32_t id = inst_t.at(r, c);
      if (id == 0) continue;
      const auto pit = prev.find(id);
      // Instances absent in the previous frame point at their own-frame
      // center, so the field degenerates to the offset field.
      const Vec2 target = pit != prev.end() ? pit->second : cur.at(id);
      out.dy[out.idx(r, c)] = static_cast<float>(target.x - r);
      out.dx[out.idx(r, c)] = static_cast<float>(target.y - c);
    }
  return out;
}

FlowGrid threshold_flow(const FlowGrid& flow, double eps) {
  if (eps < 0.0) throw std::invalid_argument("threshold_flow: eps must be non-negative");
  FlowGrid out = flow;
  for (std::size_t i = 0; i < out.dy.size(); ++i) {
    const double mag = std::hypot(static_cast<double>(out.dy[i]), static_cast<double>(out.dx[i]));
    if (mag < eps) {
      out.dy[i] = 0.0f;
      out.dx[i] = 0.0f;
    }
  }
  return out;
}

LabelSet generate_labels(const Scenario& scenario, const LabelParams& params) {
  params.validate();
  scenario.validate();
  const int t_in = params.t_in > 0 ? params.t_in : scenario.t_in;
  const int t_out = params.t_out > 0 ? params.t_out : scenario.t_out;
  if (t_in < 1 || t_out < 1)
    throw std::invalid_argument("generate_labels: t_in and t_out must be >= 1");
  if (static_cast<int>(scenario.frames.size()) < t_in + t_out)
    throw std::invalid_argument("generate_labels: scenario too short for the label window");

  LabelSet out;
  out.spec = params.grid;
  out.spec.anchor = scenario.frames[t_in - 1].ego;
  out.t_in = t_in;
  out.t_out = t_out;
  out.centerness_sigma = params.centerness_sigma;
  out.flow_threshold = params.flow_threshold;

  const int n = t_out + 1;
  out.seg.reserve(n);
  out.inst.reserve(n);
  for (int j = 0; j < n; ++j) {
    const ScenarioFrame& frame = scenario.frames[t_in - 1 + j];
    auto [inst, seg] = rasterize_frame(frame.agents, out.spec.anchor, out.spec);
    out.inst.push_back(std::move(inst));
    out.seg.push_back(std::move(seg));
    out.centers.push_back(compute_centers(out.inst.back()));
    out.centerness.push_back(
        compute_centerness(out.inst.back(), out.centers.back(), params.centerness_sigma));
    out.offset.push_back(compute_offsets(out.inst.back(), out.centers.back()));
  }
  for (int j = 0; j < n; ++j) {
    const InstanceGrid* prev = j > 0 ? &out.inst[j - 1] : nullptr;
    const InstanceGrid* next = j + 1 < n ? &out.inst[j + 1] : nullptr;
    out.back_flow.push_back(
        threshold_flow(compute_backward_centripetal_flow(out.inst[j], prev), params.flow_threshold));
    out.fwd_flow.push_back(
        threshold_flow(compute_forward_flow(out.inst[j], next), params.flow_threshold));
  }
  return out;
}

}  // namespace bevflow
