#include "bevflow/assoc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include "bevflow/hungarian.hpp"

namespace bevflow {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_usec(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0).count();
}

/// k x k sliding window max, separable (row pass, then column pass).
std::vector<float> window_max(const SegGrid& seg, int k) {
  const int h = seg.h, w = seg.w, half = k / 2;
  std::vector<float> tmp(static_cast<std::size_t>(h) * w);
  std::vector<float> out(static_cast<std::size_t>(h) * w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      float m = 0.0f;
      const int c0 = std::max(0, c - half), c1 = std::min(w - 1, c + half);
      for (int cc = c0; cc <= c1; ++cc) m = std::max(m, seg.at(r, cc));
      tmp[static_cast<std::size_t>(r) * w + c] = m;
    }
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      float m = 0.0f;
      const int r0 = std::max(0, r - half), r1 = std::min(h - 1, r + half);
      for (int rr = r0; rr <= r1; ++rr) m = std::max(m, tmp[static_cast<std::size_t>(rr) * w + c]);
      out[static_cast<std::size_t>(r) * w + c] = m;
    }
  return out;
}

std::vector<std::uint8_t> binarize(const SegGrid& seg, double threshold) {
  std::vector<std::uint8_t> mask(seg.v.size());
  for (std::size_t i = 0; i < seg.v.size(); ++i)
    mask[i] = seg.v[i] >= static_cast<float>(threshold) ? 1 : 0;
  return mask;
}

int nearest_center(const CenterList& centers, double row, double col) {
  int best = -1;
  double best_d2 = 1e300;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const double dr = centers[k].row - row, dc = centers[k].col - col;
    const double d2 = dr * dr + dc * dc;
    if (d2 < best_d2) {  // strict: ties keep the earlier (smaller) center ID
      best_d2 = d2;
      best = static_cast<int>(k);
    }
  }
  return best;
}

struct HmTrackState {
  CenterList centers;
  std::vector<std::uint32_t> track_ids;
};

}  // namespace

AssocMode assoc_mode_from_string(const std::string& s) {
  if (s == "warp") return AssocMode::warp;
  if (s == "hm") return AssocMode::hm;
  throw std::invalid_argument("unknown association mode: " + s);
}

std::string to_string(AssocMode m) { return m == AssocMode::warp ? "warp" : "hm"; }

void AssocConfig::validate() const {
  if (pool_kernel < 3 || pool_kernel % 2 == 0)
    throw std::invalid_argument("AssocConfig: pool_kernel must be odd and >= 3");
  if (center_threshold < 0.0 || center_threshold > 1.0 || seg_binarize_threshold < 0.0 ||
      seg_binarize_threshold > 1.0)
    throw std::invalid_argument("AssocConfig: thresholds must lie in [0,1]");
  if (gate_radius <= 0.0) throw std::invalid_argument("AssocConfig: gate_radius must be positive");
}

std::pair<std::vector<std::int32_t>, int> label_components(const std::vector<std::uint8_t>& mask,
                                                           int h, int w) {
  std::vector<std::int32_t> labels(mask.size(), 0);
  std::vector<std::size_t> stack;
  int count = 0;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || labels[start] != 0) continue;
    ++count;
    labels[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int r = static_cast<int>(i) / w, c = static_cast<int>(i) % w;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          const std::size_t ii = static_cast<std::size_t>(rr) * w + cc;
          if (mask[ii] && labels[ii] == 0) {
            labels[ii] = count;
            stack.push_back(ii);
          }
        }
    }
  }
  return {std::move(labels), count};
}

CenterList extract_centers(const SegGrid& seg, const AssocConfig& cfg) {
  cfg.validate();
  const int h = seg.h, w = seg.w;
  const int half = cfg.pool_kernel / 2;
  const std::vector<float> wmax = window_max(seg, cfg.pool_kernel);

  std::vector<std::uint8_t> qual(seg.v.size(), 0);
  for (std::size_t i = 0; i < seg.v.size(); ++i)
    qual[i] = (seg.v[i] >= static_cast<float>(cfg.center_threshold) && seg.v[i] == wmax[i]) ? 1 : 0;

  // Equal-valued maxima that see each other inside one pooling window are one
  // plateau (transitively) and keep only their lexicographically smallest
  // cell; this is what makes the kernel act as a suppression radius. The
  // row-major scan visits that cell first.
  CenterList out;
  std::vector<std::uint8_t> visited(seg.v.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < qual.size(); ++start) {
    if (!qual[start] || visited[start]) continue;
    const float value = seg.v[start];
    visited[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int r = static_cast<int>(i) / w, c = static_cast<int>(i) % w;
      for (int rr = std::max(0, r - half); rr <= std::min(h - 1, r + half); ++rr)
        for (int cc = std::max(0, c - half); cc <= std::min(w - 1, c + half); ++cc) {
          const std::size_t ii = static_cast<std::size_t>(rr) * w + cc;
          if (qual[ii] && !visited[ii] && seg.v[ii] == value) {
            visited[ii] = 1;
            stack.push_back(ii);
          }
        }
    }
    Center center;
    center.id = static_cast<std::uint32_t>(out.size()) + 1;
    center.row = static_cast<double>(start / static_cast<std::size_t>(w));
    center.col = static_cast<double>(start % static_cast<std::size_t>(w));
    center.score = value;
    out.push_back(center);
  }
  return out;
}

InstanceGrid assign_first_frame(const SegGrid& seg, const FlowGrid& back_flow,
                                const CenterList& centers_prev, const AssocConfig& cfg) {
  cfg.validate();
  if (seg.h != back_flow.h || seg.w != back_flow.w)
    throw std::invalid_argument("assign_first_frame: shape mismatch");
  InstanceGrid out(seg.h, seg.w);
  const std::vector<std::uint8_t> fg = binarize(seg, cfg.seg_binarize_threshold);

  if (centers_prev.empty()) {
    auto [labels, count] = label_components(fg, seg.h, seg.w);
    (void)count;
    for (std::size_t i = 0; i < out.id.size(); ++i)
      out.id[i] = static_cast<std::uint32_t>(labels[i]);
    return out;
  }

  for (int r = 0; r < seg.h; ++r)
    for (int c = 0; c < seg.w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * seg.w + c;
      if (!fg[i]) continue;
      const double wr = r + static_cast<double>(back_flow.dy[i]);
      const double wc = c + static_cast<double>(back_flow.dx[i]);
      const int k = nearest_center(centers_prev, wr, wc);
      out.id[i] = centers_prev[static_cast<std::size_t>(k)].id;
    }
  return out;
}

InstanceGrid warp_associate(const SegGrid& seg, const FlowGrid& back_flow,
                            const InstanceGrid& inst_prev, const AssocConfig& cfg,
                            std::uint32_t& id_counter) {
  cfg.validate();
  if (seg.h != back_flow.h || seg.w != back_flow.w || seg.h != inst_prev.h ||
      seg.w != inst_prev.w)
    throw std::invalid_argument("warp_associate: shape mismatch");
  const int h = seg.h, w = seg.w;
  InstanceGrid out(h, w);
  const std::vector<std::uint8_t> fg = binarize(seg, cfg.seg_binarize_threshold);

  // IDs are categorical: the destination is looked up at the nearest cell,
  // never interpolated. Destinations on background or outside the window
  // leave the cell unresolved for the component pass below.
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (!fg[i]) continue;
      const int dr = nearest_cell(r + static_cast<double>(back_flow.dy[i]));
      const int dc = nearest_cell(c + static_cast<double>(back_flow.dx[i]));
      if (dr < 0 || dr >= h || dc < 0 || dc >= w) continue;
      out.id[i] = inst_prev.at(dr, dc);
    }

  auto [labels, count] = label_components(fg, h, w);
  struct Tally {
    std::unordered_map<std::uint32_t, std::size_t> votes;
    std::unordered_map<std::uint32_t, std::size_t> first_seen;
    bool any_unresolved = false;
  };
  std::vector<Tally> tallies(static_cast<std::size_t>(count) + 1);
  for (std::size_t i = 0; i < fg.size(); ++i) {
    if (!fg[i]) continue;
    Tally& t = tallies[static_cast<std::size_t>(labels[i])];
    if (out.id[i] == 0) {
      t.any_unresolved = true;
    } else {
      ++t.votes[out.id[i]];
      t.first_seen.emplace(out.id[i], i);
    }
  }

  // Majority vote per component; ties prefer the ID resolved earliest in scan
  // order, which keeps the rule stable under any relabeling of inst_prev.
  std::vector<std::uint32_t> fill(static_cast<std::size_t>(count) + 1, 0);
  for (int k = 1; k <= count; ++k) {
    Tally& t = tallies[static_cast<std::size_t>(k)];
    if (!t.any_unresolved) continue;
    if (t.votes.empty()) {
      fill[static_cast<std::size_t>(k)] = id_counter++;
      continue;
    }
    std::uint32_t best_id = 0;
    std::size_t best_votes = 0, best_first = 0;
    for (const auto& [id, n] : t.votes) {
      const std::size_t first = t.first_seen.at(id);
      if (n > best_votes || (n == best_votes && first < best_first)) {
        best_id = id;
        best_votes = n;
        best_first = first;
      }
    }
    fill[static_cast<std::size_t>(k)] = best_id;
  }
  for (std::size_t i = 0; i < fg.size(); ++i)
    if (fg[i] && out.id[i] == 0) out.id[i] = fill[static_cast<std::size_t>(labels[i])];
  return out;
}

namespace {

/// One frame of the HM baseline: cluster foreground pixels to the extracted
/// centers via the offset head. With no centers the frame stays background.
InstanceGrid hm_cluster_frame(const SegGrid& seg, const FlowGrid& offset,
                              const CenterList& centers, const AssocConfig& cfg) {
  InstanceGrid out(seg.h, seg.w);
  if (centers.empty()) return out;
  const std::vector<std::uint8_t> fg = binarize(seg, cfg.seg_binarize_threshold);
  for (int r = 0; r < seg.h; ++r)
    for (int c = 0; c < seg.w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * seg.w + c;
      if (!fg[i]) continue;
      const double pr = r + static_cast<double>(offset.dy[i]);
      const double pc = c + static_cast<double>(offset.dx[i]);
      const int k = nearest_center(centers, pr, pc);
      out.id[i] = centers[static_cast<std::size_t>(k)].id;
    }
  return out;
}

/// Instance-level association across one frame transition: project previous
/// centers with the single forward-flow vector at the center cell, then match
/// to the new centers with Hungarian assignment, gated by gate_radius.
std::vector<std::uint32_t> hm_match(const HmTrackState& prev, const FlowGrid& prev_fwd,
                                    const CenterList& cur, const AssocConfig& cfg,
                                    std::uint32_t& next_track) {
  std::vector<std::uint32_t> track_ids(cur.size(), 0);
  if (!prev.centers.empty() && !cur.empty()) {
    std::vector<std::vector<double>> cost(prev.centers.size(),
                                          std::vector<double>(cur.size(), 0.0));
    for (std::size_t i = 0; i < prev.centers.size(); ++i) {
      const int r = std::clamp(nearest_cell(prev.centers[i].row), 0, prev_fwd.h - 1);
      const int c = std::clamp(nearest_cell(prev.centers[i].col), 0, prev_fwd.w - 1);
      const double pr = prev.centers[i].row + static_cast<double>(prev_fwd.dy[prev_fwd.idx(r, c)]);
      const double pc = prev.centers[i].col + static_cast<double>(prev_fwd.dx[prev_fwd.idx(r, c)]);
      for (std::size_t j = 0; j < cur.size(); ++j)
        cost[i][j] = std::hypot(pr - cur[j].row, pc - cur[j].col);
    }
    const Assignment assignment = hungarian(cost);
    for (const auto& [i, j] : assignment.pairs)
      if (cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <= cfg.gate_radius)
        track_ids[static_cast<std::size_t>(j)] = prev.track_ids[static_cast<std::size_t>(i)];
  }
  for (std::size_t j = 0; j < track_ids.size(); ++j)
    if (track_ids[j] == 0) track_ids[j] = next_track++;
  return track_ids;
}

std::vector<InstanceGrid> hm_run(const std::vector<SegGrid>& seg,
                                 const std::vector<SegGrid>& centerness,
                                 const std::vector<FlowGrid>& offset,
                                 const std::vector<FlowGrid>& fwd_flow, const AssocConfig& cfg,
                                 TimingReport* timing) {
  const std::size_t T = seg.size();
  if (centerness.size() != T || offset.size() != T || fwd_flow.size() != T)
    throw std::invalid_argument("hm_associate: modality sequences must have equal length");
  std::vector<InstanceGrid> out;
  out.reserve(T);
  HmTrackState prev;
  std::uint32_t next_track = 1;

  for (std::size_t t = 0; t < T; ++t) {
    auto t0 = Clock::now();
    CenterList centers = extract_centers(centerness[t], cfg);
    if (timing) timing->entries.push_back({"centers", static_cast<int>(t), elapsed_usec(t0)});

    t0 = Clock::now();
    InstanceGrid clustered = hm_cluster_frame(seg[t], offset[t], centers, cfg);
    if (timing) timing->entries.push_back({"cluster", static_cast<int>(t), elapsed_usec(t0)});

    t0 = Clock::now();
    std::vector<std::uint32_t> track_ids;
    if (t == 0) {
      track_ids.resize(centers.size());
      for (std::size_t j = 0; j < centers.size(); ++j) track_ids[j] = next_track++;
    } else {
      track_ids = hm_match(prev, fwd_flow[t - 1], centers, cfg, next_track);
    }
    // Remap cluster-local IDs to track IDs.
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (std::size_t j = 0; j < centers.size(); ++j) remap[centers[j].id] = track_ids[j];
    for (auto& id : clustered.id)
      if (id != 0) id = remap.at(id);
    if (timing) timing->entries.push_back({"match", static_cast<int>(t), elapsed_usec(t0)});

    prev.centers = std::move(centers);
    prev.track_ids = std::move(track_ids);
    out.push_back(std::move(clustered));
  }
  return out;
}

}  // namespace

std::vector<InstanceGrid> hm_associate(const std::vector<SegGrid>& seg,
                                       const std::vector<SegGrid>& centerness,
                                       const std::vector<FlowGrid>& offset,
                                       const std::vector<FlowGrid>& fwd_flow,
                                       const AssocConfig& cfg) {
  cfg.validate();
  return hm_run(seg, centerness, offset, fwd_flow, cfg, nullptr);
}

std::int64_t TimingReport::total_usec() const {
  std::int64_t total = 0;
  for (const StageTiming& e : entries) total += e.usec;
  return total;
}

std::string TimingReport::to_text() const {
  std::string out;
  char buf[96];
  for (const StageTiming& e : entries) {
    std::snprintf(buf, sizeof(buf), "%s %d %lld\n", e.stage.c_str(), e.frame,
                  static_cast<long long>(e.usec));
    out += buf;
  }
  return out;
}

PipelineResult run_pipeline(const PredictionSet& pred, const AssocConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(pred.seg.size());
  if (n < 2)
    throw std::invalid_argument(
        "run_pipeline: needs the reference segmentation plus at least one prediction frame");

  PipelineResult result;
  if (cfg.mode == AssocMode::warp) {
    if (static_cast<int>(pred.back_flow.size()) != n)
      throw std::invalid_argument("run_pipeline: warp mode needs a backward flow per frame");
    auto t0 = Clock::now();
    const CenterList centers_prev = extract_centers(pred.seg[0], cfg);
    result.timing.entries.push_back({"centers", -1, elapsed_usec(t0)});

    t0 = Clock::now();
    result.inst.push_back(assign_first_frame(pred.seg[1], pred.back_flow[1], centers_prev, cfg));
    result.timing.entries.push_back({"group", 0, elapsed_usec(t0)});

    std::uint32_t id_counter = 1;
    for (std::uint32_t id : result.inst.back().id) id_counter = std::max(id_counter, id + 1);
    for (int k = 2; k < n; ++k) {
      t0 = Clock::now();
      result.inst.push_back(
          warp_associate(pred.seg[k], pred.back_flow[k], result.inst.back(), cfg, id_counter));
      result.timing.entries.push_back({"warp", k - 1, elapsed_usec(t0)});
    }
  } else {
    if (static_cast<int>(pred.centerness.size()) != n ||
        static_cast<int>(pred.offset.size()) != n ||
        static_cast<int>(pred.fwd_flow.size()) != n)
      throw std::invalid_argument(
          "run_pipeline: hm mode needs centerness, offset and forward flow per frame");
    const std::vector<SegGrid> seg(pred.seg.begin() + 1, pred.seg.end());
    const std::vector<SegGrid> cent(pred.centerness.begin() + 1, pred.centerness.end());
    const std::vector<FlowGrid> off(pred.offset.begin() + 1, pred.offset.end());
    const std::vector<FlowGrid> fwd(pred.fwd_flow.begin() + 1, pred.fwd_flow.end());
    result.inst = hm_run(seg, cent, off, fwd, cfg, &result.timing);
  }
  return result;
}

}  // namespace bevflow
