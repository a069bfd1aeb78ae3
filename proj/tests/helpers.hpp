#pragma once

// Shared test utilities: file helpers and independent oracles that deliberately
// re-derive expected values through a different route than the library code.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bevflow/grid.hpp"
#include "bevflow/sim.hpp"

namespace test_helpers {

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// RK4 integration of the turn-rate-and-speed kinematics, independent of the
/// closed-form step used by the library.
inline bevflow::Pose2D integrate_ctrv_rk4(bevflow::Pose2D pose, double speed, double yaw_rate,
                                          double dt, int steps) {
  const double h = dt / steps;
  double x = pose.x, y = pose.y, yaw = pose.yaw;
  for (int i = 0; i < steps; ++i) {
    auto fx = [&](double th) { return speed * std::cos(th); };
    auto fy = [&](double th) { return speed * std::sin(th); };
    const double k1x = fx(yaw), k1y = fy(yaw);
    const double k2x = fx(yaw + 0.5 * h * yaw_rate), k2y = fy(yaw + 0.5 * h * yaw_rate);
    const double k3x = k2x, k3y = k2y;  // yaw' is constant, so k3 == k2
    const double k4x = fx(yaw + h * yaw_rate), k4y = fy(yaw + h * yaw_rate);
    x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    yaw += h * yaw_rate;
  }
  return {x, y, bevflow::normalize_angle(yaw)};
}

/// Brute-force k x k window max (no separable trick).
inline std::vector<float> window_max_naive(const bevflow::SegGrid& seg, int k) {
  const int half = k / 2;
  std::vector<float> out(seg.v.size(), 0.0f);
  for (int r = 0; r < seg.h; ++r)
    for (int c = 0; c < seg.w; ++c) {
      float m = 0.0f;
      for (int rr = std::max(0, r - half); rr <= std::min(seg.h - 1, r + half); ++rr)
        for (int cc = std::max(0, c - half); cc <= std::min(seg.w - 1, c + half); ++cc)
          m = std::max(m, seg.at(rr, cc));
      out[static_cast<std::size_t>(r) * seg.w + c] = m;
    }
  return out;
}

/// Brute-force centroid scan, one pass per distinct ID.
inline std::map<std::uint32_t, std::pair<double, double>> centroids_naive(
    const bevflow::InstanceGrid& inst) {
  std::set<std::uint32_t> ids(inst.id.begin(), inst.id.end());
  ids.erase(0);
  std::map<std::uint32_t, std::pair<double, double>> out;
  for (std::uint32_t id : ids) {
    double sr = 0, sc = 0;
    std::size_t n = 0;
    for (int r = 0; r < inst.h; ++r)
      for (int c = 0; c < inst.w; ++c)
        if (inst.at(r, c) == id) {
          sr += r;
          sc += c;
          ++n;
        }
    out[id] = {sr / static_cast<double>(n), sc / static_cast<double>(n)};
  }
  return out;
}

/// Exhaustive minimum-cost assignment of min(n, m) pairs; also returns the
/// lexicographically smallest optimal pair list. Usable up to ~7x7.
struct BruteAssignment {
  double cost = 0.0;
  std::vector<std::pair<int, int>> pairs;
};

inline void brute_assign_rec(const std::vector<std::vector<double>>& cost, int r, int remaining,
                             std::vector<bool>& used, std::vector<std::pair<int, int>>& cur,
                             double acc, BruteAssignment& best) {
  const int n = static_cast<int>(cost.size());
  const int m = static_cast<int>(cost[0].size());
  if (remaining == 0 || r == n) {
    if (remaining != 0) return;
    if (acc < best.cost - 1e-12 ||
        (std::abs(acc - best.cost) <= 1e-12 && cur < best.pairs)) {
      best.cost = acc;
      best.pairs = cur;
    }
    return;
  }
  // Assign row r to one of the free columns.
  for (int j = 0; j < m; ++j) {
    if (used[j]) continue;
    used[j] = true;
    cur.emplace_back(r, j);
    brute_assign_rec(cost, r + 1, remaining - 1, used, cur, acc + cost[r][j], best);
    cur.pop_back();
    used[j] = false;
  }
  // Or skip it, when enough rows remain to fill the quota.
  if (n - r - 1 >= remaining) brute_assign_rec(cost, r + 1, remaining, used, cur, acc, best);
}

inline BruteAssignment brute_force_assignment(const std::vector<std::vector<double>>& cost) {
  BruteAssignment best;
  if (cost.empty() || cost[0].empty()) return best;
  best.cost = 1e300;
  std::vector<bool> used(cost[0].size(), false);
  std::vector<std::pair<int, int>> cur;
  brute_assign_rec(cost, 0, static_cast<int>(std::min(cost.size(), cost[0].size())), used, cur,
                   0.0, best);
  return best;
}

/// True when the two instance sequences are equal under one global ID
/// bijection (applied across all frames).
inline bool equal_up_to_id_bijection(const std::vector<bevflow::InstanceGrid>& a,
                                     const std::vector<bevflow::InstanceGrid>& b) {
  if (a.size() != b.size()) return false;
  std::map<std::uint32_t, std::uint32_t> fwd, rev;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].id.size() != b[t].id.size()) return false;
    for (std::size_t i = 0; i < a[t].id.size(); ++i) {
      const std::uint32_t x = a[t].id[i], y = b[t].id[i];
      if ((x == 0) != (y == 0)) return false;
      if (x == 0) continue;
      const auto f = fwd.find(x);
      if (f == fwd.end()) {
        const auto r = rev.find(y);
        if (r != rev.end()) return false;
        fwd[x] = y;
        rev[y] = x;
      } else if (f->second != y) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace test_helpers
