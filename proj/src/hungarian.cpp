#include "bevflow/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bevflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Shortest-augmenting-path assignment on an implicit square matrix,
/// returning the optimal total (summed from the chosen entries).
template <typename CostFn>
double solve_square(int n, CostFn&& a) {
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j)
    if (p[j]) total += a(p[j] - 1, j - 1);
  return total;
}

/// Optimal cost of matching min(|rows|, |cols|) pairs of the submatrix.
/// The smaller side is padded to square with a constant, which shifts every
/// perfect matching's total by the same amount.
double rect_min_cost(const std::vector<std::vector<double>>& cost, const std::vector<int>& rows,
                     const std::vector<int>& cols) {
  if (rows.empty() || cols.empty()) return 0.0;
  const bool transposed = rows.size() > cols.size();
  const auto& small = transposed ? cols : rows;
  const auto& large = transposed ? rows : cols;
  const int n = static_cast<int>(small.size());
  const int N = static_cast<int>(large.size());
  auto entry = [&](int i, int j) {
    return transposed ? cost[large[j]][small[i]] : cost[small[i]][large[j]];
  };
  double pad = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < N; ++j) pad = std::max(pad, entry(i, j));
  auto padded = [&](int i, int j) { return i < n ? entry(i, j) : pad; };
  return solve_square(N, padded) - static_cast<double>(N - n) * pad;
}

}  // namespace

Assignment hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n > 0 ? static_cast<int>(cost[0].size()) : 0;
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != m)
      throw std::invalid_argument("hungarian: ragged cost matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw std::invalid_argument("hungarian: costs must be finite");
  }
  Assignment out;
  if (n == 0 || m == 0) return out;

  std::vector<int> all_rows(n), all_cols(m);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::iota(all_cols.begin(), all_cols.end(), 0);
  const double best = rect_min_cost(cost, all_rows, all_cols);
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  const int target_pairs = std::min(n, m);

  // Fix pairs row by row, preferring the smallest column that keeps the
  // total optimal; rows that cannot (only when rows outnumber columns) stay
  // unassigned. This yields the lexicographically smallest optimal pair list.
  std::vector<int> avail = all_cols;
  double fixed = 0.0;
  for (int r = 0; r < n && static_cast<int>(out.pairs.size()) < target_pairs; ++r) {
    std::vector<int> rest_rows(all_rows.begin() + r + 1, all_rows.end());
    int pick = -1;
    double fallback_total = kInf;
    int fallback_pick = -1;
    for (std::size_t k = 0; k < avail.size(); ++k) {
      const int j = avail[k];
      std::vector<int> rest_cols;
      rest_cols.reserve(avail.size() - 1);
      for (int c : avail)
        if (c != j) rest_cols.push_back(c);
      const double total = fixed + cost[r][j] + rect_min_cost(cost, rest_rows, rest_cols);
      if (total <= best + tol) {
        pick = j;
        break;
      }
      if (total < fallback_total) {
        fallback_total = total;
        fallback_pick = j;
      }
    }
    if (pick < 0 && n > m) {
      // Skipping this row must itself preserve optimality; otherwise fall
      // through to the best column found.
      if (fixed + rect_min_cost(cost, rest_rows, avail) <= best + tol) continue;
    }
    if (pick < 0) pick = fallback_pick;
    out.pairs.emplace_back(r, pick);
    fixed += cost[r][pick];
    avail.erase(std::find(avail.begin(), avail.end(), pick));
  }

  out.cost = 0.0;
  for (const auto& [r, c] : out.pairs) out.cost += cost[r][c];
  return out;
}

}  // namespace bevflow
