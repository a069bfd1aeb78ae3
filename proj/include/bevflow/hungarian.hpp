#pragma once

#include <utility>
#include <vector>

namespace bevflow {

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
  double cost = 0.0;
};

/// Minimum-cost assignment of min(n, m) pairs for an n x m matrix of finite
/// costs. Among equal-cost optima the lexicographically smallest pair list is
/// returned. Empty matrices yield an empty assignment.
Assignment hungarian(const std::vector<std::vector<double>>& cost);

}  // namespace bevflow
