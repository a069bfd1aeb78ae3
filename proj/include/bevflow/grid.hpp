#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bevflow/geometry.hpp"

namespace bevflow {

/// Geometry of a BEV window: H x W cells of `resolution` meters, centered on
/// `anchor` (the ego pose). Raster convention, fixed project-wide:
///   - row 0 is the farthest-forward edge: row = H/2 - forward/resolution
///   - col 0 is the farthest-left edge:    col = W/2 - left/resolution
///   - integer coordinates address cell centers; cell (r, c) covers
///     [r-0.5, r+0.5) x [c-0.5, c+0.5) in fractional coordinates.
struct GridSpec {
  int height_cells = 0;
  int width_cells = 0;
  double resolution = 0.0;  // meters per cell
  Pose2D anchor;

  void validate() const {
    if (height_cells <= 0 || width_cells <= 0 || resolution <= 0.0)
      throw std::invalid_argument("GridSpec: dimensions and resolution must be positive");
  }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(height_cells) * static_cast<std::size_t>(width_cells);
  }
};

/// Fractional grid coordinates (cell-center convention).
struct GridCoord {
  double row = 0.0;
  double col = 0.0;
};

/// World point -> fractional cell. Returns nullopt when the point falls
/// outside the window (beyond half a cell past the border cell centers).
std::optional<GridCoord> world_to_grid(Vec2 point, const GridSpec& spec);

/// Same mapping without the bounds check.
GridCoord world_to_grid_unbounded(Vec2 point, const GridSpec& spec);

/// Fractional cell -> world point. Throws std::out_of_range outside the window.
Vec2 grid_to_world(GridCoord cell, const GridSpec& spec);

bool coord_in_bounds(GridCoord cell, const GridSpec& spec);

/// Nearest integer cell to a fractional coordinate.
inline int nearest_cell(double coord) { return static_cast<int>(std::floor(coord + 0.5)); }

/// Per-cell probability map in [0, 1].
struct SegGrid {
  int h = 0, w = 0;
  std::vector<float> v;

  SegGrid() = default;
  SegGrid(int h_, int w_) : h(h_), w(w_), v(static_cast<std::size_t>(h_) * w_, 0.0f) {}
  float& at(int r, int c) { return v[static_cast<std::size_t>(r) * w + c]; }
  float at(int r, int c) const { return v[static_cast<std::size_t>(r) * w + c]; }
  bool in_bounds(int r, int c) const { return r >= 0 && r < h && c >= 0 && c < w; }
};

/// Per-cell instance ID map; 0 is background.
struct InstanceGrid {
  int h = 0, w = 0;
  std::vector<std::uint32_t> id;

  InstanceGrid() = default;
  InstanceGrid(int h_, int w_) : h(h_), w(w_), id(static_cast<std::size_t>(h_) * w_, 0u) {}
  std::uint32_t& at(int r, int c) { return id[static_cast<std::size_t>(r) * w + c]; }
  std::uint32_t at(int r, int c) const { return id[static_cast<std::size_t>(r) * w + c]; }
  bool in_bounds(int r, int c) const { return r >= 0 && r < h && c >= 0 && c < w; }
};

/// Two-channel displacement field in cell units (dy = rows, dx = cols).
struct FlowGrid {
  int h = 0, w = 0;
  std::vector<float> dy, dx;

  FlowGrid() = default;
  FlowGrid(int h_, int w_)
      : h(h_), w(w_),
        dy(static_cast<std::size_t>(h_) * w_, 0.0f),
        dx(static_cast<std::size_t>(h_) * w_, 0.0f) {}
  std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * w + c; }
};

/// One extracted or ground-truth instance center.
struct Center {
  std::uint32_t id = 0;
  double row = 0.0;
  double col = 0.0;
  double score = 1.0;
};

using CenterList = std::vector<Center>;

}  // namespace bevflow
