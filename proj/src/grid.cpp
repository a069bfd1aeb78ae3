#include "bevflow/grid.hpp"

namespace bevflow {

GridCoord world_to_grid_unbounded(Vec2 point, const GridSpec& spec) {
  const Vec2 q = to_frame(point, spec.anchor);
  return {spec.height_cells / 2.0 - q.x / spec.resolution,
          spec.width_cells / 2.0 - q.y / spec.resolution};
}

bool coord_in_bounds(GridCoord cell, const GridSpec& spec) {
  return cell.row >= -0.5 && cell.row < spec.height_cells - 0.5 && cell.col >= -0.5 &&
         cell.col < spec.width_cells - 0.5;
}

std::optional<GridCoord> world_to_grid(Vec2 point, const GridSpec& spec) {
  GridCoord g = world_to_grid_unbounded(point, spec);
  if (!coord_in_bounds(g, spec)) return std::nullopt;
  return g;
}

Vec2 grid_to_world(GridCoord cell, const GridSpec& spec) {
  if (!coord_in_bounds(cell, spec))
    throw std::out_of_range("grid_to_world: cell outside the window");
  const Vec2 q{(spec.height_cells / 2.0 - cell.row) * spec.resolution,
               (spec.width_cells / 2.0 - cell.col) * spec.resolution};
  return from_frame(q, spec.anchor);
}

}  // namespace bevflow
