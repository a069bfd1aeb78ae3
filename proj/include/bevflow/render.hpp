#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bevflow/grid.hpp"

namespace bevflow {

struct Image {
  int h = 0, w = 0;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major

  Image() = default;
  Image(int h_, int w_) : h(h_), w(w_), rgb(static_cast<std::size_t>(h_) * w_ * 3, 0) {}
};

/// Fixed 64-entry palette indexed by (id - 1) % 64; ID 0 renders dark gray.
Image render_instances(const InstanceGrid& inst);

/// Grayscale probability map.
Image render_seg(const SegGrid& seg);

/// Binary PPM (P6).
void write_ppm(const Image& img, const std::filesystem::path& path);

}  // namespace bevflow
