#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "bevflow/grid.hpp"

namespace bevflow {

/// Raised for unreadable files, bad magic/version, truncated payloads and
/// invalid values.
struct GridIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Binary grid container ("BGRD"):
///   bytes 0..3   magic "BGRD"
///   byte  4      version, currently 1
///   byte  5      dtype: 0 = f32, 1 = u32
///   bytes 6..9   u32 H (little-endian)
///   bytes 10..13 u32 W
///   bytes 14..17 u32 channel count
///   payload      channels * H * W values, channel-planar, each plane
///                row-major, little-endian.
/// FlowGrid files have 2 channels (dy plane, then dx plane); SegGrid and
/// InstanceGrid files have 1.
enum class GridDtype : std::uint8_t { f32 = 0, u32 = 1 };

struct RawGrid {
  GridDtype dtype = GridDtype::f32;
  int h = 0, w = 0, channels = 0;
  std::vector<float> f;          // used when dtype == f32
  std::vector<std::uint32_t> u;  // used when dtype == u32
};

void write_grid(const SegGrid& g, const std::filesystem::path& path);
void write_grid(const InstanceGrid& g, const std::filesystem::path& path);
void write_grid(const FlowGrid& g, const std::filesystem::path& path);

RawGrid read_grid(const std::filesystem::path& path);

/// Typed readers; they validate dtype/channel count and, for SegGrid, reject
/// non-finite or out-of-range values.
SegGrid read_seg(const std::filesystem::path& path);
InstanceGrid read_inst(const std::filesystem::path& path);
FlowGrid read_flow(const std::filesystem::path& path);

}  // namespace bevflow
