#include "bevflow/grid_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace bevflow {

namespace {

constexpr char kMagic[4] = {'B', 'G', 'R', 'D'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 20;

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos])) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + 1])) << 8) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + 2])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + 3])) << 24);
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::string encode(GridDtype dtype, int h, int w, int channels,
                   const std::vector<const float*>& fplanes,
                   const std::uint32_t* uplane) {
  std::string out;
  const std::size_t n = static_cast<std::size_t>(h) * w;
  out.reserve(18 + n * channels * 4);
  out.append(kMagic, 4);
  out.push_back(static_cast<char>(kVersion));
  out.push_back(static_cast<char>(dtype));
  put_u32(out, static_cast<std::uint32_t>(h));
  put_u32(out, static_cast<std::uint32_t>(w));
  put_u32(out, static_cast<std::uint32_t>(channels));
  if (dtype == GridDtype::f32) {
    for (const float* plane : fplanes)
      for (std::size_t i = 0; i < n; ++i) put_f32(out, plane[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) put_u32(out, uplane[i]);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw GridIoError("cannot open for writing: " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw GridIoError("write failed: " + path.string());
}

}  // namespace

void write_grid(const SegGrid& g, const std::filesystem::path& path) {
  write_file(path, encode(GridDtype::f32, g.h, g.w, 1, {g.v.data()}, nullptr));
}

void write_grid(const InstanceGrid& g, const std::filesystem::path& path) {
  write_file(path, encode(GridDtype::u32, g.h, g.w, 1, {}, g.id.data()));
}

void write_grid(const FlowGrid& g, const std::filesystem::path& path) {
  write_file(path, encode(GridDtype::f32, g.h, g.w, 2, {g.dy.data(), g.dx.data()}, nullptr));
}

RawGrid read_grid(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw GridIoError("cannot open: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (bytes.size() < 18) throw GridIoError("truncated header: " + path.string());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw GridIoError("bad magic: " + path.string());
  if (static_cast<std::uint8_t>(bytes[4]) != kVersion)
    throw GridIoError("unsupported version: " + path.string());
  const auto dtype_raw = static_cast<std::uint8_t>(bytes[5]);
  if (dtype_raw > 1) throw GridIoError("unknown dtype: " + path.string());

  RawGrid g;
  g.dtype = static_cast<GridDtype>(dtype_raw);
  const std::uint32_t h = get_u32(bytes, 6);
  const std::uint32_t w = get_u32(bytes, 10);
  const std::uint32_t channels = get_u32(bytes, 14);
  if (h == 0 || w == 0 || h > kMaxDim || w > kMaxDim || channels == 0 || channels > 4)
    throw GridIoError("implausible dimensions: " + path.string());
  g.h = static_cast<int>(h);
  g.w = static_cast<int>(w);
  g.channels = static_cast<int>(channels);

  const std::size_t n = static_cast<std::size_t>(h) * w * channels;
  if (bytes.size() != 18 + n * 4)
    throw GridIoError("payload size mismatch: " + path.string());
  if (g.dtype == GridDtype::f32) {
    g.f.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      g.f[i] = std::bit_cast<float>(get_u32(bytes, 18 + i * 4));
  } else {
    g.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.u[i] = get_u32(bytes, 18 + i * 4);
  }
  return g;
}

SegGrid read_seg(const std::filesystem::path& path) {
  RawGrid raw = read_grid(path);
  if (raw.dtype != GridDtype::f32 || raw.channels != 1)
    throw GridIoError("not a probability grid: " + path.string());
  for (float v : raw.f)
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw GridIoError("probability payload outside [0,1]: " + path.string());
  SegGrid g(raw.h, raw.w);
  g.v = std::move(raw.f);
  return g;
}

InstanceGrid read_inst(const std::filesystem::path& path) {
  RawGrid raw = read_grid(path);
  if (raw.dtype != GridDtype::u32 || raw.channels != 1)
    throw GridIoError("not an instance grid: " + path.string());
  InstanceGrid g(raw.h, raw.w);
  g.id = std::move(raw.u);
  return g;
}

FlowGrid read_flow(const std::filesystem::path& path) {
  RawGrid raw = read_grid(path);
  if (raw.dtype != GridDtype::f32 || raw.channels != 2)
    throw GridIoError("not a flow grid: " + path.string());
  const std::size_t n = static_cast<std::size_t>(raw.h) * raw.w;
  for (float v : raw.f)
    if (!std::isfinite(v)) throw GridIoError("non-finite flow payload: " + path.string());
  FlowGrid g(raw.h, raw.w);
  std::copy(raw.f.begin(), raw.f.begin() + static_cast<std::ptrdiff_t>(n), g.dy.begin());
  std::copy(raw.f.begin() + static_cast<std::ptrdiff_t>(n), raw.f.end(), g.dx.begin());
  return g;
}

}  // namespace bevflow
