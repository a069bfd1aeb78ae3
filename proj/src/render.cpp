#include "bevflow/render.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace bevflow {

namespace {

std::array<std::uint8_t, 3> hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c; g = x;
  } else if (hp < 2) {
    r = x; g = c;
  } else if (hp < 3) {
    g = c; b = x;
  } else if (hp < 4) {
    g = x; b = c;
  } else if (hp < 5) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = v - c;
  return {static_cast<std::uint8_t>(std::lround((r + m) * 255.0)),
          static_cast<std::uint8_t>(std::lround((g + m) * 255.0)),
          static_cast<std::uint8_t>(std::lround((b + m) * 255.0))};
}

/// 64 hues, visited with stride 37 (coprime to 64) so neighboring IDs land on
/// well-separated colors.
const std::array<std::array<std::uint8_t, 3>, 64>& palette() {
  static const auto table = [] {
    std::array<std::array<std::uint8_t, 3>, 64> t{};
    for (int i = 0; i < 64; ++i) {
      const int slot = (i * 37) % 64;
      t[static_cast<std::size_t>(i)] = hsv_to_rgb(slot * (360.0 / 64.0), 0.72, 0.95);
    }
    return t;
  }();
  return table;
}

constexpr std::uint8_t kBackgroundGray = 24;

}  // namespace

Image render_instances(const InstanceGrid& inst) {
  Image img(inst.h, inst.w);
  for (std::size_t i = 0; i < inst.id.size(); ++i) {
    const std::uint32_t id = inst.id[i];
    if (id == 0) {
      img.rgb[i * 3] = img.rgb[i * 3 + 1] = img.rgb[i * 3 + 2] = kBackgroundGray;
    } else {
      const auto& rgb = palette()[(id - 1) % 64];
      img.rgb[i * 3] = rgb[0];
      img.rgb[i * 3 + 1] = rgb[1];
      img.rgb[i * 3 + 2] = rgb[2];
    }
  }
  return img;
}

Image render_seg(const SegGrid& seg) {
  Image img(seg.h, seg.w);
  for (std::size_t i = 0; i < seg.v.size(); ++i) {
    const double v = std::clamp(static_cast<double>(seg.v[i]), 0.0, 1.0);
    const auto gray = static_cast<std::uint8_t>(std::lround(v * 255.0));
    img.rgb[i * 3] = img.rgb[i * 3 + 1] = img.rgb[i * 3 + 2] = gray;
  }
  return img;
}

void write_ppm(const Image& img, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f << "P6\n" << img.w << " " << img.h << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.rgb.data()),
          static_cast<std::streamsize>(img.rgb.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace bevflow
