#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "bevflow/grid_io.hpp"
#include "bevflow/rng.hpp"
#include "helpers.hpp"

using namespace bevflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bevflow_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("seg grid round-trips exactly") {
  TempDir tmp;
  SegGrid g(2, 2);
  g.at(0, 0) = 0.0f;
  g.at(0, 1) = 0.5f;
  g.at(1, 0) = 1.0f;
  g.at(1, 1) = 0.25f;
  const auto path = tmp.path / "seg.bgrd";
  write_grid(g, path);
  const SegGrid back = read_seg(path);
  CHECK(back.h == 2);
  CHECK(back.w == 2);
  CHECK(back.v == g.v);
}

TEST_CASE("wrong magic is rejected") {
  TempDir tmp;
  const auto path = tmp.path / "bad.bgrd";
  std::ofstream(path, std::ios::binary) << "NOPE further garbage bytes..............";
  CHECK_THROWS_AS(read_grid(path), GridIoError);
}

TEST_CASE("truncated payload is rejected") {
  TempDir tmp;
  SegGrid g(4, 4);
  const auto path = tmp.path / "trunc.bgrd";
  write_grid(g, path);
  const std::string bytes = test_helpers::read_file_bytes(path);
  std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() - 5);
  CHECK_THROWS_AS(read_grid(path), GridIoError);
}

TEST_CASE("NaN probability payload is rejected on read") {
  TempDir tmp;
  SegGrid g(2, 2);
  g.at(1, 1) = std::numeric_limits<float>::quiet_NaN();
  const auto path = tmp.path / "nan.bgrd";
  write_grid(g, path);
  CHECK_THROWS_AS(read_seg(path), GridIoError);

  SegGrid h(2, 2);
  h.at(0, 0) = 1.5f;
  write_grid(h, path);
  CHECK_THROWS_AS(read_seg(path), GridIoError);
}

TEST_CASE("bad dtype bytes and implausible headers are rejected") {
  TempDir tmp;
  const auto path = tmp.path / "hdr.bgrd";
  write_grid(SegGrid(2, 2), path);
  std::string bytes = test_helpers::read_file_bytes(path);

  std::string bad_dtype = bytes;
  bad_dtype[5] = 7;
  std::ofstream(path, std::ios::binary) << bad_dtype;
  CHECK_THROWS_AS(read_grid(path), GridIoError);

  std::string zero_dim = bytes;
  zero_dim[6] = zero_dim[7] = zero_dim[8] = zero_dim[9] = 0;
  std::ofstream(path, std::ios::binary) << zero_dim;
  CHECK_THROWS_AS(read_grid(path), GridIoError);

  std::string huge_channels = bytes;
  huge_channels[14] = 99;
  std::ofstream(path, std::ios::binary) << huge_channels;
  CHECK_THROWS_AS(read_grid(path), GridIoError);
}

TEST_CASE("typed readers reject mismatched files") {
  TempDir tmp;
  const auto path = tmp.path / "flow.bgrd";
  write_grid(FlowGrid(3, 3), path);
  CHECK_THROWS_AS(read_seg(path), GridIoError);
  CHECK_THROWS_AS(read_inst(path), GridIoError);
  CHECK(read_flow(path).h == 3);
}

TEST_CASE("random grids of all types round-trip") {
  TempDir tmp;
  Rng rng(99);
  for (int iter = 0; iter < 10; ++iter) {
    const int h = 1 + static_cast<int>(rng.uniform_int(12));
    const int w = 1 + static_cast<int>(rng.uniform_int(12));

    SegGrid seg(h, w);
    for (auto& v : seg.v) v = static_cast<float>(rng.uniform01());
    InstanceGrid inst(h, w);
    for (auto& v : inst.id) v = static_cast<std::uint32_t>(rng.uniform_int(7));
    FlowGrid flow(h, w);
    for (auto& v : flow.dy) v = static_cast<float>(rng.uniform(-9, 9));
    for (auto& v : flow.dx) v = static_cast<float>(rng.uniform(-9, 9));

    write_grid(seg, tmp.path / "s.bgrd");
    write_grid(inst, tmp.path / "i.bgrd");
    write_grid(flow, tmp.path / "f.bgrd");
    CHECK(read_seg(tmp.path / "s.bgrd").v == seg.v);
    CHECK(read_inst(tmp.path / "i.bgrd").id == inst.id);
    const FlowGrid fback = read_flow(tmp.path / "f.bgrd");
    CHECK(fback.dy == flow.dy);
    CHECK(fback.dx == flow.dx);
  }
}

TEST_CASE("200x200 flow grid serialization is byte-stable") {
  // The same pseudo-random grid must produce the identical file on every run
  // and platform; the golden copy is committed under tests/data.
  TempDir tmp;
  FlowGrid flow(200, 200);
  Rng rng(7);
  for (auto& v : flow.dy) v = static_cast<float>(rng.uniform(-20, 20));
  for (auto& v : flow.dx) v = static_cast<float>(rng.uniform(-20, 20));
  const auto path = tmp.path / "golden.bgrd";
  write_grid(flow, path);

  const std::string bytes = test_helpers::read_file_bytes(path);
  const fs::path golden = fs::path(BEVFLOW_TEST_DATA_DIR) / "golden_flow.bgrd";
  REQUIRE_MESSAGE(fs::exists(golden), "golden file missing: " << golden.string());
  CHECK(bytes == test_helpers::read_file_bytes(golden));

  const FlowGrid back = read_flow(path);
  CHECK(back.dy == flow.dy);
  CHECK(back.dx == flow.dx);
}
