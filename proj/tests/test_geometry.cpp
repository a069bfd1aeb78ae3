#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bevflow/grid.hpp"
#include "bevflow/rng.hpp"

using namespace bevflow;

TEST_CASE("normalize_angle maps into (-pi, pi]") {
  CHECK(normalize_angle(0.0) == doctest::Approx(0.0));
  CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-2.5 * kPi) == doctest::Approx(-0.5 * kPi));
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-50.0, 50.0);
    const double n = normalize_angle(a);
    CHECK(n > -kPi);
    CHECK(n <= kPi);
    CHECK(std::remainder(a - n, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("world_to_grid fixes the raster convention") {
  GridSpec spec{200, 200, 0.5, {0.0, 0.0, 0.0}};

  const auto center = world_to_grid({0.0, 0.0}, spec);
  REQUIRE(center.has_value());
  CHECK(center->row == doctest::Approx(100.0));
  CHECK(center->col == doctest::Approx(100.0));

  // One meter ahead of the ego lands two rows toward the forward edge.
  const auto ahead = world_to_grid({1.0, 0.0}, spec);
  REQUIRE(ahead.has_value());
  CHECK(ahead->row == doctest::Approx(98.0));
  CHECK(ahead->col == doctest::Approx(100.0));

  // With the anchor rotated a quarter turn, world +y is "ahead".
  GridSpec rotated = spec;
  rotated.anchor.yaw = kPi / 2.0;
  const auto same_cell = world_to_grid({0.0, 1.0}, rotated);
  REQUIRE(same_cell.has_value());
  CHECK(same_cell->row == doctest::Approx(98.0));
  CHECK(same_cell->col == doctest::Approx(100.0));
}

TEST_CASE("out-of-window points return the marker") {
  GridSpec spec{200, 200, 0.5, {0.0, 0.0, 0.0}};
  CHECK_FALSE(world_to_grid({51.0, 0.0}, spec).has_value());
  CHECK_FALSE(world_to_grid({0.0, -50.3}, spec).has_value());
  CHECK(world_to_grid({49.9, 49.9}, spec).has_value());
}

TEST_CASE("grid_to_world inverts world_to_grid") {
  GridSpec spec{200, 200, 0.5, {3.0, -2.0, 0.7}};
  const Vec2 anchor_pos = grid_to_world({100.0, 100.0}, spec);
  CHECK(anchor_pos.x == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(anchor_pos.y == doctest::Approx(-2.0).epsilon(1e-12));

  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    // Sample in the window frame; the window rotates with the anchor yaw.
    const Vec2 p = from_frame({rng.uniform(-45.0, 45.0), rng.uniform(-45.0, 45.0)}, spec.anchor);
    const auto g = world_to_grid(p, spec);
    REQUIRE(g.has_value());
    const Vec2 back = grid_to_world(*g, spec);
    CHECK(std::abs(back.x - p.x) < 1e-9);
    CHECK(std::abs(back.y - p.y) < 1e-9);
  }
  CHECK_THROWS_AS(grid_to_world({-3.0, 10.0}, spec), std::out_of_range);
}

TEST_CASE("short preset half extent") {
  // 200 cells at 0.15 m: the corner cell center sits 15 m out on both axes.
  GridSpec spec{200, 200, 0.15, {0.0, 0.0, 0.0}};
  const Vec2 corner = grid_to_world({0.0, 0.0}, spec);
  CHECK(corner.x == doctest::Approx(15.0));
  CHECK(corner.y == doctest::Approx(15.0));
}

TEST_CASE("rigid_transform fixtures") {
  const Pose2D origin{0.0, 0.0, 0.0};
  const Pose2D shifted{1.0, 2.0, 0.0};

  const Vec2 same = rigid_transform({4.0, -1.0}, origin, origin);
  CHECK(same.x == doctest::Approx(4.0));
  CHECK(same.y == doctest::Approx(-1.0));

  const Vec2 translated = rigid_transform({0.0, 0.0}, origin, shifted);
  CHECK(translated.x == doctest::Approx(-1.0));
  CHECK(translated.y == doctest::Approx(-2.0));
}

TEST_CASE("rigid_transform is a group action") {
  Rng rng(1001);
  for (int i = 0; i < 100; ++i) {
    const Pose2D a{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-kPi, kPi)};
    const Pose2D b{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-kPi, kPi)};
    const Pose2D c{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-kPi, kPi)};
    const Vec2 p{rng.uniform(-20, 20), rng.uniform(-20, 20)};

    const Vec2 direct = rigid_transform(p, a, c);
    const Vec2 chained = rigid_transform(rigid_transform(p, a, b), b, c);
    CHECK(std::abs(direct.x - chained.x) < 1e-9);
    CHECK(std::abs(direct.y - chained.y) < 1e-9);

    const Vec2 back = rigid_transform(rigid_transform(p, a, b), b, a);
    CHECK(std::abs(back.x - p.x) < 1e-9);
    CHECK(std::abs(back.y - p.y) < 1e-9);
  }
}
