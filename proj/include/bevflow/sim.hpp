#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bevflow/geometry.hpp"

namespace bevflow {

/// Kinematic state of one simulated agent (constant turn rate and velocity).
struct AgentState {
  std::uint32_t id = 0;
  Pose2D pose;
  double length = 4.5;  // meters, along heading
  double width = 2.0;   // meters
  double speed = 0.0;   // m/s
  double yaw_rate = 0.0;  // rad/s
  int spawn_frame = 0;
  int despawn_frame = 0;  // exclusive
};

/// Advance one CTRV step of `dt` seconds (closed form, no integration error).
AgentState step_agent(const AgentState& state, double dt);

enum class EgoProfile { straight, constant_turn, stop_and_go };

EgoProfile ego_profile_from_string(const std::string& s);
std::string to_string(EgoProfile p);

struct SimConfig {
  int agent_count = 10;
  int t_in = 3;   // observed frames, including the reference frame
  int t_out = 4;  // predicted frames
  double dt = 0.5;

  EgoProfile ego_profile = EgoProfile::straight;
  double ego_speed = 5.0;
  double ego_yaw_rate = 0.1;  // used by constant_turn
  Pose2D ego_start;

  double spawn_radius = 35.0;   // agents placed in this disc around the reference ego pose
  double speed_min = 0.0, speed_max = 8.0;
  double yaw_rate_max = 0.3;
  double length_min = 4.0, length_max = 5.0;
  double width_min = 1.8, width_max = 2.2;
  /// Fraction of agents used to form aimed pairs that meet in a close pass
  /// after the reference frame.
  double aim_fraction = 0.5;
  double min_clearance = 0.4;       // meters between agent rectangles after the reference frame
  double observed_clearance = 8.5;  // meters between rectangles up to the reference frame

  std::uint64_t seed = 1;

  int frame_count() const { return t_in + t_out; }
  void validate() const;
};

struct ScenarioFrame {
  Pose2D ego;
  std::vector<AgentState> agents;  // agents present this frame
};

struct Scenario {
  double dt = 0.5;
  std::uint64_t seed = 0;
  int t_in = 3;
  int t_out = 4;
  std::vector<ScenarioFrame> frames;

  int reference_frame() const { return t_in - 1; }
  void validate() const;
};

/// Deterministic scenario generation: identical (config, seed) gives a
/// bit-identical Scenario. Agent trajectories are rejection-sampled so
/// rectangles never come closer than min_clearance at any frame; agent 1 is
/// kept slow and near the reference ego pose so the window is never empty.
Scenario simulate(const SimConfig& config);

/// Structured text round-trip. One record per frame: an `ego x y yaw` line
/// followed by one `agent id x y yaw length width speed yaw_rate` line per
/// agent present. Doubles print with %.17g and re-parse exactly.
std::string scenario_to_string(const Scenario& s);
Scenario scenario_from_string(const std::string& text);
void write_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario read_scenario(const std::filesystem::path& path);

/// True when the two oriented rectangles, each inflated by margin/2, overlap
/// (separating-axis test).
bool rectangles_overlap(const Pose2D& a, double len_a, double wid_a,
                        const Pose2D& b, double len_b, double wid_b,
                        double margin);

}  // namespace bevflow
