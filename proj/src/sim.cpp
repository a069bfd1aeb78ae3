#include "bevflow/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bevflow/rng.hpp"

namespace bevflow {

namespace {

constexpr double kGoldenAngle = 2.39996322972865332;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok, int line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("scenario parse error: bad number '" + tok + "' on line " +
                             std::to_string(line_no));
  }
  if (pos != tok.size())
    throw std::runtime_error("scenario parse error: bad number '" + tok + "' on line " +
                             std::to_string(line_no));
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

std::array<Vec2, 4> rect_corners(const Pose2D& pose, double len, double wid) {
  const double hl = len / 2.0, hw = wid / 2.0;
  return {from_frame({hl, hw}, pose), from_frame({hl, -hw}, pose),
          from_frame({-hl, -hw}, pose), from_frame({-hl, hw}, pose)};
}

bool separated_on_axis(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b, Vec2 axis) {
  double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
  for (const Vec2& p : a) {
    const double t = p.x * axis.x + p.y * axis.y;
    amin = std::min(amin, t);
    amax = std::max(amax, t);
  }
  for (const Vec2& p : b) {
    const double t = p.x * axis.x + p.y * axis.y;
    bmin = std::min(bmin, t);
    bmax = std::max(bmax, t);
  }
  return amax < bmin || bmax < amin;
}

}  // namespace

AgentState step_agent(const AgentState& state, double dt) {
  if (dt == 0.0) throw std::invalid_argument("step_agent: dt must be nonzero");
  AgentState out = state;
  const double v = state.speed;
  const double w = state.yaw_rate;
  const double yaw = state.pose.yaw;
  if (std::abs(w) < 1e-12) {
    out.pose.x += v * std::cos(yaw) * dt;
    out.pose.y += v * std::sin(yaw) * dt;
  } else {
    out.pose.x += v / w * (std::sin(yaw + w * dt) - std::sin(yaw));
    out.pose.y += v / w * (std::cos(yaw) - std::cos(yaw + w * dt));
  }
  out.pose.yaw = normalize_angle(yaw + w * dt);
  return out;
}

EgoProfile ego_profile_from_string(const std::string& s) {
  if (s == "straight") return EgoProfile::straight;
  if (s == "turn") return EgoProfile::constant_turn;
  if (s == "stopgo") return EgoProfile::stop_and_go;
  throw std::invalid_argument("unknown ego profile: " + s);
}

std::string to_string(EgoProfile p) {
  switch (p) {
    case EgoProfile::straight: return "straight";
    case EgoProfile::constant_turn: return "turn";
    case EgoProfile::stop_and_go: return "stopgo";
  }
  return "straight";
}

void SimConfig::validate() const {
  if (agent_count < 0) throw std::invalid_argument("SimConfig: agent_count < 0");
  if (t_in < 1 || t_out < 1) throw std::invalid_argument("SimConfig: t_in and t_out must be >= 1");
  if (dt <= 0.0) throw std::invalid_argument("SimConfig: dt must be positive");
  if (speed_min < 0.0 || speed_max < speed_min)
    throw std::invalid_argument("SimConfig: bad speed range");
  if (length_min <= 0.0 || width_min <= 0.0 || length_max < length_min || width_max < width_min)
    throw std::invalid_argument("SimConfig: bad size range");
  if (aim_fraction < 0.0 || aim_fraction > 1.0)
    throw std::invalid_argument("SimConfig: aim_fraction outside [0,1]");
  if (spawn_radius <= 0.0) throw std::invalid_argument("SimConfig: spawn_radius must be positive");
  if (min_clearance < 0.0 || observed_clearance < 0.0)
    throw std::invalid_argument("SimConfig: clearances must be non-negative");
}

void Scenario::validate() const {
  if (dt <= 0.0) throw std::invalid_argument("Scenario: dt must be positive");
  if (static_cast<int>(frames.size()) < t_in + t_out)
    throw std::invalid_argument("Scenario: needs at least t_in + t_out frames");
  for (const ScenarioFrame& frame : frames) {
    std::set<std::uint32_t> seen;
    for (const AgentState& a : frame.agents) {
      if (a.id == 0) throw std::invalid_argument("Scenario: agent ID 0 is reserved");
      if (a.length <= 0.0 || a.width <= 0.0)
        throw std::invalid_argument("Scenario: agent dimensions must be positive");
      if (!seen.insert(a.id).second)
        throw std::invalid_argument("Scenario: duplicate agent ID " + std::to_string(a.id));
    }
  }
}

bool rectangles_overlap(const Pose2D& a, double len_a, double wid_a, const Pose2D& b,
                        double len_b, double wid_b, double margin) {
  const auto ca = rect_corners(a, len_a + margin, wid_a + margin);
  const auto cb = rect_corners(b, len_b + margin, wid_b + margin);
  const std::array<Vec2, 4> axes = {
      Vec2{std::cos(a.yaw), std::sin(a.yaw)}, Vec2{-std::sin(a.yaw), std::cos(a.yaw)},
      Vec2{std::cos(b.yaw), std::sin(b.yaw)}, Vec2{-std::sin(b.yaw), std::cos(b.yaw)}};
  for (const Vec2& axis : axes)
    if (separated_on_axis(ca, cb, axis)) return false;
  return true;
}

namespace {

std::vector<Pose2D> ego_trajectory(const SimConfig& cfg) {
  std::vector<Pose2D> out;
  out.reserve(cfg.frame_count());
  AgentState ego;
  ego.pose = cfg.ego_start;
  ego.speed = cfg.ego_speed;
  ego.yaw_rate = cfg.ego_profile == EgoProfile::constant_turn ? cfg.ego_yaw_rate : 0.0;
  for (int f = 0; f < cfg.frame_count(); ++f) {
    if (cfg.ego_profile == EgoProfile::stop_and_go)
      ego.speed = ((f / 4) % 2 == 0) ? cfg.ego_speed : 0.0;
    out.push_back(ego.pose);
    ego = step_agent(ego, cfg.dt);
  }
  return out;
}

/// Trajectory over all frames given the state at some anchor frame (backward
/// steps use the closed form with -dt).
std::vector<AgentState> agent_trajectory(const AgentState& at_anchor, int anchor, int frames,
                                         double dt) {
  std::vector<AgentState> out(frames, at_anchor);
  for (int f = anchor + 1; f < frames; ++f) out[f] = step_agent(out[f - 1], dt);
  for (int f = anchor - 1; f >= 0; --f) out[f] = step_agent(out[f + 1], -dt);
  return out;
}

/// Clearance is looser over the observed frames (so the reference frame stays
/// uncluttered) and tight afterwards, which is where close passes happen.
bool trajectories_clear(const std::vector<AgentState>& a, const std::vector<AgentState>& b,
                        int ref, double observed_margin, double future_margin) {
  for (std::size_t f = 0; f < a.size(); ++f) {
    const double margin = static_cast<int>(f) <= ref ? observed_margin : future_margin;
    if (rectangles_overlap(a[f].pose, a[f].length, a[f].width, b[f].pose, b[f].length,
                           b[f].width, margin))
      return false;
  }
  return true;
}

}  // namespace

Scenario simulate(const SimConfig& config) {
  config.validate();
  const int frames = config.frame_count();
  const int ref = config.t_in - 1;

  Scenario s;
  s.dt = config.dt;
  s.seed = config.seed;
  s.t_in = config.t_in;
  s.t_out = config.t_out;
  s.frames.resize(frames);

  const std::vector<Pose2D> ego = ego_trajectory(config);
  for (int f = 0; f < frames; ++f) s.frames[f].ego = ego[f];
  const Pose2D ego_ref = ego[ref];

  Rng rng(substream_seed(config.seed, 0x51));
  std::vector<std::vector<AgentState>> accepted;
  int fallback_count = 0;
  const double observed_clearance = std::max(config.min_clearance, config.observed_clearance);

  auto fits = [&](const std::vector<AgentState>& traj) {
    for (const auto& other : accepted)
      if (!trajectories_clear(traj, other, ref, observed_clearance, config.min_clearance))
        return false;
    return true;
  };

  // Deterministic fallback: static agents on a far ring, one radius each.
  auto place_fallback = [&](std::uint32_t id) {
    AgentState a;
    a.id = id;
    a.spawn_frame = 0;
    a.despawn_frame = frames;
    const double radius = config.spawn_radius + 15.0 + 6.0 * fallback_count;
    const double theta = kGoldenAngle * static_cast<double>(id);
    a.pose = {ego_ref.x + radius * std::cos(theta), ego_ref.y + radius * std::sin(theta),
              normalize_angle(theta + kPi / 2.0)};
    a.length = 0.5 * (config.length_min + config.length_max);
    a.width = 0.5 * (config.width_min + config.width_max);
    ++fallback_count;
    return agent_trajectory(a, ref, frames, config.dt);
  };

  auto sample_size = [&](AgentState& a) {
    a.length = rng.uniform(config.length_min, config.length_max);
    a.width = rng.uniform(config.width_min, config.width_max);
  };

  std::uint32_t next_id = 1;

  // Agent 1 stays slow and close to the reference ego pose, so the window
  // holds at least one agent at every frame under either preset.
  if (config.agent_count >= 1) {
    std::vector<AgentState> traj;
    bool placed = false;
    for (int attempt = 0; attempt < 300 && !placed; ++attempt) {
      AgentState a;
      a.id = next_id;
      a.spawn_frame = 0;
      a.despawn_frame = frames;
      const double ru = std::sqrt(rng.uniform01()) * 4.0;
      const double theta = rng.uniform(0.0, 2.0 * kPi);
      a.pose = {ego_ref.x + ru * std::cos(theta), ego_ref.y + ru * std::sin(theta),
                rng.uniform(-kPi, kPi)};
      a.speed = std::clamp(rng.uniform(0.0, 0.8), config.speed_min, config.speed_max);
      a.yaw_rate = rng.uniform(-0.2, 0.2);
      sample_size(a);
      traj = agent_trajectory(a, ref, frames, config.dt);
      placed = fits(traj);
    }
    accepted.push_back(placed ? std::move(traj) : place_fallback(next_id));
    ++next_id;
  }

  // Aimed pairs meet in a close pass: the leader reaches a point near the
  // window center at its arrival frame and the follower crosses it there,
  // head-on with a small lateral gap. This is the regime where single-vector
  // center projection is fragile while per-pixel warping is not.
  const int pair_budget =
      static_cast<int>(std::floor(config.aim_fraction * config.agent_count / 2.0));
  const int arrival_lo = ref + 2;
  const int arrival_hi = frames - 1;
  const int arrival_step =
      pair_budget > 1 ? std::max(1, (arrival_hi - arrival_lo) / (pair_budget - 1)) : 1;

  for (int p = 0; p < pair_budget && static_cast<int>(next_id) + 1 <= config.agent_count; ++p) {
    const int arrival = std::min(arrival_hi, arrival_lo + p * arrival_step);
    const double horizon_s = arrival * config.dt;

    std::vector<AgentState> leader;
    bool leader_ok = false;
    for (int attempt = 0; attempt < 300 && !leader_ok; ++attempt) {
      const double tr = std::sqrt(rng.uniform01()) * 6.0;
      const double tt = rng.uniform(0.0, 2.0 * kPi);
      const Vec2 target{ego_ref.x + tr * std::cos(tt), ego_ref.y + tr * std::sin(tt)};
      const double dist = rng.uniform(0.3, 0.9) * config.speed_max * horizon_s;
      const double approach = rng.uniform(0.0, 2.0 * kPi);
      AgentState a;
      a.id = next_id;
      a.spawn_frame = 0;
      a.despawn_frame = frames;
      a.pose = {target.x + dist * std::cos(approach), target.y + dist * std::sin(approach), 0.0};
      a.pose.yaw = std::atan2(target.y - a.pose.y, target.x - a.pose.x);
      a.speed = std::clamp(std::max(dist / horizon_s, 0.1), config.speed_min, config.speed_max);
      a.yaw_rate = 0.0;
      sample_size(a);
      std::vector<AgentState> traj = agent_trajectory(a, 0, frames, config.dt);
      if (fits(traj)) {
        leader = std::move(traj);
        leader_ok = true;
      }
    }
    if (!leader_ok) leader = place_fallback(next_id);
    accepted.push_back(leader);
    ++next_id;

    std::vector<AgentState> follower;
    bool follower_ok = false;
    for (int attempt = 0; attempt < 300 && !follower_ok && leader_ok; ++attempt) {
      const AgentState& meet = leader[static_cast<std::size_t>(arrival)];
      const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
      const double gap = rng.uniform(2.2, 3.5);
      const Vec2 pass_point = from_frame({0.0, side * gap}, meet.pose);
      const double heading = normalize_angle(meet.pose.yaw + kPi + rng.uniform(-0.5, 0.5));
      const double speed = std::clamp(rng.uniform(0.6 * config.speed_max, config.speed_max),
                                      config.speed_min, config.speed_max);
      AgentState a;
      a.id = next_id;
      a.spawn_frame = 0;
      a.despawn_frame = frames;
      a.pose = {pass_point.x - std::cos(heading) * speed * horizon_s,
                pass_point.y - std::sin(heading) * speed * horizon_s, heading};
      a.speed = speed;
      a.yaw_rate = 0.0;
      sample_size(a);
      std::vector<AgentState> traj = agent_trajectory(a, 0, frames, config.dt);
      if (fits(traj)) {
        follower = std::move(traj);
        follower_ok = true;
      }
    }
    if (!follower_ok) follower = place_fallback(next_id);
    accepted.push_back(std::move(follower));
    ++next_id;
  }

  // Free-roaming agents fill the rest of the scene.
  while (static_cast<int>(next_id) <= config.agent_count) {
    std::vector<AgentState> traj;
    bool placed = false;
    for (int attempt = 0; attempt < 300 && !placed; ++attempt) {
      AgentState a;
      a.id = next_id;
      a.spawn_frame = 0;
      a.despawn_frame = frames;
      const double ru = std::sqrt(rng.uniform01()) * config.spawn_radius;
      const double theta = rng.uniform(0.0, 2.0 * kPi);
      a.pose = {ego_ref.x + ru * std::cos(theta), ego_ref.y + ru * std::sin(theta),
                rng.uniform(-kPi, kPi)};
      a.speed = rng.uniform(config.speed_min, config.speed_max);
      a.yaw_rate = rng.uniform(-config.yaw_rate_max, config.yaw_rate_max);
      sample_size(a);
      traj = agent_trajectory(a, ref, frames, config.dt);
      placed = fits(traj);
    }
    accepted.push_back(placed ? std::move(traj) : place_fallback(next_id));
    ++next_id;
  }

  for (int f = 0; f < frames; ++f)
    for (const auto& traj : accepted) s.frames[f].agents.push_back(traj[f]);
  return s;
}

std::string scenario_to_string(const Scenario& s) {
  std::string out = "bevflow-scenario v1\n";
  out += "dt " + format_double(s.dt) + "\n";
  out += "seed " + std::to_string(s.seed) + "\n";
  out += "tin " + std::to_string(s.t_in) + "\n";
  out += "tout " + std::to_string(s.t_out) + "\n";
  out += "frames " + std::to_string(s.frames.size()) + "\n";
  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    const ScenarioFrame& fr = s.frames[f];
    out += "frame " + std::to_string(f) + "\n";
    out += "ego " + format_double(fr.ego.x) + " " + format_double(fr.ego.y) + " " +
           format_double(fr.ego.yaw) + "\n";
    for (const AgentState& a : fr.agents) {
      out += "agent " + std::to_string(a.id) + " " + format_double(a.pose.x) + " " +
             format_double(a.pose.y) + " " + format_double(a.pose.yaw) + " " +
             format_double(a.length) + " " + format_double(a.width) + " " +
             format_double(a.speed) + " " + format_double(a.yaw_rate) + "\n";
    }
  }
  out += "end\n";
  return out;
}

Scenario scenario_from_string(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      if (!line.empty()) return true;
    }
    return false;
  };

  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("scenario parse error: " + msg + " on line " +
                             std::to_string(line_no));
  };

  if (!next_line() || line != "bevflow-scenario v1") fail("missing header");

  Scenario s;
  int declared_frames = -1;
  int current_frame = -1;
  bool done = false;
  while (!done && next_line()) {
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    if (key == "dt" && toks.size() == 2) {
      s.dt = parse_double(toks[1], line_no);
    } else if (key == "seed" && toks.size() == 2) {
      s.seed = std::stoull(toks[1]);
    } else if (key == "tin" && toks.size() == 2) {
      s.t_in = std::stoi(toks[1]);
    } else if (key == "tout" && toks.size() == 2) {
      s.t_out = std::stoi(toks[1]);
    } else if (key == "frames" && toks.size() == 2) {
      declared_frames = std::stoi(toks[1]);
      if (declared_frames < 0) fail("negative frame count");
      s.frames.resize(declared_frames);
    } else if (key == "frame" && toks.size() == 2) {
      current_frame = std::stoi(toks[1]);
      if (current_frame < 0 || current_frame >= declared_frames) fail("frame index out of range");
    } else if (key == "ego" && toks.size() == 4) {
      if (current_frame < 0) fail("ego before frame");
      s.frames[current_frame].ego = {parse_double(toks[1], line_no),
                                     parse_double(toks[2], line_no),
                                     parse_double(toks[3], line_no)};
    } else if (key == "agent" && toks.size() == 9) {
      if (current_frame < 0) fail("agent before frame");
      AgentState a;
      a.id = static_cast<std::uint32_t>(std::stoul(toks[1]));
      a.pose = {parse_double(toks[2], line_no), parse_double(toks[3], line_no),
                parse_double(toks[4], line_no)};
      a.length = parse_double(toks[5], line_no);
      a.width = parse_double(toks[6], line_no);
      a.speed = parse_double(toks[7], line_no);
      a.yaw_rate = parse_double(toks[8], line_no);
      s.frames[current_frame].agents.push_back(a);
    } else if (key == "end") {
      done = true;
    } else {
      fail("unrecognized record '" + key + "'");
    }
  }
  if (!done) fail("missing end marker");
  if (declared_frames < 0) fail("missing frame count");

  // Recover spawn/despawn from presence.
  for (int f = 0; f < declared_frames; ++f) {
    for (AgentState& a : s.frames[f].agents) {
      int first = f, last = f;
      for (int g = 0; g < declared_frames; ++g)
        for (const AgentState& b : s.frames[g].agents)
          if (b.id == a.id) {
            first = std::min(first, g);
            last = std::max(last, g);
          }
      a.spawn_frame = first;
      a.despawn_frame = last + 1;
    }
  }
  s.validate();
  return s;
}

void write_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  const std::string text = scenario_to_string(s);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return scenario_from_string(text);
}

}  // namespace bevflow
