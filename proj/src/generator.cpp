// Copyright 2026 The gcplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gcplan/baselines.hpp"
#include "gcplan/errors.hpp"
#include "gcplan/planner.hpp"
#include "gcplan/random.hpp"
#include "gcplan/scenario.hpp"

namespace gcplan {

namespace {

// Per-record draw tags; every random decision is keyed by
// (record seed, tag, index), so adding draws never shifts others.
enum DrawTag : std::uint64_t {
  kManeuverTag = 1,
  kSdvLaneTag,
  kSdvDistanceTag,
  kSdvSpeedTag,
  kAgentCountTag,
  kAgentLaneTag,
  kAgentManeuverTag,
  kAgentArcTag,
  kAgentSpeedTag,
  kCorruptTag,
  kCorruptExitTag,
};

constexpr double kLaneWidth = 3.5;
constexpr double kVehicleLength = 4.5;
constexpr double kVehicleWidth = 2.0;
constexpr double kArcSamples = 24;  // segments per turn connector
constexpr double kEndBrake = 3.0;

enum Maneuver { kStraight = 0, kLeft = 1, kRight = 2 };

// Exact quarter-turn rotation; multiples of 90 degrees stay clean.
Vec2 rot(int d, const Vec2& p) {
  switch (d & 3) {
    case 1:
      return {-p.y, p.x};
    case 2:
      return {-p.x, -p.y};
    case 3:
      return {p.y, -p.x};
    default:
      return p;
  }
}

Pose rot(int d, const Pose& p) {
  const Vec2 q = rot(d, Vec2{p.x, p.y});
  return {q.x, q.y, normalize_angle(p.heading + (d & 3) * M_PI_2)};
}

struct IntersectionMap {
  std::vector<RawLane> lanes;
  std::vector<std::vector<Vec2>> drivable;
  int lanes_per_arm = 1;
  double half_size = 0.0;  // junction box half width

  std::int64_t incoming_id(int arm, int lane) const {
    return arm * lanes_per_arm + lane;
  }
  std::int64_t outgoing_id(int arm, int lane) const {
    return 4 * lanes_per_arm + arm * lanes_per_arm + lane;
  }
  const RawLane& lane_by_id(std::int64_t id) const {
    for (const RawLane& l : lanes) {
      if (l.id == id) return l;
    }
    throw InvalidArgumentError("unknown lane id");
  }
};

int exit_arm(int arm, Maneuver m) {
  switch (m) {
    case kStraight:
      return (arm + 2) & 3;
    case kLeft:
      return (arm + 3) & 3;
    case kRight:
      return (arm + 1) & 3;
  }
  return arm;
}

int exit_lane(const IntersectionMap& map, int lane, Maneuver m) {
  switch (m) {
    case kStraight:
      return lane;
    case kLeft:
      return 0;
    case kRight:
      return map.lanes_per_arm - 1;
  }
  return lane;
}

// Four arms, right-hand traffic. Arm 0 approaches from the south
// (heading +y); arms 1..3 are successive 90-degree rotations. Incoming
// lane i sits at lateral offset 1.75 + 3.5 i right of the road axis.
IntersectionMap build_intersection(const GeneratorConfig& cfg) {
  IntersectionMap map;
  const int n = cfg.lanes_per_arm;
  map.lanes_per_arm = n;
  const double a = cfg.arm_length;
  const double h = kLaneWidth * n + kLaneWidth;
  map.half_size = h;

  const auto offset = [&](int lane) { return 0.5 * kLaneWidth + kLaneWidth * lane; };

  // Incoming and outgoing straights for every arm.
  for (int d = 0; d < 4; ++d) {
    for (int i = 0; i < n; ++i) {
      const double c = offset(i);
      RawLane in;
      in.id = map.incoming_id(d, i);
      in.points = {rot(d, Pose{c, -(h + a), M_PI_2}),
                   rot(d, Pose{c, -h, M_PI_2})};
      if (i > 0) in.neighbours.push_back(map.incoming_id(d, i - 1));
      if (i + 1 < n) in.neighbours.push_back(map.incoming_id(d, i + 1));
      map.lanes.push_back(std::move(in));
    }
  }
  for (int d = 0; d < 4; ++d) {
    for (int i = 0; i < n; ++i) {
      const double c = offset(i);
      RawLane out;
      out.id = map.outgoing_id(d, i);
      out.points = {rot(d, Pose{-c, -h, -M_PI_2}),
                    rot(d, Pose{-c, -(h + a), -M_PI_2})};
      if (i > 0) out.neighbours.push_back(map.outgoing_id(d, i - 1));
      if (i + 1 < n) out.neighbours.push_back(map.outgoing_id(d, i + 1));
      map.lanes.push_back(std::move(out));
    }
  }

  // Connectors. Straight from every lane; left turns from the innermost
  // lane, right turns from the outermost.
  std::int64_t next_id = 8 * static_cast<std::int64_t>(n);
  for (int d = 0; d < 4; ++d) {
    for (int i = 0; i < n; ++i) {
      const double c = offset(i);
      const auto connect = [&](Maneuver m, std::vector<Pose> base_points) {
        RawLane conn;
        conn.id = next_id++;
        conn.points.reserve(base_points.size());
        for (const Pose& p : base_points) conn.points.push_back(rot(d, p));
        conn.successors.push_back(
            map.outgoing_id(exit_arm(d, m), exit_lane(map, i, m)));
        for (RawLane& lane : map.lanes) {
          if (lane.id == map.incoming_id(d, i)) {
            lane.successors.push_back(conn.id);
          }
        }
        map.lanes.push_back(std::move(conn));
      };
      connect(kStraight, {{c, -h, M_PI_2}, {c, 0.0, M_PI_2}, {c, h, M_PI_2}});
      if (i == 0) {
        // Counter-clockwise quarter arc around the far corner.
        const double r = h + c;
        std::vector<Pose> pts;
        for (int k = 0; k <= kArcSamples; ++k) {
          const double phi = M_PI_2 * k / kArcSamples;
          pts.push_back({-h + r * std::cos(phi), -h + r * std::sin(phi),
                         normalize_angle(phi + M_PI_2)});
        }
        connect(kLeft, std::move(pts));
      }
      if (i == n - 1) {
        // Clockwise quarter arc around the near corner.
        const double r = h - c;
        std::vector<Pose> pts;
        for (int k = 0; k <= kArcSamples; ++k) {
          const double phi = M_PI - M_PI_2 * k / kArcSamples;
          pts.push_back({h + r * std::cos(phi), -h + r * std::sin(phi),
                         normalize_angle(phi - M_PI_2)});
        }
        connect(kRight, std::move(pts));
      }
    }
  }

  // Junction box plus one rectangle per arm, meeting at the box edge.
  const double rw = kLaneWidth * n + 0.25;
  const double reach = h + a + 6.0;
  map.drivable.push_back({{-h, -h}, {h, -h}, {h, h}, {-h, h}});
  for (int d = 0; d < 4; ++d) {
    std::vector<Vec2> rect = {{-rw, -reach}, {rw, -reach}, {rw, -h}, {-rw, -h}};
    for (Vec2& p : rect) p = rot(d, p);
    map.drivable.push_back(std::move(rect));
  }
  return map;
}

struct SimAgent {
  std::string id;
  Polyline path;
  Polyline spawn_lane;     // incoming lane, for history backfill
  double spawn_arc = 0.0;  // arc of the t=0 position along spawn_lane
  double arc = 0.0;
  double speed = 0.0;
  double cruise = 0.0;
  AgentState state;
  std::vector<AgentState> playback;
};

AgentState path_state(const Polyline& path, double arc, double v, double a,
                      double prev_heading, double* heading_out) {
  AgentState s;
  const Vec2 p = path.point_at(arc);
  double heading = path.heading_at(arc);
  if (path.length() <= 0.0) heading = prev_heading;
  s.x = p.x;
  s.y = p.y;
  s.v = v;
  s.a = a;
  s.heading = normalize_angle(heading);
  s.omega = normalize_angle(s.heading - prev_heading) / kDt;
  *heading_out = s.heading;
  return s;
}

OrientedBox state_box(const AgentState& s, double length, double width) {
  return {s.x, s.y, s.heading, length, width};
}

}  // namespace

std::vector<ScenarioRecord> generate_intersections(
    const GeneratorConfig& cfg) {
  if (cfg.count < 0) throw InvalidArgumentError("generator: negative count");
  if (cfg.lanes_per_arm < 1) {
    throw InvalidArgumentError("generator: lanes_per_arm must be >= 1");
  }
  if (cfg.arm_length < 40.0) {
    throw InvalidArgumentError("generator: arm_length must be >= 40 m");
  }
  if (!(cfg.speed_limit > 0.0)) {
    throw InvalidArgumentError("generator: speed_limit must be > 0");
  }
  if (cfg.agent_density < 0.0) {
    throw InvalidArgumentError("generator: agent_density must be >= 0");
  }
  if (cfg.corrupt_route_fraction < 0.0 || cfg.corrupt_route_fraction > 1.0) {
    throw InvalidArgumentError(
        "generator: corrupt_route_fraction must be in [0, 1]");
  }

  std::vector<ScenarioRecord> out;
  out.reserve(cfg.count);
  const int n = cfg.lanes_per_arm;

  for (int rec_i = 0; rec_i < cfg.count; ++rec_i) {
    const std::uint64_t rs =
        rng::key(cfg.seed, rng::kStreamGenerate, rec_i, 0);
    const auto draw = [&](std::uint64_t tag, std::uint64_t idx) {
      return rng::uniform01(rs, tag, idx, 0);
    };

    const auto maneuver =
        static_cast<Maneuver>(std::min<int>(2, draw(kManeuverTag, 0) * 3));
    int sdv_lane = 0;
    if (maneuver == kStraight) {
      sdv_lane = std::min<int>(n - 1, draw(kSdvLaneTag, 0) * n);
    } else if (maneuver == kRight) {
      sdv_lane = n - 1;
    }
    const double d0 = 15.0 + 20.0 * draw(kSdvDistanceTag, 0);
    const double v0 = cfg.speed_limit * (0.6 + 0.4 * draw(kSdvSpeedTag, 0));

    IntersectionMap map = build_intersection(cfg);
    const double h = map.half_size;

    // Shift the world so the SDV's t=0 position is the origin.
    const Vec2 sdv_pos_raw{0.5 * kLaneWidth + kLaneWidth * sdv_lane,
                           -(h + d0)};
    for (RawLane& lane : map.lanes) {
      for (Pose& p : lane.points) {
        p.x -= sdv_pos_raw.x;
        p.y -= sdv_pos_raw.y;
      }
    }
    for (auto& poly : map.drivable) {
      for (Vec2& p : poly) p = p - sdv_pos_raw;
    }

    ScenarioRecord rec;
    rec.speed_limit = cfg.speed_limit;
    rec.map_lanes = map.lanes;
    rec.drivable_area = map.drivable;
    rec.graph = build_graph(rec.map_lanes, kSnippetLengthMax,
                            kSnippetMaxPoints);
    rec.sdv_length = kVehicleLength;
    rec.sdv_width = kVehicleWidth;
    for (int j = 0; j < kHistorySteps; ++j) {
      AgentState s;
      s.x = 0.0;
      s.y = -v0 * kDt * (kHistorySteps - 1 - j);
      s.v = v0;
      s.heading = M_PI_2;
      rec.sdv_history.push_back(s);
    }
    rec.start_node = assign_sdv_node(rec.graph, {0.0, 0.0, M_PI_2});

    const auto lane_end_node = [&](std::int64_t lane_id) {
      const RawLane& lane = map.lane_by_id(lane_id);
      return assign_sdv_node(rec.graph, lane.points.back());
    };
    const std::int64_t exit_id =
        map.outgoing_id(exit_arm(0, maneuver), exit_lane(map, sdv_lane, maneuver));
    rec.goal_node = lane_end_node(exit_id);

    // Other traffic: IDM along fixed routes, simulated jointly so agents
    // queue behind each other. Nobody reacts to the SDV.
    std::vector<SimAgent> sims;
    const double sdv_arc = cfg.arm_length - d0;
    int agent_no = 0;
    for (int d = 0; d < 4; ++d) {
      const double density_u = draw(kAgentCountTag, d);
      int count = static_cast<int>(cfg.agent_density);
      if (density_u < cfg.agent_density - count) ++count;
      for (int k = 0; k < count; ++k) {
        const std::uint64_t idx = d * 16 + k;
        const int lane = std::min<int>(n - 1, draw(kAgentLaneTag, idx) * n);
        std::vector<Maneuver> allowed{kStraight};
        if (lane == 0) allowed.push_back(kLeft);
        if (lane == n - 1) allowed.push_back(kRight);
        const auto am = allowed[std::min<std::size_t>(
            allowed.size() - 1, draw(kAgentManeuverTag, idx) * allowed.size())];
        const double arc0 =
            5.0 + (cfg.arm_length - 20.0) * draw(kAgentArcTag, idx);
        const double cruise =
            cfg.speed_limit * (0.5 + 0.5 * draw(kAgentSpeedTag, idx));
        // Keep clear of the SDV's spot and of already-placed agents.
        if (d == 0 && lane == sdv_lane && arc0 < sdv_arc + 12.0) continue;
        const RawLane& in_lane = map.lane_by_id(map.incoming_id(d, lane));
        std::vector<Vec2> lane_pts;
        for (const Pose& p : in_lane.points) lane_pts.push_back({p.x, p.y});
        const Polyline lane_line(lane_pts);
        const Vec2 spawn = lane_line.point_at(arc0);
        bool blocked = false;
        for (const SimAgent& other : sims) {
          if (distance(spawn, other.state.position()) < 10.0) blocked = true;
        }
        if (blocked) continue;

        SimAgent sim;
        char buf[16];
        std::snprintf(buf, sizeof buf, "a%02d", agent_no++);
        sim.id = buf;
        const Pose spawn_pose{spawn.x, spawn.y, lane_line.heading_at(arc0)};
        const NodeId from = assign_sdv_node(rec.graph, spawn_pose);
        const NodeId to = lane_end_node(
            map.outgoing_id(exit_arm(d, am), exit_lane(map, lane, am)));
        std::vector<NodeId> route;
        try {
          route = shortest_route(rec.graph, from, to);
        } catch (const RouteError&) {
          continue;
        }
        sim.path = reference_path(rec.graph, route, spawn);
        sim.spawn_lane = lane_line;
        sim.spawn_arc = arc0;
        sim.arc = 0.0;
        sim.speed = cruise;
        sim.cruise = cruise;
        double heading = spawn_pose.heading;
        sim.state = path_state(sim.path, 0.0, cruise, 0.0, heading, &heading);
        sim.state.omega = 0.0;
        sims.push_back(std::move(sim));
      }
    }

    IdmParams agent_idm;
    for (int step = 1; step <= kSimSteps; ++step) {
      std::vector<AgentState> prev;
      prev.reserve(sims.size());
      for (const SimAgent& s : sims) prev.push_back(s.state);
      for (std::size_t si = 0; si < sims.size(); ++si) {
        SimAgent& sim = sims[si];
        std::optional<double> gap;
        double closing = 0.0;
        double best_arc = std::numeric_limits<double>::infinity();
        for (std::size_t oi = 0; oi < sims.size(); ++oi) {
          if (oi == si) continue;
          const auto proj = sim.path.project(prev[oi].position());
          if (std::abs(proj.signed_lateral) > 2.0) continue;
          if (proj.arc <= sim.arc + 1e-6 || proj.arc >= best_arc) continue;
          best_arc = proj.arc;
          gap = proj.arc - sim.arc - kVehicleLength;
          closing = sim.speed -
                    prev[oi].v * std::cos(prev[oi].heading -
                                          sim.path.heading_at(proj.arc));
        }
        agent_idm.desired_speed = sim.cruise;
        double a = idm_acceleration(agent_idm, sim.speed, gap, closing);
        const double remaining = sim.path.length() - sim.arc;
        if (remaining <= sim.speed * sim.speed / (2.0 * kEndBrake)) {
          a = std::min(a, -kEndBrake);
        }
        const double v_prev = sim.speed;
        sim.speed = std::max(0.0, sim.speed + a * kDt);
        sim.arc = std::min(sim.path.length(), sim.arc + sim.speed * kDt);
        double heading = sim.state.heading;
        sim.state = path_state(sim.path, sim.arc, sim.speed,
                               (sim.speed - v_prev) / kDt, heading, &heading);
        sim.playback.push_back(sim.state);
      }
    }

    for (SimAgent& sim : sims) {
      AgentTrack track;
      track.agent_id = sim.id;
      track.cls = AgentClass::kVehicle;
      track.length = kVehicleLength;
      track.width = kVehicleWidth;
      for (int j = 0; j < kHistorySteps; ++j) {
        const double back = kDt * (kHistorySteps - 1 - j);
        const double arc = std::max(0.0, sim.spawn_arc - sim.cruise * back);
        AgentState s;
        const Vec2 p = sim.spawn_lane.point_at(arc);
        s.x = p.x;
        s.y = p.y;
        s.v = sim.cruise;
        s.heading = normalize_angle(sim.spawn_lane.heading_at(arc));
        track.history.push_back(s);
      }
      track.future_playback = sim.playback;
      rec.agents.push_back(std::move(track));
    }

    // Expert: IDM route follower reacting to the replayed agents.
    IdmParams expert_idm;
    MobilParams no_mobil;
    const Trajectory expert =
        idm_route_plan(rec, rec.sdv_state(), 0, expert_idm, no_mobil);
    rec.expert_future = expert;

    // Drop any agent whose playback would touch the expert's footprint.
    std::vector<OrientedBox> expert_boxes;
    {
      double heading = M_PI_2;
      Vec2 prev_p{0.0, 0.0};
      expert_boxes.push_back(
          state_box(rec.sdv_state(), kVehicleLength, kVehicleWidth));
      for (int t = 1; t <= kSimSteps; ++t) {
        const Vec2 p =
            expert.waypoints[std::min<std::size_t>(t - 1, kHorizonSteps - 1)];
        if (distance(p, prev_p) > 1e-6) {
          heading = heading_of(p - prev_p);
        }
        expert_boxes.push_back({p.x, p.y, heading, kVehicleLength,
                                kVehicleWidth});
        prev_p = p;
      }
    }
    std::vector<AgentTrack> kept;
    for (const AgentTrack& track : rec.agents) {
      bool hits = false;
      for (int t = 0; t <= kSimSteps && !hits; ++t) {
        const AgentState s = track.state_at(t);
        hits = boxes_overlap(expert_boxes[t],
                             state_box(s, track.length, track.width));
      }
      if (!hits) kept.push_back(track);
    }
    rec.agents = std::move(kept);

    // Optionally mislabel the route: keep the expert, swap the goal to a
    // different exit arm.
    if (draw(kCorruptTag, 0) < cfg.corrupt_route_fraction) {
      const int correct = exit_arm(0, maneuver);
      std::vector<int> others;
      for (int d = 1; d < 4; ++d) {
        if (d != correct) others.push_back(d);
      }
      const int pick = std::min<std::size_t>(
          others.size() - 1, draw(kCorruptExitTag, 0) * others.size());
      rec.goal_node = lane_end_node(map.outgoing_id(others[pick], 0));
    }

    char id_buf[16];
    std::snprintf(id_buf, sizeof id_buf, "s%04d", rec_i);
    rec.scenario_id = id_buf;
    rec.scenario_type = maneuver == kStraight
                            ? "traverse"
                            : maneuver == kLeft ? "left_turn" : "right_turn";
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace gcplan
