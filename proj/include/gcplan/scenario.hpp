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

#ifndef GCPLAN_SCENARIO_HPP_
#define GCPLAN_SCENARIO_HPP_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "gcplan/lane_graph.hpp"

namespace gcplan {

// Fixed timing of the whole toolkit: states are sampled every half
// second, agents carry 2 s of history, plans cover 8 s, and closed-loop
// rollouts run for 15 s.
inline constexpr double kDt = 0.5;
inline constexpr int kHistorySteps = 5;   // t = -2.0 .. 0.0
inline constexpr int kHorizonSteps = 16;  // t = 0.5 .. 8.0
inline constexpr int kSimSteps = 30;      // t = 0.5 .. 15.0

// Snippet construction parameters applied to every map we read or write.
inline constexpr double kSnippetLengthMax = 20.0;
inline constexpr int kSnippetMaxPoints = 10;

struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;      // speed, m/s, non-negative
  double a = 0.0;      // longitudinal acceleration, m/s^2
  double omega = 0.0;  // yaw rate, rad/s
  double heading = 0.0;

  Pose pose() const { return {x, y, heading}; }
  Vec2 position() const { return {x, y}; }
};

enum class AgentClass : std::uint8_t { kVehicle, kPedestrian };

// A non-ego traffic participant. Future motion is replayed from
// future_playback verbatim; agents never react to the SDV.
struct AgentTrack {
  std::string agent_id;
  AgentClass cls = AgentClass::kVehicle;
  std::vector<AgentState> history;          // kHistorySteps states
  std::vector<AgentState> future_playback;  // kSimSteps states
  double length = 0.0;
  double width = 0.0;

  AgentState state_at(int step) const {
    if (step <= 0) return history.back();
    const std::size_t i =
        std::min<std::size_t>(step - 1, future_playback.size() - 1);
    return future_playback[i];
  }
};

// Planned or expert motion: kHorizonSteps waypoints, waypoint i at time
// (i + 1) * kDt after the trajectory's start state.
struct Trajectory {
  std::vector<Vec2> waypoints;
  double dt = kDt;
};

// One evaluation scene. The lane graph is rebuilt deterministically from
// map_lanes on load, so node ids in route are stable across processes.
struct ScenarioRecord {
  std::string scenario_id;
  std::string scenario_type;  // traverse | left_turn | right_turn
  double speed_limit = 0.0;

  std::vector<RawLane> map_lanes;
  std::vector<std::vector<Vec2>> drivable_area;
  LaneGraph graph;

  std::vector<AgentTrack> agents;
  std::vector<AgentState> sdv_history;  // kHistorySteps states
  double sdv_length = 0.0;
  double sdv_width = 0.0;

  NodeId start_node = 0;
  NodeId goal_node = 0;
  Trajectory expert_future;

  const AgentState& sdv_state() const { return sdv_history.back(); }
};

// Node sequence the expert trajectory follows, used as the training
// label. Terminated means the expert comes to rest within the graph.
struct ExpertTraversal {
  std::vector<NodeId> nodes;
  bool terminated = true;
};

// Matches expert_future against the lane graph: starting from
// start_node, greedily follows successor/proximal edges towards each
// waypoint in turn. Throws LabelingError when a waypoint strays more
// than 5 m from every reachable candidate.
ExpertTraversal expert_traversal(const ScenarioRecord& record);

// --- Scenario files -------------------------------------------------------
//
// Scenario sets are stored as a single JSON document with one compact
// line per scenario, so sets diff cleanly and round-trip byte for byte.

std::vector<ScenarioRecord> load_scenarios(const std::string& path);
void save_scenarios(const std::vector<ScenarioRecord>& records,
                    const std::string& path);

// In-memory counterparts, used by tests and the loaders above.
std::vector<ScenarioRecord> parse_scenarios(const std::string& text);
std::string serialize_scenarios(const std::vector<ScenarioRecord>& records);

// --- Synthetic intersections ----------------------------------------------

struct GeneratorConfig {
  std::uint64_t seed = 0;
  int count = 100;
  double arm_length = 60.0;     // approach/exit length per arm, metres
  int lanes_per_arm = 1;        // per direction
  double speed_limit = 10.0;    // m/s
  double agent_density = 1.0;   // expected vehicles per arm
  // Fraction of scenarios whose goal node is swapped to a different exit
  // arm, leaving the expert future unchanged. Models noisy route labels.
  double corrupt_route_fraction = 0.0;
};

// Four-way intersections with straight, left-turn, and right-turn SDV
// routes. Expert futures come from an IDM route follower; other agents
// run IDM along fixed lane routes and any agent whose playback would hit
// the expert is dropped. Fully deterministic in cfg.seed.
std::vector<ScenarioRecord> generate_intersections(const GeneratorConfig& cfg);

}  // namespace gcplan

#endif  // GCPLAN_SCENARIO_HPP_
