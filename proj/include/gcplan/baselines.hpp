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

#ifndef GCPLAN_BASELINES_HPP_
#define GCPLAN_BASELINES_HPP_

#include <optional>
#include <vector>

#include "gcplan/scenario.hpp"

namespace gcplan {

// Intelligent Driver Model parameters. desired_speed = 0 means "use the
// scenario speed limit".
struct IdmParams {
  double desired_speed = 0.0;   // v0, m/s
  double time_headway = 1.5;    // T, s
  double min_gap = 2.0;         // s0, m
  double max_accel = 1.5;       // a, m/s^2
  double comfort_decel = 2.0;   // b, m/s^2
  double exponent = 4.0;        // delta
};

// Lane-change incentive model on top of IDM.
struct MobilParams {
  bool enabled = false;
  double politeness = 0.3;
  double accel_threshold = 0.2;  // m/s^2 advantage required to change
  double safe_decel = 3.0;       // new follower must not brake harder
};

// IDM acceleration for speed v with an optional lead vehicle at
// bumper-to-bumper distance gap closing at closing_speed (> 0 when
// approaching). Clipped to [-2 * comfort_decel, max_accel]. params must
// carry a resolved desired_speed (> 0).
double idm_acceleration(const IdmParams& params, double v,
                        std::optional<double> gap, double closing_speed);

// Cheapest walk from start to goal: edge cost is the target snippet's
// arc length, plus one metre per proximal hop so lane changes are only
// taken when they shorten the route. Throws RouteError when unreachable.
std::vector<NodeId> shortest_route(const LaneGraph& graph, NodeId start,
                                   NodeId goal);

// Rule-based route follower: drives the shortest route to the goal with
// IDM speed control against the nearest replayed agent ahead on the
// path. time_step is the rollout step the plan starts at (0 at the start
// of the scenario); agent playback is indexed from there. With MOBIL
// enabled, a lane change to a proximal neighbour is considered at every
// snippet boundary.
Trajectory idm_route_plan(const ScenarioRecord& record,
                          const AgentState& sdv_state, int time_step,
                          const IdmParams& idm, const MobilParams& mobil);

}  // namespace gcplan

#endif  // GCPLAN_BASELINES_HPP_
