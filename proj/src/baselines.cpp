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

#include "gcplan/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gcplan/errors.hpp"
#include "gcplan/planner.hpp"

namespace gcplan {

namespace {

constexpr double kLaneCaptureWidth = 2.0;  // lateral metres counted as "on my path"
constexpr double kEndBrake = 3.0;
constexpr double kProximalCost = 1.0;      // route metres a lane change must save

struct Lead {
  double gap = 0.0;      // bumper to bumper
  double closing = 0.0;  // positive when approaching
};

// Nearest agent footprint ahead of (or behind, when ahead = false) arc s
// on the path, within the lane capture width.
std::optional<Lead> find_vehicle(const Polyline& path, double s,
                                 double ego_speed, double ego_length,
                                 const std::vector<AgentTrack>& agents,
                                 int step, bool ahead,
                                 const AgentTrack* exclude = nullptr) {
  std::optional<Lead> best;
  double best_arc_gap = std::numeric_limits<double>::infinity();
  for (const AgentTrack& agent : agents) {
    if (&agent == exclude) continue;
    const AgentState a = agent.state_at(step);
    const auto proj = path.project(a.position());
    if (std::abs(proj.signed_lateral) > kLaneCaptureWidth) continue;
    const double arc_gap = ahead ? proj.arc - s : s - proj.arc;
    if (arc_gap <= 1e-6) continue;
    if (arc_gap < best_arc_gap) {
      best_arc_gap = arc_gap;
      const double lead_long =
          a.v * std::cos(a.heading - path.heading_at(proj.arc));
      Lead lead;
      lead.gap = arc_gap - 0.5 * (ego_length + agent.length);
      lead.closing = ahead ? ego_speed - lead_long : lead_long - ego_speed;
      best = lead;
    }
  }
  return best;
}

// Approximate arc positions on the path where each route node ends; used
// to trigger lane-change evaluations at snippet boundaries.
std::vector<double> node_end_arcs(const LaneGraph& graph,
                                  const std::vector<NodeId>& nodes,
                                  const Polyline& path) {
  std::vector<double> ends;
  ends.reserve(nodes.size());
  for (NodeId v : nodes) {
    const Vec2 end = graph.nodes()[v].centreline().points().back();
    ends.push_back(path.project(end).arc);
  }
  return ends;
}

}  // namespace

double idm_acceleration(const IdmParams& params, double v,
                        std::optional<double> gap, double closing_speed) {
  if (!(params.desired_speed > 0.0)) {
    throw InvalidArgumentError("idm_acceleration: desired_speed must be > 0");
  }
  double a = params.max_accel *
             (1.0 - std::pow(v / params.desired_speed, params.exponent));
  if (gap.has_value()) {
    const double s_star =
        params.min_gap +
        std::max(0.0, v * params.time_headway +
                          v * closing_speed /
                              (2.0 * std::sqrt(params.max_accel *
                                               params.comfort_decel)));
    const double g = std::max(*gap, 1e-3);
    a -= params.max_accel * (s_star / g) * (s_star / g);
  }
  return std::clamp(a, -2.0 * params.comfort_decel, params.max_accel);
}

std::vector<NodeId> shortest_route(const LaneGraph& graph, NodeId start,
                                   NodeId goal) {
  if (!graph.valid_node(start) || !graph.valid_node(goal)) {
    throw InvalidArgumentError("shortest_route: invalid node id");
  }
  const std::size_t n = graph.node_count();
  std::vector<double> cost(n, std::numeric_limits<double>::infinity());
  std::vector<NodeId> parent(n, -1);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  cost[start] = 0.0;
  queue.push({0.0, start});
  while (!queue.empty()) {
    const auto [c, u] = queue.top();
    queue.pop();
    if (c > cost[u] + 1e-12) continue;
    if (u == goal) break;
    for (const Edge& e : graph.outgoing(u)) {
      if (e.kind == EdgeKind::kTerminal) continue;
      const double step =
          graph.nodes()[e.to].arc_length +
          (e.kind == EdgeKind::kProximal ? kProximalCost : 0.0);
      if (c + step < cost[e.to] - 1e-12) {
        cost[e.to] = c + step;
        parent[e.to] = u;
        queue.push({cost[e.to], e.to});
      }
    }
  }
  if (!std::isfinite(cost[goal])) {
    throw RouteError("goal node " + std::to_string(goal) +
                     " is unreachable from node " + std::to_string(start));
  }
  std::vector<NodeId> path;
  for (NodeId v = goal; v != -1; v = parent[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

Trajectory idm_route_plan(const ScenarioRecord& record,
                          const AgentState& sdv_state, int time_step,
                          const IdmParams& idm, const MobilParams& mobil) {
  IdmParams params = idm;
  if (!(params.desired_speed > 0.0)) {
    params.desired_speed = record.speed_limit;
  }
  const LaneGraph& graph = record.graph;
  const NodeId start = assign_sdv_node(graph, sdv_state.pose());

  std::vector<NodeId> nodes;
  try {
    nodes = shortest_route(graph, start, record.goal_node);
  } catch (const RouteError&) {
    // Past the goal (or no route): keep rolling down successor edges.
    nodes.push_back(start);
    for (int i = 0; i < 8; ++i) {
      NodeId next = -1;
      for (const Edge& e : graph.outgoing(nodes.back())) {
        if (e.kind == EdgeKind::kSuccessor) {
          next = e.to;
          break;
        }
      }
      if (next < 0) break;
      nodes.push_back(next);
    }
  }
  Polyline path = reference_path(graph, nodes, sdv_state.position());
  std::vector<double> ends = node_end_arcs(graph, nodes, path);

  double v = sdv_state.v;
  double s = 0.0;
  std::size_t node_idx = 0;
  Trajectory out;
  out.waypoints.reserve(kHorizonSteps);

  for (int j = 0; j < kHorizonSteps; ++j) {
    const int step = time_step + j;

    // Snippet boundary crossed: consider a lane change.
    std::size_t new_idx = node_idx;
    while (new_idx + 1 < nodes.size() && s > ends[new_idx]) ++new_idx;
    if (mobil.enabled && new_idx != node_idx) {
      const Vec2 pos = path.point_at(s);
      const auto lead_cur = find_vehicle(path, s, v, record.sdv_length,
                                         record.agents, step, true);
      const double a_cur = idm_acceleration(
          params, v, lead_cur ? std::optional<double>(lead_cur->gap)
                              : std::nullopt,
          lead_cur ? lead_cur->closing : 0.0);
      double best_gain = mobil.accel_threshold;
      std::vector<NodeId> best_nodes;
      Polyline best_path;
      double best_s = 0.0;
      for (const Edge& e : graph.outgoing(nodes[new_idx])) {
        if (e.kind != EdgeKind::kProximal) continue;
        std::vector<NodeId> alt_nodes;
        try {
          alt_nodes = shortest_route(graph, e.to, record.goal_node);
        } catch (const RouteError&) {
          continue;
        }
        const Polyline alt_path = reference_path(
            graph, alt_nodes,
            graph.nodes()[e.to].centreline().points().front());
        const double s_alt = alt_path.project(pos).arc;
        const auto lead_alt = find_vehicle(alt_path, s_alt, v,
                                           record.sdv_length, record.agents,
                                           step, true);
        const double a_alt = idm_acceleration(
            params, v, lead_alt ? std::optional<double>(lead_alt->gap)
                                : std::nullopt,
            lead_alt ? lead_alt->closing : 0.0);
        // New follower must stay above the hard braking bound, and the
        // weighted acceleration gain must clear the threshold.
        double follower_term = 0.0;
        bool safe = true;
        const auto follower = find_vehicle(alt_path, s_alt, v,
                                           record.sdv_length, record.agents,
                                           step, false);
        if (follower) {
          const double v_follower = std::max(0.0, v + follower->closing);
          const double a_new = idm_acceleration(params, v_follower,
                                                follower->gap,
                                                follower->closing);
          safe = a_new >= -mobil.safe_decel;
          const double a_old =
              idm_acceleration(params, v_follower, std::nullopt, 0.0);
          follower_term = a_new - a_old;
        }
        const double gain = (a_alt - a_cur) + mobil.politeness * follower_term;
        if (safe && gain > best_gain) {
          best_gain = gain;
          best_nodes = alt_nodes;
          best_path = alt_path;
          best_s = s_alt;
        }
      }
      if (!best_nodes.empty()) {
        nodes = std::move(best_nodes);
        path = std::move(best_path);
        ends = node_end_arcs(graph, nodes, path);
        s = best_s;
        new_idx = 0;
      }
    }
    node_idx = new_idx;

    const auto lead = find_vehicle(path, s, v, record.sdv_length,
                                   record.agents, step, true);
    double a = idm_acceleration(
        params, v,
        lead ? std::optional<double>(lead->gap) : std::nullopt,
        lead ? lead->closing : 0.0);
    const double remaining = path.length() - s;
    if (remaining <= v * v / (2.0 * kEndBrake)) {
      a = std::min(a, -kEndBrake);
    }
    v = std::max(0.0, v + a * kDt);
    s = std::min(path.length(), s + v * kDt);
    out.waypoints.push_back(path.point_at(s));
  }
  return out;
}

}  // namespace gcplan
