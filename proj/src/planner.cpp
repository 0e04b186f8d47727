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

#include "gcplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcplan/errors.hpp"
#include "gcplan/random.hpp"

namespace gcplan {

namespace {

constexpr double kProximalBlend = 5.0;   // metres to merge into the new lane
constexpr double kEndBrake = 3.0;        // m/s^2 used to stop at the path end
constexpr double kAccelGain = 0.4;       // z[0] -> acceleration
constexpr double kSpeedGain = 0.15;      // z[1] -> target speed scale
constexpr double kFilterRadius = 5.0;    // on-route endpoint tolerance
constexpr double kDedupe = 1e-9;

}  // namespace

std::string planner_kind_name(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kPgp:
      return "pgp";
    case PlannerKind::kGcPgp:
      return "gc_pgp";
    case PlannerKind::kSoftMask:
      return "soft_mask";
    case PlannerKind::kHardMaskTrained:
      return "hard_mask_trained";
    case PlannerKind::kNodeFeatures:
      return "node_features";
    case PlannerKind::kFilterOnRoute:
      return "filter_on_route";
  }
  throw InvalidArgumentError("unknown planner kind");
}

PlannerKind planner_kind_from_name(const std::string& name) {
  if (name == "pgp") return PlannerKind::kPgp;
  if (name == "gc_pgp") return PlannerKind::kGcPgp;
  if (name == "soft_mask") return PlannerKind::kSoftMask;
  if (name == "hard_mask_trained") return PlannerKind::kHardMaskTrained;
  if (name == "node_features") return PlannerKind::kNodeFeatures;
  if (name == "filter_on_route") return PlannerKind::kFilterOnRoute;
  throw InvalidArgumentError("unknown planner kind '" + name + "'");
}

TrainMode required_train_mode(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kPgp:
    case PlannerKind::kGcPgp:
    case PlannerKind::kFilterOnRoute:
      return TrainMode::kUnconditioned;
    case PlannerKind::kSoftMask:
      return TrainMode::kSoftMask;
    case PlannerKind::kHardMaskTrained:
      return TrainMode::kHardMaskAtTrain;
    case PlannerKind::kNodeFeatures:
      return TrainMode::kNodeFeatures;
  }
  throw InvalidArgumentError("unknown planner kind");
}

Polyline reference_path(const LaneGraph& graph,
                        const std::vector<NodeId>& nodes,
                        const Vec2& start_pos) {
  if (nodes.empty()) {
    throw InvalidArgumentError("reference_path: empty node sequence");
  }
  for (NodeId v : nodes) {
    if (!graph.valid_node(v)) {
      throw InvalidArgumentError("reference_path: invalid node id");
    }
  }
  Polyline out;
  const auto push = [&out](const Vec2& p) {
    if (!out.empty() && distance(out.points().back(), p) < kDedupe) return;
    out.append(p);
  };

  // First node: enter at the projection of the start position.
  {
    const Polyline& line = graph.nodes()[nodes.front()].centreline();
    const double s0 = line.project(start_pos).arc;
    push(line.point_at(s0));
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line.arc_at_vertex(i) > s0 + kDedupe) push(line.points()[i]);
    }
  }

  for (std::size_t n = 1; n < nodes.size(); ++n) {
    const NodeId from = nodes[n - 1];
    const NodeId to = nodes[n];
    EdgeKind kind = EdgeKind::kSuccessor;
    bool found = false;
    for (const Edge& e : graph.outgoing(from)) {
      if (e.kind != EdgeKind::kTerminal && e.to == to) {
        kind = e.kind;  // successors are stored first, so they win ties
        found = true;
        break;
      }
    }
    if (!found) {
      throw InvalidArgumentError("reference_path: nodes " +
                                 std::to_string(from) + " -> " +
                                 std::to_string(to) + " are not connected");
    }
    const Polyline& line = graph.nodes()[to].centreline();
    if (kind == EdgeKind::kSuccessor) {
      for (const Vec2& p : line.points()) push(p);
      continue;
    }
    // Proximal hop: blend from the current path end onto the new lane
    // over the next kProximalBlend metres of its centreline.
    const Vec2 p0 = out.points().back();
    const double s_star = line.project(p0).arc;
    const double blend = std::min(kProximalBlend, line.length() - s_star);
    const Vec2 offset = p0 - line.point_at(s_star);
    if (blend > kDedupe) {
      // Sample at the target's vertices inside the window plus its end.
      for (std::size_t i = 0; i < line.size(); ++i) {
        const double s = line.arc_at_vertex(i);
        if (s <= s_star + kDedupe || s >= s_star + blend - kDedupe) continue;
        const double w = 1.0 - (s - s_star) / blend;
        push(line.point_at(s) + offset * w);
      }
      push(line.point_at(s_star + blend));
    }
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line.arc_at_vertex(i) > s_star + blend + kDedupe) {
        push(line.points()[i]);
      }
    }
  }
  return out;
}

void latent_sample(std::uint64_t seed, int k, double z[2]) {
  rng::normal_pair(seed, rng::kStreamLatent, static_cast<std::uint64_t>(k), 0,
                   &z[0], &z[1]);
}

Trajectory decode_trajectory(const LaneGraph& graph,
                             const Traversal& traversal,
                             const AgentState& sdv_state, const double z[2],
                             double speed_limit) {
  if (!(speed_limit > 0.0)) {
    throw InvalidArgumentError("decode_trajectory: speed limit must be > 0");
  }
  const Polyline path =
      reference_path(graph, traversal.nodes, sdv_state.position());
  const double accel = std::clamp(kAccelGain * z[0], -3.0, 2.0);
  const double v_target = std::max(0.0, speed_limit * (1.0 + kSpeedGain * z[1]));
  const double total = path.length();

  Trajectory out;
  out.waypoints.reserve(kHorizonSteps);
  double v = sdv_state.v;
  double s = 0.0;
  for (int i = 0; i < kHorizonSteps; ++i) {
    const double remaining = total - s;
    // Brake to rest at the end of the path once the stopping distance
    // at kEndBrake is reached; hold position afterwards.
    const double a = remaining <= v * v / (2.0 * kEndBrake) ? -kEndBrake
                                                            : accel;
    v = std::clamp(v + a * kDt, 0.0, v_target);
    s = std::min(total, s + v * kDt);
    out.waypoints.push_back(path.point_at(s));
  }
  return out;
}

PlanSet cluster_plans(const std::vector<Trajectory>& trajectories,
                      int num_modes, std::uint64_t seed) {
  if (num_modes < 1) {
    throw InvalidArgumentError("cluster_plans: num_modes must be >= 1");
  }
  const std::size_t n = trajectories.size();
  PlanSet out;
  if (n == 0) return out;
  const std::size_t dim = 2 * kHorizonSteps;
  for (const Trajectory& t : trajectories) {
    if (t.waypoints.size() != kHorizonSteps) {
      throw InvalidArgumentError("cluster_plans: wrong waypoint count");
    }
  }
  const auto coord = [&](std::size_t i, std::size_t d) {
    const Vec2& w = trajectories[i].waypoints[d / 2];
    return d % 2 == 0 ? w.x : w.y;
  };
  const auto dist2_to = [&](std::size_t i, const std::vector<double>& c) {
    double d2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = coord(i, d) - c[d];
      d2 += diff * diff;
    }
    return d2;
  };

  // Farthest-point seeding; the first centre is a seeded pick.
  const std::size_t k_max = std::min<std::size_t>(num_modes, n);
  std::vector<std::vector<double>> centroids;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  {
    const std::size_t first =
        rng::key(seed, rng::kStreamCluster, 0, 0) % n;
    std::vector<double> c(dim);
    for (std::size_t d = 0; d < dim; ++d) c[d] = coord(first, d);
    centroids.push_back(std::move(c));
  }
  while (centroids.size() < k_max) {
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], dist2_to(i, centroids.back()));
    }
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (nearest[i] > nearest[far]) far = i;
    }
    if (nearest[far] <= 0.0) break;  // all remaining points duplicate a centre
    std::vector<double> c(dim);
    for (std::size_t d = 0; d < dim; ++d) c[d] = coord(far, d);
    centroids.push_back(std::move(c));
  }

  std::vector<std::size_t> assign(n, 0);
  std::vector<std::size_t> counts(centroids.size(), 0);
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = dist2_to(i, centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = dist2_to(i, centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[i] = best;
    }
    std::vector<std::vector<double>> next(
        centroids.size(), std::vector<double>(dim, 0.0));
    counts.assign(centroids.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (std::size_t d = 0; d < dim; ++d) next[assign[i]][d] += coord(i, d);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its position
      for (std::size_t d = 0; d < dim; ++d) {
        next[c][d] /= static_cast<double>(counts[c]);
        shift = std::max(shift, std::abs(next[c][d] - centroids[c][d]));
      }
      centroids[c] = std::move(next[c]);
    }
    if (shift < 1e-6) break;
  }

  // Keep non-empty clusters, ranked by probability then cluster index.
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] > 0) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return counts[a] > counts[b];
                   });
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t c = order[r];
    PlanMode mode;
    mode.probability = static_cast<double>(counts[c]) / static_cast<double>(n);
    mode.rank = static_cast<int>(r) + 1;
    mode.trajectory.dt = kDt;
    mode.trajectory.waypoints.resize(kHorizonSteps);
    for (int w = 0; w < kHorizonSteps; ++w) {
      mode.trajectory.waypoints[w] = {centroids[c][2 * w],
                                      centroids[c][2 * w + 1]};
    }
    out.modes.push_back(std::move(mode));
  }
  return out;
}

const Trajectory& select_plan(const PlanSet& plans) {
  if (plans.modes.empty()) {
    throw InvalidArgumentError("select_plan: no modes");
  }
  return plans.modes.front().trajectory;
}

const Trajectory& filter_on_route(const PlanSet& plans, const LaneGraph& graph,
                                  const RouteMask& route) {
  if (plans.modes.empty()) {
    throw InvalidArgumentError("filter_on_route: no modes");
  }
  const auto route_distance = [&](const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const LaneNode& node : graph.nodes()) {
      if (!route.contains_node(node.id)) continue;
      best = std::min(best, node.centreline().project(p).dist);
    }
    return best;
  };
  const PlanMode* closest = nullptr;
  double closest_d = std::numeric_limits<double>::infinity();
  for (const PlanMode& mode : plans.modes) {
    const double d = route_distance(mode.trajectory.waypoints.back());
    if (d <= kFilterRadius) return mode.trajectory;
    if (d < closest_d) {
      closest_d = d;
      closest = &mode;
    }
  }
  // No endpoint within reach of the route, including the degenerate case
  // of an empty route mask: fall back to the most probable mode.
  return closest ? closest->trajectory : plans.modes.front().trajectory;
}

Trajectory plan(const ScenarioRecord& record, const AgentState& sdv_state,
                const ScorerParams& model, PlannerKind kind,
                const PlannerConfig& cfg) {
  if (cfg.k_samples < 1) {
    throw InvalidArgumentError("plan: k_samples must be >= 1");
  }
  if (cfg.num_modes < 1 || cfg.max_nodes < 1) {
    throw InvalidArgumentError("plan: num_modes and max_nodes must be >= 1");
  }
  const TrainMode needed = required_train_mode(kind);
  if (model.mode != needed) {
    throw InvalidArgumentError(
        "plan: planner " + planner_kind_name(kind) + " needs a " +
        train_mode_name(needed) + " model, got " + train_mode_name(model.mode));
  }

  const LaneGraph& graph = record.graph;
  const NodeId start = assign_sdv_node(graph, sdv_state.pose());

  // Route conditioning degrades to unconditioned behaviour when the goal
  // is unreachable from here (e.g. the rollout overshot the goal).
  RouteMask route;
  bool have_route = false;
  if (kind != PlannerKind::kPgp) {
    try {
      route = compute_route_mask(graph, start, record.goal_node);
      have_route = true;
    } catch (const RouteError&) {
      have_route = false;
    }
  }

  const RouteMask* feature_route = nullptr;
  RouteMask empty_mask;
  if (kind == PlannerKind::kNodeFeatures) {
    if (have_route) {
      feature_route = &route;
    } else {
      empty_mask.on_route_nodes.assign(graph.node_count(), 0);
      empty_mask.route_edges.assign(graph.edge_count(), 0);
      feature_route = &empty_mask;
    }
  }

  const auto scores = score_edges(model, graph, sdv_state, feature_route);
  EdgeDistribution dist = softmax_per_node(graph, scores);

  if (have_route) {
    switch (kind) {
      case PlannerKind::kGcPgp:
      case PlannerKind::kHardMaskTrained:
        dist = hard_mask(graph, dist, route);
        break;
      case PlannerKind::kSoftMask:
        dist = soft_mask(graph, dist, route,
                         cfg.beta_override.value_or(model.beta));
        break;
      default:
        break;
    }
  }

  SamplerConfig sampler;
  sampler.k_samples = cfg.k_samples;
  sampler.max_nodes = cfg.max_nodes;
  sampler.seed = cfg.seed;
  const auto walks = sample_traversals(graph, dist, start, sampler);

  std::vector<Trajectory> decoded;
  decoded.reserve(walks.size());
  for (std::size_t k = 0; k < walks.size(); ++k) {
    double z[2];
    latent_sample(cfg.seed, static_cast<int>(k), z);
    decoded.push_back(decode_trajectory(graph, walks[k], sdv_state, z,
                                        record.speed_limit));
  }

  const PlanSet plans = cluster_plans(decoded, cfg.num_modes, cfg.seed);
  if (kind == PlannerKind::kFilterOnRoute && have_route) {
    return filter_on_route(plans, graph, route);
  }
  return select_plan(plans);
}

}  // namespace gcplan
