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

#include "gcplan/lane_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <string>

#include "gcplan/errors.hpp"

namespace gcplan {

namespace {

struct SnippetRange {
  NodeId node;
  double arc_begin;  // within the owning raw lane
  double arc_end;
};

// Evenly spaced arc samples of lane_line over [s0, s1]. Headings are the
// lane tangents at the sample arcs, not chord directions of the snippet,
// so curvature survives the resampling.
std::vector<CentrelinePoint> resample(const Polyline& lane_line, double s0,
                                      double s1, int max_points) {
  std::vector<CentrelinePoint> out;
  out.reserve(static_cast<std::size_t>(max_points));
  for (int k = 0; k < max_points; ++k) {
    const double t = static_cast<double>(k) / (max_points - 1);
    const double s = s0 + (s1 - s0) * t;
    CentrelinePoint cp;
    const Vec2 p = lane_line.point_at(s);
    cp.pose = {p.x, p.y, lane_line.heading_at(s)};
    out.push_back(cp);
  }
  return out;
}

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::size_t RouteMask::node_count() const {
  std::size_t n = 0;
  for (auto b : on_route_nodes) n += b != 0;
  return n;
}

LaneGraph build_graph(std::span<const RawLane> lanes,
                      double snippet_length_max, int max_points) {
  if (max_points < 2) {
    throw ValidationError("build_graph: max_points must be at least 2");
  }
  if (!(snippet_length_max > 0.0)) {
    throw ValidationError("build_graph: snippet_length_max must be positive");
  }

  std::map<std::int64_t, std::size_t> lane_index;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    if (lanes[i].points.size() < 2) {
      throw ValidationError("lane " + std::to_string(lanes[i].id) +
                            " has fewer than 2 points");
    }
    if (!lane_index.emplace(lanes[i].id, i).second) {
      throw ValidationError("duplicate lane id " +
                            std::to_string(lanes[i].id));
    }
  }
  auto resolve = [&](std::int64_t from, std::int64_t ref,
                     const char* what) -> std::size_t {
    if (ref == from) {
      throw ValidationError("lane " + std::to_string(from) +
                            " lists itself as " + what);
    }
    const auto it = lane_index.find(ref);
    if (it == lane_index.end()) {
      throw ValidationError("lane " + std::to_string(from) +
                            " references unknown " + what + " " +
                            std::to_string(ref));
    }
    return it->second;
  };

  LaneGraph g;
  std::vector<std::vector<SnippetRange>> lane_snippets(lanes.size());

  // Pass 1: split every lane into snippets and create the nodes.
  std::vector<Polyline> lane_lines;
  lane_lines.reserve(lanes.size());
  for (std::size_t li = 0; li < lanes.size(); ++li) {
    std::vector<Vec2> pos;
    pos.reserve(lanes[li].points.size());
    for (const Pose& p : lanes[li].points) pos.push_back({p.x, p.y});
    lane_lines.emplace_back(std::move(pos));
    const double total = lane_lines.back().length();
    if (!(total > 0.0)) {
      throw ValidationError("lane " + std::to_string(lanes[li].id) +
                            " has zero length");
    }
    const int n_snip = std::max(
        1, static_cast<int>(std::ceil(total / snippet_length_max - 1e-12)));
    for (int j = 0; j < n_snip; ++j) {
      const double s0 = total * j / n_snip;
      const double s1 = total * (j + 1) / n_snip;
      LaneNode node;
      node.id = static_cast<NodeId>(g.nodes_.size());
      node.points = resample(lane_lines[li], s0, s1, max_points);
      std::vector<Vec2> snip_pos;
      snip_pos.reserve(node.points.size());
      for (const auto& cp : node.points) snip_pos.push_back(cp.pose.position());
      node.centreline_ = Polyline(std::move(snip_pos));
      node.arc_length = node.centreline_.length();
      lane_snippets[li].push_back({node.id, s0, s1});
      g.nodes_.push_back(std::move(node));
    }
  }

  // Pass 2: collect outgoing edges per node.
  const std::size_t n_nodes = g.nodes_.size();
  std::vector<std::vector<NodeId>> succ(n_nodes), prox(n_nodes);

  for (std::size_t li = 0; li < lanes.size(); ++li) {
    const auto& snippets = lane_snippets[li];
    for (std::size_t j = 0; j + 1 < snippets.size(); ++j) {
      succ[snippets[j].node].push_back(snippets[j + 1].node);
    }
    for (std::int64_t ref : sorted_unique(lanes[li].successors)) {
      const std::size_t ti = resolve(lanes[li].id, ref, "successor");
      succ[snippets.back().node].push_back(lane_snippets[ti].front().node);
    }
    for (std::int64_t ref : sorted_unique(lanes[li].neighbours)) {
      const std::size_t ti = resolve(lanes[li].id, ref, "neighbour");
      for (const SnippetRange& a : snippets) {
        for (const SnippetRange& b : lane_snippets[ti]) {
          const double lo = std::max(a.arc_begin, b.arc_begin);
          const double hi = std::min(a.arc_end, b.arc_end);
          const double shorter =
              std::min(a.arc_end - a.arc_begin, b.arc_end - b.arc_begin);
          if (hi - lo >= 0.5 * shorter) {
            prox[a.node].push_back(b.node);
          }
        }
      }
    }
  }

  // Pass 3: flatten into the adjacency layout (successors, proximal,
  // terminal; targets ascending within each block).
  g.offsets_.assign(n_nodes + 1, 0);
  for (std::size_t v = 0; v < n_nodes; ++v) {
    auto us = succ[v];
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());
    auto up = prox[v];
    std::sort(up.begin(), up.end());
    up.erase(std::unique(up.begin(), up.end()), up.end());
    g.offsets_[v] = g.edges_.size();
    const NodeId from = static_cast<NodeId>(v);
    for (NodeId t : us) g.edges_.push_back({from, t, EdgeKind::kSuccessor});
    for (NodeId t : up) g.edges_.push_back({from, t, EdgeKind::kProximal});
    g.edges_.push_back({from, kTerminalTarget, EdgeKind::kTerminal});
  }
  g.offsets_[n_nodes] = g.edges_.size();
  return g;
}

RouteMask compute_route_mask(const LaneGraph& graph, NodeId start,
                             NodeId goal) {
  if (!graph.valid_node(start)) {
    throw InvalidArgumentError("compute_route_mask: invalid start node " +
                               std::to_string(start));
  }
  if (!graph.valid_node(goal)) {
    throw InvalidArgumentError("compute_route_mask: invalid goal node " +
                               std::to_string(goal));
  }

  const std::size_t n = graph.node_count();
  std::vector<std::uint8_t> fwd(n, 0), bwd(n, 0);

  std::deque<NodeId> queue;
  fwd[start] = 1;
  queue.push_back(start);
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const Edge& e : graph.outgoing(u)) {
      if (e.kind == EdgeKind::kTerminal) continue;
      if (!fwd[e.to]) {
        fwd[e.to] = 1;
        queue.push_back(e.to);
      }
    }
  }
  if (!fwd[goal]) {
    throw RouteError("goal node " + std::to_string(goal) +
                     " is unreachable from start node " +
                     std::to_string(start));
  }

  // Reverse reachability from the goal.
  std::vector<std::vector<NodeId>> rev(n);
  for (const Edge& e : graph.edges()) {
    if (e.kind != EdgeKind::kTerminal) rev[e.to].push_back(e.from);
  }
  bwd[goal] = 1;
  queue.push_back(goal);
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId p : rev[u]) {
      if (!bwd[p]) {
        bwd[p] = 1;
        queue.push_back(p);
      }
    }
  }

  RouteMask mask;
  mask.on_route_nodes.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    mask.on_route_nodes[v] = fwd[v] && bwd[v] ? 1 : 0;
  }
  mask.route_edges.assign(graph.edge_count(), 0);
  const auto& edges = graph.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.kind == EdgeKind::kTerminal) {
      mask.route_edges[i] = mask.on_route_nodes[e.from];
    } else {
      mask.route_edges[i] =
          mask.on_route_nodes[e.from] && mask.on_route_nodes[e.to];
    }
  }
  return mask;
}

NodeId assign_sdv_node(const LaneGraph& graph, const Pose& pose) {
  if (graph.node_count() == 0) {
    throw InvalidArgumentError("assign_sdv_node: empty graph");
  }
  constexpr double kDistEps = 1e-9;
  constexpr double kHeadingEps = 1e-12;
  NodeId best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  double best_dh = std::numeric_limits<double>::infinity();
  for (const LaneNode& node : graph.nodes()) {
    const auto proj = node.centreline().project(pose.position());
    const double dh =
        std::abs(normalize_angle(pose.heading - proj.seg_heading));
    if (proj.dist < best_dist - kDistEps ||
        (proj.dist < best_dist + kDistEps && dh < best_dh - kHeadingEps)) {
      best = node.id;
      best_dist = proj.dist;
      best_dh = dh;
    }
  }
  return best;
}

}  // namespace gcplan
