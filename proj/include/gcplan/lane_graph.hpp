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

#ifndef GCPLAN_LANE_GRAPH_HPP_
#define GCPLAN_LANE_GRAPH_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "gcplan/geometry.hpp"

namespace gcplan {

using NodeId = std::int32_t;

// Pseudo-target of terminal edges; not a valid node index.
inline constexpr NodeId kTerminalTarget = -1;

enum class EdgeKind : std::uint8_t {
  kSuccessor,  // longitudinal continuation
  kProximal,   // lateral move to a neighbouring lane
  kTerminal,   // stop the traversal at this node
};

struct CentrelinePoint {
  Pose pose;
  bool stop_line = false;
  bool crosswalk = false;
};

// One lane snippet: a short stretch of lane centreline that acts as a
// graph vertex. Node ids are dense indices into LaneGraph::nodes().
struct LaneNode {
  NodeId id = 0;
  std::vector<CentrelinePoint> points;
  double arc_length = 0.0;

  const Polyline& centreline() const { return centreline_; }

  // Heading of the final centreline pose; the direction traffic leaves
  // the snippet in.
  double exit_heading() const { return points.back().pose.heading; }

  Polyline centreline_;  // filled by build_graph
};

struct Edge {
  NodeId from = 0;
  NodeId to = 0;  // kTerminalTarget for terminal edges
  EdgeKind kind = EdgeKind::kSuccessor;
};

// Lane centreline as exported by a map source, before snippet splitting.
struct RawLane {
  std::int64_t id = 0;
  std::vector<Pose> points;
  std::vector<std::int64_t> successors;
  std::vector<std::int64_t> neighbours;  // adjacent lanes, same direction
};

// Directed lane-snippet graph. Immutable once built; all queries are
// const and safe to share across threads.
//
// Outgoing edges of a node are stored contiguously, successors first
// (ascending target id), then proximal edges (ascending target id), then
// exactly one terminal edge. Edge indices into edges() are stable and are
// what EdgeDistribution probabilities are keyed on.
class LaneGraph {
 public:
  const std::vector<LaneNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool valid_node(NodeId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < nodes_.size();
  }

  std::span<const Edge> outgoing(NodeId id) const {
    return {edges_.data() + offsets_[id],
            edges_.data() + offsets_[id + 1]};
  }

  // Index into edges() of the first outgoing edge of a node.
  std::size_t first_edge_index(NodeId id) const { return offsets_[id]; }

 private:
  friend LaneGraph build_graph(std::span<const RawLane> lanes,
                               double snippet_length_max, int max_points);
  std::vector<LaneNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;  // node id -> first edge index
};

// Splits lanes into snippets of at most snippet_length_max metres, each
// resampled to max_points evenly spaced poses, and wires successor,
// proximal, and terminal edges.
//
// Proximal edges connect snippets of declared neighbour lanes whose
// arc-length ranges overlap by at least half the shorter snippet.
// Throws ValidationError on unknown lane references, self-references,
// lanes with fewer than two points, or max_points < 2.
LaneGraph build_graph(std::span<const RawLane> lanes,
                      double snippet_length_max, int max_points);

// Nodes that can appear on a start -> goal walk, plus the edges usable
// while staying on such walks. Terminal edges of on-route nodes are
// route edges: stopping on the route is always allowed.
struct RouteMask {
  std::vector<std::uint8_t> on_route_nodes;  // indexed by node id
  std::vector<std::uint8_t> route_edges;     // indexed by edge index

  bool contains_node(NodeId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < on_route_nodes.size() &&
           on_route_nodes[id] != 0;
  }
  std::size_t node_count() const;
};

// On-route nodes are exactly those reachable from start and from which
// goal is reachable (successor and proximal edges only). Throws
// RouteError when goal cannot be reached from start at all.
RouteMask compute_route_mask(const LaneGraph& graph, NodeId start,
                             NodeId goal);

// Closest node to a pose: smallest point-to-centreline distance, ties
// broken by heading difference at the matched segment, then by node id.
NodeId assign_sdv_node(const LaneGraph& graph, const Pose& pose);

}  // namespace gcplan

#endif  // GCPLAN_LANE_GRAPH_HPP_
