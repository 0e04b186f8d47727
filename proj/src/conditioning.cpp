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

#include "gcplan/conditioning.hpp"

#include <cmath>

#include "gcplan/errors.hpp"

namespace gcplan {

namespace {

void check_aligned(const LaneGraph& graph, const EdgeDistribution& dist,
                   const RouteMask& route) {
  if (dist.probs.size() != graph.edge_count() ||
      route.route_edges.size() != graph.edge_count()) {
    throw InvalidArgumentError(
        "conditioning: distribution/mask not aligned with the graph");
  }
}

}  // namespace

EdgeDistribution hard_mask(const LaneGraph& graph,
                           const EdgeDistribution& dist,
                           const RouteMask& route) {
  check_aligned(graph, dist, route);
  EdgeDistribution out = dist;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    const std::size_t begin = graph.first_edge_index(static_cast<NodeId>(v));
    const std::size_t end =
        begin + graph.outgoing(static_cast<NodeId>(v)).size();
    double off_mass = 0.0;
    double on_mass = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      (route.route_edges[i] ? on_mass : off_mass) += dist.probs[i];
    }
    // Nothing to remove: keep this node's probabilities bit-identical.
    if (off_mass == 0.0) continue;
    if (on_mass > 0.0) {
      for (std::size_t i = begin; i < end; ++i) {
        out.probs[i] = route.route_edges[i] ? dist.probs[i] / on_mass : 0.0;
      }
    } else {
      // All usable mass was off-route. The terminal edge (always the
      // last edge of a node) becomes the only option: stop rather than
      // leave the route.
      for (std::size_t i = begin; i < end; ++i) out.probs[i] = 0.0;
      out.probs[end - 1] = 1.0;
    }
  }
  return out;
}

EdgeDistribution soft_mask(const LaneGraph& graph,
                           const EdgeDistribution& dist,
                           const RouteMask& route, double beta) {
  check_aligned(graph, dist, route);
  if (!(std::isfinite(beta)) || beta < 0.0) {
    throw InvalidArgumentError("soft_mask: beta must be finite and >= 0");
  }
  if (beta == 0.0) return dist;  // bit-exact no-op
  EdgeDistribution out = dist;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    const std::size_t begin = graph.first_edge_index(static_cast<NodeId>(v));
    const std::size_t end =
        begin + graph.outgoing(static_cast<NodeId>(v)).size();
    std::size_t on_count = 0;
    double total = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      total += dist.probs[i];
      if (route.route_edges[i]) ++on_count;
    }
    const double denom = total + beta * static_cast<double>(on_count);
    for (std::size_t i = begin; i < end; ++i) {
      const double bonus = route.route_edges[i] ? beta : 0.0;
      out.probs[i] = (dist.probs[i] + bonus) / denom;
    }
  }
  return out;
}

double on_route_mass(const LaneGraph& graph, const EdgeDistribution& dist,
                     const RouteMask& route, NodeId node) {
  check_aligned(graph, dist, route);
  if (!graph.valid_node(node)) {
    throw InvalidArgumentError("on_route_mass: invalid node");
  }
  const std::size_t begin = graph.first_edge_index(node);
  const std::size_t end = begin + graph.outgoing(node).size();
  double mass = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    if (route.route_edges[i]) mass += dist.probs[i];
  }
  return mass;
}

}  // namespace gcplan
