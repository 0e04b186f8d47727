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

#ifndef GCPLAN_CONDITIONING_HPP_
#define GCPLAN_CONDITIONING_HPP_

#include "gcplan/lane_graph.hpp"
#include "gcplan/policy.hpp"

namespace gcplan {

// Route conditioning applied on top of an already-trained edge
// distribution. Both transforms work per node and return distributions
// aligned with graph.edges().
//
// Terminal edges of on-route nodes count as on-route: coming to a stop
// on the route is always allowed.

// Zeroes every off-route edge and renormalises the remainder. The
// relative weights of on-route edges are preserved exactly; when nothing
// needs masking the input probabilities are returned unchanged (bit for
// bit). Nodes whose on-route mass is zero keep their terminal edge as
// the only option.
EdgeDistribution hard_mask(const LaneGraph& graph,
                           const EdgeDistribution& dist,
                           const RouteMask& route);

// Adds a constant bonus beta to the probability of each on-route edge,
// then renormalises the node. beta = 0 returns the input unchanged (bit
// for bit); beta -> infinity approaches the hard mask restricted to a
// uniform distribution over on-route edges. beta must be finite and
// non-negative.
EdgeDistribution soft_mask(const LaneGraph& graph,
                           const EdgeDistribution& dist,
                           const RouteMask& route, double beta);

// Probability mass a node currently puts on its on-route edges.
double on_route_mass(const LaneGraph& graph, const EdgeDistribution& dist,
                     const RouteMask& route, NodeId node);

}  // namespace gcplan

#endif  // GCPLAN_CONDITIONING_HPP_
