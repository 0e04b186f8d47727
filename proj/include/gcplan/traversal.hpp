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

#ifndef GCPLAN_TRAVERSAL_HPP_
#define GCPLAN_TRAVERSAL_HPP_

#include <cstdint>
#include <vector>

#include "gcplan/lane_graph.hpp"
#include "gcplan/policy.hpp"

namespace gcplan {

// A walk through the lane graph. terminated means a terminal edge was
// drawn; otherwise the walk was cut off at the node budget.
struct Traversal {
  std::vector<NodeId> nodes;
  bool terminated = false;
};

struct SamplerConfig {
  int k_samples = 1000;
  int max_nodes = 8;
  std::uint64_t seed = 0;
};

// Draws k_samples independent walks from the per-node edge distribution,
// starting at start. Each edge pick is keyed by (seed, sample, step), so
// any sample can be reproduced in isolation. Duplicates are expected and
// preserved; their multiplicity is the empirical distribution.
std::vector<Traversal> sample_traversals(const LaneGraph& graph,
                                         const EdgeDistribution& dist,
                                         NodeId start,
                                         const SamplerConfig& cfg);

// Log-probability of one walk under the distribution; edges with the
// same source and target aggregate. Returns -infinity off support.
double traversal_log_prob(const LaneGraph& graph,
                          const EdgeDistribution& dist,
                          const Traversal& traversal);

struct EnumeratedTraversal {
  Traversal traversal;
  double probability = 0.0;
};

// Exhaustive enumeration of the sampler's support (walks up to max_nodes
// nodes), with exact probabilities summing to one. Throws GuardError
// beyond one million walks.
std::vector<EnumeratedTraversal> enumerate_traversals(
    const LaneGraph& graph, const EdgeDistribution& dist, NodeId start,
    int max_nodes);

}  // namespace gcplan

#endif  // GCPLAN_TRAVERSAL_HPP_
