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

// Small hand-built graphs and helpers shared across the test suites.

#ifndef GCPLAN_TESTS_FIXTURES_HPP_
#define GCPLAN_TESTS_FIXTURES_HPP_

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "gcplan/lane_graph.hpp"
#include "gcplan/policy.hpp"
#include "gcplan/scenario.hpp"

namespace gcplan::testing {

// A straight lane from (x0, y0) along +x.
inline RawLane straight_lane(std::int64_t id, double x0, double y0,
                             double length, int n_points = 2) {
  RawLane lane;
  lane.id = id;
  for (int i = 0; i < n_points; ++i) {
    const double x = x0 + length * i / (n_points - 1);
    lane.points.push_back({x, y0, 0.0});
  }
  return lane;
}

// One lane forking into two: node 0 = [0,15]x{0}, node 1 = [15,30]x{0},
// node 2 = (15,0) -> (30,10). Edges: 0->1 succ, 0->2 succ, terminals.
inline LaneGraph fork_graph() {
  RawLane a = straight_lane(1, 0.0, 0.0, 15.0);
  a.successors = {2, 3};
  RawLane b = straight_lane(2, 15.0, 0.0, 15.0);
  RawLane c;
  c.id = 3;
  c.points = {{15.0, 0.0, 0.0}, {30.0, 10.0, 0.0}};
  const std::vector<RawLane> lanes = {a, b, c};
  return build_graph(lanes, kSnippetLengthMax, kSnippetMaxPoints);
}

// Two parallel lanes [0,20] at y=0 and y=3.5 (mutual neighbours), each
// with a successor continuing to x=40. Nodes: 0 = lower, 1 = lower
// continuation, 2 = upper, 3 = upper continuation.
inline LaneGraph lane_change_graph() {
  RawLane low = straight_lane(1, 0.0, 0.0, 20.0);
  low.successors = {2};
  low.neighbours = {3};
  RawLane low_next = straight_lane(2, 20.0, 0.0, 20.0);
  RawLane up = straight_lane(3, 0.0, 3.5, 20.0);
  up.successors = {4};
  up.neighbours = {1};
  RawLane up_next = straight_lane(4, 20.0, 3.5, 20.0);
  const std::vector<RawLane> lanes = {low, low_next, up, up_next};
  return build_graph(lanes, kSnippetLengthMax, kSnippetMaxPoints);
}

// Uniform outgoing distribution at every node.
inline EdgeDistribution uniform_distribution(const LaneGraph& graph) {
  EdgeDistribution dist;
  dist.probs.resize(graph.edge_count());
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    const auto out = graph.outgoing(static_cast<NodeId>(v));
    const std::size_t begin = graph.first_edge_index(static_cast<NodeId>(v));
    for (std::size_t i = 0; i < out.size(); ++i) {
      dist.probs[begin + i] = 1.0 / static_cast<double>(out.size());
    }
  }
  return dist;
}

// A softmax distribution from a seeded random scorer; any valid per-node
// distribution works for sampling and masking properties.
inline EdgeDistribution random_distribution(const LaneGraph& graph,
                                            std::uint64_t seed) {
  const ScorerParams params = init_params(TrainMode::kUnconditioned, seed);
  AgentState state;
  state.x = 1.0;
  state.y = 0.0;
  state.v = 5.0;
  state.heading = 0.0;
  return softmax_per_node(graph, score_edges(params, graph, state, nullptr));
}

// Scratch directory for file round-trip tests, cleaned per call site.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline GeneratorConfig small_world(std::uint64_t seed, int count) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.count = count;
  return cfg;
}

}  // namespace gcplan::testing

#endif  // GCPLAN_TESTS_FIXTURES_HPP_
