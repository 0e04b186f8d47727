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

#include "gcplan/traversal.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "gcplan/conditioning.hpp"
#include "gcplan/errors.hpp"
#include "gcplan/lane_graph.hpp"

namespace gcplan {
namespace {

using testing::fork_graph;
using testing::lane_change_graph;
using testing::random_distribution;
using testing::straight_lane;
using testing::uniform_distribution;

using WalkKey = std::pair<std::vector<NodeId>, bool>;

std::map<WalkKey, double> empirical(const std::vector<Traversal>& walks) {
  std::map<WalkKey, double> freq;
  for (const Traversal& t : walks) {
    freq[{t.nodes, t.terminated}] += 1.0 / walks.size();
  }
  return freq;
}

double total_variation(const std::map<WalkKey, double>& a,
                       const std::map<WalkKey, double>& b) {
  double tv = 0.0;
  for (const auto& [key, p] : a) {
    const auto it = b.find(key);
    tv += std::abs(p - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [key, p] : b) {
    if (a.find(key) == a.end()) tv += p;
  }
  return 0.5 * tv;
}

TEST_SUITE("traversal") {

TEST_CASE("sampling is deterministic in the seed") {
  const LaneGraph g = lane_change_graph();
  const EdgeDistribution dist = random_distribution(g, 11);
  SamplerConfig cfg;
  cfg.k_samples = 200;
  cfg.max_nodes = 8;
  cfg.seed = 1234;

  const auto a = sample_traversals(g, dist, 0, cfg);
  const auto b = sample_traversals(g, dist, 0, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].nodes == b[i].nodes);
    CHECK(a[i].terminated == b[i].terminated);
  }

  cfg.seed = 1235;
  const auto c = sample_traversals(g, dist, 0, cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].nodes != c[i].nodes || a[i].terminated != c[i].terminated) {
      any_diff = true;
      break;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("walks start at the start node and respect the budget") {
  const LaneGraph g = lane_change_graph();
  const EdgeDistribution dist = uniform_distribution(g);
  SamplerConfig cfg;
  cfg.k_samples = 500;
  cfg.max_nodes = 3;
  cfg.seed = 5;

  for (const Traversal& t : sample_traversals(g, dist, 0, cfg)) {
    REQUIRE(!t.nodes.empty());
    CHECK(t.nodes.front() == 0);
    CHECK(t.nodes.size() <= 3);
    if (t.nodes.size() == 3) CHECK_FALSE(t.terminated);
    // Every hop must be a real edge.
    for (std::size_t i = 0; i + 1 < t.nodes.size(); ++i) {
      bool found = false;
      for (const Edge& e : g.outgoing(t.nodes[i])) {
        if (e.kind != EdgeKind::kTerminal && e.to == t.nodes[i + 1]) {
          found = true;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("a terminal-only node always stops immediately") {
  const LaneGraph g = fork_graph();
  const EdgeDistribution dist = uniform_distribution(g);
  SamplerConfig cfg;
  cfg.k_samples = 50;
  cfg.max_nodes = 8;
  cfg.seed = 3;

  for (const Traversal& t : sample_traversals(g, dist, 1, cfg)) {
    CHECK(t.nodes == std::vector<NodeId>{1});
    CHECK(t.terminated);
  }
}

TEST_CASE("zero-probability edges are never drawn") {
  const LaneGraph g = fork_graph();
  const RouteMask route = compute_route_mask(g, 0, 1);
  const EdgeDistribution masked = hard_mask(g, uniform_distribution(g), route);
  SamplerConfig cfg;
  cfg.k_samples = 2000;
  cfg.max_nodes = 8;
  cfg.seed = 8;

  for (const Traversal& t : sample_traversals(g, masked, 0, cfg)) {
    for (const NodeId n : t.nodes) CHECK(n != 2);
  }
}

TEST_CASE("empirical walk frequencies match exact enumeration") {
  const LaneGraph g = lane_change_graph();
  const EdgeDistribution dist = random_distribution(g, 77);
  SamplerConfig cfg;
  cfg.k_samples = 20000;
  cfg.max_nodes = 8;
  cfg.seed = 99;

  const auto walks = sample_traversals(g, dist, 0, cfg);
  const auto exact = enumerate_traversals(g, dist, 0, cfg.max_nodes);

  std::map<WalkKey, double> truth;
  double total = 0.0;
  for (const EnumeratedTraversal& e : exact) {
    truth[{e.traversal.nodes, e.traversal.terminated}] += e.probability;
    total += e.probability;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(total_variation(empirical(walks), truth) < 0.03);
}

TEST_CASE("enumeration keeps length-capped walks as unterminated leaves") {
  const std::vector<RawLane> lanes = {straight_lane(1, 0.0, 0.0, 60.0)};
  const LaneGraph g = build_graph(lanes, kSnippetLengthMax, kSnippetMaxPoints);
  const EdgeDistribution dist = uniform_distribution(g);

  const auto exact = enumerate_traversals(g, dist, 0, 2);
  REQUIRE(exact.size() == 2);
  double total = 0.0;
  bool saw_capped = false;
  for (const EnumeratedTraversal& e : exact) {
    total += e.probability;
    if (e.traversal.nodes.size() == 2) {
      CHECK_FALSE(e.traversal.terminated);
      saw_capped = true;
    }
  }
  CHECK(saw_capped);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log probability agrees with enumeration on every walk") {
  const LaneGraph g = lane_change_graph();
  const EdgeDistribution dist = random_distribution(g, 13);
  for (const EnumeratedTraversal& e : enumerate_traversals(g, dist, 0, 4)) {
    const double lp = traversal_log_prob(g, dist, e.traversal);
    CHECK(std::exp(lp) == doctest::Approx(e.probability).epsilon(1e-9));
  }
}

TEST_CASE("walks off the support have probability zero") {
  const LaneGraph g = fork_graph();
  const RouteMask route = compute_route_mask(g, 0, 1);
  const EdgeDistribution masked = hard_mask(g, uniform_distribution(g), route);

  Traversal blocked;
  blocked.nodes = {0, 2};
  blocked.terminated = true;
  CHECK(traversal_log_prob(g, masked, blocked) ==
        -std::numeric_limits<double>::infinity());

  Traversal no_edge;
  no_edge.nodes = {1, 0};
  CHECK(traversal_log_prob(g, uniform_distribution(g), no_edge) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("parallel edges to one target pool their probability") {
  // Lane 2 both succeeds and neighbours lane 1, giving node 0 a successor
  // and a proximal edge to node 1.
  RawLane a = straight_lane(1, 0.0, 0.0, 20.0);
  a.successors = {2};
  a.neighbours = {2};
  RawLane b = straight_lane(2, 20.0, 0.0, 20.0);
  b.neighbours = {1};
  const LaneGraph g = build_graph(std::vector<RawLane>{a, b},
                                  kSnippetLengthMax, kSnippetMaxPoints);
  REQUIRE(g.outgoing(0).size() == 3);  // successor, proximal, terminal

  const EdgeDistribution dist = uniform_distribution(g);
  Traversal hop;
  hop.nodes = {0, 1};
  hop.terminated = false;
  CHECK(std::exp(traversal_log_prob(g, dist, hop)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  double mass_01 = 0.0;
  for (const EnumeratedTraversal& e : enumerate_traversals(g, dist, 0, 2)) {
    if (e.traversal.nodes.size() == 2) mass_01 += e.probability;
  }
  CHECK(mass_01 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("enumeration refuses to explode") {
  // Ten parallel lanes, all neighbours of each other: branching factor
  // nine per hop, so eight-node walks exceed the guard.
  std::vector<RawLane> lanes;
  for (int i = 0; i < 10; ++i) {
    RawLane lane = straight_lane(i + 1, 0.0, 3.5 * i, 20.0);
    for (int j = 0; j < 10; ++j) {
      if (j != i) lane.neighbours.push_back(j + 1);
    }
    lanes.push_back(lane);
  }
  const LaneGraph g =
      build_graph(lanes, kSnippetLengthMax, kSnippetMaxPoints);
  const EdgeDistribution dist = uniform_distribution(g);
  CHECK_THROWS_WITH_AS(enumerate_traversals(g, dist, 0, 8),
                       "enumerate_traversals: more than 1e6 walks",
                       GuardError);
}

TEST_CASE("malformed requests are rejected") {
  const LaneGraph g = fork_graph();
  const EdgeDistribution dist = uniform_distribution(g);
  SamplerConfig cfg;

  EdgeDistribution bad;
  bad.probs = {1.0};
  CHECK_THROWS_AS(sample_traversals(g, bad, 0, cfg), InvalidArgumentError);
  CHECK_THROWS_AS(sample_traversals(g, dist, 7, cfg), InvalidArgumentError);

  cfg.max_nodes = 0;
  CHECK_THROWS_AS(sample_traversals(g, dist, 0, cfg), InvalidArgumentError);
  cfg.max_nodes = 8;
  cfg.k_samples = -1;
  CHECK_THROWS_AS(sample_traversals(g, dist, 0, cfg), InvalidArgumentError);

  Traversal empty;
  CHECK_THROWS_AS(traversal_log_prob(g, dist, empty), InvalidArgumentError);
  Traversal bad_id;
  bad_id.nodes = {0, 9};
  CHECK_THROWS_AS(traversal_log_prob(g, dist, bad_id), InvalidArgumentError);
  CHECK_THROWS_AS(enumerate_traversals(g, dist, 0, 0), InvalidArgumentError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace gcplan
