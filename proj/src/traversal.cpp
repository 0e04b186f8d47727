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

#include "gcplan/errors.hpp"
#include "gcplan/random.hpp"

namespace gcplan {

namespace {

constexpr std::size_t kEnumerationGuard = 1000000;

void check_inputs(const LaneGraph& graph, const EdgeDistribution& dist,
                  NodeId start, int max_nodes) {
  if (dist.probs.size() != graph.edge_count()) {
    throw InvalidArgumentError(
        "traversal: distribution not aligned with the graph");
  }
  if (!graph.valid_node(start)) {
    throw InvalidArgumentError("traversal: invalid start node");
  }
  if (max_nodes < 1) {
    throw InvalidArgumentError("traversal: max_nodes must be at least 1");
  }
}

// Transition probabilities out of one node, aggregated over parallel
// edges to the same target. Target order follows edge storage order.
std::vector<std::pair<NodeId, double>> transitions(
    const LaneGraph& graph, const EdgeDistribution& dist, NodeId node) {
  std::vector<std::pair<NodeId, double>> out;
  const std::size_t begin = graph.first_edge_index(node);
  const auto edges = graph.outgoing(node);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const NodeId target =
        edges[i].kind == EdgeKind::kTerminal ? kTerminalTarget : edges[i].to;
    bool merged = false;
    for (auto& [t, p] : out) {
      if (t == target) {
        p += dist.probs[begin + i];
        merged = true;
        break;
      }
    }
    if (!merged) out.emplace_back(target, dist.probs[begin + i]);
  }
  return out;
}

}  // namespace

std::vector<Traversal> sample_traversals(const LaneGraph& graph,
                                         const EdgeDistribution& dist,
                                         NodeId start,
                                         const SamplerConfig& cfg) {
  check_inputs(graph, dist, start, cfg.max_nodes);
  if (cfg.k_samples < 0) {
    throw InvalidArgumentError("traversal: negative sample count");
  }
  std::vector<Traversal> out;
  out.reserve(cfg.k_samples);
  for (int k = 0; k < cfg.k_samples; ++k) {
    Traversal t;
    t.nodes.push_back(start);
    t.terminated = false;
    for (int step = 0; static_cast<int>(t.nodes.size()) < cfg.max_nodes;
         ++step) {
      const NodeId u = t.nodes.back();
      const std::size_t begin = graph.first_edge_index(u);
      const auto edges = graph.outgoing(u);
      double total = 0.0;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        total += dist.probs[begin + i];
      }
      const double u01 = rng::uniform01(cfg.seed, rng::kStreamTraversal,
                                        static_cast<std::uint64_t>(k),
                                        static_cast<std::uint64_t>(step));
      // Inverse CDF over the node's outgoing edges. Zero-probability
      // edges can never be picked; accumulated rounding error lands on
      // the last positive edge.
      const double r = u01 * total;
      double acc = 0.0;
      std::size_t pick = edges.size();
      std::size_t last_positive = edges.size();
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const double p = dist.probs[begin + i];
        if (p <= 0.0) continue;
        last_positive = i;
        acc += p;
        if (r < acc) {
          pick = i;
          break;
        }
      }
      if (pick == edges.size()) pick = last_positive;
      const Edge& e = edges[pick];
      if (e.kind == EdgeKind::kTerminal) {
        t.terminated = true;
        break;
      }
      t.nodes.push_back(e.to);
    }
    out.push_back(std::move(t));
  }
  return out;
}

double traversal_log_prob(const LaneGraph& graph, const EdgeDistribution& dist,
                          const Traversal& traversal) {
  if (traversal.nodes.empty()) {
    throw InvalidArgumentError("traversal_log_prob: empty traversal");
  }
  check_inputs(graph, dist, traversal.nodes.front(), 1);
  double log_p = 0.0;
  const auto step_prob = [&](NodeId from, NodeId target) {
    double p = 0.0;
    for (const auto& [t, tp] : transitions(graph, dist, from)) {
      if (t == target) p += tp;
    }
    return p;
  };
  for (std::size_t i = 0; i + 1 < traversal.nodes.size(); ++i) {
    if (!graph.valid_node(traversal.nodes[i + 1])) {
      throw InvalidArgumentError("traversal_log_prob: invalid node id");
    }
    const double p = step_prob(traversal.nodes[i], traversal.nodes[i + 1]);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    log_p += std::log(p);
  }
  if (traversal.terminated) {
    const double p = step_prob(traversal.nodes.back(), kTerminalTarget);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    log_p += std::log(p);
  }
  return log_p;
}

namespace {

void enumerate_rec(const LaneGraph& graph, const EdgeDistribution& dist,
                   int max_nodes, Traversal* current, double prob,
                   std::vector<EnumeratedTraversal>* out) {
  if (out->size() > kEnumerationGuard) {
    throw GuardError("enumerate_traversals: more than 1e6 walks");
  }
  const NodeId u = current->nodes.back();
  if (static_cast<int>(current->nodes.size()) >= max_nodes) {
    out->push_back({{current->nodes, false}, prob});
    return;
  }
  for (const auto& [target, p] : transitions(graph, dist, u)) {
    if (p <= 0.0) continue;
    if (target == kTerminalTarget) {
      out->push_back({{current->nodes, true}, prob * p});
    } else {
      current->nodes.push_back(target);
      enumerate_rec(graph, dist, max_nodes, current, prob * p, out);
      current->nodes.pop_back();
    }
  }
}

}  // namespace

std::vector<EnumeratedTraversal> enumerate_traversals(
    const LaneGraph& graph, const EdgeDistribution& dist, NodeId start,
    int max_nodes) {
  check_inputs(graph, dist, start, max_nodes);
  std::vector<EnumeratedTraversal> out;
  Traversal current;
  current.nodes.push_back(start);
  enumerate_rec(graph, dist, max_nodes, &current, 1.0, &out);
  return out;
}

}  // namespace gcplan
