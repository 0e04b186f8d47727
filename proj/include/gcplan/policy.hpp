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

#ifndef GCPLAN_POLICY_HPP_
#define GCPLAN_POLICY_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gcplan/lane_graph.hpp"
#include "gcplan/scenario.hpp"

namespace gcplan {

// How the edge scorer was (or is being) trained. Decides both the input
// features and how route information enters the loss.
enum class TrainMode : std::uint8_t {
  kUnconditioned,    // no route information anywhere
  kHardMaskAtTrain,  // softmax restricted to route edges during training
  kNodeFeatures,     // on-route flag appended to the edge features
  kSoftMask,         // learned probability bonus on route edges
};

std::string train_mode_name(TrainMode mode);
TrainMode train_mode_from_name(const std::string& name);

// Hand-built geometric description of one outgoing edge, evaluated from
// the SDV's current state. Terminal edges describe "stay here": zero
// offsets, unit heading alignment.
//
// Layout (kNodeFeatures appends an on-route flag as value 8):
//   0 heading alignment  cos(target exit direction - SDV heading)
//   1 lateral offset     signed distance, SDV to target centreline
//   2 longitudinal gap   distance to the target's first point, along SDV heading
//   3 kind one-hot       successor
//   4 kind one-hot       proximal
//   5 kind one-hot       terminal
//   6 SDV speed
//   7 target curvature   mean heading change per metre of the target
struct EdgeFeatures {
  static constexpr int kBase = 8;
  static constexpr int kWithRouteFlag = 9;
  std::array<double, kWithRouteFlag> values{};
  int dim = kBase;
};

EdgeFeatures edge_features(const LaneGraph& graph, const Edge& edge,
                           const AgentState& sdv_state,
                           const RouteMask* route_flag);

// Two-layer perceptron over edge features plus, for kSoftMask, the
// learned route bonus. Parameters are plain doubles so training stays a
// handful of loops.
struct ScorerParams {
  static constexpr int kHidden = 16;

  TrainMode mode = TrainMode::kUnconditioned;
  int input_dim = EdgeFeatures::kBase;
  std::vector<double> w1;  // kHidden x input_dim, row-major
  std::vector<double> b1;  // kHidden
  std::vector<double> w2;  // kHidden
  double b2 = 0.0;
  double beta = 0.0;  // route bonus, kSoftMask only, >= 0

  std::size_t weight_count() const {
    return w1.size() + b1.size() + w2.size() + 1;
  }
};

// Weights drawn uniformly from [-0.1, 0.1], keyed by seed alone.
ScorerParams init_params(TrainMode mode, std::uint64_t seed);

double score_edge(const ScorerParams& params, const EdgeFeatures& f);

// Raw scores for every edge of the graph, aligned with graph.edges().
// route may be null except for kNodeFeatures feature extraction.
std::vector<double> score_edges(const ScorerParams& params,
                                const LaneGraph& graph,
                                const AgentState& sdv_state,
                                const RouteMask* route);

// Per-node categorical distributions over outgoing edges, aligned with
// graph.edges(). Probabilities of each node's edges sum to one.
struct EdgeDistribution {
  std::vector<double> probs;
};

EdgeDistribution softmax_per_node(const LaneGraph& graph,
                                  const std::vector<double>& scores);

// --- Training ---------------------------------------------------------------

struct TrainConfig {
  TrainMode mode = TrainMode::kUnconditioned;
  int epochs = 400;
  double learning_rate = 0.2;
  std::uint64_t seed = 0;
};

struct TrainReport {
  double train_nll_initial = 0.0;
  double train_nll_final = 0.0;
  double heldout_nll_initial = 0.0;
  double heldout_nll_final = 0.0;
  int used_scenarios = 0;
  int skipped_scenarios = 0;
  int heldout_scenarios = 0;
};

// Behaviour cloning of expert traversals: full-batch gradient descent on
// the mean negative log-likelihood of expert edge choices. Every fifth
// scenario is held out for reporting only. Scenarios whose expert cannot
// be matched to the graph are skipped; an empty training set is an error.
ScorerParams train_scorer(const std::vector<ScenarioRecord>& records,
                          const TrainConfig& cfg, TrainReport* report);

// Mean expert NLL of a parameter set over given scenarios (same
// clamping rules as training). Exposed for evaluation and tests.
double dataset_nll(const ScorerParams& params,
                   const std::vector<ScenarioRecord>& records);

// --- Model files ------------------------------------------------------------

ScorerParams load_model(const std::string& path);
void save_model(const ScorerParams& params, const std::string& path);

// --- Gradient check support -------------------------------------------------
//
// Flattened parameter order: w1 row-major, b1, w2, b2, then beta when the
// mode is kSoftMask. Used by training internals and the finite-difference
// tests.
std::vector<double> flatten_params(const ScorerParams& params);
void unflatten_params(const std::vector<double>& flat, ScorerParams* params);

// Prepared (feature, label) data for a list of scenarios. Opaque here;
// shared_ptr keeps the type incomplete for callers.
class TrainingSet;
std::shared_ptr<const TrainingSet> make_training_set(
    const std::vector<ScenarioRecord>& records, TrainMode mode);

// One full-batch loss + gradient evaluation on a prepared training set.
double training_loss_and_grad(const TrainingSet& set,
                              const ScorerParams& params,
                              std::vector<double>* grad);

}  // namespace gcplan

#endif  // GCPLAN_POLICY_HPP_
