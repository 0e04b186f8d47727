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

#ifndef GCPLAN_PLANNER_HPP_
#define GCPLAN_PLANNER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gcplan/conditioning.hpp"
#include "gcplan/policy.hpp"
#include "gcplan/scenario.hpp"
#include "gcplan/traversal.hpp"

namespace gcplan {

// How route knowledge reaches the sampling planner, if at all.
enum class PlannerKind : std::uint8_t {
  kPgp,              // no goal conditioning
  kGcPgp,            // hard mask at inference
  kSoftMask,         // learned probability bonus at inference
  kHardMaskTrained,  // model trained with the mask; mask also applied here
  kNodeFeatures,     // route flag as a model input
  kFilterOnRoute,    // unconditioned sampling, route-aware mode selection
};

std::string planner_kind_name(PlannerKind kind);
PlannerKind planner_kind_from_name(const std::string& name);

// Trained model mode required by each planner kind.
TrainMode required_train_mode(PlannerKind kind);

struct PlannerConfig {
  int k_samples = 1000;
  int max_nodes = 8;
  int num_modes = 10;
  std::uint64_t seed = 0;
  // Overrides the trained beta for kSoftMask when set.
  std::optional<double> beta_override;
};

// One clustered candidate plan. rank is 1-based, ordered by descending
// probability (ties towards the lower cluster index).
struct PlanMode {
  Trajectory trajectory;
  double probability = 0.0;
  int rank = 0;
};

struct PlanSet {
  std::vector<PlanMode> modes;
};

// Centreline polyline of a walk, starting at the projection of start_pos
// onto the first node. Proximal transitions blend laterally into the
// target lane over the first 5 metres instead of jumping sideways.
Polyline reference_path(const LaneGraph& graph,
                        const std::vector<NodeId>& nodes,
                        const Vec2& start_pos);

// Rolls a speed profile along the walk's reference path. z is a
// two-dimensional latent: z[0] shifts acceleration, z[1] scales the
// target speed around the scenario speed limit. The profile brakes to a
// stop at the end of the path and holds there.
Trajectory decode_trajectory(const LaneGraph& graph,
                             const Traversal& traversal,
                             const AgentState& sdv_state,
                             const double z[2], double speed_limit);

// Latent draw for sample k, two standard normals keyed by (seed, k).
void latent_sample(std::uint64_t seed, int k, double z[2]);

// k-means over flattened waypoint vectors: farthest-point seeding,
// at most num_modes clusters, empty clusters dropped. Probabilities are
// member counts over the total sample count.
PlanSet cluster_plans(const std::vector<Trajectory>& trajectories,
                      int num_modes, std::uint64_t seed);

// Highest-probability mode (rank 1).
const Trajectory& select_plan(const PlanSet& plans);

// Highest-probability mode whose final waypoint lies within 5 m of an
// on-route node centreline; falls back to the mode closest to the route
// when none qualifies.
const Trajectory& filter_on_route(const PlanSet& plans, const LaneGraph& graph,
                                  const RouteMask& route);

// Full pipeline: assign the SDV to a node, score and condition the edge
// distribution per kind, sample walks, decode, cluster, and select.
// sdv_state may differ from the record's t=0 state during rollouts.
// When the goal is unreachable from the SDV's current node, conditioning
// is skipped for this call and the planner behaves like kPgp.
Trajectory plan(const ScenarioRecord& record, const AgentState& sdv_state,
                const ScorerParams& model, PlannerKind kind,
                const PlannerConfig& cfg);

}  // namespace gcplan

#endif  // GCPLAN_PLANNER_HPP_
