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

#ifndef GCPLAN_EVALUATION_HPP_
#define GCPLAN_EVALUATION_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gcplan/baselines.hpp"
#include "gcplan/planner.hpp"
#include "gcplan/scenario.hpp"

namespace gcplan {

// Planners the harness can roll out: the six sampling-planner variants
// plus the rule-based and oracle baselines.
enum class EvalPlanner : std::uint8_t {
  kPgp,
  kGcPgp,
  kSoftMask,
  kHardMaskTrained,
  kNodeFeatures,
  kFilterOnRoute,
  kIdm,
  kExpert,
};

std::string eval_planner_name(EvalPlanner kind);
EvalPlanner eval_planner_from_name(const std::string& name);

enum class LoopMode : std::uint8_t { kOpen, kClosed };

struct EvalConfig {
  std::uint64_t seed = 0;
  int repeat = 1;
  int jobs = 1;
  PlannerConfig planner;
  IdmParams idm;
  MobilParams mobil;
};

// --- Metric primitives ------------------------------------------------------

// Mean / final Euclidean displacement between waypoints at equal times.
double trajectory_ade(const Trajectory& plan, const Trajectory& expert);
double trajectory_fde(const Trajectory& plan, const Trajectory& expert);

// Miss means the final displacement strictly exceeds 16 m; exactly 16 m
// is not a miss.
bool trajectory_miss(const Trajectory& plan, const Trajectory& expert);

// Plan toggling between consecutive planning instants: distance between
// the endpoint planned at time tau and the same absolute time's waypoint
// of the plan made one step later.
double toggle_index(const Trajectory& at_tau, const Trajectory& at_tau_next);

// Fraction of the expert path completed: running maximum of the arc
// length of the projection of each visited position, over path length.
double route_progress(const std::vector<Vec2>& positions,
                      const Polyline& expert_path);

// Fraction of frames whose footprint (four corners and centre) lies
// inside the union of drivable polygons; boundaries count as inside.
double drivable_compliance(const std::vector<OrientedBox>& frames,
                           const std::vector<std::vector<Vec2>>& polygons);

// True when the boxes overlap and the blame falls on the SDV: the agent
// is (near) stationary, or the contact centroid sits outside the rear
// quarter of the SDV footprint.
bool collision_at_fault(const OrientedBox& sdv_box,
                        const OrientedBox& agent_box, double agent_speed);

// --- Rollouts ---------------------------------------------------------------

// One plan request: the scenario, the SDV state to plan from, the rollout
// step that state belongs to (0 = scenario start), and a seed unique to
// this request.
using PlanFn = std::function<Trajectory(
    const ScenarioRecord&, const AgentState&, int time_step,
    std::uint64_t plan_seed)>;

// Binds a planner kind to a callable the rollout loops can drive.
// model may be null for kIdm / kExpert and must otherwise be trained in
// the mode the kind requires.
PlanFn make_plan_fn(EvalPlanner kind, const ScorerParams* model,
                    const EvalConfig& cfg);

struct OpenLoopResult {
  double ade = 0.0;
  double fde = 0.0;
  bool miss = false;
  double tpi_mean = 0.0;
};

struct ClosedLoopResult {
  double tpi_mean = 0.0;
  double progress = 0.0;
  double compliance = 0.0;
  bool collision_free = true;
  double score = 0.0;
};

// Plans once at t=0 against the expert future, then re-plans along the
// expert states at half-second instants up to 4 s for the toggle metric.
OpenLoopResult evaluate_open_loop(const ScenarioRecord& record,
                                  const PlanFn& plan_fn,
                                  std::uint64_t scenario_seed);

// 15 s rollout at half-second steps: re-plan, track the first waypoint
// exactly, replay agents, latch at-fault collisions, and score
// collision_free * (progress + compliance) / 2.
ClosedLoopResult evaluate_closed_loop(const ScenarioRecord& record,
                                      const PlanFn& plan_fn,
                                      std::uint64_t scenario_seed);

// Full harness: every scenario, cfg.repeat times, cfg.jobs scenarios in
// flight. Returns the metrics CSV (header, per-scenario rows sorted by
// scenario id, aggregate row per repeat, mean/std rows when repeating).
// Output bytes are independent of cfg.jobs.
std::string run_evaluation(const std::vector<ScenarioRecord>& records,
                           const ScorerParams* model, EvalPlanner kind,
                           LoopMode loop, const EvalConfig& cfg);

// --- Result comparison ------------------------------------------------------

struct Report {
  std::string table;  // human-readable comparison across planners
  // Plot-data files as (suffix, csv content), one per metric.
  std::vector<std::pair<std::string, std::string>> plot_files;
};

// Reads metrics CSVs produced by run_evaluation and lines their
// aggregate rows up side by side, best score first.
Report make_report(const std::vector<std::string>& csv_paths);

}  // namespace gcplan

#endif  // GCPLAN_EVALUATION_HPP_
