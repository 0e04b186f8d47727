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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gcplan/errors.hpp"
#include "gcplan/evaluation.hpp"
#include "gcplan/random.hpp"

namespace gcplan {

namespace {

// Agents slower than this count as stationary obstacles the SDV should
// have avoided, regardless of contact geometry.
constexpr double kStationarySpeed = 0.1;

// Plans are requested every half second up to this time in open loop.
constexpr double kOpenLoopReplanWindow = 4.0;

const char* const kPlannerNames[] = {
    "pgp",           "gc_pgp",         "soft_mask", "hard_mask_trained",
    "node_features", "filter_on_route", "idm",       "expert",
};

}  // namespace

std::string eval_planner_name(EvalPlanner kind) {
  return kPlannerNames[static_cast<int>(kind)];
}

EvalPlanner eval_planner_from_name(const std::string& name) {
  for (int i = 0; i < 8; ++i) {
    if (name == kPlannerNames[i]) return static_cast<EvalPlanner>(i);
  }
  throw InvalidArgumentError(
      "unknown planner '" + name +
      "' (expected pgp, gc_pgp, soft_mask, hard_mask_trained, "
      "node_features, filter_on_route, idm, or expert)");
}

// --- Metric primitives ------------------------------------------------------

namespace {

std::size_t checked_horizon(const Trajectory& plan, const Trajectory& expert) {
  if (plan.waypoints.size() != expert.waypoints.size()) {
    throw InvalidArgumentError(
        "horizon mismatch: plan has " + std::to_string(plan.waypoints.size()) +
        " waypoints, reference has " + std::to_string(expert.waypoints.size()));
  }
  return plan.waypoints.size();
}

}  // namespace

double trajectory_ade(const Trajectory& plan, const Trajectory& expert) {
  const std::size_t n = checked_horizon(plan, expert);
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += distance(plan.waypoints[i], expert.waypoints[i]);
  }
  return sum / static_cast<double>(n);
}

double trajectory_fde(const Trajectory& plan, const Trajectory& expert) {
  const std::size_t n = checked_horizon(plan, expert);
  if (n == 0) return 0.0;
  return distance(plan.waypoints[n - 1], expert.waypoints[n - 1]);
}

bool trajectory_miss(const Trajectory& plan, const Trajectory& expert) {
  return trajectory_fde(plan, expert) > 16.0;
}

double toggle_index(const Trajectory& at_tau, const Trajectory& at_tau_next) {
  // The endpoint of the plan made at tau and waypoint H-1 of the plan
  // made one step later refer to the same absolute time.
  if (at_tau.waypoints.empty() || at_tau_next.waypoints.size() < 2) {
    return 0.0;
  }
  const Vec2& end = at_tau.waypoints.back();
  const Vec2& same_time =
      at_tau_next.waypoints[at_tau_next.waypoints.size() - 2];
  return distance(end, same_time);
}

double route_progress(const std::vector<Vec2>& positions,
                      const Polyline& expert_path) {
  if (expert_path.length() <= 0.0) return 1.0;
  double best = 0.0;
  for (const Vec2& p : positions) {
    best = std::max(best, expert_path.project(p).arc);
  }
  return best / expert_path.length();
}

double drivable_compliance(const std::vector<OrientedBox>& frames,
                           const std::vector<std::vector<Vec2>>& polygons) {
  if (frames.empty()) return 1.0;
  int ok = 0;
  for (const OrientedBox& box : frames) {
    std::vector<Vec2> probes = box.corners();
    probes.push_back({box.cx, box.cy});
    bool inside = true;
    for (const Vec2& p : probes) {
      if (!point_in_any_polygon(polygons, p)) {
        inside = false;
        break;
      }
    }
    if (inside) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(frames.size());
}

bool collision_at_fault(const OrientedBox& sdv_box,
                        const OrientedBox& agent_box, double agent_speed) {
  if (!boxes_overlap(sdv_box, agent_box)) return false;
  if (agent_speed < kStationarySpeed) return true;
  const std::vector<Vec2> contact = box_intersection(sdv_box, agent_box);
  Vec2 centroid{agent_box.cx, agent_box.cy};
  if (!contact.empty()) centroid = polygon_centroid(contact);
  // Being hit from behind is the only exoneration: the contact centroid
  // must fall in the rear quarter of the SDV footprint.
  const Vec2 rel = centroid - Vec2{sdv_box.cx, sdv_box.cy};
  const double longitudinal = rel.x * std::cos(sdv_box.heading) +
                              rel.y * std::sin(sdv_box.heading);
  return longitudinal >= -0.25 * sdv_box.length;
}

// --- Rollouts ---------------------------------------------------------------

PlanFn make_plan_fn(EvalPlanner kind, const ScorerParams* model,
                    const EvalConfig& cfg) {
  if (kind == EvalPlanner::kIdm) {
    const IdmParams idm = cfg.idm;
    const MobilParams mobil = cfg.mobil;
    return [idm, mobil](const ScenarioRecord& record,
                        const AgentState& sdv_state, int time_step,
                        std::uint64_t) {
      return idm_route_plan(record, sdv_state, time_step, idm, mobil);
    };
  }
  if (kind == EvalPlanner::kExpert) {
    return [](const ScenarioRecord& record, const AgentState&, int time_step,
              std::uint64_t) {
      // Replay of the logged future, holding the last waypoint once the
      // log runs out.
      Trajectory out;
      const auto& wp = record.expert_future.waypoints;
      out.waypoints.reserve(kHorizonSteps);
      for (int i = 0; i < kHorizonSteps; ++i) {
        const std::size_t j = std::min<std::size_t>(
            time_step + i, wp.empty() ? 0 : wp.size() - 1);
        out.waypoints.push_back(wp.empty() ? Vec2{} : wp[j]);
      }
      return out;
    };
  }

  const auto planner_kind = static_cast<PlannerKind>(kind);
  if (model == nullptr) {
    throw InvalidArgumentError("planner '" + eval_planner_name(kind) +
                               "' needs a trained model");
  }
  if (model->mode != required_train_mode(planner_kind)) {
    throw InvalidArgumentError(
        "planner '" + eval_planner_name(kind) + "' needs a model in mode '" +
        train_mode_name(required_train_mode(planner_kind)) + "', got '" +
        train_mode_name(model->mode) + "'");
  }
  const ScorerParams params = *model;
  const PlannerConfig base = cfg.planner;
  return [params, planner_kind, base](const ScenarioRecord& record,
                                      const AgentState& sdv_state, int,
                                      std::uint64_t plan_seed) {
    PlannerConfig pc = base;
    pc.seed = plan_seed;
    return plan(record, sdv_state, params, planner_kind, pc);
  };
}

namespace {

// SDV state at replanning instant `step` along the expert future, with
// speed and heading recovered by finite differences.
AgentState expert_state_at(const ScenarioRecord& record, int step) {
  if (step <= 0) return record.sdv_state();
  const auto& wp = record.expert_future.waypoints;
  const auto at = [&](int s) -> Vec2 {
    if (s <= 0) return record.sdv_state().position();
    return wp[std::min<std::size_t>(s - 1, wp.size() - 1)];
  };
  AgentState out = record.sdv_state();
  const Vec2 pos = at(step);
  const Vec2 prev = at(step - 1);
  const Vec2 prev2 = at(step - 2);
  out.x = pos.x;
  out.y = pos.y;
  out.v = distance(pos, prev) / kDt;
  const double v_prev = distance(prev, prev2) / kDt;
  out.a = (out.v - v_prev) / kDt;
  double heading = record.sdv_state().heading;
  if (distance(pos, prev) > 1e-6) {
    heading = heading_of(pos - prev);
  }
  out.omega = normalize_angle(heading - out.heading) / kDt;
  out.heading = heading;
  return out;
}

Polyline expert_path_of(const ScenarioRecord& record) {
  std::vector<Vec2> pts;
  pts.push_back(record.sdv_state().position());
  for (const Vec2& p : record.expert_future.waypoints) pts.push_back(p);
  return Polyline(pts);
}

}  // namespace

OpenLoopResult evaluate_open_loop(const ScenarioRecord& record,
                                  const PlanFn& plan_fn,
                                  std::uint64_t scenario_seed) {
  OpenLoopResult out;
  const int replan_count =
      static_cast<int>(kOpenLoopReplanWindow / kDt);  // last planning instant
  std::optional<Trajectory> prev;
  double tpi_sum = 0.0;
  for (int j = 0; j <= replan_count; ++j) {
    const AgentState state = expert_state_at(record, j);
    const std::uint64_t plan_seed =
        rng::key(scenario_seed, rng::kStreamEval, j, 0);
    Trajectory traj = plan_fn(record, state, j, plan_seed);
    if (j == 0) {
      out.ade = trajectory_ade(traj, record.expert_future);
      out.fde = trajectory_fde(traj, record.expert_future);
      out.miss = trajectory_miss(traj, record.expert_future);
    }
    if (prev) tpi_sum += toggle_index(*prev, traj);
    prev = std::move(traj);
  }
  out.tpi_mean = replan_count > 0 ? tpi_sum / replan_count : 0.0;
  return out;
}

ClosedLoopResult evaluate_closed_loop(const ScenarioRecord& record,
                                      const PlanFn& plan_fn,
                                      std::uint64_t scenario_seed) {
  ClosedLoopResult out;
  AgentState state = record.sdv_state();
  std::vector<Vec2> positions{state.position()};
  std::vector<OrientedBox> boxes{
      {state.x, state.y, state.heading, record.sdv_length, record.sdv_width}};

  const auto check_collisions = [&](const OrientedBox& sdv_box, int t) {
    if (!out.collision_free) return;
    for (const AgentTrack& agent : record.agents) {
      const AgentState a = agent.state_at(t);
      const OrientedBox agent_box{a.x,     a.y,          a.heading,
                                  agent.length, agent.width};
      if (collision_at_fault(sdv_box, agent_box, a.v)) {
        out.collision_free = false;
        return;
      }
    }
  };
  check_collisions(boxes.back(), 0);

  std::optional<Trajectory> prev;
  double tpi_sum = 0.0;
  int tpi_count = 0;
  for (int step = 0; step < kSimSteps; ++step) {
    const std::uint64_t plan_seed =
        rng::key(scenario_seed, rng::kStreamEval, step, 0);
    Trajectory traj = plan_fn(record, state, step, plan_seed);
    if (traj.waypoints.empty()) {
      throw InvalidArgumentError("planner returned an empty trajectory");
    }
    if (prev) {
      tpi_sum += toggle_index(*prev, traj);
      ++tpi_count;
    }

    // Track the first waypoint exactly.
    const Vec2 pos = traj.waypoints.front();
    AgentState next = state;
    next.x = pos.x;
    next.y = pos.y;
    next.v = distance(pos, state.position()) / kDt;
    next.a = (next.v - state.v) / kDt;
    double heading = state.heading;
    if (distance(pos, state.position()) > 1e-6) {
      heading = heading_of(pos - state.position());
    }
    next.omega = normalize_angle(heading - state.heading) / kDt;
    next.heading = heading;
    state = next;

    positions.push_back(state.position());
    boxes.push_back({state.x, state.y, state.heading, record.sdv_length,
                     record.sdv_width});
    check_collisions(boxes.back(), step + 1);
    prev = std::move(traj);
  }

  out.tpi_mean = tpi_count > 0 ? tpi_sum / tpi_count : 0.0;
  out.progress = route_progress(positions, expert_path_of(record));
  out.compliance = drivable_compliance(boxes, record.drivable_area);
  out.score =
      out.collision_free ? 0.5 * (out.progress + out.compliance) : 0.0;
  return out;
}

// --- CSV harness ------------------------------------------------------------

namespace {

struct RowMetrics {
  std::optional<double> ade;
  std::optional<double> fde;
  std::optional<double> miss;
  std::optional<double> tpi;
  std::optional<double> progress;
  std::optional<double> compliance;
  std::optional<double> collision_free;
  std::optional<double> score;
};

constexpr int kMetricCount = 8;

std::optional<double>* metric_slot(RowMetrics& m, int i) {
  std::optional<double>* slots[kMetricCount] = {
      &m.ade,      &m.fde,        &m.miss,           &m.tpi,
      &m.progress, &m.compliance, &m.collision_free, &m.score};
  return slots[i];
}

const std::optional<double>& metric_at(const RowMetrics& m, int i) {
  return *metric_slot(const_cast<RowMetrics&>(m), i);
}

const char* const kMetricNames[kMetricCount] = {
    "ade",      "fde",                 "miss",           "tpi_mean",
    "progress", "drivable_compliance", "collision_free", "score"};

std::string format_cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

void append_row(std::string& csv, const std::string& scenario_id,
                const std::string& scenario_type, const std::string& planner,
                const RowMetrics& m) {
  csv += scenario_id;
  csv += ',';
  csv += scenario_type;
  csv += ',';
  csv += planner;
  for (int i = 0; i < kMetricCount; ++i) {
    csv += ',';
    csv += format_cell(metric_at(m, i));
  }
  csv += '\n';
}

RowMetrics mean_rows(const std::vector<RowMetrics>& rows) {
  RowMetrics out;
  for (int i = 0; i < kMetricCount; ++i) {
    double sum = 0.0;
    int n = 0;
    for (const RowMetrics& r : rows) {
      if (const auto& v = metric_at(r, i)) {
        sum += *v;
        ++n;
      }
    }
    if (n > 0) *metric_slot(out, i) = sum / n;
  }
  return out;
}

RowMetrics std_rows(const std::vector<RowMetrics>& rows,
                    const RowMetrics& mean) {
  RowMetrics out;
  for (int i = 0; i < kMetricCount; ++i) {
    const auto& mu = metric_at(mean, i);
    if (!mu) continue;
    double sum = 0.0;
    int n = 0;
    for (const RowMetrics& r : rows) {
      if (const auto& v = metric_at(r, i)) {
        sum += (*v - *mu) * (*v - *mu);
        ++n;
      }
    }
    if (n > 1) {
      *metric_slot(out, i) = std::sqrt(sum / (n - 1));
    } else if (n == 1) {
      *metric_slot(out, i) = 0.0;
    }
  }
  return out;
}

}  // namespace

std::string run_evaluation(const std::vector<ScenarioRecord>& records,
                           const ScorerParams* model, EvalPlanner kind,
                           LoopMode loop, const EvalConfig& cfg) {
  if (cfg.repeat < 1) throw InvalidArgumentError("repeat must be >= 1");
  if (cfg.jobs < 1) throw InvalidArgumentError("jobs must be >= 1");
  const PlanFn plan_fn = make_plan_fn(kind, model, cfg);

  // Scenario order in the CSV is by id, independent of input order.
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].scenario_id != records[b].scenario_id) {
      return records[a].scenario_id < records[b].scenario_id;
    }
    return a < b;
  });

  struct Task {
    std::size_t record_index;
    int repeat;
  };
  std::vector<Task> tasks;
  tasks.reserve(order.size() * cfg.repeat);
  for (int r = 0; r < cfg.repeat; ++r) {
    for (std::size_t oi : order) tasks.push_back({oi, r});
  }

  std::vector<RowMetrics> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) return;
      const Task& task = tasks[i];
      const ScenarioRecord& rec = records[task.record_index];
      const std::uint64_t scenario_seed =
          rng::key(cfg.seed, rng::kStreamRepeat, task.repeat,
                   rng::fnv1a(rec.scenario_id));
      try {
        RowMetrics m;
        if (loop == LoopMode::kOpen) {
          const OpenLoopResult r =
              evaluate_open_loop(rec, plan_fn, scenario_seed);
          m.ade = r.ade;
          m.fde = r.fde;
          m.miss = r.miss ? 1.0 : 0.0;
          m.tpi = r.tpi_mean;
        } else {
          const ClosedLoopResult r =
              evaluate_closed_loop(rec, plan_fn, scenario_seed);
          m.tpi = r.tpi_mean;
          m.progress = r.progress;
          m.compliance = r.compliance;
          m.collision_free = r.collision_free ? 1.0 : 0.0;
          m.score = r.score;
        }
        results[i] = m;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::max(
      1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) std::rethrow_exception(failure);

  // Rows come in one block per repeat: the block's scenarios sorted by id,
  // then that repeat's aggregate row.  With repeat > 1 a trailing mean and
  // std (sample) row summarize the aggregates.
  const std::string planner = eval_planner_name(kind);
  std::string csv =
      "scenario_id,scenario_type,planner,ade,fde,miss,tpi_mean,progress,"
      "drivable_compliance,collision_free,score\n";
  const std::size_t block = order.size();
  std::vector<RowMetrics> aggregates;
  for (int r = 0; r < cfg.repeat; ++r) {
    std::vector<RowMetrics> of_repeat;
    for (std::size_t s = 0; s < block; ++s) {
      const std::size_t i = static_cast<std::size_t>(r) * block + s;
      const ScenarioRecord& rec = records[tasks[i].record_index];
      append_row(csv, rec.scenario_id, rec.scenario_type, planner, results[i]);
      of_repeat.push_back(results[i]);
    }
    const RowMetrics agg = mean_rows(of_repeat);
    append_row(csv, "aggregate", "", planner, agg);
    aggregates.push_back(agg);
  }
  if (cfg.repeat > 1) {
    const RowMetrics mu = mean_rows(aggregates);
    append_row(csv, "mean", "", planner, mu);
    append_row(csv, "std", "", planner, std_rows(aggregates, mu));
  }
  return csv;
}

// --- Result comparison ------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

struct SummaryRow {
  std::string planner;
  std::string loop;
  RowMetrics metrics;
};

}  // namespace

Report make_report(const std::vector<std::string>& csv_paths) {
  std::vector<SummaryRow> rows;
  for (const std::string& path : csv_paths) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metrics file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) {
      throw IoError("metrics file '" + path + "' is empty");
    }
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() != 3 + kMetricCount || header[0] != "scenario_id") {
      throw IoError("metrics file '" + path + "' has an unexpected header");
    }
    std::optional<SummaryRow> aggregate;
    std::optional<SummaryRow> mean;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> cells = split_csv_line(line);
      if (cells.size() != 3 + kMetricCount) {
        throw IoError("metrics file '" + path + "' has a malformed row");
      }
      if (cells[0] != "aggregate" && cells[0] != "mean") continue;
      SummaryRow row;
      row.planner = cells[2];
      for (int i = 0; i < kMetricCount; ++i) {
        const std::string& cell = cells[3 + i];
        if (!cell.empty()) *metric_slot(row.metrics, i) = std::stod(cell);
      }
      // Closed-loop files carry a score; open-loop files carry ADE.
      row.loop = row.metrics.score.has_value() ? "closed" : "open";
      if (cells[0] == "mean") {
        mean = row;
      } else if (!aggregate) {
        aggregate = row;  // first repeat's aggregate
      }
    }
    if (mean) {
      rows.push_back(*mean);
    } else if (aggregate) {
      rows.push_back(*aggregate);
    } else {
      throw IoError("metrics file '" + path + "' has no aggregate row");
    }
  }

  // Best closed-loop score first, then open-loop rows by ascending ADE.
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SummaryRow& a, const SummaryRow& b) {
                     const bool a_closed = a.metrics.score.has_value();
                     const bool b_closed = b.metrics.score.has_value();
                     if (a_closed != b_closed) return a_closed;
                     if (a_closed) return *a.metrics.score > *b.metrics.score;
                     const double aa = a.metrics.ade.value_or(0.0);
                     const double bb = b.metrics.ade.value_or(0.0);
                     return aa < bb;
                   });

  std::ostringstream table;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-18s %-7s", "planner", "loop");
  table << buf;
  for (const char* name : kMetricNames) {
    std::snprintf(buf, sizeof buf, " %14s", name);
    table << buf;
  }
  table << '\n';
  for (SummaryRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%-18s %-7s", row.planner.c_str(),
                  row.loop.c_str());
    table << buf;
    for (int i = 0; i < kMetricCount; ++i) {
      const auto v = *metric_slot(row.metrics, i);
      if (v) {
        std::snprintf(buf, sizeof buf, " %14.4f", *v);
      } else {
        std::snprintf(buf, sizeof buf, " %14s", "-");
      }
      table << buf;
    }
    table << '\n';
  }

  Report report;
  report.table = table.str();
  for (int i = 0; i < kMetricCount; ++i) {
    std::string content = "planner,loop,value\n";
    bool any = false;
    for (SummaryRow& row : rows) {
      const auto v = *metric_slot(row.metrics, i);
      if (!v) continue;
      any = true;
      char cell[32];
      std::snprintf(cell, sizeof cell, "%.6f", *v);
      content += row.planner + "," + row.loop + "," + cell + "\n";
    }
    if (any) {
      report.plot_files.emplace_back(std::string(kMetricNames[i]) + ".csv",
                                     content);
    }
  }
  return report;
}

}  // namespace gcplan
