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

#include "gcplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gcplan/errors.hpp"
#include "json.hpp"

namespace gcplan {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kExpertMatchLimit = 5.0;  // metres
constexpr double kHeadingSlack = 1e-9;

// --- Validation helpers -----------------------------------------------------
//
// Every check reports the JSON path of the offending value, so a broken
// 300-scenario file points straight at the culprit.

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError(path + ": " + msg);
}

const Json& expect_object(const Json& j, const std::string& path,
                          std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) fail(path, "unknown key '" + item.key() + "'");
  }
  for (const char* k : keys) {
    if (!j.contains(k)) fail(path, std::string("missing key '") + k + "'");
  }
  return j;
}

const Json& expect_array(const Json& j, const std::string& path,
                         std::size_t min_size) {
  if (!j.is_array()) fail(path, "expected an array");
  if (j.size() < min_size) {
    fail(path, "expected at least " + std::to_string(min_size) +
                   " entries, got " + std::to_string(j.size()));
  }
  return j;
}

double expect_finite(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "value is not finite");
  return v;
}

std::int64_t expect_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::string expect_string(const Json& j, const std::string& path) {
  if (!j.is_string() || j.get<std::string>().empty()) {
    fail(path, "expected a non-empty string");
  }
  return j.get<std::string>();
}

double expect_heading(const Json& j, const std::string& path) {
  const double h = expect_finite(j, path);
  if (std::abs(h) > M_PI + kHeadingSlack) {
    fail(path, "heading outside (-pi, pi]");
  }
  return h;
}

std::vector<double> expect_tuple(const Json& j, const std::string& path,
                                 std::size_t n) {
  expect_array(j, path, n);
  if (j.size() != n) {
    fail(path, "expected " + std::to_string(n) + " values, got " +
                   std::to_string(j.size()));
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = expect_finite(j[i], path + "[" + std::to_string(i) + "]");
  }
  return out;
}

AgentState parse_state(const Json& j, const std::string& path) {
  const auto t = expect_tuple(j, path, 6);
  AgentState s{t[0], t[1], t[2], t[3], t[4], t[5]};
  if (s.v < 0.0) fail(path, "negative speed");
  expect_heading(j[5], path + "[5]");
  return s;
}

std::vector<AgentState> parse_states(const Json& j, const std::string& path,
                                     std::size_t n) {
  expect_array(j, path, n);
  if (j.size() != n) {
    fail(path, "expected " + std::to_string(n) + " states, got " +
                   std::to_string(j.size()));
  }
  std::vector<AgentState> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(parse_state(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// --- Record <-> JSON --------------------------------------------------------

ScenarioRecord parse_record(const Json& j, const std::string& path) {
  expect_object(j, path,
                {"scenario_id", "scenario_type", "speed_limit", "map",
                 "agents", "sdv", "route", "expert_future"});
  ScenarioRecord rec;
  rec.scenario_id = expect_string(j["scenario_id"], path + ".scenario_id");
  rec.scenario_type =
      expect_string(j["scenario_type"], path + ".scenario_type");
  if (rec.scenario_type != "traverse" && rec.scenario_type != "left_turn" &&
      rec.scenario_type != "right_turn") {
    fail(path + ".scenario_type", "unknown value '" + rec.scenario_type + "'");
  }
  rec.speed_limit = expect_finite(j["speed_limit"], path + ".speed_limit");
  if (rec.speed_limit <= 0.0) fail(path + ".speed_limit", "must be positive");

  const Json& map =
      expect_object(j["map"], path + ".map", {"lanes", "drivable_area"});
  const Json& lanes = expect_array(map["lanes"], path + ".map.lanes", 1);
  for (std::size_t li = 0; li < lanes.size(); ++li) {
    const std::string lp = path + ".map.lanes[" + std::to_string(li) + "]";
    expect_object(lanes[li], lp, {"id", "points", "successors", "neighbours"});
    RawLane lane;
    lane.id = expect_int(lanes[li]["id"], lp + ".id");
    const Json& pts = expect_array(lanes[li]["points"], lp + ".points", 2);
    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
      const std::string pp = lp + ".points[" + std::to_string(pi) + "]";
      const auto t = expect_tuple(pts[pi], pp, 3);
      expect_heading(pts[pi][2], pp + "[2]");
      lane.points.push_back({t[0], t[1], t[2]});
    }
    for (const char* field : {"successors", "neighbours"}) {
      const Json& refs = expect_array(lanes[li][field], lp + "." + field, 0);
      auto& dst =
          std::string(field) == "successors" ? lane.successors : lane.neighbours;
      for (std::size_t ri = 0; ri < refs.size(); ++ri) {
        dst.push_back(expect_int(
            refs[ri],
            lp + "." + field + "[" + std::to_string(ri) + "]"));
      }
    }
    rec.map_lanes.push_back(std::move(lane));
  }
  const Json& area =
      expect_array(map["drivable_area"], path + ".map.drivable_area", 1);
  for (std::size_t ai = 0; ai < area.size(); ++ai) {
    const std::string ap =
        path + ".map.drivable_area[" + std::to_string(ai) + "]";
    const Json& poly = expect_array(area[ai], ap, 3);
    std::vector<Vec2> vs;
    for (std::size_t vi = 0; vi < poly.size(); ++vi) {
      const auto t =
          expect_tuple(poly[vi], ap + "[" + std::to_string(vi) + "]", 2);
      vs.push_back({t[0], t[1]});
    }
    rec.drivable_area.push_back(std::move(vs));
  }

  const Json& agents = expect_array(j["agents"], path + ".agents", 0);
  for (std::size_t ai = 0; ai < agents.size(); ++ai) {
    const std::string ap = path + ".agents[" + std::to_string(ai) + "]";
    expect_object(agents[ai], ap,
                  {"agent_id", "class", "history", "future_playback",
                   "footprint"});
    AgentTrack track;
    track.agent_id = expect_string(agents[ai]["agent_id"], ap + ".agent_id");
    const std::string cls = expect_string(agents[ai]["class"], ap + ".class");
    if (cls == "vehicle") {
      track.cls = AgentClass::kVehicle;
    } else if (cls == "pedestrian") {
      track.cls = AgentClass::kPedestrian;
    } else {
      fail(ap + ".class", "unknown value '" + cls + "'");
    }
    track.history =
        parse_states(agents[ai]["history"], ap + ".history", kHistorySteps);
    track.future_playback = parse_states(
        agents[ai]["future_playback"], ap + ".future_playback", kSimSteps);
    const auto fp = expect_tuple(agents[ai]["footprint"], ap + ".footprint", 2);
    if (fp[0] <= 0.0 || fp[1] <= 0.0) fail(ap + ".footprint", "must be positive");
    track.length = fp[0];
    track.width = fp[1];
    rec.agents.push_back(std::move(track));
  }

  const Json& sdv =
      expect_object(j["sdv"], path + ".sdv", {"history", "footprint"});
  rec.sdv_history =
      parse_states(sdv["history"], path + ".sdv.history", kHistorySteps);
  const auto fp = expect_tuple(sdv["footprint"], path + ".sdv.footprint", 2);
  if (fp[0] <= 0.0 || fp[1] <= 0.0) fail(path + ".sdv.footprint", "must be positive");
  rec.sdv_length = fp[0];
  rec.sdv_width = fp[1];

  const Json& route = expect_object(j["route"], path + ".route",
                                    {"start_node", "goal_node"});
  const std::int64_t start = expect_int(route["start_node"], path + ".route.start_node");
  const std::int64_t goal = expect_int(route["goal_node"], path + ".route.goal_node");

  const Json& expert =
      expect_array(j["expert_future"], path + ".expert_future", 0);
  if (expert.size() != kHorizonSteps) {
    fail(path + ".expert_future", "expected " + std::to_string(kHorizonSteps) +
                                      " waypoints, got " +
                                      std::to_string(expert.size()));
  }
  for (std::size_t wi = 0; wi < expert.size(); ++wi) {
    const auto t = expect_tuple(
        expert[wi], path + ".expert_future[" + std::to_string(wi) + "]", 2);
    rec.expert_future.waypoints.push_back({t[0], t[1]});
  }

  try {
    rec.graph = build_graph(rec.map_lanes, kSnippetLengthMax,
                            kSnippetMaxPoints);
  } catch (const ValidationError& e) {
    fail(path + ".map.lanes", e.what());
  }
  const auto n_nodes = static_cast<std::int64_t>(rec.graph.node_count());
  if (start < 0 || start >= n_nodes) {
    fail(path + ".route.start_node",
         std::to_string(start) + " out of range (graph has " +
             std::to_string(n_nodes) + " nodes)");
  }
  if (goal < 0 || goal >= n_nodes) {
    fail(path + ".route.goal_node",
         std::to_string(goal) + " out of range (graph has " +
             std::to_string(n_nodes) + " nodes)");
  }
  rec.start_node = static_cast<NodeId>(start);
  rec.goal_node = static_cast<NodeId>(goal);
  return rec;
}

Json state_to_json(const AgentState& s) {
  return Json::array({s.x, s.y, s.v, s.a, s.omega, s.heading});
}

Json states_to_json(const std::vector<AgentState>& states) {
  Json arr = Json::array();
  for (const auto& s : states) arr.push_back(state_to_json(s));
  return arr;
}

Json record_to_json(const ScenarioRecord& rec) {
  Json j;
  j["scenario_id"] = rec.scenario_id;
  j["scenario_type"] = rec.scenario_type;
  j["speed_limit"] = rec.speed_limit;
  Json lanes = Json::array();
  for (const RawLane& lane : rec.map_lanes) {
    Json lj;
    lj["id"] = lane.id;
    Json pts = Json::array();
    for (const Pose& p : lane.points) {
      pts.push_back(Json::array({p.x, p.y, p.heading}));
    }
    lj["points"] = std::move(pts);
    lj["successors"] = lane.successors;
    lj["neighbours"] = lane.neighbours;
    lanes.push_back(std::move(lj));
  }
  Json area = Json::array();
  for (const auto& poly : rec.drivable_area) {
    Json pj = Json::array();
    for (const Vec2& v : poly) pj.push_back(Json::array({v.x, v.y}));
    area.push_back(std::move(pj));
  }
  j["map"] = Json{{"lanes", std::move(lanes)},
                  {"drivable_area", std::move(area)}};
  Json agents = Json::array();
  for (const AgentTrack& t : rec.agents) {
    Json aj;
    aj["agent_id"] = t.agent_id;
    aj["class"] = t.cls == AgentClass::kVehicle ? "vehicle" : "pedestrian";
    aj["history"] = states_to_json(t.history);
    aj["future_playback"] = states_to_json(t.future_playback);
    aj["footprint"] = Json::array({t.length, t.width});
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  j["sdv"] = Json{{"history", states_to_json(rec.sdv_history)},
                  {"footprint", Json::array({rec.sdv_length, rec.sdv_width})}};
  j["route"] = Json{{"start_node", rec.start_node},
                    {"goal_node", rec.goal_node}};
  Json expert = Json::array();
  for (const Vec2& w : rec.expert_future.waypoints) {
    expert.push_back(Json::array({w.x, w.y}));
  }
  j["expert_future"] = std::move(expert);
  return j;
}

}  // namespace

std::vector<ScenarioRecord> parse_scenarios(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    throw IoError(std::string("scenario file is not valid JSON: ") + e.what());
  }
  expect_object(doc, "$", {"format_version", "scenarios"});
  if (expect_int(doc["format_version"], "$.format_version") != 1) {
    fail("$.format_version", "unsupported version");
  }
  const Json& arr = expect_array(doc["scenarios"], "$.scenarios", 0);
  std::vector<ScenarioRecord> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(
        parse_record(arr[i], "scenarios[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string serialize_scenarios(const std::vector<ScenarioRecord>& records) {
  std::string out = "{\"format_version\": 1, \"scenarios\": [\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out += record_to_json(records[i]).dump();
    if (i + 1 < records.size()) out += ',';
    out += '\n';
  }
  out += "]}\n";
  return out;
}

std::vector<ScenarioRecord> load_scenarios(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenarios(buf.str());
}

void save_scenarios(const std::vector<ScenarioRecord>& records,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open scenario file for writing: " + path);
  out << serialize_scenarios(records);
  if (!out) throw IoError("failed writing scenario file: " + path);
}

ExpertTraversal expert_traversal(const ScenarioRecord& record) {
  const LaneGraph& g = record.graph;
  std::vector<NodeId> nodes{record.start_node};
  NodeId cur = record.start_node;
  const auto dist_to = [&](NodeId v, const Vec2& w) {
    return g.nodes()[v].centreline().project(w).dist;
  };
  for (std::size_t wi = 0; wi < record.expert_future.waypoints.size(); ++wi) {
    const Vec2& w = record.expert_future.waypoints[wi];
    // Hop along outgoing edges while that gets strictly closer to the
    // waypoint; several hops per waypoint are fine for fast experts.
    while (true) {
      NodeId best = cur;
      double best_d = dist_to(cur, w);
      for (const Edge& e : g.outgoing(cur)) {
        if (e.kind == EdgeKind::kTerminal) continue;
        const double d = dist_to(e.to, w);
        if (d < best_d - 1e-9) {
          best = e.to;
          best_d = d;
        }
      }
      if (best == cur) break;
      nodes.push_back(best);
      cur = best;
    }
    const double d = dist_to(cur, w);
    if (d > kExpertMatchLimit) {
      std::ostringstream msg;
      msg << "scenario " << record.scenario_id << ": expert waypoint " << wi
          << " is " << d << " m from the nearest candidate node (limit "
          << kExpertMatchLimit << " m)";
      throw LabelingError(msg.str());
    }
  }
  return {std::move(nodes), true};
}

}  // namespace gcplan
