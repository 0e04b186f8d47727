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

#include "gcplan/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gcplan/errors.hpp"
#include "gcplan/random.hpp"
#include "json.hpp"

namespace gcplan {

namespace {

// Likelihoods are clamped here before the log. Keeps impossible labels
// (expert steps off a hard-masked route) at a large, finite loss, and
// such samples contribute no gradient.
constexpr double kProbFloor = 1e-12;

double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

std::string train_mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::kUnconditioned:
      return "unconditioned";
    case TrainMode::kHardMaskAtTrain:
      return "hard_mask_at_train";
    case TrainMode::kNodeFeatures:
      return "node_features";
    case TrainMode::kSoftMask:
      return "soft_mask";
  }
  throw InvalidArgumentError("unknown train mode");
}

TrainMode train_mode_from_name(const std::string& name) {
  if (name == "unconditioned") return TrainMode::kUnconditioned;
  if (name == "hard_mask_at_train") return TrainMode::kHardMaskAtTrain;
  if (name == "node_features") return TrainMode::kNodeFeatures;
  if (name == "soft_mask") return TrainMode::kSoftMask;
  throw InvalidArgumentError("unknown train mode '" + name + "'");
}

EdgeFeatures edge_features(const LaneGraph& graph, const Edge& edge,
                           const AgentState& sdv_state,
                           const RouteMask* route_flag) {
  EdgeFeatures f;
  f.dim = route_flag ? EdgeFeatures::kWithRouteFlag : EdgeFeatures::kBase;
  auto& v = f.values;
  v[6] = sdv_state.v;
  if (edge.kind == EdgeKind::kTerminal) {
    // "Stay here": trivially aligned, no offsets, no curvature. Stopping
    // on the route is always an option, so the route flag is 1.
    v[0] = 1.0;
    v[5] = 1.0;
    if (route_flag) v[8] = 1.0;
    return f;
  }
  const LaneNode& target = graph.nodes()[edge.to];
  v[0] = std::cos(target.exit_heading() - sdv_state.heading);
  const auto proj = target.centreline().project(sdv_state.position());
  v[1] = proj.signed_lateral;
  const Vec2 to_start =
      target.centreline().points().front() - sdv_state.position();
  const Vec2 fwd{std::cos(sdv_state.heading), std::sin(sdv_state.heading)};
  v[2] = to_start.dot(fwd);
  v[edge.kind == EdgeKind::kSuccessor ? 3 : 4] = 1.0;
  const double dh = normalize_angle(target.points.back().pose.heading -
                                    target.points.front().pose.heading);
  v[7] = target.arc_length > 0.0 ? dh / target.arc_length : 0.0;
  if (route_flag) v[8] = route_flag->contains_node(edge.to) ? 1.0 : 0.0;
  return f;
}

ScorerParams init_params(TrainMode mode, std::uint64_t seed) {
  ScorerParams p;
  p.mode = mode;
  p.input_dim = mode == TrainMode::kNodeFeatures ? EdgeFeatures::kWithRouteFlag
                                                 : EdgeFeatures::kBase;
  p.w1.resize(static_cast<std::size_t>(ScorerParams::kHidden) * p.input_dim);
  p.b1.resize(ScorerParams::kHidden);
  p.w2.resize(ScorerParams::kHidden);
  std::uint64_t i = 0;
  const auto draw = [&] {
    return rng::uniform(seed, rng::kStreamInit, i++, 0, -0.1, 0.1);
  };
  for (double& w : p.w1) w = draw();
  for (double& w : p.b1) w = draw();
  for (double& w : p.w2) w = draw();
  p.b2 = draw();
  p.beta = 0.0;
  return p;
}

double score_edge(const ScorerParams& params, const EdgeFeatures& f) {
  if (f.dim != params.input_dim) {
    throw InvalidArgumentError("feature dimension mismatch");
  }
  double s = params.b2;
  for (int j = 0; j < ScorerParams::kHidden; ++j) {
    double pre = params.b1[j];
    const double* row = params.w1.data() + j * params.input_dim;
    for (int d = 0; d < params.input_dim; ++d) pre += row[d] * f.values[d];
    s += params.w2[j] * relu(pre);
  }
  return s;
}

std::vector<double> score_edges(const ScorerParams& params,
                                const LaneGraph& graph,
                                const AgentState& sdv_state,
                                const RouteMask* route) {
  const RouteMask* flag =
      params.mode == TrainMode::kNodeFeatures ? route : nullptr;
  if (params.mode == TrainMode::kNodeFeatures && route == nullptr) {
    throw InvalidArgumentError(
        "score_edges: node_features model needs a route mask");
  }
  std::vector<double> scores(graph.edge_count());
  for (std::size_t i = 0; i < graph.edge_count(); ++i) {
    scores[i] =
        score_edge(params, edge_features(graph, graph.edges()[i], sdv_state,
                                         flag));
  }
  return scores;
}

EdgeDistribution softmax_per_node(const LaneGraph& graph,
                                  const std::vector<double>& scores) {
  if (scores.size() != graph.edge_count()) {
    throw InvalidArgumentError("softmax_per_node: score count mismatch");
  }
  EdgeDistribution dist;
  dist.probs.resize(scores.size());
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    const std::size_t begin = graph.first_edge_index(static_cast<NodeId>(v));
    const std::size_t end =
        begin + graph.outgoing(static_cast<NodeId>(v)).size();
    double m = scores[begin];
    for (std::size_t i = begin + 1; i < end; ++i) m = std::max(m, scores[i]);
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      dist.probs[i] = std::exp(scores[i] - m);
      sum += dist.probs[i];
    }
    for (std::size_t i = begin; i < end; ++i) dist.probs[i] /= sum;
  }
  return dist;
}

// --- Training ---------------------------------------------------------------

// One expert decision: the outgoing edges of one visited node, their
// features, their on-route flags, and which of them match the expert's
// next move.
class TrainingSet {
 public:
  struct Group {
    std::size_t feat_begin = 0;  // into feats, n_edges * input_dim values
    int n_edges = 0;
    std::size_t flags_begin = 0;          // into on_route, n_edges values
    std::vector<int> label_edges;         // local indices, never empty
    bool heldout = false;
  };

  TrainMode mode = TrainMode::kUnconditioned;
  int input_dim = EdgeFeatures::kBase;
  std::vector<double> feats;
  std::vector<std::uint8_t> on_route;  // per stored edge
  std::vector<Group> groups;
  int used_scenarios = 0;
  int skipped_scenarios = 0;
  int heldout_scenarios = 0;
  int train_group_count = 0;
  int heldout_group_count = 0;
};

std::shared_ptr<const TrainingSet> make_training_set(
    const std::vector<ScenarioRecord>& records, TrainMode mode) {
  auto set = std::make_shared<TrainingSet>();
  set->mode = mode;
  set->input_dim = mode == TrainMode::kNodeFeatures
                       ? EdgeFeatures::kWithRouteFlag
                       : EdgeFeatures::kBase;
  const bool needs_route = mode != TrainMode::kUnconditioned;

  for (std::size_t ri = 0; ri < records.size(); ++ri) {
    const ScenarioRecord& rec = records[ri];
    const bool heldout = ri % 5 == 4;
    ExpertTraversal label;
    RouteMask route;
    try {
      label = expert_traversal(rec);
      if (needs_route) {
        route = compute_route_mask(rec.graph, rec.start_node, rec.goal_node);
      }
    } catch (const Error&) {
      ++set->skipped_scenarios;
      continue;
    }
    const RouteMask* flag = mode == TrainMode::kNodeFeatures ? &route : nullptr;
    for (std::size_t si = 0; si < label.nodes.size(); ++si) {
      const NodeId u = label.nodes[si];
      const auto edges = rec.graph.outgoing(u);
      const std::size_t base = rec.graph.first_edge_index(u);
      TrainingSet::Group group;
      group.feat_begin = set->feats.size();
      group.flags_begin = set->on_route.size();
      group.n_edges = static_cast<int>(edges.size());
      group.heldout = heldout;
      for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        const EdgeFeatures f =
            edge_features(rec.graph, edges[ei], rec.sdv_state(), flag);
        set->feats.insert(set->feats.end(), f.values.begin(),
                          f.values.begin() + set->input_dim);
        bool on = false;
        if (needs_route) {
          on = route.route_edges.empty()
                   ? false
                   : route.route_edges[base + ei] != 0;
        }
        set->on_route.push_back(on ? 1 : 0);
        const bool is_label =
            si + 1 < label.nodes.size()
                ? (edges[ei].kind != EdgeKind::kTerminal &&
                   edges[ei].to == label.nodes[si + 1])
                : edges[ei].kind == EdgeKind::kTerminal;
        if (is_label) group.label_edges.push_back(static_cast<int>(ei));
      }
      set->groups.push_back(std::move(group));
    }
    ++set->used_scenarios;
    if (heldout) ++set->heldout_scenarios;
  }
  for (const auto& g : set->groups) {
    (g.heldout ? set->heldout_group_count : set->train_group_count) += 1;
  }
  return set;
}

std::vector<double> flatten_params(const ScorerParams& params) {
  std::vector<double> flat;
  flat.reserve(params.weight_count() + 1);
  flat.insert(flat.end(), params.w1.begin(), params.w1.end());
  flat.insert(flat.end(), params.b1.begin(), params.b1.end());
  flat.insert(flat.end(), params.w2.begin(), params.w2.end());
  flat.push_back(params.b2);
  if (params.mode == TrainMode::kSoftMask) flat.push_back(params.beta);
  return flat;
}

void unflatten_params(const std::vector<double>& flat, ScorerParams* params) {
  const std::size_t expected =
      params->weight_count() + (params->mode == TrainMode::kSoftMask ? 1 : 0);
  if (flat.size() != expected) {
    throw InvalidArgumentError("unflatten_params: size mismatch");
  }
  std::size_t o = 0;
  std::copy_n(flat.begin() + o, params->w1.size(), params->w1.begin());
  o += params->w1.size();
  std::copy_n(flat.begin() + o, params->b1.size(), params->b1.begin());
  o += params->b1.size();
  std::copy_n(flat.begin() + o, params->w2.size(), params->w2.begin());
  o += params->w2.size();
  params->b2 = flat[o++];
  if (params->mode == TrainMode::kSoftMask) params->beta = flat[o++];
}

namespace {

// Loss and gradient of a single decision group. Returns the NLL;
// accumulates parameter gradients scaled by `scale` when grad != null.
double group_loss(const TrainingSet& set, const TrainingSet::Group& g,
                  const ScorerParams& params, double scale,
                  std::vector<double>* grad) {
  const int n = g.n_edges;
  const int d = set.input_dim;
  const int h = ScorerParams::kHidden;

  // Forward.
  thread_local std::vector<double> pre, hid, scores, p, dscore;
  pre.assign(static_cast<std::size_t>(n) * h, 0.0);
  hid.assign(static_cast<std::size_t>(n) * h, 0.0);
  scores.assign(n, 0.0);
  for (int e = 0; e < n; ++e) {
    const double* f = set.feats.data() + g.feat_begin + e * d;
    double s = params.b2;
    for (int j = 0; j < h; ++j) {
      double a = params.b1[j];
      const double* row = params.w1.data() + j * d;
      for (int k = 0; k < d; ++k) a += row[k] * f[k];
      pre[e * h + j] = a;
      const double r = relu(a);
      hid[e * h + j] = r;
      s += params.w2[j] * r;
    }
    scores[e] = s;
  }

  const auto on = [&](int e) {
    return set.on_route[g.flags_begin + e] != 0;
  };
  const bool hard = params.mode == TrainMode::kHardMaskAtTrain;
  const bool soft = params.mode == TrainMode::kSoftMask;

  // Softmax, restricted to on-route edges under the hard-mask regime.
  p.assign(n, 0.0);
  double m = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < n; ++e) {
    if (hard && !on(e)) continue;
    m = std::max(m, scores[e]);
  }
  double sum = 0.0;
  for (int e = 0; e < n; ++e) {
    if (hard && !on(e)) continue;
    p[e] = std::exp(scores[e] - m);
    sum += p[e];
  }
  if (sum <= 0.0) return -std::log(kProbFloor);  // all edges masked away
  for (int e = 0; e < n; ++e) p[e] /= sum;

  double label_p = 0.0;
  int label_on = 0;
  for (int e : g.label_edges) {
    label_p += p[e];
    label_on += on(e) ? 1 : 0;
  }

  double loss;
  dscore.assign(n, 0.0);
  bool usable = true;
  if (soft) {
    if (params.beta < 0.0) {
      throw InvalidArgumentError("soft-mask beta must be non-negative");
    }
    int m_cnt = 0;
    for (int e = 0; e < n; ++e) m_cnt += on(e) ? 1 : 0;
    const double denom = 1.0 + params.beta * m_cnt;
    const double ql = (label_p + params.beta * label_on) / denom;
    usable = ql >= kProbFloor;
    loss = -std::log(std::max(ql, kProbFloor));
    if (grad && usable) {
      for (int e = 0; e < n; ++e) {
        const bool in_label =
            std::find(g.label_edges.begin(), g.label_edges.end(), e) !=
            g.label_edges.end();
        const double dpl = (in_label ? p[e] : 0.0) - label_p * p[e];
        dscore[e] = -dpl / (denom * ql);
      }
      const double dq_dbeta =
          (label_on - label_p * m_cnt) / (denom * denom);
      grad->back() += scale * (-dq_dbeta / ql);
    }
  } else {
    usable = label_p >= kProbFloor;
    loss = -std::log(std::max(label_p, kProbFloor));
    if (grad && usable) {
      for (int e = 0; e < n; ++e) {
        const bool in_label =
            std::find(g.label_edges.begin(), g.label_edges.end(), e) !=
            g.label_edges.end();
        dscore[e] = p[e] - (in_label ? p[e] / label_p : 0.0);
      }
    }
  }

  if (grad && usable) {
    double* gw1 = grad->data();
    double* gb1 = gw1 + params.w1.size();
    double* gw2 = gb1 + params.b1.size();
    double* gb2 = gw2 + params.w2.size();
    for (int e = 0; e < n; ++e) {
      const double gs = dscore[e] * scale;
      if (gs == 0.0) continue;
      const double* f = set.feats.data() + g.feat_begin + e * d;
      *gb2 += gs;
      for (int j = 0; j < h; ++j) {
        gw2[j] += gs * hid[e * h + j];
        if (pre[e * h + j] > 0.0) {
          const double gpre = gs * params.w2[j];
          gb1[j] += gpre;
          double* row = gw1 + j * d;
          for (int k = 0; k < d; ++k) row[k] += gpre * f[k];
        }
      }
    }
  }
  return loss;
}

double mean_nll(const TrainingSet& set, const ScorerParams& params,
                bool heldout, std::vector<double>* grad) {
  const int count =
      heldout ? set.heldout_group_count : set.train_group_count;
  if (count == 0) return 0.0;
  const double scale = 1.0 / count;
  double total = 0.0;
  for (const auto& g : set.groups) {
    if (g.heldout != heldout) continue;
    total += group_loss(set, g, params, scale, grad);
  }
  return total * scale;
}

}  // namespace

double training_loss_and_grad(const TrainingSet& set,
                              const ScorerParams& params,
                              std::vector<double>* grad) {
  if (grad) grad->assign(flatten_params(params).size(), 0.0);
  return mean_nll(set, params, /*heldout=*/false, grad);
}

double training_nll(const TrainingSet& set, const ScorerParams& params,
                    bool heldout) {
  return mean_nll(set, params, heldout, nullptr);
}

ScorerParams train_scorer(const std::vector<ScenarioRecord>& records,
                          const TrainConfig& cfg, TrainReport* report) {
  if (cfg.epochs < 0) throw InvalidArgumentError("negative epoch count");
  if (!(cfg.learning_rate > 0.0)) {
    throw InvalidArgumentError("learning rate must be positive");
  }
  const auto set = make_training_set(records, cfg.mode);
  if (set->train_group_count == 0) {
    throw InvalidArgumentError(
        "training set is empty (no scenario produced a usable expert label)");
  }

  ScorerParams params = init_params(cfg.mode, cfg.seed);
  TrainReport rep;
  rep.used_scenarios = set->used_scenarios;
  rep.skipped_scenarios = set->skipped_scenarios;
  rep.heldout_scenarios = set->heldout_scenarios;
  rep.train_nll_initial = training_nll(*set, params, false);
  rep.heldout_nll_initial = training_nll(*set, params, true);

  std::vector<double> grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    training_loss_and_grad(*set, params, &grad);
    std::vector<double> flat = flatten_params(params);
    for (std::size_t i = 0; i < flat.size(); ++i) {
      flat[i] -= cfg.learning_rate * grad[i];
    }
    unflatten_params(flat, &params);
    if (params.mode == TrainMode::kSoftMask) {
      params.beta = std::max(0.0, params.beta);
    }
  }

  rep.train_nll_final = training_nll(*set, params, false);
  rep.heldout_nll_final = training_nll(*set, params, true);
  if (report) *report = rep;
  return params;
}

double dataset_nll(const ScorerParams& params,
                   const std::vector<ScenarioRecord>& records) {
  const auto set = make_training_set(records, params.mode);
  const int total = set->train_group_count + set->heldout_group_count;
  if (total == 0) {
    throw InvalidArgumentError("dataset_nll: no usable scenarios");
  }
  double sum = 0.0;
  for (const auto& g : set->groups) {
    sum += group_loss(*set, g, params, 0.0, nullptr);
  }
  return sum / total;
}

// --- Model files ------------------------------------------------------------

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void model_fail(const std::string& msg) {
  throw ValidationError("model file: " + msg);
}

}  // namespace

ScorerParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const std::exception& e) {
    throw IoError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) model_fail("expected an object");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k != "format_version" && k != "mode" && k != "input_dim" &&
        k != "hidden_dim" && k != "weights" && k != "beta") {
      model_fail("unknown key '" + k + "'");
    }
  }
  for (const char* k : {"format_version", "mode", "input_dim", "hidden_dim",
                        "weights"}) {
    if (!j.contains(k)) model_fail(std::string("missing key '") + k + "'");
  }
  if (!j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != 1) {
    model_fail("unsupported format_version");
  }
  ScorerParams p;
  p.mode = train_mode_from_name(j["mode"].get<std::string>());
  const int expected_dim = p.mode == TrainMode::kNodeFeatures
                               ? EdgeFeatures::kWithRouteFlag
                               : EdgeFeatures::kBase;
  if (!j["input_dim"].is_number_integer() ||
      j["input_dim"].get<int>() != expected_dim) {
    model_fail("input_dim does not match mode " + train_mode_name(p.mode));
  }
  p.input_dim = expected_dim;
  if (!j["hidden_dim"].is_number_integer() ||
      j["hidden_dim"].get<int>() != ScorerParams::kHidden) {
    model_fail("unsupported hidden_dim");
  }
  const Json& w = j["weights"];
  if (!w.is_object() || !w.contains("w1") || !w.contains("b1") ||
      !w.contains("w2") || !w.contains("b2") || w.size() != 4) {
    model_fail("weights must contain exactly w1, b1, w2, b2");
  }
  const Json& w1 = w["w1"];
  if (!w1.is_array() || w1.size() != ScorerParams::kHidden) {
    model_fail("w1 must have " + std::to_string(ScorerParams::kHidden) +
               " rows");
  }
  for (const auto& row : w1) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(p.input_dim)) {
      model_fail("w1 rows must have input_dim entries");
    }
    for (const auto& x : row) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        model_fail("w1 entries must be finite numbers");
      }
      p.w1.push_back(x.get<double>());
    }
  }
  const auto read_vector = [&](const char* name, std::size_t n,
                               std::vector<double>* dst) {
    const Json& arr = w[name];
    if (!arr.is_array() || arr.size() != n) {
      model_fail(std::string(name) + " must have " + std::to_string(n) +
                 " entries");
    }
    for (const auto& x : arr) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        model_fail(std::string(name) + " entries must be finite numbers");
      }
      dst->push_back(x.get<double>());
    }
  };
  read_vector("b1", ScorerParams::kHidden, &p.b1);
  read_vector("w2", ScorerParams::kHidden, &p.w2);
  if (!w["b2"].is_number() || !std::isfinite(w["b2"].get<double>())) {
    model_fail("b2 must be a finite number");
  }
  p.b2 = w["b2"].get<double>();
  if (p.mode == TrainMode::kSoftMask) {
    if (!j.contains("beta")) model_fail("soft_mask model requires beta");
    if (!j["beta"].is_number() || !std::isfinite(j["beta"].get<double>()) ||
        j["beta"].get<double>() < 0.0) {
      model_fail("beta must be a finite non-negative number");
    }
    p.beta = j["beta"].get<double>();
  } else if (j.contains("beta")) {
    model_fail("beta is only valid for soft_mask models");
  }
  return p;
}

void save_model(const ScorerParams& params, const std::string& path) {
  Json j;
  j["format_version"] = 1;
  j["mode"] = train_mode_name(params.mode);
  j["input_dim"] = params.input_dim;
  j["hidden_dim"] = ScorerParams::kHidden;
  Json w1 = Json::array();
  for (int j_row = 0; j_row < ScorerParams::kHidden; ++j_row) {
    Json row = Json::array();
    for (int d = 0; d < params.input_dim; ++d) {
      row.push_back(params.w1[j_row * params.input_dim + d]);
    }
    w1.push_back(std::move(row));
  }
  j["weights"] = Json{{"w1", std::move(w1)},
                      {"b1", params.b1},
                      {"w2", params.w2},
                      {"b2", params.b2}};
  if (params.mode == TrainMode::kSoftMask) j["beta"] = params.beta;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("failed writing model file: " + path);
}

}  // namespace gcplan
