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

#include "gcplan/gcplan.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "gcplan/errors.hpp"
#include "gcplan/evaluation.hpp"
#include "gcplan/policy.hpp"
#include "gcplan/scenario.hpp"

struct gcp_scenario_set {
  std::vector<gcplan::ScenarioRecord> records;
};

struct gcp_model {
  gcplan::ScorerParams params;
};

namespace {

thread_local std::string t_last_error;

void set_error(const std::string& message) { t_last_error = message; }

// Runs fn, translating exceptions into status codes and the thread-local
// message.
template <typename Fn>
gcp_status guarded(Fn&& fn) {
  try {
    fn();
    return GCP_OK;
  } catch (const gcplan::IoError& e) {
    set_error(e.what());
    return GCP_ERROR_IO;
  } catch (const gcplan::ValidationError& e) {
    set_error(e.what());
    return GCP_ERROR_PARSE;
  } catch (const gcplan::InvalidArgumentError& e) {
    set_error(e.what());
    return GCP_ERROR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return GCP_ERROR_RUNTIME;
  } catch (const std::exception& e) {
    set_error(e.what());
    return GCP_ERROR_RUNTIME;
  }
}

gcp_status require(bool ok, const char* message) {
  if (ok) return GCP_OK;
  set_error(message);
  return GCP_ERROR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* gcp_last_error(void) { return t_last_error.c_str(); }

void gcp_string_free(char* s) { delete[] s; }

/* --- Scenario sets --------------------------------------------------------- */

void gcp_generator_params_init(gcp_generator_params* params) {
  if (params == nullptr) return;
  const gcplan::GeneratorConfig d;
  params->seed = d.seed;
  params->count = d.count;
  params->arm_length = d.arm_length;
  params->lanes_per_arm = d.lanes_per_arm;
  params->speed_limit = d.speed_limit;
  params->agent_density = d.agent_density;
  params->corrupt_route_fraction = d.corrupt_route_fraction;
}

gcp_status gcp_generate_scenarios(const gcp_generator_params* params,
                                  gcp_scenario_set** out) {
  if (gcp_status s = require(params != nullptr && out != nullptr,
                             "gcp_generate_scenarios: null argument")) {
    return s;
  }
  return guarded([&] {
    gcplan::GeneratorConfig cfg;
    cfg.seed = params->seed;
    cfg.count = params->count;
    cfg.arm_length = params->arm_length;
    cfg.lanes_per_arm = params->lanes_per_arm;
    cfg.speed_limit = params->speed_limit;
    cfg.agent_density = params->agent_density;
    cfg.corrupt_route_fraction = params->corrupt_route_fraction;
    auto set = std::make_unique<gcp_scenario_set>();
    set->records = gcplan::generate_intersections(cfg);
    *out = set.release();
  });
}

gcp_status gcp_scenario_set_load(const char* path, gcp_scenario_set** out) {
  if (gcp_status s = require(path != nullptr && out != nullptr,
                             "gcp_scenario_set_load: null argument")) {
    return s;
  }
  return guarded([&] {
    auto set = std::make_unique<gcp_scenario_set>();
    set->records = gcplan::load_scenarios(path);
    *out = set.release();
  });
}

gcp_status gcp_scenario_set_save(const gcp_scenario_set* set,
                                 const char* path) {
  if (gcp_status s = require(set != nullptr && path != nullptr,
                             "gcp_scenario_set_save: null argument")) {
    return s;
  }
  return guarded([&] { gcplan::save_scenarios(set->records, path); });
}

gcp_status gcp_scenario_set_count(const gcp_scenario_set* set, int32_t* out) {
  if (gcp_status s = require(set != nullptr && out != nullptr,
                             "gcp_scenario_set_count: null argument")) {
    return s;
  }
  *out = static_cast<int32_t>(set->records.size());
  return GCP_OK;
}

void gcp_scenario_set_free(gcp_scenario_set* set) { delete set; }

/* --- Models ----------------------------------------------------------------- */

void gcp_train_params_init(gcp_train_params* params) {
  if (params == nullptr) return;
  const gcplan::TrainConfig d;
  params->mode = "unconditioned";
  params->epochs = d.epochs;
  params->learning_rate = d.learning_rate;
  params->seed = d.seed;
}

gcp_status gcp_train(const gcp_scenario_set* set,
                     const gcp_train_params* params, gcp_model** out,
                     gcp_train_report* report) {
  if (gcp_status s =
          require(set != nullptr && params != nullptr && out != nullptr &&
                      params->mode != nullptr,
                  "gcp_train: null argument")) {
    return s;
  }
  return guarded([&] {
    gcplan::TrainConfig cfg;
    cfg.mode = gcplan::train_mode_from_name(params->mode);
    cfg.epochs = params->epochs;
    cfg.learning_rate = params->learning_rate;
    cfg.seed = params->seed;
    gcplan::TrainReport rep;
    auto model = std::make_unique<gcp_model>();
    model->params = gcplan::train_scorer(set->records, cfg, &rep);
    if (report != nullptr) {
      report->train_nll_initial = rep.train_nll_initial;
      report->train_nll_final = rep.train_nll_final;
      report->heldout_nll_initial = rep.heldout_nll_initial;
      report->heldout_nll_final = rep.heldout_nll_final;
      report->used_scenarios = rep.used_scenarios;
      report->skipped_scenarios = rep.skipped_scenarios;
      report->heldout_scenarios = rep.heldout_scenarios;
    }
    *out = model.release();
  });
}

gcp_status gcp_model_load(const char* path, gcp_model** out) {
  if (gcp_status s = require(path != nullptr && out != nullptr,
                             "gcp_model_load: null argument")) {
    return s;
  }
  return guarded([&] {
    auto model = std::make_unique<gcp_model>();
    model->params = gcplan::load_model(path);
    *out = model.release();
  });
}

gcp_status gcp_model_save(const gcp_model* model, const char* path) {
  if (gcp_status s = require(model != nullptr && path != nullptr,
                             "gcp_model_save: null argument")) {
    return s;
  }
  return guarded([&] { gcplan::save_model(model->params, path); });
}

void gcp_model_free(gcp_model* model) { delete model; }

/* --- Evaluation -------------------------------------------------------------- */

void gcp_eval_params_init(gcp_eval_params* params) {
  if (params == nullptr) return;
  const gcplan::EvalConfig d;
  params->planner = "gc_pgp";
  params->loop = "open";
  params->seed = d.seed;
  params->repeat = d.repeat;
  params->jobs = d.jobs;
  params->k_samples = d.planner.k_samples;
  params->max_nodes = d.planner.max_nodes;
  params->num_modes = d.planner.num_modes;
  params->has_beta_override = 0;
  params->beta_override = 0.0;
  params->idm_desired_speed = d.idm.desired_speed;
  params->idm_time_headway = d.idm.time_headway;
  params->idm_min_gap = d.idm.min_gap;
  params->idm_max_accel = d.idm.max_accel;
  params->idm_comfort_decel = d.idm.comfort_decel;
  params->idm_exponent = d.idm.exponent;
  params->mobil_enabled = d.mobil.enabled ? 1 : 0;
  params->mobil_politeness = d.mobil.politeness;
  params->mobil_accel_threshold = d.mobil.accel_threshold;
  params->mobil_safe_decel = d.mobil.safe_decel;
}

gcp_status gcp_evaluate(const gcp_scenario_set* set, const gcp_model* model,
                        const gcp_eval_params* params, char** csv_out) {
  if (gcp_status s =
          require(set != nullptr && params != nullptr && csv_out != nullptr &&
                      params->planner != nullptr && params->loop != nullptr,
                  "gcp_evaluate: null argument")) {
    return s;
  }
  return guarded([&] {
    const gcplan::EvalPlanner kind =
        gcplan::eval_planner_from_name(params->planner);
    gcplan::LoopMode loop;
    const std::string loop_name = params->loop;
    if (loop_name == "open") {
      loop = gcplan::LoopMode::kOpen;
    } else if (loop_name == "closed") {
      loop = gcplan::LoopMode::kClosed;
    } else {
      throw gcplan::InvalidArgumentError("unknown loop '" + loop_name +
                                         "' (expected open or closed)");
    }
    gcplan::EvalConfig cfg;
    cfg.seed = params->seed;
    cfg.repeat = params->repeat;
    cfg.jobs = params->jobs;
    cfg.planner.k_samples = params->k_samples;
    cfg.planner.max_nodes = params->max_nodes;
    cfg.planner.num_modes = params->num_modes;
    if (params->has_beta_override != 0) {
      cfg.planner.beta_override = params->beta_override;
    }
    cfg.idm.desired_speed = params->idm_desired_speed;
    cfg.idm.time_headway = params->idm_time_headway;
    cfg.idm.min_gap = params->idm_min_gap;
    cfg.idm.max_accel = params->idm_max_accel;
    cfg.idm.comfort_decel = params->idm_comfort_decel;
    cfg.idm.exponent = params->idm_exponent;
    cfg.mobil.enabled = params->mobil_enabled != 0;
    cfg.mobil.politeness = params->mobil_politeness;
    cfg.mobil.accel_threshold = params->mobil_accel_threshold;
    cfg.mobil.safe_decel = params->mobil_safe_decel;
    const std::string csv = gcplan::run_evaluation(
        set->records, model != nullptr ? &model->params : nullptr, kind, loop,
        cfg);
    *csv_out = copy_string(csv);
  });
}

/* --- Reports ----------------------------------------------------------------- */

gcp_status gcp_report(const char* const* csv_paths, int32_t n_paths,
                      const char* plot_dir, char** table_out) {
  if (gcp_status s = require(csv_paths != nullptr && n_paths > 0 &&
                                 table_out != nullptr,
                             "gcp_report: null argument or empty path list")) {
    return s;
  }
  return guarded([&] {
    std::vector<std::string> paths;
    paths.reserve(n_paths);
    for (int32_t i = 0; i < n_paths; ++i) {
      if (csv_paths[i] == nullptr) {
        throw gcplan::InvalidArgumentError("gcp_report: null path");
      }
      paths.emplace_back(csv_paths[i]);
    }
    const gcplan::Report report = gcplan::make_report(paths);
    if (plot_dir != nullptr) {
      const std::filesystem::path dir(plot_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) {
        throw gcplan::IoError("cannot create plot directory '" +
                              std::string(plot_dir) + "': " + ec.message());
      }
      for (const auto& [suffix, content] : report.plot_files) {
        const std::filesystem::path file = dir / suffix;
        std::ofstream out(file, std::ios::binary);
        if (!out || !(out << content)) {
          throw gcplan::IoError("cannot write plot file '" + file.string() +
                                "'");
        }
      }
    }
    *table_out = copy_string(report.table);
  });
}

} /* extern "C" */
