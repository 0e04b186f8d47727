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

// Command-line front end. Talks to the planning library exclusively
// through its C interface, the way an external embedding would.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "gcplan/gcplan.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Prints the library's error message and maps every failure to exit
// code 1; usage problems are CLI11's domain and exit with 2.
bool check(gcp_status status, const char* what) {
  if (status == GCP_OK) return true;
  std::cerr << "error: " << what << ": " << gcp_last_error() << "\n";
  return false;
}

bool write_file(const std::string& path, const char* content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

struct ScenarioSetDeleter {
  void operator()(gcp_scenario_set* s) const { gcp_scenario_set_free(s); }
};
struct ModelDeleter {
  void operator()(gcp_model* m) const { gcp_model_free(m); }
};
struct StringDeleter {
  void operator()(char* s) const { gcp_string_free(s); }
};

using ScenarioSetPtr = std::unique_ptr<gcp_scenario_set, ScenarioSetDeleter>;
using ModelPtr = std::unique_ptr<gcp_model, ModelDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int run_generate(const gcp_generator_params& params, const std::string& out) {
  gcp_scenario_set* raw = nullptr;
  if (!check(gcp_generate_scenarios(&params, &raw), "generate")) {
    return kExitFailure;
  }
  ScenarioSetPtr set(raw);
  if (!check(gcp_scenario_set_save(set.get(), out.c_str()), "save")) {
    return kExitFailure;
  }
  int32_t count = 0;
  gcp_scenario_set_count(set.get(), &count);
  std::cout << "wrote " << count << " scenarios to " << out << "\n";
  return kExitOk;
}

int run_train(const std::string& scenarios, const std::string& mode,
              int32_t epochs, double learning_rate, std::uint64_t seed,
              const std::string& out) {
  gcp_scenario_set* raw_set = nullptr;
  if (!check(gcp_scenario_set_load(scenarios.c_str(), &raw_set),
             "load scenarios")) {
    return kExitFailure;
  }
  ScenarioSetPtr set(raw_set);

  gcp_train_params params;
  gcp_train_params_init(&params);
  params.mode = mode.c_str();
  params.epochs = epochs;
  params.learning_rate = learning_rate;
  params.seed = seed;

  gcp_train_report report{};
  gcp_model* raw_model = nullptr;
  if (!check(gcp_train(set.get(), &params, &raw_model, &report), "train")) {
    return kExitFailure;
  }
  ModelPtr model(raw_model);
  if (!check(gcp_model_save(model.get(), out.c_str()), "save model")) {
    return kExitFailure;
  }
  std::printf("trained %s on %d scenarios (%d skipped, %d held out)\n",
              mode.c_str(), report.used_scenarios, report.skipped_scenarios,
              report.heldout_scenarios);
  std::printf("train nll   %.6f -> %.6f\n", report.train_nll_initial,
              report.train_nll_final);
  std::printf("heldout nll %.6f -> %.6f\n", report.heldout_nll_initial,
              report.heldout_nll_final);
  std::printf("model written to %s\n", out.c_str());
  return kExitOk;
}

int run_eval(const std::string& scenarios, const std::string& model_path,
             const gcp_eval_params& params, const std::string& out) {
  gcp_scenario_set* raw_set = nullptr;
  if (!check(gcp_scenario_set_load(scenarios.c_str(), &raw_set),
             "load scenarios")) {
    return kExitFailure;
  }
  ScenarioSetPtr set(raw_set);

  ModelPtr model;
  if (!model_path.empty()) {
    gcp_model* raw_model = nullptr;
    if (!check(gcp_model_load(model_path.c_str(), &raw_model),
               "load model")) {
      return kExitFailure;
    }
    model.reset(raw_model);
  }

  char* raw_csv = nullptr;
  if (!check(gcp_evaluate(set.get(), model.get(), &params, &raw_csv),
             "evaluate")) {
    return kExitFailure;
  }
  StringPtr csv(raw_csv);
  if (!write_file(out, csv.get())) return kExitFailure;
  std::cout << "metrics written to " << out << "\n";
  return kExitOk;
}

int run_report(const std::vector<std::string>& paths,
               const std::string& plot_dir) {
  std::vector<const char*> c_paths;
  c_paths.reserve(paths.size());
  for (const std::string& p : paths) c_paths.push_back(p.c_str());
  char* raw_table = nullptr;
  if (!check(gcp_report(c_paths.data(), static_cast<int32_t>(c_paths.size()),
                        plot_dir.empty() ? nullptr : plot_dir.c_str(),
                        &raw_table),
             "report")) {
    return kExitFailure;
  }
  StringPtr table(raw_table);
  std::cout << table.get();
  if (!plot_dir.empty()) {
    std::cout << "plot data written to " << plot_dir << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-conditioned lane-graph planning toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file")
      ->envname("GCPLAN_CONFIG");
  app.allow_config_extras(false);

  // generate ----------------------------------------------------------------
  gcp_generator_params gen;
  gcp_generator_params_init(&gen);
  std::string gen_out;
  CLI::App* generate =
      app.add_subcommand("generate", "Generate synthetic intersections");
  generate->add_option("--out", gen_out, "Scenario file to write")
      ->required()
      ->envname("GCPLAN_OUT");
  generate->add_option("--seed", gen.seed, "Generator seed")
      ->envname("GCPLAN_SEED");
  generate->add_option("--count", gen.count, "Number of scenarios")
      ->check(CLI::NonNegativeNumber)
      ->envname("GCPLAN_COUNT");
  generate
      ->add_option("--arm-length", gen.arm_length,
                   "Approach length per arm, metres")
      ->envname("GCPLAN_ARM_LENGTH");
  generate
      ->add_option("--lanes-per-arm", gen.lanes_per_arm,
                   "Lanes per direction")
      ->envname("GCPLAN_LANES_PER_ARM");
  generate->add_option("--speed-limit", gen.speed_limit, "Speed limit, m/s")
      ->envname("GCPLAN_SPEED_LIMIT");
  generate
      ->add_option("--agent-density", gen.agent_density,
                   "Expected vehicles per arm")
      ->envname("GCPLAN_AGENT_DENSITY");
  generate
      ->add_option("--corrupt-route-fraction", gen.corrupt_route_fraction,
                   "Fraction of scenarios with a wrong goal")
      ->envname("GCPLAN_CORRUPT_ROUTE_FRACTION");

  // train ---------------------------------------------------------------------
  gcp_train_params train_defaults;
  gcp_train_params_init(&train_defaults);
  std::string train_scenarios;
  std::string train_mode = train_defaults.mode;
  std::string train_out;
  int32_t train_epochs = train_defaults.epochs;
  double train_lr = train_defaults.learning_rate;
  std::uint64_t train_seed = train_defaults.seed;
  CLI::App* train = app.add_subcommand("train", "Train an edge scorer");
  train->add_option("--scenarios", train_scenarios, "Scenario file")
      ->required()
      ->envname("GCPLAN_SCENARIOS");
  train->add_option("--out", train_out, "Model file to write")
      ->required()
      ->envname("GCPLAN_OUT");
  train
      ->add_option("--mode", train_mode,
                   "unconditioned | hard_mask_at_train | node_features | "
                   "soft_mask")
      ->check(CLI::IsMember({"unconditioned", "hard_mask_at_train",
                             "node_features", "soft_mask"}))
      ->envname("GCPLAN_MODE");
  train->add_option("--epochs", train_epochs, "Training epochs")
      ->check(CLI::PositiveNumber)
      ->envname("GCPLAN_EPOCHS");
  train->add_option("--learning-rate", train_lr, "Gradient step size")
      ->envname("GCPLAN_LEARNING_RATE");
  train->add_option("--seed", train_seed, "Init seed")
      ->envname("GCPLAN_SEED");

  // eval ----------------------------------------------------------------------
  std::string eval_scenarios;
  std::string eval_model;
  std::string eval_out;
  gcp_eval_params ev;
  gcp_eval_params_init(&ev);
  std::string eval_planner = "gc_pgp";
  std::string eval_loop = "open";
  double eval_beta = 0.0;
  // Parallelism defaults to the machine; everything else favours
  // reproducibility and comes from the library defaults.
  ev.jobs = static_cast<int32_t>(
      std::max(1u, std::thread::hardware_concurrency()));
  CLI::App* eval = app.add_subcommand("eval", "Run the evaluation harness");
  eval->add_option("--scenarios", eval_scenarios, "Scenario file")
      ->required()
      ->envname("GCPLAN_SCENARIOS");
  eval->add_option("--out", eval_out, "Metrics CSV to write")
      ->required()
      ->envname("GCPLAN_OUT");
  eval->add_option("--model", eval_model,
                   "Trained model (required for sampling planners)")
      ->envname("GCPLAN_MODEL");
  eval->add_option("--planner", eval_planner,
                   "pgp | gc_pgp | soft_mask | hard_mask_trained | "
                   "node_features | filter_on_route | idm | expert")
      ->check(CLI::IsMember({"pgp", "gc_pgp", "soft_mask",
                             "hard_mask_trained", "node_features",
                             "filter_on_route", "idm", "expert"}))
      ->envname("GCPLAN_PLANNER");
  eval->add_option("--loop", eval_loop, "open | closed")
      ->check(CLI::IsMember({"open", "closed"}))
      ->envname("GCPLAN_LOOP");
  eval->add_option("--seed", ev.seed, "Evaluation seed")
      ->envname("GCPLAN_SEED");
  eval->add_option("--repeat", ev.repeat, "Repetitions per scenario")
      ->check(CLI::PositiveNumber)
      ->envname("GCPLAN_REPEAT");
  eval
      ->add_option("--jobs", ev.jobs,
                   "Worker threads (default: available cores)")
      ->check(CLI::PositiveNumber)
      ->envname("GCPLAN_JOBS");
  eval->add_option("--k-samples", ev.k_samples, "Traversal samples per plan")
      ->check(CLI::PositiveNumber)
      ->envname("GCPLAN_K_SAMPLES");
  eval->add_option("--max-nodes", ev.max_nodes, "Max nodes per traversal")
      ->check(CLI::PositiveNumber)
      ->envname("GCPLAN_MAX_NODES");
  eval->add_option("--num-modes", ev.num_modes, "Cluster count")
      ->check(CLI::PositiveNumber)
      ->envname("GCPLAN_NUM_MODES");
  CLI::Option* beta_opt =
      eval->add_option("--beta", eval_beta,
                       "Route bonus override for soft_mask")
          ->envname("GCPLAN_BETA");
  eval
      ->add_option("--idm-desired-speed", ev.idm_desired_speed,
                   "IDM desired speed, 0 = speed limit")
      ->envname("GCPLAN_IDM_DESIRED_SPEED");
  eval
      ->add_option("--idm-time-headway", ev.idm_time_headway,
                   "IDM time headway, s")
      ->envname("GCPLAN_IDM_TIME_HEADWAY");
  eval->add_option("--idm-min-gap", ev.idm_min_gap, "IDM standstill gap, m")
      ->envname("GCPLAN_IDM_MIN_GAP");
  eval
      ->add_option("--idm-max-accel", ev.idm_max_accel,
                   "IDM max acceleration")
      ->envname("GCPLAN_IDM_MAX_ACCEL");
  eval
      ->add_option("--idm-comfort-decel", ev.idm_comfort_decel,
                   "IDM comfortable deceleration")
      ->envname("GCPLAN_IDM_COMFORT_DECEL");
  eval->add_option("--idm-exponent", ev.idm_exponent, "IDM exponent")
      ->envname("GCPLAN_IDM_EXPONENT");
  eval->add_flag("--mobil", "Enable MOBIL lane changes for the idm planner")
      ->envname("GCPLAN_MOBIL");
  eval
      ->add_option("--mobil-politeness", ev.mobil_politeness,
                   "MOBIL politeness factor")
      ->envname("GCPLAN_MOBIL_POLITENESS");
  eval
      ->add_option("--mobil-accel-threshold", ev.mobil_accel_threshold,
                   "MOBIL changing threshold")
      ->envname("GCPLAN_MOBIL_ACCEL_THRESHOLD");
  eval
      ->add_option("--mobil-safe-decel", ev.mobil_safe_decel,
                   "MOBIL safe braking limit")
      ->envname("GCPLAN_MOBIL_SAFE_DECEL");

  // report --------------------------------------------------------------------
  std::vector<std::string> report_paths;
  std::string report_plot_dir;
  CLI::App* report =
      app.add_subcommand("report", "Compare metrics CSVs side by side");
  report->add_option("csvs", report_paths, "Metrics CSV files")
      ->required()
      ->expected(-1);
  report->add_option("--plot-dir", report_plot_dir,
                     "Directory for per-metric plot data")
      ->envname("GCPLAN_PLOT_DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (generate->parsed()) return run_generate(gen, gen_out);
  if (train->parsed()) {
    return run_train(train_scenarios, train_mode, train_epochs, train_lr,
                     train_seed, train_out);
  }
  if (eval->parsed()) {
    ev.planner = eval_planner.c_str();
    ev.loop = eval_loop.c_str();
    if (beta_opt->count() > 0) {
      ev.has_beta_override = 1;
      ev.beta_override = eval_beta;
    }
    ev.mobil_enabled = eval->count("--mobil") > 0 ? 1 : 0;
    return run_eval(eval_scenarios, eval_model, ev, eval_out);
  }
  if (report->parsed()) return run_report(report_paths, report_plot_dir);
  return kExitUsage;
}
