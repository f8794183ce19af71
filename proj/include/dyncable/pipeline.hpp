#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dyncable/analysis.hpp"
#include "dyncable/models.hpp"
#include "dyncable/policy.hpp"
#include "dyncable/tuner.hpp"

namespace dyncable {

// Everything a full experiment run needs, JSON round-trippable so runs are
// reproducible from the config file alone. The config hash is embedded in
// every artifact the pipeline writes.
struct ExperimentConfig {
  int schema_version = 1;
  std::string scale = "desk";  // "desk" or "full"
  std::uint64_t seed = 0;
  unsigned workers = 1;

  SystemParams sys;
  SimConfig sim;
  WorkspaceLimits ws;
  NoiseSpec real_noise{0.0025, 0.005};  // stand-in for physical stochasticity

  // Grid counts per action variable (theta1, theta2, r2[, psi offset]).
  std::vector<int> tune_grid = {5, 4, 4};       // references for tuning
  std::vector<int> sim_grid = {10, 10, 5, 4};   // forward-model data (A2)
  std::vector<int> real_grid = {5, 4, 2, 2};    // finetuning data (A2)
  double tune_train_fraction = 0.75;            // 60/20 on the desk scale
  double real_train_fraction = 0.75;

  DEConfig de;
  TrainConfig train;

  int eval_trials = 5;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  std::string hash() const;  // over the serialized form

  static ExperimentConfig desk(std::uint64_t seed = 0);
  static ExperimentConfig full(std::uint64_t seed = 0);
};

// Per-parameter DE search bounds; inert parameters get degenerate bounds.
std::array<std::pair<double, double>, CableParams::kDim> default_param_bounds();

// The stand-in ground-truth cable used wherever a physical system would
// provide measurements: defaults with the three tuned parameters offset.
CableParams ground_truth_params();
std::array<bool, CableParams::kDim> tuned_param_mask();

struct TuneStage {
  CableParams tuned;
  TuneResult result;
  ValidationReport holdout;        // tuned parameters on held-out references
  ValidationReport holdout_default;  // untouched defaults, for comparison
};

// Generates reference traces from the ground-truth cable over the tuning
// grid, splits train/holdout, runs DE on the train set and validates both
// the tuned and the default parameters on the holdout.
TuneStage run_tuning(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct DataStage {
  Dataset sim;         // clean rollouts under `params`
  Dataset real;        // ground-truth cable + noise (stand-in for hardware)
  Dataset real_train;  // split of `real`
  Dataset real_holdout;
};

DataStage run_data(const ExperimentConfig& cfg, const CableParams& params,
                   std::ostream* log = nullptr);

struct ModelStage {
  MLPForward mlp;     // trained on the sim dataset
  MLPForward mlp_ft;  // finetuned on the real-train split
  GPForward gp;       // baseline model on the sim dataset
};

ModelStage run_training(const ExperimentConfig& cfg, const DataStage& data,
                        std::ostream* log = nullptr);

struct EvalStage {
  std::vector<Action> candidates;
  EvalReport policy;      // argmin policy over the finetuned model
  EvalReport polar_cast;  // quasistatic baseline
};

EvalStage run_eval(const ExperimentConfig& cfg, const CableParams& params,
                   const MLPForward& model, std::ostream* log = nullptr);

struct PipelineResult {
  TuneStage tune;
  DataStage data;
  ModelStage models;
  EvalStage eval;
};

// All stages in order, artifacts written under out_dir:
//   config.json, tuned_params.json, tune_history.csv,
//   sim.jsonl, real.jsonl, mlp.json, mlp_ft.json, gp.json,
//   eval_policy.csv, eval_polar.csv, summary.json
PipelineResult run_all(const ExperimentConfig& cfg, const std::string& out_dir,
                       std::ostream* log = nullptr);

std::string tune_history_csv(const TuneResult& result);
std::string params_to_json(const CableParams& p, const std::string& config_hash);
CableParams params_from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace dyncable
