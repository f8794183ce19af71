// Command-line front end for the cable manipulation pipeline.
//
// Exit codes: 0 success, 2 usage error, 3 I/O or validation error,
// 4 simulation blow-up.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "dyncable/analysis.hpp"
#include "dyncable/pipeline.hpp"
#include "json.hpp"

using namespace dyncable;

namespace {

ExperimentConfig make_config(const std::string& scale, std::uint64_t seed,
                             unsigned workers,
                             const std::string& config_path) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = ExperimentConfig::from_json(read_text_file(config_path));
  } else if (scale == "full") {
    cfg = ExperimentConfig::full(seed);
  } else {
    cfg = ExperimentConfig::desk(seed);
  }
  if (config_path.empty()) cfg.seed = seed;
  cfg.workers = workers;
  return cfg;
}

CableParams load_params(const std::string& path) {
  if (path.empty()) return CableParams{};
  return params_from_json(read_text_file(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic cable manipulation pipeline"};
  app.require_subcommand(1);

  std::string scale = "desk", config_path, params_path, out_dir = "out";
  std::uint64_t seed = 0;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--scale", scale, "desk or full")
      ->check(CLI::IsMember({"desk", "full"}));
  app.add_option("--config", config_path, "experiment config JSON");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads")
      ->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "full pipeline: tune, data, train, eval");
  run->add_option("--out", out_dir, "artifact directory");

  auto* sim = app.add_subcommand("simulate", "roll out one action");
  double theta1 = 0.0, theta2 = 0.0, r2 = 0.6;
  std::optional<double> psi;
  std::string trace_path;
  sim->add_option("--theta1", theta1)->required();
  sim->add_option("--theta2", theta2)->required();
  sim->add_option("--r2", r2)->required();
  sim->add_option("--psi", psi, "wrist target (action set A2)");
  sim->add_option("--params", params_path, "cable parameter JSON");
  sim->add_option("--trace", trace_path, "write endpoint trace CSV here");

  auto* tune_cmd = app.add_subcommand("tune", "fit cable parameters");
  tune_cmd->add_option("--out", out_dir, "artifact directory");

  auto* gen = app.add_subcommand("gen-data", "generate transition datasets");
  gen->add_option("--params", params_path, "cable parameter JSON");
  gen->add_option("--out", out_dir, "artifact directory");

  auto* train_cmd = app.add_subcommand("train", "train forward models");
  std::string sim_data, real_data, model_kind = "mlp";
  train_cmd->add_option("--sim", sim_data, "sim dataset JSONL")->required();
  train_cmd->add_option("--real", real_data, "real dataset JSONL (finetune)");
  train_cmd->add_option("--model", model_kind, "mlp or gp")
      ->check(CLI::IsMember({"mlp", "gp"}));
  train_cmd->add_option("--out", out_dir, "artifact directory");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate the argmin policy");
  std::string model_path;
  bool baseline = false;
  eval_cmd->add_option("--model", model_path, "forward model JSON")->required();
  eval_cmd->add_option("--params", params_path, "cable parameter JSON");
  eval_cmd->add_flag("--baseline", baseline, "also run the polar-cast baseline");
  eval_cmd->add_option("--out", out_dir, "artifact directory");

  auto* cov = app.add_subcommand("coverage", "alpha-shape endpoint coverage");
  std::string data_path, svg_path;
  cov->add_option("--data", data_path, "dataset JSONL")->required();
  cov->add_option("--svg", svg_path, "write a rendering here");

  auto* rep = app.add_subcommand("repeat", "endpoint repeatability vs noise");
  int trials = 5;
  double sigma_pos = 0.005, sigma_act = 0.01;
  rep->add_option("--params", params_path, "cable parameter JSON");
  rep->add_option("--trials", trials)->check(CLI::PositiveNumber);
  rep->add_option("--sigma-pos", sigma_pos, "state noise, meters");
  rep->add_option("--sigma-act", sigma_act, "action noise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ExperimentConfig cfg = make_config(scale, seed, workers, config_path);

    if (run->parsed()) {
      run_all(cfg, out_dir, &std::cerr);
      return 0;
    }

    if (sim->parsed()) {
      Action a{theta1, theta2, r2, psi};
      const LimitCheck lc = check_limits(a, cfg.sys, cfg.ws);
      if (!lc.ok) {
        std::cerr << "action violates limits: " << lc.reason << "\n";
        return 3;
      }
      const CableParams params = load_params(params_path);
      const RolloutResult rr =
          rollout(reset_state(cfg.sim, cfg.sys), synthesize(a, cfg.sys),
                  params, cfg.sim, cfg.sys);
      if (!trace_path.empty())
        write_text_file(trace_path, trace_to_csv(rr.trace));
      const PlanePoint e = endpoint_xy(rr.state);
      const PolarPoint p = endpoint_polar(rr.state);
      nlohmann::json j = {{"x", e.x},
                          {"y", e.y},
                          {"r", p.r},
                          {"theta", p.theta},
                          {"settle_time", rr.settle_time}};
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (tune_cmd->parsed()) {
      std::filesystem::create_directories(out_dir);
      const TuneStage stage = run_tuning(cfg, &std::cerr);
      write_text_file(out_dir + "/tuned_params.json",
                      params_to_json(stage.tuned, cfg.hash()));
      write_text_file(out_dir + "/tune_history.csv",
                      tune_history_csv(stage.result));
      nlohmann::json j = {{"best_objective", stage.result.best_objective},
                          {"holdout_eps_trajs", stage.holdout.eps_trajs},
                          {"holdout_eps_trajs_frac", stage.holdout.eps_trajs_frac},
                          {"default_eps_trajs", stage.holdout_default.eps_trajs},
                          {"converged", stage.result.converged},
                          {"generations", stage.result.generations_run}};
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (gen->parsed()) {
      std::filesystem::create_directories(out_dir);
      const DataStage stage = run_data(cfg, load_params(params_path), &std::cerr);
      write_text_file(out_dir + "/sim.jsonl", dataset_to_jsonl(stage.sim));
      write_text_file(out_dir + "/real.jsonl", dataset_to_jsonl(stage.real));
      return 0;
    }

    if (train_cmd->parsed()) {
      std::filesystem::create_directories(out_dir);
      const Dataset ds = load(sim_data);
      if (model_kind == "gp") {
        const GPForward gp = train_gp(ds, cfg.train.seed);
        write_text_file(out_dir + "/gp.json", gp.to_json());
      } else {
        MLPForward mlp = train_mlp(ds, cfg.train);
        write_text_file(out_dir + "/mlp.json", mlp.to_json());
        if (!real_data.empty()) {
          const MLPForward ft = finetune_mlp(mlp, load(real_data), cfg.train);
          write_text_file(out_dir + "/mlp_ft.json", ft.to_json());
        }
      }
      return 0;
    }

    if (eval_cmd->parsed()) {
      std::filesystem::create_directories(out_dir);
      const std::string text = read_text_file(model_path);
      const CableParams params = load_params(params_path);
      const std::vector<Action> candidates = grid_sample_actions(
          cfg.sim_grid, ActionBounds{}, ActionSet::A2, cfg.sys, cfg.ws);
      const MLPForward mlp = MLPForward::from_json(text);
      const CandidatePool pool = build_pool(
          candidates, [&](const Action& a) { return mlp.predict(a); });
      const std::vector<PolarPoint> targets = default_target_set(cfg.ws);
      const EvalReport report = evaluate(
          make_policy_executor(pool, params, cfg.sim, cfg.sys, cfg.ws,
                               cfg.real_noise),
          targets, cfg.eval_trials, cfg.ws, cfg.seed, cfg.workers);
      write_text_file(out_dir + "/eval_policy.csv", eval_report_to_csv(report));
      std::cout << eval_report_summary_json(report) << "\n";
      if (baseline) {
        const EvalReport base = evaluate(
            make_polar_cast_executor(params, cfg.sim, cfg.sys, cfg.ws,
                                     cfg.real_noise),
            targets, cfg.eval_trials, cfg.ws, cfg.seed, cfg.workers);
        write_text_file(out_dir + "/eval_polar.csv", eval_report_to_csv(base));
        std::cout << eval_report_summary_json(base) << "\n";
      }
      return 0;
    }

    if (cov->parsed()) {
      const Dataset ds = load(data_path);
      const CoverageResult res =
          coverage(dataset_endpoints(ds), cfg.ws, cfg.sys);
      if (!svg_path.empty())
        write_text_file(svg_path, coverage_svg(res, cfg.ws, cfg.sys, true));
      nlohmann::json j = {{"area_m2", res.area},
                          {"raw_area_m2", res.raw_area},
                          {"alpha", res.alpha},
                          {"points", res.point_count},
                          {"triangles", res.triangles.size()}};
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (rep->parsed()) {
      const CableParams params = load_params(params_path);
      const std::vector<Action> actions = grid_sample_actions(
          {3, 3, 2, 2}, ActionBounds{}, ActionSet::A2, cfg.sys, cfg.ws);
      const NoiseSpec noise{sigma_pos, sigma_act};
      const CableState start = reset_state(cfg.sim, cfg.sys);
      std::vector<std::vector<PlanePoint>> groups(actions.size());
      for (std::size_t i = 0; i < actions.size(); ++i) {
        for (int t = 0; t < trials; ++t) {
          const std::uint64_t s = cfg.seed + i * trials + t;
          try {
            const RolloutResult rr = rollout(
                perturb(start, noise, s),
                synthesize(perturb(actions[i], noise, s), cfg.sys), params,
                cfg.sim, cfg.sys);
            groups[i].push_back(endpoint_xy(rr.state));
          } catch (const BlowUpError&) {
          }
        }
      }
      const RepeatabilityResult res = repeatability(groups, cfg.ws);
      nlohmann::json j = {{"mean_std_m", res.mean_std},
                          {"targets_used", res.stds.size()},
                          {"targets_excluded", res.excluded_targets.size()}};
      std::cout << j.dump() << "\n";
      return 0;
    }
  } catch (const BlowUpError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
