#include "dyncable/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "dyncable/common.hpp"
#include "json.hpp"

namespace dyncable {

namespace {

nlohmann::json sys_to_json(const SystemParams& s) {
  return {{"r0", s.r0},
          {"v_max", s.v_max},
          {"control_period", s.control_period},
          {"ee_height", s.ee_height},
          {"reset_y", s.reset_y},
          {"a_max", s.a_max},
          {"j_max", s.j_max},
          {"wrist_v_max", s.wrist_v_max},
          {"wrist_a_max", s.wrist_a_max},
          {"wrist_j_max", s.wrist_j_max}};
}

SystemParams sys_from_json(const nlohmann::json& j) {
  SystemParams s;
  s.r0 = j.at("r0");
  s.v_max = j.at("v_max");
  s.control_period = j.at("control_period");
  s.ee_height = j.at("ee_height");
  s.reset_y = j.at("reset_y");
  s.a_max = j.at("a_max");
  s.j_max = j.at("j_max");
  s.wrist_v_max = j.at("wrist_v_max");
  s.wrist_a_max = j.at("wrist_a_max");
  s.wrist_j_max = j.at("wrist_j_max");
  return s;
}

nlohmann::json sim_to_json(const SimConfig& c) {
  return {{"n_segments", c.n_segments},
          {"rest_length_total", c.rest_length_total},
          {"dt", c.dt},
          {"gravity", c.gravity},
          {"attach_lever", c.attach_lever},
          {"solver_iters", c.solver_iters},
          {"settle_ke", c.settle_ke},
          {"settle_hold", c.settle_hold},
          {"settle_timeout", c.settle_timeout},
          {"blowup_speed", c.blowup_speed}};
}

SimConfig sim_from_json(const nlohmann::json& j) {
  SimConfig c;
  c.n_segments = j.at("n_segments");
  c.rest_length_total = j.at("rest_length_total");
  c.dt = j.at("dt");
  c.gravity = j.at("gravity");
  c.attach_lever = j.at("attach_lever");
  c.solver_iters = j.at("solver_iters");
  c.settle_ke = j.at("settle_ke");
  c.settle_hold = j.at("settle_hold");
  c.settle_timeout = j.at("settle_timeout");
  c.blowup_speed = j.at("blowup_speed");
  return c;
}

nlohmann::json ws_to_json(const WorkspaceLimits& w) {
  return {{"r_max", w.r_max},
          {"r_c", w.r_c},
          {"y_min_base", w.y_min_base},
          {"y_min_gripper", w.y_min_gripper},
          {"table_width", w.table_width},
          {"table_depth", w.table_depth},
          {"theta_span_max", w.theta_span_max},
          {"cart_speed_cap", w.cart_speed_cap}};
}

WorkspaceLimits ws_from_json(const nlohmann::json& j) {
  WorkspaceLimits w;
  w.r_max = j.at("r_max");
  w.r_c = j.at("r_c");
  w.y_min_base = j.at("y_min_base");
  w.y_min_gripper = j.at("y_min_gripper");
  w.table_width = j.at("table_width");
  w.table_depth = j.at("table_depth");
  w.theta_span_max = j.at("theta_span_max");
  w.cart_speed_cap = j.at("cart_speed_cap");
  return w;
}

void log_line(std::ostream* log, const std::string& s) {
  if (log) *log << s << "\n" << std::flush;
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  // `workers` is a runtime knob and is deliberately left out so artifacts
  // are byte-identical regardless of parallelism.
  nlohmann::json j;
  j["schema_version"] = schema_version;
  j["scale"] = scale;
  j["seed"] = seed;
  j["sys"] = sys_to_json(sys);
  j["sim"] = sim_to_json(sim);
  j["ws"] = ws_to_json(ws);
  j["real_noise"] = {{"sigma_pos", real_noise.sigma_pos},
                     {"sigma_act", real_noise.sigma_act}};
  j["tune_grid"] = tune_grid;
  j["sim_grid"] = sim_grid;
  j["real_grid"] = real_grid;
  j["tune_train_fraction"] = tune_train_fraction;
  j["real_train_fraction"] = real_train_fraction;
  j["de"] = {{"population_size", de.population_size},
             {"crossover_prob", de.crossover_prob},
             {"f_min", de.f_min},
             {"f_max", de.f_max},
             {"max_generations", de.max_generations},
             {"convergence_rel_std", de.convergence_rel_std},
             {"seed", de.seed}};
  j["train"] = {{"learning_rate", train.learning_rate},
                {"finetune_learning_rate", train.finetune_learning_rate},
                {"batch_size", train.batch_size},
                {"epochs", train.epochs},
                {"seed", train.seed},
                {"validation_fraction", train.validation_fraction}};
  j["eval_trials"] = eval_trials;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ExperimentConfig c;
  c.schema_version = j.at("schema_version");
  if (c.schema_version != 1)
    throw std::runtime_error("ExperimentConfig: unsupported schema_version");
  c.scale = j.at("scale");
  c.seed = j.at("seed");
  c.sys = sys_from_json(j.at("sys"));
  c.sim = sim_from_json(j.at("sim"));
  c.ws = ws_from_json(j.at("ws"));
  c.real_noise = {j.at("real_noise").at("sigma_pos"),
                  j.at("real_noise").at("sigma_act")};
  c.tune_grid = j.at("tune_grid").get<std::vector<int>>();
  c.sim_grid = j.at("sim_grid").get<std::vector<int>>();
  c.real_grid = j.at("real_grid").get<std::vector<int>>();
  c.tune_train_fraction = j.at("tune_train_fraction");
  c.real_train_fraction = j.at("real_train_fraction");
  const auto& d = j.at("de");
  c.de.population_size = d.at("population_size");
  c.de.crossover_prob = d.at("crossover_prob");
  c.de.f_min = d.at("f_min");
  c.de.f_max = d.at("f_max");
  c.de.max_generations = d.at("max_generations");
  c.de.convergence_rel_std = d.at("convergence_rel_std");
  c.de.seed = d.at("seed");
  const auto& t = j.at("train");
  c.train.learning_rate = t.at("learning_rate");
  c.train.finetune_learning_rate = t.at("finetune_learning_rate");
  c.train.batch_size = t.at("batch_size");
  c.train.epochs = t.at("epochs");
  c.train.seed = t.at("seed");
  c.train.validation_fraction = t.at("validation_fraction");
  c.eval_trials = j.at("eval_trials");
  return c;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a(to_json())); }

ExperimentConfig ExperimentConfig::desk(std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  c.de.seed = seed;
  c.de.population_size = 12;
  c.de.max_generations = 30;
  c.train.seed = seed;
  c.train.epochs = 600;
  return c;
}

ExperimentConfig ExperimentConfig::full(std::uint64_t seed) {
  ExperimentConfig c = desk(seed);
  c.scale = "full";
  c.tune_grid = {8, 6, 5};
  c.sim_grid = {14, 14, 7, 5};
  c.real_grid = {6, 5, 3, 3};
  c.de.population_size = 0;  // 10x masked dimension
  c.de.max_generations = 150;
  c.eval_trials = 10;
  return c;
}

std::array<std::pair<double, double>, CableParams::kDim>
default_param_bounds() {
  return {{{0.0, 0.0},      // twist stiffness (inert)
           {0.0, 5.0},      // bend stiffness
           {0.005, 0.1},    // mass per segment
           {0.05, 1.0},     // lateral friction
           {0.0, 0.0},      // spinning friction (inert)
           {0.0, 0.0},      // rolling friction (inert)
           {1.0, 5.0},      // endpoint mass scale
           {0.0, 2.0},      // linear damping
           {0.0, 2.0},      // angular damping
           {0.05, 1.0}}};   // worksurface friction
}

CableParams ground_truth_params() {
  CableParams p;
  p.bend_stiffness = 1.2;
  p.lateral_friction = 0.15;
  p.linear_damping = 0.6;
  return p;
}

std::array<bool, CableParams::kDim> tuned_param_mask() {
  std::array<bool, CableParams::kDim> m{};
  m[1] = true;  // bend stiffness
  m[3] = true;  // lateral friction
  m[7] = true;  // linear damping
  return m;
}

TuneStage run_tuning(const ExperimentConfig& cfg, std::ostream* log) {
  const std::vector<Action> actions =
      grid_sample_actions(cfg.tune_grid, ActionBounds{}, ActionSet::A1,
                          cfg.sys, cfg.ws);
  if (actions.size() < 8)
    throw std::runtime_error("run_tuning: tuning grid too small after limits");
  log_line(log, "tuning references: " + std::to_string(actions.size()));

  const CableParams truth = ground_truth_params();
  std::vector<std::pair<Action, TrajectoryTrace>> refs(actions.size());
  const CableState start = reset_state(cfg.sim, cfg.sys);
  parallel_for(actions.size(), cfg.workers, [&](std::size_t i) {
    const RolloutResult rr = rollout(start, synthesize(actions[i], cfg.sys),
                                     truth, cfg.sim, cfg.sys);
    refs[i] = {actions[i], rr.trace};
  });

  std::vector<std::size_t> order(refs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed ^ 0x74756e65u);  // tuning split stream
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(cfg.tune_train_fraction * refs.size()));

  TuneProblem problem;
  problem.bounds = default_param_bounds();
  problem.mask = tuned_param_mask();
  problem.base = CableParams{};
  problem.sim_cfg = cfg.sim;
  problem.sys = cfg.sys;
  problem.workers = cfg.workers;
  std::vector<std::pair<Action, TrajectoryTrace>> holdout;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k < n_train)
      problem.references.push_back(refs[order[k]]);
    else
      holdout.push_back(refs[order[k]]);
  }
  log_line(log, "tuning split: " + std::to_string(problem.references.size()) +
                    " train / " + std::to_string(holdout.size()) + " holdout");

  TuneStage stage;
  stage.result = tune(problem, cfg.de);
  stage.tuned = stage.result.best;
  stage.holdout = validate(stage.tuned, holdout, cfg.sim, cfg.sys, cfg.workers);
  stage.holdout_default =
      validate(CableParams{}, holdout, cfg.sim, cfg.sys, cfg.workers);
  log_line(log, "tuned objective: " + std::to_string(stage.result.best_objective) +
                    ", holdout eps: " + std::to_string(stage.holdout.eps_trajs) +
                    " m (defaults: " +
                    std::to_string(stage.holdout_default.eps_trajs) + " m)");
  return stage;
}

DataStage run_data(const ExperimentConfig& cfg, const CableParams& params,
                   std::ostream* log) {
  DataStage stage;
  const std::vector<Action> sim_actions =
      grid_sample_actions(cfg.sim_grid, ActionBounds{}, ActionSet::A2,
                          cfg.sys, cfg.ws);
  SimConfig sim_cfg = cfg.sim;
  sim_cfg.seed = cfg.seed;
  stage.sim = generate("sim", sim_actions, params, sim_cfg, cfg.sys,
                       std::nullopt, cfg.workers);
  log_line(log, "sim dataset: " + std::to_string(stage.sim.transitions.size()));

  const std::vector<Action> real_actions =
      grid_sample_actions(cfg.real_grid, ActionBounds{}, ActionSet::A2,
                          cfg.sys, cfg.ws);
  SimConfig real_cfg = cfg.sim;
  real_cfg.seed = cfg.seed + 1000003;
  stage.real = generate("real", real_actions, ground_truth_params(), real_cfg,
                        cfg.sys, cfg.real_noise, cfg.workers);
  log_line(log, "real dataset: " + std::to_string(stage.real.transitions.size()));

  std::tie(stage.real_train, stage.real_holdout) =
      split(stage.real, cfg.real_train_fraction,
            1.0 - cfg.real_train_fraction, cfg.seed ^ 0x7265616cu);
  return stage;
}

ModelStage run_training(const ExperimentConfig& cfg, const DataStage& data,
                        std::ostream* log) {
  ModelStage stage;
  stage.mlp = train_mlp(data.sim, cfg.train);
  log_line(log, "mlp val loss: " + std::to_string(stage.mlp.final_val_loss()));
  stage.mlp_ft = finetune_mlp(stage.mlp, data.real_train, cfg.train);
  log_line(log,
           "finetuned val loss: " + std::to_string(stage.mlp_ft.final_val_loss()));
  stage.gp = train_gp(data.sim, cfg.train.seed);
  log_line(log, "gp length scale: " + std::to_string(stage.gp.length_scale()));
  return stage;
}

EvalStage run_eval(const ExperimentConfig& cfg, const CableParams& params,
                   const MLPForward& model, std::ostream* log) {
  EvalStage stage;
  stage.candidates = grid_sample_actions(cfg.sim_grid, ActionBounds{},
                                         ActionSet::A2, cfg.sys, cfg.ws);
  const CandidatePool pool = build_pool(
      stage.candidates, [&](const Action& a) { return model.predict(a); });

  SimConfig sim_cfg = cfg.sim;
  sim_cfg.seed = cfg.seed + 2000003;
  const std::vector<PolarPoint> targets = default_target_set(cfg.ws);
  stage.policy = evaluate(
      make_policy_executor(pool, params, sim_cfg, cfg.sys, cfg.ws,
                           cfg.real_noise),
      targets, cfg.eval_trials, cfg.ws, sim_cfg.seed, cfg.workers);
  log_line(log, "policy median: " + std::to_string(stage.policy.median) + " m");
  stage.polar_cast = evaluate(
      make_polar_cast_executor(params, sim_cfg, cfg.sys, cfg.ws,
                               cfg.real_noise),
      targets, cfg.eval_trials, cfg.ws, sim_cfg.seed, cfg.workers);
  log_line(log, "polar-cast median: " + std::to_string(stage.polar_cast.median) +
                    " m (rejected " +
                    std::to_string(stage.polar_cast.rejected_count) + ")");
  return stage;
}

PipelineResult run_all(const ExperimentConfig& cfg, const std::string& out_dir,
                       std::ostream* log) {
  std::filesystem::create_directories(out_dir);
  const std::string h = cfg.hash();
  write_text_file(out_dir + "/config.json", cfg.to_json());

  PipelineResult res;
  res.tune = run_tuning(cfg, log);
  write_text_file(out_dir + "/tuned_params.json",
                  params_to_json(res.tune.tuned, h));
  write_text_file(out_dir + "/tune_history.csv",
                  tune_history_csv(res.tune.result));

  res.data = run_data(cfg, res.tune.tuned, log);
  write_text_file(out_dir + "/sim.jsonl", dataset_to_jsonl(res.data.sim));
  write_text_file(out_dir + "/real.jsonl", dataset_to_jsonl(res.data.real));

  res.models = run_training(cfg, res.data, log);
  write_text_file(out_dir + "/mlp.json", res.models.mlp.to_json());
  write_text_file(out_dir + "/mlp_ft.json", res.models.mlp_ft.to_json());
  write_text_file(out_dir + "/gp.json", res.models.gp.to_json());

  res.eval = run_eval(cfg, res.tune.tuned, res.models.mlp_ft, log);
  write_text_file(out_dir + "/eval_policy.csv",
                  eval_report_to_csv(res.eval.policy));
  write_text_file(out_dir + "/eval_polar.csv",
                  eval_report_to_csv(res.eval.polar_cast));

  nlohmann::json summary;
  summary["schema_version"] = 1;
  summary["config_hash"] = h;
  summary["tune"] = {{"best_objective", res.tune.result.best_objective},
                     {"generations", res.tune.result.generations_run},
                     {"converged", res.tune.result.converged},
                     {"holdout_eps_trajs", res.tune.holdout.eps_trajs},
                     {"holdout_eps_trajs_frac", res.tune.holdout.eps_trajs_frac},
                     {"default_eps_trajs", res.tune.holdout_default.eps_trajs}};
  summary["data"] = {{"sim", res.data.sim.transitions.size()},
                     {"real", res.data.real.transitions.size()}};
  summary["models"] = {{"mlp_val_loss", res.models.mlp.final_val_loss()},
                       {"mlp_ft_val_loss", res.models.mlp_ft.final_val_loss()},
                       {"gp_length_scale", res.models.gp.length_scale()}};
  summary["eval"] = {
      {"policy", nlohmann::json::parse(eval_report_summary_json(res.eval.policy))},
      {"polar_cast",
       nlohmann::json::parse(eval_report_summary_json(res.eval.polar_cast))}};
  write_text_file(out_dir + "/summary.json", summary.dump(2));
  log_line(log, "artifacts written to " + out_dir);
  return res;
}

std::string tune_history_csv(const TuneResult& result) {
  std::ostringstream out;
  out << "generation,best,mean\n";
  char buf[96];
  for (const TuneHistoryEntry& e : result.history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", e.generation, e.best,
                  e.mean);
    out << buf;
  }
  return out.str();
}

std::string params_to_json(const CableParams& p,
                           const std::string& config_hash) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config_hash"] = config_hash;
  const auto v = p.to_vector();
  for (std::size_t i = 0; i < CableParams::kDim; ++i)
    j["params"][CableParams::names()[i]] = v[i];
  return j.dump(2);
}

CableParams params_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("schema_version") != 1)
    throw std::runtime_error("params_from_json: unsupported schema_version");
  std::array<double, CableParams::kDim> v{};
  for (std::size_t i = 0; i < CableParams::kDim; ++i)
    v[i] = j.at("params").at(CableParams::names()[i]).get<double>();
  return CableParams::from_vector(v);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dyncable
