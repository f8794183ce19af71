#include "dyncable/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "dyncable/common.hpp"
#include "json.hpp"

namespace dyncable {

namespace {

nlohmann::json action_to_json(const Action& a) {
  nlohmann::json j = {{"theta1", a.theta1}, {"theta2", a.theta2}, {"r2", a.r2}};
  if (a.psi) j["psi"] = *a.psi;
  return j;
}

Action action_from_json(const nlohmann::json& j) {
  Action a;
  a.theta1 = j.at("theta1").get<double>();
  a.theta2 = j.at("theta2").get<double>();
  a.r2 = j.at("r2").get<double>();
  if (j.contains("psi")) a.psi = j.at("psi").get<double>();
  return a;
}

}  // namespace

std::string params_hash(const CableParams& p) {
  const auto v = p.to_vector();
  return hex64(fnv1a(v.data(), sizeof(double) * v.size()));
}

std::string sys_hash(const SystemParams& s, const SimConfig& cfg) {
  const double fields[] = {s.r0,        s.v_max,   s.control_period,
                           s.ee_height, s.reset_y, s.a_max,
                           s.j_max,     s.wrist_v_max,
                           static_cast<double>(cfg.n_segments),
                           cfg.rest_length_total, cfg.dt, cfg.attach_lever};
  return hex64(fnv1a(fields, sizeof(fields)));
}

Dataset generate(const std::string& name, const std::vector<Action>& actions,
                 const CableParams& params, const SimConfig& cfg,
                 const SystemParams& sys,
                 const std::optional<NoiseSpec>& noise, unsigned workers) {
  if (actions.empty()) throw std::invalid_argument("generate: no actions");
  Dataset ds;
  ds.name = name;
  ds.transitions.resize(actions.size());
  const CableState base_state = reset_state(cfg, sys);
  const std::string ph = params_hash(params);
  const std::string sh = sys_hash(sys, cfg);
  parallel_for(actions.size(), workers, [&](std::size_t i) {
    Transition& tr = ds.transitions[i];
    tr.action = actions[i];
    tr.meta.seed = cfg.seed + i;
    tr.meta.params_hash = ph;
    tr.meta.sys_hash = sh;
    Action exec = actions[i];
    CableState start = base_state;
    if (noise) {
      exec = perturb(exec, *noise, tr.meta.seed);
      start = perturb(start, *noise, tr.meta.seed);
    }
    try {
      const EndEffectorTrajectory traj = synthesize(exec, sys);
      const RolloutResult rr = rollout(start, traj, params, cfg, sys);
      tr.endpoint_xy = endpoint_xy(rr.state);
      tr.endpoint = endpoint_polar(rr.state);
      tr.meta.settle_time = rr.settle_time;
    } catch (const BlowUpError&) {
      tr.invalid = true;
    }
  });
  return ds;
}

std::string dataset_to_jsonl(const Dataset& ds) {
  if (ds.transitions.empty())
    throw std::invalid_argument("dataset_to_jsonl: empty dataset");
  std::string out;
  nlohmann::json header = {{"schema_version", ds.schema_version},
                           {"name", ds.name},
                           {"count", ds.transitions.size()}};
  out += header.dump();
  out += '\n';
  for (const Transition& t : ds.transitions) {
    nlohmann::json j = {
        {"action", action_to_json(t.action)},
        {"endpoint", {{"r", t.endpoint.r}, {"theta", t.endpoint.theta}}},
        {"endpoint_xy", {{"x", t.endpoint_xy.x}, {"y", t.endpoint_xy.y}}},
        {"meta",
         {{"seed", t.meta.seed},
          {"params_hash", t.meta.params_hash},
          {"sys_hash", t.meta.sys_hash},
          {"settle_time", t.meta.settle_time}}}};
    if (t.invalid) j["invalid"] = true;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Dataset dataset_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("dataset parse error at line " +
                             std::to_string(lineno) + ": " + why);
  };
  if (!std::getline(in, line)) fail("empty file");
  ++lineno;
  Dataset ds;
  try {
    const auto header = nlohmann::json::parse(line);
    ds.schema_version = header.at("schema_version").get<int>();
    ds.name = header.at("name").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  if (ds.schema_version != 1) fail("unsupported schema_version");
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Transition t;
    try {
      const auto j = nlohmann::json::parse(line);
      t.action = action_from_json(j.at("action"));
      t.endpoint = {j.at("endpoint").at("r").get<double>(),
                    j.at("endpoint").at("theta").get<double>()};
      t.endpoint_xy = {j.at("endpoint_xy").at("x").get<double>(),
                       j.at("endpoint_xy").at("y").get<double>()};
      const auto& m = j.at("meta");
      t.meta.seed = m.at("seed").get<std::uint64_t>();
      t.meta.params_hash = m.at("params_hash").get<std::string>();
      t.meta.sys_hash = m.at("sys_hash").get<std::string>();
      t.meta.settle_time = m.at("settle_time").get<double>();
      t.invalid = j.value("invalid", false);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    if (!t.invalid) {
      const PlanePoint p = polar_to_cartesian(t.endpoint);
      if (std::hypot(p.x - t.endpoint_xy.x, p.y - t.endpoint_xy.y) > 1e-9)
        fail("endpoint_xy inconsistent with endpoint");
    }
    ds.transitions.push_back(t);
  }
  if (ds.transitions.empty()) fail("dataset has no transitions");
  return ds;
}

void save(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << dataset_to_jsonl(ds);
}

Dataset load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return dataset_from_jsonl(ss.str());
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  double holdout_fraction,
                                  std::uint64_t seed) {
  if (std::abs(train_fraction + holdout_fraction - 1.0) > 1e-9)
    throw std::invalid_argument("split: fractions must sum to 1");
  std::vector<std::size_t> order(ds.transitions.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(train_fraction * ds.transitions.size()));
  Dataset train, holdout;
  train.name = ds.name;
  holdout.name = ds.name;
  train.schema_version = holdout.schema_version = ds.schema_version;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_train ? train : holdout)
        .transitions.push_back(ds.transitions[order[k]]);
  }
  return {train, holdout};
}

}  // namespace dyncable
