#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyncable/cablesim.hpp"

namespace dyncable {

struct TransitionMeta {
  std::uint64_t seed = 0;
  std::string params_hash;
  std::string sys_hash;
  double settle_time = 0.0;
};

// The unit of every dataset: one executed action and where the endpoint
// landed (HER-style relabeling of the realized endpoint as the target).
struct Transition {
  Action action;
  PolarPoint endpoint;
  PlanePoint endpoint_xy;
  TransitionMeta meta;
  bool invalid = false;  // blow-up rollouts; excluded from training
};

struct Dataset {
  std::string name;  // "tune", "sim", or "real"
  std::vector<Transition> transitions;
  int schema_version = 1;

  std::vector<const Transition*> valid() const {
    std::vector<const Transition*> out;
    for (const auto& t : transitions)
      if (!t.invalid) out.push_back(&t);
    return out;
  }
};

std::string params_hash(const CableParams& p);
std::string sys_hash(const SystemParams& s, const SimConfig& cfg);

// One rollout per action from reset_state. When `noise` is set, both the
// action and the initial state are perturbed per-transition (the simulated
// stand-in for physical stochasticity); the stored action is the commanded
// (unperturbed) one.
Dataset generate(const std::string& name, const std::vector<Action>& actions,
                 const CableParams& params, const SimConfig& cfg,
                 const SystemParams& sys,
                 const std::optional<NoiseSpec>& noise = std::nullopt,
                 unsigned workers = 1);

std::string dataset_to_jsonl(const Dataset& ds);
Dataset dataset_from_jsonl(const std::string& text);
void save(const Dataset& ds, const std::string& path);
Dataset load(const std::string& path);

// Seed-deterministic disjoint partition; fractions must sum to 1.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  double holdout_fraction, std::uint64_t seed);

}  // namespace dyncable
