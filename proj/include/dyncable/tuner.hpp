#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dyncable/cablesim.hpp"

namespace dyncable {

struct TuneProblem {
  std::vector<std::pair<Action, TrajectoryTrace>> references;
  std::array<std::pair<double, double>, CableParams::kDim> bounds;
  std::array<bool, CableParams::kDim> mask{};
  CableParams base;  // values for unmasked parameters
  SimConfig sim_cfg;
  SystemParams sys;
  unsigned workers = 1;
};

struct DEConfig {
  int population_size = 0;  // 0 -> 10x masked dimension
  double crossover_prob = 0.7;
  double f_min = 0.5, f_max = 1.0;
  int max_generations = 60;
  // Stop when the relative std of population objectives drops below this.
  double convergence_rel_std = 0.01;
  std::uint64_t seed = 0;
};

// Mean over references of the mean 100 ms waypoint L2 distance between the
// reference endpoint trace and a rollout under `params`. Blow-ups return a
// 10x-cable-length penalty instead of failing the search.
double objective(const CableParams& params, const TuneProblem& problem);

struct TuneHistoryEntry {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
};

struct TuneResult {
  CableParams best;
  double best_objective = 0.0;
  std::vector<TuneHistoryEntry> history;
  int generations_run = 0;
  bool converged = false;
};

// best1bin Differential Evolution with Latin-hypercube initialization,
// per-generation F ~ U(f_min, f_max), binomial crossover with one forced
// index, greedy selection, clip-to-bounds. Seed-deterministic.
TuneResult tune(const TuneProblem& problem, const DEConfig& de);

struct ValidationReport {
  double median_final_l2 = 0.0;  // meters
  double eps_trajs = 0.0;        // meters
  double median_final_l2_frac = 0.0;  // fraction of cable length
  double eps_trajs_frac = 0.0;
};

ValidationReport validate(
    const CableParams& params,
    const std::vector<std::pair<Action, TrajectoryTrace>>& holdout,
    const SimConfig& cfg, const SystemParams& sys, unsigned workers = 1);

// Midpoint-interpolation median of a sample (used across reports).
double median(std::vector<double> v);

}  // namespace dyncable
