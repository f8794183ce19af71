#include "dyncable/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dyncable/common.hpp"

namespace dyncable {

namespace {

double trace_error(const TrajectoryTrace& ref, const TrajectoryTrace& sim) {
  const std::size_t n = ref.waypoints.size();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // A short simulated trace holds its last waypoint.
    const PlanePoint& p = ref.waypoints[i];
    const PlanePoint& q =
        sim.waypoints.empty()
            ? PlanePoint{}
            : sim.waypoints[std::min(i, sim.waypoints.size() - 1)];
    sum += std::hypot(p.x - q.x, p.y - q.y);
  }
  return sum / static_cast<double>(n);
}

std::vector<double> per_reference_errors(const CableParams& params,
                                         const TuneProblem& pb,
                                         std::vector<double>* final_l2) {
  const std::size_t m = pb.references.size();
  std::vector<double> errs(m, 0.0);
  std::vector<double> finals(m, 0.0);
  const CableState start = reset_state(pb.sim_cfg, pb.sys);
  parallel_for(m, pb.workers, [&](std::size_t j) {
    const auto& [action, ref] = pb.references[j];
    try {
      const EndEffectorTrajectory traj = synthesize(action, pb.sys);
      const RolloutResult rr = rollout(start, traj, params, pb.sim_cfg, pb.sys);
      errs[j] = trace_error(ref, rr.trace);
      if (!ref.waypoints.empty()) {
        const PlanePoint& p = ref.waypoints.back();
        const PlanePoint q = endpoint_xy(rr.state);
        finals[j] = std::hypot(p.x - q.x, p.y - q.y);
      }
    } catch (const BlowUpError&) {
      errs[j] = 10.0 * pb.sim_cfg.rest_length_total;
      finals[j] = 10.0 * pb.sim_cfg.rest_length_total;
    }
  });
  if (final_l2) *final_l2 = finals;
  return errs;
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double objective(const CableParams& params, const TuneProblem& problem) {
  if (problem.references.empty())
    throw std::invalid_argument("objective: no reference trajectories");
  const std::vector<double> errs =
      per_reference_errors(params, problem, nullptr);
  return std::accumulate(errs.begin(), errs.end(), 0.0) /
         static_cast<double>(errs.size());
}

TuneResult tune(const TuneProblem& problem, const DEConfig& de) {
  std::vector<std::size_t> idx;  // masked parameter indices
  for (std::size_t i = 0; i < CableParams::kDim; ++i)
    if (problem.mask[i]) idx.push_back(i);
  if (idx.empty()) throw std::invalid_argument("tune: empty parameter mask");
  for (std::size_t i : idx)
    if (!(problem.bounds[i].first < problem.bounds[i].second))
      throw std::invalid_argument("tune: bounds lo < hi required");
  const std::size_t d = idx.size();
  const int np = de.population_size > 0 ? de.population_size
                                        : static_cast<int>(10 * d);
  if (np < 4) throw std::invalid_argument("tune: population_size >= 4");

  std::mt19937_64 rng(de.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto decode = [&](const std::vector<double>& x) {
    auto v = problem.base.to_vector();
    for (std::size_t k = 0; k < d; ++k) v[idx[k]] = x[k];
    CableParams p = CableParams::from_vector(v, problem.base);
    return p;
  };

  // Latin hypercube initialization: one sample per stratum per dimension,
  // independently shuffled.
  std::vector<std::vector<double>> pop(np, std::vector<double>(d));
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<int> perm(np);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto [lo, hi] = problem.bounds[idx[k]];
    for (int i = 0; i < np; ++i) {
      const double u = (perm[i] + unif(rng)) / np;
      pop[i][k] = lo + u * (hi - lo);
    }
  }

  auto evaluate = [&](const std::vector<std::vector<double>>& members) {
    std::vector<double> costs(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
      costs[i] = objective(decode(members[i]), problem);
    return costs;
  };

  std::vector<double> cost = evaluate(pop);
  const double penalty = 10.0 * problem.sim_cfg.rest_length_total;
  if (*std::min_element(cost.begin(), cost.end()) >= penalty)
    throw std::runtime_error(
        "tune: every initial candidate blew up; widen the parameter bounds");

  TuneResult res;
  auto record = [&](int gen) {
    const std::size_t best_i = static_cast<std::size_t>(
        std::min_element(cost.begin(), cost.end()) - cost.begin());
    const double mean =
        std::accumulate(cost.begin(), cost.end(), 0.0) / cost.size();
    res.history.push_back({gen, cost[best_i], mean});
    return best_i;
  };
  std::size_t best_i = record(0);

  for (int gen = 1; gen <= de.max_generations; ++gen) {
    const double f = de.f_min + (de.f_max - de.f_min) * unif(rng);
    std::vector<std::vector<double>> trials(np, std::vector<double>(d));
    for (int i = 0; i < np; ++i) {
      // Two distinct members, different from i and from each other.
      int r1, r2;
      do {
        r1 = static_cast<int>(unif(rng) * np) % np;
      } while (r1 == i);
      do {
        r2 = static_cast<int>(unif(rng) * np) % np;
      } while (r2 == i || r2 == r1);
      const std::size_t forced = static_cast<std::size_t>(unif(rng) * d) % d;
      for (std::size_t k = 0; k < d; ++k) {
        double v = pop[i][k];
        if (k == forced || unif(rng) < de.crossover_prob)
          v = pop[best_i][k] + f * (pop[r1][k] - pop[r2][k]);
        const auto [lo, hi] = problem.bounds[idx[k]];
        trials[i][k] = std::clamp(v, lo, hi);
      }
    }
    const std::vector<double> trial_cost = evaluate(trials);
    for (int i = 0; i < np; ++i) {
      if (trial_cost[i] <= cost[i]) {
        pop[i] = trials[i];
        cost[i] = trial_cost[i];
      }
    }
    best_i = record(gen);
    res.generations_run = gen;

    const double mean = res.history.back().mean;
    double var = 0.0;
    for (double c : cost) var += (c - mean) * (c - mean);
    const double rel_std = std::sqrt(var / np) / std::max(1e-300, mean);
    if (rel_std < de.convergence_rel_std) {
      res.converged = true;
      break;
    }
  }

  res.best = decode(pop[best_i]);
  res.best_objective = cost[best_i];
  return res;
}

ValidationReport validate(
    const CableParams& params,
    const std::vector<std::pair<Action, TrajectoryTrace>>& holdout,
    const SimConfig& cfg, const SystemParams& sys, unsigned workers) {
  if (holdout.empty()) throw std::invalid_argument("validate: empty holdout");
  TuneProblem pb;
  pb.references = holdout;
  pb.sim_cfg = cfg;
  pb.sys = sys;
  pb.workers = workers;
  std::vector<double> finals;
  const std::vector<double> errs = per_reference_errors(params, pb, &finals);
  ValidationReport rep;
  rep.eps_trajs = std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
  rep.median_final_l2 = median(finals);
  rep.eps_trajs_frac = rep.eps_trajs / cfg.rest_length_total;
  rep.median_final_l2_frac = rep.median_final_l2 / cfg.rest_length_total;
  return rep;
}

}  // namespace dyncable
