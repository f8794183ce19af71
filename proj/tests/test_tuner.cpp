#include <cmath>

#include "doctest.h"
#include "dyncable/pipeline.hpp"
#include "dyncable/tuner.hpp"

using namespace dyncable;

namespace {

const SystemParams kSys;
const SimConfig kCfg;

// Short, fast reference motions keep this suite quick.
std::vector<std::pair<Action, TrajectoryTrace>> make_references(
    const CableParams& truth) {
  const std::vector<Action> actions = {
      {-0.5, 0.5, 0.7, std::nullopt},  {-0.8, 0.4, 0.55, std::nullopt},
      {-0.3, 0.9, 0.8, std::nullopt},  {-0.7, 0.7, 0.65, std::nullopt},
      {-0.4, 0.6, 0.75, std::nullopt}, {-0.6, 0.3, 0.6, std::nullopt},
  };
  std::vector<std::pair<Action, TrajectoryTrace>> refs;
  const CableState start = reset_state(kCfg, kSys);
  for (const Action& a : actions) {
    const RolloutResult rr =
        rollout(start, synthesize(a, kSys), truth, kCfg, kSys);
    refs.push_back({a, rr.trace});
  }
  return refs;
}

TuneProblem make_problem(const std::vector<std::pair<Action, TrajectoryTrace>>&
                             refs) {
  TuneProblem pb;
  pb.references = refs;
  pb.bounds = default_param_bounds();
  pb.mask = {};
  pb.mask[1] = true;  // bend stiffness only
  pb.base = CableParams{};
  pb.sim_cfg = kCfg;
  pb.sys = kSys;
  pb.workers = 1;
  return pb;
}

}  // namespace

TEST_CASE("median conventions") {
  CHECK(median({3.0}) == 3.0);
  CHECK(median({1.0, 2.0}) == doctest::Approx(1.5));
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
  CHECK(median({}) == 0.0);
}

TEST_CASE("objective vanishes for the generating parameters") {
  CableParams truth;
  truth.bend_stiffness = 0.9;
  const auto refs = make_references(truth);
  TuneProblem pb = make_problem(refs);
  CHECK(objective(truth, pb) < 1e-12);
  CableParams off = truth;
  off.bend_stiffness = 3.0;
  CHECK(objective(off, pb) > 1e-4);
  TuneProblem empty = pb;
  empty.references.clear();
  CHECK_THROWS_AS(objective(truth, empty), std::invalid_argument);
}

TEST_CASE("validation is self-consistent for the generating parameters") {
  CableParams truth;
  truth.bend_stiffness = 1.4;
  truth.lateral_friction = 0.2;
  const auto refs = make_references(truth);
  const ValidationReport rep = validate(truth, refs, kCfg, kSys);
  CHECK(rep.eps_trajs < 1e-9);
  // The last trace sample lands up to 100 ms before full settling, so the
  // endpoint may creep a little past it even for identical parameters.
  CHECK(rep.median_final_l2 < 1e-3);
  CHECK(rep.eps_trajs_frac == doctest::Approx(rep.eps_trajs / 0.62));
  CHECK_THROWS_AS(validate(truth, {}, kCfg, kSys), std::invalid_argument);
}

TEST_CASE("differential evolution recovers a masked parameter") {
  CableParams truth;
  truth.bend_stiffness = 1.1;
  const auto refs = make_references(truth);
  TuneProblem pb = make_problem(refs);
  DEConfig de;
  de.population_size = 8;
  de.max_generations = 12;
  de.seed = 3;
  const TuneResult res = tune(pb, de);
  CHECK(res.best_objective < objective(CableParams{}, pb));
  CHECK(res.best_objective < 5e-3);
  CHECK(std::abs(res.best.bend_stiffness - truth.bend_stiffness) < 0.5);
  // Unmasked parameters stay at the base values.
  CHECK(res.best.lateral_friction == CableParams{}.lateral_friction);
  CHECK(res.best.mass_per_segment == CableParams{}.mass_per_segment);
  REQUIRE(!res.history.empty());
  CHECK(res.history.front().generation == 0);
  // Best objective never worsens across generations (greedy selection).
  for (std::size_t i = 1; i < res.history.size(); ++i)
    CHECK(res.history[i].best <= res.history[i - 1].best + 1e-15);
}

TEST_CASE("tuning is seed-deterministic") {
  CableParams truth;
  truth.bend_stiffness = 0.7;
  const auto refs = make_references(truth);
  TuneProblem pb = make_problem(refs);
  DEConfig de;
  de.population_size = 6;
  de.max_generations = 4;
  de.seed = 11;
  const TuneResult a = tune(pb, de);
  const TuneResult b = tune(pb, de);
  CHECK(a.best.to_vector() == b.best.to_vector());
  CHECK(a.best_objective == b.best_objective);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].best == b.history[i].best);
    CHECK(a.history[i].mean == b.history[i].mean);
  }
}

TEST_CASE("tune input validation") {
  CableParams truth;
  const auto refs = make_references(truth);
  TuneProblem pb = make_problem(refs);
  DEConfig de;
  de.population_size = 3;
  CHECK_THROWS_AS(tune(pb, de), std::invalid_argument);
  TuneProblem no_mask = pb;
  no_mask.mask = {};
  CHECK_THROWS_AS(tune(no_mask, DEConfig{}), std::invalid_argument);
  TuneProblem bad_bounds = pb;
  bad_bounds.bounds[1] = {2.0, 1.0};
  CHECK_THROWS_AS(tune(bad_bounds, DEConfig{}), std::invalid_argument);
}
