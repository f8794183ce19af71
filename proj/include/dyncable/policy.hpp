#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dyncable/cablesim.hpp"
#include "dyncable/models.hpp"

namespace dyncable {

// Candidate actions with their forward-model predictions, all canonical
// (right-side, theta1 < 0, theta2 > 0).
struct CandidatePool {
  std::vector<Action> actions;
  std::vector<PlanePoint> predictions;
};

CandidatePool build_pool(
    const std::vector<Action>& actions,
    const std::function<PlanePoint(const Action&)>& model);

struct Selection {
  Action action;
  PlanePoint predicted;
  double predicted_error = 0.0;  // meters
};

// argmin over the pool of the distance between prediction and the target in
// Cartesian space (ties broken by lowest index); left-side targets are
// solved canonically and the selected action mirrored.
Selection select(const PolarPoint& target, const CandidatePool& pool,
                 const WorkspaceLimits& ws);

struct PolarCast {
  bool rejected = false;
  std::string reason;
  double cast_radius = 0.0;    // r_max + r_c
  double pull_distance = 0.0;  // r_max + r_c - r_d
  double theta = 0.0;
  EndEffectorTrajectory pull;  // slow kinematic pull toward the base
};

// Analytic baseline: cast to full extension at the target angle, then pull
// back radially at the quasistatic pull speed. Rejects targets whose
// required gripper poses dip below the base-table clearance.
PolarCast polar_cast(const PolarPoint& target, const WorkspaceLimits& ws,
                     const SimConfig& cfg, const SystemParams& sys,
                     double pull_speed = 0.1);

// Executes a polar cast in the simulator: cable laid fully extended along
// the cast angle, then the pull trajectory is rolled out.
PlanePoint run_polar_cast(const PolarCast& cast, const CableParams& params,
                          const SimConfig& cfg, const SystemParams& sys,
                          const std::optional<NoiseSpec>& noise = std::nullopt,
                          std::uint64_t seed = 0);

struct EvalTrial {
  int target_index = 0;
  int trial = 0;
  PolarPoint target;
  PlanePoint realized;
  double distance = 0.0;  // meters; meaningless when rejected
  bool off_table = false;
  bool rejected = false;
};

struct EvalReport {
  std::vector<EvalTrial> trials;
  int rejected_count = 0;
  int off_table_count = 0;
  // Aggregates over in-table, non-rejected trials, meters.
  double median = 0.0, q1 = 0.0, q3 = 0.0, min = 0.0, max = 0.0;
  double cable_length = 0.0;  // for %-of-cable-length reporting
};

// Realizes one trial for a target, or nullopt when the method rejects it.
using Executor =
    std::function<std::optional<PlanePoint>(const PolarPoint&, std::uint64_t)>;

Executor make_policy_executor(const CandidatePool& pool,
                              const CableParams& params, const SimConfig& cfg,
                              const SystemParams& sys,
                              const WorkspaceLimits& ws,
                              const std::optional<NoiseSpec>& noise);

Executor make_polar_cast_executor(const CableParams& params,
                                  const SimConfig& cfg,
                                  const SystemParams& sys,
                                  const WorkspaceLimits& ws,
                                  const std::optional<NoiseSpec>& noise);

EvalReport evaluate(const Executor& executor,
                    const std::vector<PolarPoint>& targets,
                    int trials_per_target, const WorkspaceLimits& ws,
                    std::uint64_t seed, unsigned workers = 1);

// Tukey-hinge quartiles (median-of-halves), the convention used in reports.
void quartiles(std::vector<double> v, double* q1, double* med, double* q3);

// The frozen 32-target evaluation set: 4 radii x 8 angles, symmetric about
// the y axis, inside the reachable semicircle.
std::vector<PolarPoint> default_target_set(const WorkspaceLimits& ws);

std::string eval_report_to_csv(const EvalReport& rep);
std::string eval_report_summary_json(const EvalReport& rep);

}  // namespace dyncable
