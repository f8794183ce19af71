#include "dyncable/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dyncable/common.hpp"
#include "json.hpp"

namespace dyncable {

namespace {

PlanePoint world_point(const PolarPoint& p, const SystemParams& sys) {
  const PlanePoint o = sys.polar_origin();
  const PlanePoint c = polar_to_cartesian(p);
  return {o.x + c.x, o.y + c.y};
}

}  // namespace

CandidatePool build_pool(
    const std::vector<Action>& actions,
    const std::function<PlanePoint(const Action&)>& model) {
  if (actions.empty()) throw std::invalid_argument("build_pool: no actions");
  CandidatePool pool;
  pool.actions = actions;
  pool.predictions.reserve(actions.size());
  for (const Action& a : actions) pool.predictions.push_back(model(a));
  return pool;
}

Selection select(const PolarPoint& target, const CandidatePool& pool,
                 const WorkspaceLimits& ws) {
  if (pool.actions.empty() || pool.actions.size() != pool.predictions.size())
    throw std::invalid_argument("select: malformed candidate pool");
  if (target.r > ws.r_max + ws.r_c)
    throw std::invalid_argument("select: target beyond full extension");

  const bool mirrored = target.theta < 0.0;
  const PolarPoint canon = mirrored
                               ? PolarPoint{target.r, -target.theta}
                               : target;
  SystemParams sys;  // only polar_origin() is needed; it is fixed
  const PlanePoint goal = world_point(canon, sys);

  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pool.predictions.size(); ++i) {
    const PlanePoint& p = pool.predictions[i];
    const double d = std::hypot(p.x - goal.x, p.y - goal.y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }

  Selection sel;
  sel.predicted_error = best_d;
  if (mirrored) {
    sel.action = mirror(pool.actions[best]);
    sel.predicted = {-pool.predictions[best].x, pool.predictions[best].y};
  } else {
    sel.action = pool.actions[best];
    sel.predicted = pool.predictions[best];
  }
  return sel;
}

PolarCast polar_cast(const PolarPoint& target, const WorkspaceLimits& ws,
                     const SimConfig& cfg, const SystemParams& sys,
                     double pull_speed) {
  if (pull_speed <= 0.0)
    throw std::invalid_argument("polar_cast: pull_speed must be positive");
  PolarCast out;
  out.theta = target.theta;
  out.cast_radius = ws.r_max + cfg.rest_length_total;
  out.pull_distance = out.cast_radius - target.r;

  if (target.r > out.cast_radius + 1e-12) {
    out.rejected = true;
    out.reason = "target beyond full extension";
    return out;
  }
  // During the pull the gripper slides radially inward; both ends of that
  // slide must keep the commanded pose above the support-table edge.
  const double rg_start = ws.r_max - cfg.attach_lever;
  const double rg_end =
      target.r - cfg.rest_length_total - cfg.attach_lever;
  if (rg_end < 0.0) {
    out.rejected = true;
    out.reason = "pull crosses the base";
    return out;
  }
  const double c = std::cos(target.theta);
  if (c <= 0.0 || rg_end * c < ws.y_min_base - 1e-12 ||
      rg_start * c < ws.y_min_base - 1e-12) {
    out.rejected = true;
    out.reason = "support-table clearance";
    return out;
  }

  const PlanePoint o = sys.polar_origin();
  const double s = std::sin(target.theta);
  const double duration = out.pull_distance / pull_speed;
  auto at = [&](double t) {
    const double rg = rg_start - pull_speed * t;
    Waypoint w;
    w.t = t;
    w.gripper = {o.x + rg * s, o.y + rg * c};
    w.wrist = target.theta + M_PI;  // attachment points outward, cable ahead
    return w;
  };
  double t = 0.0;
  while (t < duration - 1e-12) {
    out.pull.waypoints.push_back(at(t));
    t += sys.control_period;
  }
  out.pull.waypoints.push_back(at(duration));
  out.pull.duration = duration;
  return out;
}

PlanePoint run_polar_cast(const PolarCast& cast, const CableParams& params,
                          const SimConfig& cfg, const SystemParams& sys,
                          const std::optional<NoiseSpec>& noise,
                          std::uint64_t seed) {
  if (cast.rejected)
    throw std::invalid_argument("run_polar_cast: cast was rejected");
  // Cable laid fully extended along the cast ray, attachment at r_max.
  const PlanePoint o = sys.polar_origin();
  const double s = std::sin(cast.theta);
  const double c = std::cos(cast.theta);
  const double seg_len = cfg.rest_length_total / cfg.n_segments;
  const double ra = cast.cast_radius - cfg.rest_length_total;
  CableState state;
  for (int i = 0; i <= cfg.n_segments; ++i) {
    const double r = ra + i * seg_len;
    state.nodes.push_back(
        {o.x + r * s, o.y + r * c, i == 0 ? sys.ee_height : 0.0});
  }
  state.velocities.assign(state.nodes.size(), {});
  state.gripped_index = 0;
  if (noise) state = perturb(state, *noise, seed);
  const RolloutResult rr = rollout(state, cast.pull, params, cfg, sys);
  return endpoint_xy(rr.state);
}

Executor make_policy_executor(const CandidatePool& pool,
                              const CableParams& params, const SimConfig& cfg,
                              const SystemParams& sys,
                              const WorkspaceLimits& ws,
                              const std::optional<NoiseSpec>& noise) {
  return [pool, params, cfg, sys, ws, noise](
             const PolarPoint& target,
             std::uint64_t seed) -> std::optional<PlanePoint> {
    const Selection sel = select(target, pool, ws);
    Action exec = sel.action;
    CableState start = reset_state(cfg, sys);
    if (noise) {
      exec = perturb(exec, *noise, seed);
      start = perturb(start, *noise, seed);
    }
    try {
      const RolloutResult rr =
          rollout(start, synthesize(exec, sys), params, cfg, sys);
      return endpoint_xy(rr.state);
    } catch (const BlowUpError&) {
      return std::nullopt;
    }
  };
}

Executor make_polar_cast_executor(const CableParams& params,
                                  const SimConfig& cfg,
                                  const SystemParams& sys,
                                  const WorkspaceLimits& ws,
                                  const std::optional<NoiseSpec>& noise) {
  return [params, cfg, sys, ws, noise](
             const PolarPoint& target,
             std::uint64_t seed) -> std::optional<PlanePoint> {
    const PolarCast cast = polar_cast(target, ws, cfg, sys);
    if (cast.rejected) return std::nullopt;
    try {
      return run_polar_cast(cast, params, cfg, sys, noise, seed);
    } catch (const BlowUpError&) {
      return std::nullopt;
    }
  };
}

EvalReport evaluate(const Executor& executor,
                    const std::vector<PolarPoint>& targets,
                    int trials_per_target, const WorkspaceLimits& ws,
                    std::uint64_t seed, unsigned workers) {
  if (targets.empty() || trials_per_target < 1)
    throw std::invalid_argument("evaluate: need targets and trials");
  SystemParams sys;  // frame only
  EvalReport rep;
  rep.cable_length = ws.r_c;
  rep.trials.resize(targets.size() * trials_per_target);
  parallel_for(rep.trials.size(), workers, [&](std::size_t idx) {
    EvalTrial& tr = rep.trials[idx];
    tr.target_index = static_cast<int>(idx / trials_per_target);
    tr.trial = static_cast<int>(idx % trials_per_target);
    tr.target = targets[tr.target_index];
    const auto realized = executor(tr.target, seed + idx);
    if (!realized) {
      tr.rejected = true;
      return;
    }
    tr.realized = *realized;
    const PlanePoint goal = world_point(tr.target, sys);
    tr.distance = std::hypot(tr.realized.x - goal.x, tr.realized.y - goal.y);
    tr.off_table = !ws.on_table(tr.realized);
  });

  std::vector<double> dists;
  for (const EvalTrial& t : rep.trials) {
    if (t.rejected) {
      ++rep.rejected_count;
    } else if (t.off_table) {
      ++rep.off_table_count;
    } else {
      dists.push_back(t.distance);
    }
  }
  if (dists.empty()) {
    rep.median = rep.q1 = rep.q3 = rep.min = rep.max =
        std::numeric_limits<double>::quiet_NaN();
  } else {
    quartiles(dists, &rep.q1, &rep.median, &rep.q3);
    const auto [lo, hi] = std::minmax_element(dists.begin(), dists.end());
    rep.min = *lo;
    rep.max = *hi;
  }
  return rep;
}

void quartiles(std::vector<double> v, double* q1, double* med, double* q3) {
  if (v.empty()) throw std::invalid_argument("quartiles: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  auto mid = [&](std::size_t lo, std::size_t hi) {  // median of [lo, hi)
    const std::size_t m = hi - lo;
    return (m % 2 == 1) ? v[lo + m / 2]
                        : 0.5 * (v[lo + m / 2 - 1] + v[lo + m / 2]);
  };
  if (med) *med = mid(0, n);
  // Tukey hinges: odd-length input includes the median in both halves.
  const std::size_t half = (n + 1) / 2;
  if (q1) *q1 = mid(0, half);
  if (q3) *q3 = mid(n - half, n);
}

std::vector<PolarPoint> default_target_set(const WorkspaceLimits& ws) {
  const double radii[] = {0.8, 0.95, 1.1, 1.25};
  const double thetas[] = {-0.9, -0.65, -0.4, -0.15, 0.15, 0.4, 0.65, 0.9};
  SystemParams sys;
  std::vector<PolarPoint> out;
  for (double r : radii)
    for (double th : thetas) {
      const PolarPoint p{r, th};
      if (!ws.on_table(world_point(p, sys)))
        throw std::logic_error("default_target_set: target off table");
      out.push_back(p);
    }
  return out;
}

std::string eval_report_to_csv(const EvalReport& rep) {
  std::ostringstream out;
  out << "target_index,trial,r,theta,x,y,distance,off_table,rejected\n";
  char buf[256];
  for (const EvalTrial& t : rep.trials) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                  t.target_index, t.trial, t.target.r, t.target.theta,
                  t.realized.x, t.realized.y, t.distance, t.off_table ? 1 : 0,
                  t.rejected ? 1 : 0);
    out << buf;
  }
  return out.str();
}

std::string eval_report_summary_json(const EvalReport& rep) {
  nlohmann::json j;
  j["trials"] = rep.trials.size();
  j["rejected"] = rep.rejected_count;
  j["off_table"] = rep.off_table_count;
  j["cable_length"] = rep.cable_length;
  auto num = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
  };
  j["median_m"] = num(rep.median);
  j["q1_m"] = num(rep.q1);
  j["q3_m"] = num(rep.q3);
  j["min_m"] = num(rep.min);
  j["max_m"] = num(rep.max);
  if (rep.cable_length > 0.0 && std::isfinite(rep.median))
    j["median_frac_cable"] = rep.median / rep.cable_length;
  return j.dump();
}

}  // namespace dyncable
