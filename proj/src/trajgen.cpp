#include "dyncable/trajgen.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace dyncable {

namespace {

constexpr int kTrajectorySchemaVersion = 1;

struct ProfileSet {
  SCurve arc1, arc2, wrist;
  double t1 = 0.0;     // arrival time at theta1
  double total = 0.0;  // full motion duration
  double r0 = 0.0, r2 = 0.0;
};

ProfileSet build_profiles(const Action& a, const SystemParams& sys) {
  ProfileSet ps;
  ps.arc1 = SCurve(0.0, a.theta1, sys.v_max, sys.a_max, sys.j_max);
  ps.arc2 = SCurve(a.theta1, a.theta2, sys.v_max, sys.a_max, sys.j_max);
  const double wrist_rot = a.psi ? (*a.psi - a.theta2) : 0.0;
  ps.wrist = SCurve(0.0, wrist_rot, sys.wrist_v_max, sys.wrist_a_max,
                    sys.wrist_j_max);
  ps.t1 = ps.arc1.duration();
  // The wrist runs concurrently with arc two; if its minimal-time profile
  // outlasts the arc, the motion is extended to cover it.
  ps.total = ps.t1 + std::max(ps.arc2.duration(), ps.wrist.duration());
  ps.r0 = sys.r0;
  ps.r2 = a.r2;
  return ps;
}

Waypoint eval_waypoint(const ProfileSet& ps, const SystemParams& sys,
                       double t) {
  Waypoint w;
  w.t = t;
  const double theta = (t < ps.t1)
                           ? ps.arc1.eval(t).value
                           : ps.arc2.eval(t - ps.t1).value;
  const double r = (ps.total > 0.0)
                       ? cubic_ease_eval(ps.r0, ps.r2, ps.total, t).value
                       : ps.r0;
  w.wrist = (t < ps.t1) ? 0.0 : ps.wrist.eval(t - ps.t1).value;
  const PlanePoint o = sys.polar_origin();
  const PlanePoint p = polar_to_cartesian({r, theta});
  w.gripper = {o.x + p.x, o.y + p.y};
  return w;
}

}  // namespace

Action mirror(const Action& a) {
  Action m;
  m.theta1 = -a.theta1;
  m.theta2 = -a.theta2;
  m.r2 = a.r2;
  if (a.psi) m.psi = -*a.psi;
  return m;
}

EndEffectorTrajectory synthesize(const Action& a, const SystemParams& sys) {
  const ProfileSet ps = build_profiles(a, sys);
  EndEffectorTrajectory traj;
  traj.duration = ps.total;
  if (ps.total == 0.0 && a.r2 == sys.r0) {
    traj.waypoints.push_back(eval_waypoint(ps, sys, 0.0));
    return traj;
  }
  double t = 0.0;
  while (t < ps.total - 1e-12) {
    traj.waypoints.push_back(eval_waypoint(ps, sys, t));
    t += sys.control_period;
  }
  traj.waypoints.push_back(eval_waypoint(ps, sys, ps.total));
  return traj;
}

LimitCheck check_limits(const Action& a, const SystemParams& sys,
                        const WorkspaceLimits& ws) {
  if (std::abs(a.theta1) > ws.theta_span_max ||
      std::abs(a.theta2) > ws.theta_span_max)
    return {false, "angular span"};
  const EndEffectorTrajectory traj = synthesize(a, sys);
  for (const Waypoint& w : traj.waypoints) {
    if (std::hypot(w.gripper.x, w.gripper.y) > ws.r_max)
      return {false, "radial reach"};
    if (w.gripper.y < ws.y_min_gripper) return {false, "table-edge clearance"};
  }
  for (std::size_t i = 1; i < traj.waypoints.size(); ++i) {
    const Waypoint& p = traj.waypoints[i - 1];
    const Waypoint& q = traj.waypoints[i];
    const double dt = q.t - p.t;
    if (dt <= 0.0) continue;
    const double speed =
        std::hypot(q.gripper.x - p.gripper.x, q.gripper.y - p.gripper.y) / dt;
    if (speed > ws.cart_speed_cap) return {false, "velocity limit"};
  }
  return {true, ""};
}

std::vector<Action> grid_sample_actions(const std::vector<int>& counts,
                                        const ActionBounds& bounds,
                                        ActionSet set,
                                        const SystemParams& sys,
                                        const WorkspaceLimits& ws) {
  const std::size_t dims = (set == ActionSet::A1) ? 3 : 4;
  if (counts.size() != dims)
    throw std::invalid_argument("grid_sample_actions: counts size mismatch");
  for (int c : counts)
    if (c < 1) throw std::invalid_argument("grid_sample_actions: counts >= 1");
  const double los[4] = {bounds.theta1_lo, bounds.theta2_lo, bounds.r2_lo,
                         bounds.psi_off_lo};
  const double his[4] = {bounds.theta1_hi, bounds.theta2_hi, bounds.r2_hi,
                         bounds.psi_off_hi};
  for (std::size_t d = 0; d < dims; ++d)
    if (los[d] > his[d])
      throw std::invalid_argument("grid_sample_actions: inverted bounds");

  auto level = [&](std::size_t d, int i) {
    const int n = counts[d];
    if (n == 1) return 0.5 * (los[d] + his[d]);
    return los[d] + (his[d] - los[d]) * static_cast<double>(i) / (n - 1);
  };

  std::vector<Action> out;
  for (int i0 = 0; i0 < counts[0]; ++i0)
    for (int i1 = 0; i1 < counts[1]; ++i1)
      for (int i2 = 0; i2 < counts[2]; ++i2) {
        const int npsi = (dims == 4) ? counts[3] : 1;
        for (int i3 = 0; i3 < npsi; ++i3) {
          Action a;
          a.theta1 = level(0, i0);
          a.theta2 = level(1, i1);
          a.r2 = level(2, i2);
          if (dims == 4) a.psi = a.theta2 + level(3, i3);
          if (check_limits(a, sys, ws).ok) out.push_back(a);
        }
      }
  return out;
}

std::string trajectory_to_jsonl(const EndEffectorTrajectory& traj) {
  std::string out;
  {
    nlohmann::json header = {{"schema_version", kTrajectorySchemaVersion},
                             {"duration", traj.duration}};
    out += header.dump();
    out += '\n';
  }
  for (const Waypoint& w : traj.waypoints) {
    nlohmann::json j = {
        {"t", w.t}, {"x", w.gripper.x}, {"y", w.gripper.y}, {"wrist", w.wrist}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

EndEffectorTrajectory trajectory_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("trajectory_from_jsonl: empty input");
  const auto header = nlohmann::json::parse(line);
  if (header.at("schema_version").get<int>() != kTrajectorySchemaVersion)
    throw std::runtime_error("trajectory_from_jsonl: schema version mismatch");
  EndEffectorTrajectory traj;
  traj.duration = header.at("duration").get<double>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    Waypoint w;
    w.t = j.at("t").get<double>();
    w.gripper = {j.at("x").get<double>(), j.at("y").get<double>()};
    w.wrist = j.at("wrist").get<double>();
    traj.waypoints.push_back(w);
  }
  return traj;
}

}  // namespace dyncable
