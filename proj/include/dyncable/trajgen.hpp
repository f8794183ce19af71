#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dyncable/geometry.hpp"

namespace dyncable {

// Fixed trajectory-shaping constants, selected once per experiment.
struct SystemParams {
  double r0 = 0.6;      // polar-frame origin offset, meters
  double v_max = 1.5;   // angular profile speed limit, rad/s
  double control_period = kDefaultControlPeriod;
  double ee_height = 0.0;  // gripper height above the plane, meters
  // The gripper reset pose sits at (0, reset_y); the polar frame origin is
  // r0 behind it, so larger r0 flattens the swept arc.
  double reset_y = 0.6;
  // Angular profile accel/jerk limits (config constants, not searched).
  double a_max = 4.0;   // rad/s^2
  double j_max = 40.0;  // rad/s^3
  // Wrist rotation profile limits.
  double wrist_v_max = 3.0;
  double wrist_a_max = 12.0;
  double wrist_j_max = 120.0;

  PlanePoint polar_origin() const { return {0.0, reset_y - r0}; }
};

// Action variables. psi present <=> action set A2.
struct Action {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double r2 = 0.0;
  std::optional<double> psi;
};

Action mirror(const Action& a);

struct Waypoint {
  double t = 0.0;
  PlanePoint gripper;
  double wrist = 0.0;  // wrist joint rotation relative to the reset pose
};

struct EndEffectorTrajectory {
  std::vector<Waypoint> waypoints;
  double duration = 0.0;
};

struct WorkspaceLimits {
  double r_max = 1.0;        // base-to-wrist reach, meters
  double r_c = 0.62;         // cable length, meters
  double y_min_base = 0.466; // support-table clearance for the casting arm
  // Dynamic arcs may sweep behind the base plane; this only guards against
  // commanding the gripper into the mounting column.
  double y_min_gripper = -0.9;
  double table_width = 2.75;
  double table_depth = 1.50;
  double theta_span_max = 2.7;   // rad, per-arc angular bound
  double cart_speed_cap = 6.0;   // m/s, sampled gripper speed bound

  bool on_table(const PlanePoint& p) const {
    return p.x >= -0.5 * table_width && p.x <= 0.5 * table_width &&
           p.y >= y_min_base && p.y <= y_min_base + table_depth;
  }
};

struct LimitCheck {
  bool ok = true;
  std::string reason;  // empty when ok
};

EndEffectorTrajectory synthesize(const Action& a, const SystemParams& sys);

LimitCheck check_limits(const Action& a, const SystemParams& sys,
                        const WorkspaceLimits& ws);

enum class ActionSet { A1, A2 };

struct ActionBounds {
  double theta1_lo = -2.6, theta1_hi = -0.1;
  double theta2_lo = 0.1, theta2_hi = 2.6;
  double r2_lo = 0.3, r2_hi = 0.9;
  // psi is gridded as theta2 + u with u in [psi_off_lo, psi_off_hi].
  double psi_off_lo = 0.0, psi_off_hi = 3.141592653589793;
};

// Full Cartesian grid (row-major over theta1, theta2, r2[, psi offset]),
// filtered through check_limits. Deterministic.
std::vector<Action> grid_sample_actions(const std::vector<int>& counts,
                                        const ActionBounds& bounds,
                                        ActionSet set,
                                        const SystemParams& sys,
                                        const WorkspaceLimits& ws);

// JSON-lines trajectory export, one waypoint per line.
std::string trajectory_to_jsonl(const EndEffectorTrajectory& traj);
EndEffectorTrajectory trajectory_from_jsonl(const std::string& text);

}  // namespace dyncable
