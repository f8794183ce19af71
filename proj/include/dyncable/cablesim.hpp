#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyncable/trajgen.hpp"

namespace dyncable {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

// The ten tunable physics parameters. twist_stiffness, spinning_friction
// and rolling_friction have no effect in a point-node chain; they stay in
// the vector for compatibility but are inert (active_mask false) so the
// tuner never searches flat directions.
struct CableParams {
  double twist_stiffness = 0.0;
  double bend_stiffness = 0.3;      // N*m/rad per joint
  double mass_per_segment = 0.02;   // kg
  double lateral_friction = 0.4;
  double spinning_friction = 0.0;
  double rolling_friction = 0.0;
  double endpoint_mass_scale = 2.0;  // >= 1, multiplier on the last node
  double linear_damping = 0.2;       // 1/s
  double angular_damping = 0.5;      // 1/s
  double worksurface_friction = 0.4;

  std::array<bool, 10> active_mask = {false, true, true, true,  false,
                                      false, true, true, true,  true};

  static constexpr std::size_t kDim = 10;
  std::array<double, kDim> to_vector() const;
  static CableParams from_vector(const std::array<double, kDim>& v);
  static CableParams from_vector(const std::array<double, kDim>& v,
                                 const CableParams& base);
  static const std::array<const char*, kDim>& names();

  // Combined Coulomb coefficient for cable-on-worksurface contact.
  double mu_eff() const {
    return std::sqrt(lateral_friction * worksurface_friction);
  }
};

struct NoiseSpec {
  double sigma_pos = 0.0;  // meters, initial node positions
  double sigma_act = 0.0;  // radians/meters, action variables
};

struct SimConfig {
  int n_segments = 20;
  double rest_length_total = 0.62;  // cable length r_c, meters
  double dt = 1.0 / 480.0;          // max physics step; the effective step
                                    // divides the control period exactly
  double gravity = 9.81;
  std::uint64_t seed = 0;
  std::optional<NoiseSpec> noise;

  double attach_lever = 0.12;   // gripper-to-attachment offset, meters
  int solver_iters = 25;
  double settle_ke = 1e-5;      // J, kinetic energy settle threshold
  double settle_hold = 0.25;    // s the threshold must hold
  double settle_timeout = 5.0;  // s
  double blowup_speed = 50.0;   // m/s, per-node abort cap
};

struct CableState {
  std::vector<Vec3> nodes;       // N+1 positions, node 0 at the gripper
  std::vector<Vec3> velocities;
  int gripped_index = 0;
};

// Endpoint plane positions every 100 ms.
struct TrajectoryTrace {
  std::vector<PlanePoint> waypoints;
  double duration_ms = 0.0;
};

std::string trace_to_csv(const TrajectoryTrace& trace);
TrajectoryTrace trace_from_csv(const std::string& text);

struct BlowUpError : std::runtime_error {
  BlowUpError(std::size_t step, double speed)
      : std::runtime_error("simulation blow-up at step " +
                           std::to_string(step) + " (node speed " +
                           std::to_string(speed) + " m/s)"),
        step_index(step) {}
  std::size_t step_index;
};

CableState reset_state(const SimConfig& cfg, const SystemParams& sys);

struct RolloutResult {
  CableState state;
  TrajectoryTrace trace;
  double settle_time = 0.0;  // s spent settling after the motion
};

// Integrates the chain while node 0 tracks the trajectory (through the
// attachment lever), then continues until the cable settles. Deterministic
// given (state, traj, params, cfg).
RolloutResult rollout(const CableState& state,
                      const EndEffectorTrajectory& traj,
                      const CableParams& params, const SimConfig& cfg,
                      const SystemParams& sys);

PolarPoint endpoint_polar(const CableState& state);
PlanePoint endpoint_xy(const CableState& state);

CableState perturb(const CableState& state, const NoiseSpec& noise,
                   std::uint64_t seed);
Action perturb(const Action& action, const NoiseSpec& noise,
               std::uint64_t seed);

}  // namespace dyncable
