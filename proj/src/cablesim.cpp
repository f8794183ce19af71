#include "dyncable/cablesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace dyncable {

namespace {

constexpr double kContactEps = 1e-6;
constexpr double kTraceSpacing = 0.1;  // s
// Straight-line room behind the reset pose available for laying the cable.
constexpr double kResetRoom = 2.0;

Vec3 attach_point(const Waypoint& w, double lever, double ee_height) {
  return {w.gripper.x - lever * std::sin(w.wrist),
          w.gripper.y - lever * std::cos(w.wrist), ee_height};
}

struct Engine {
  const CableParams& p;
  const SimConfig& cfg;
  double seg_len;
  std::vector<double> mass, inv_mass;
  std::vector<Vec3> pos, vel, force;
  std::size_t step_count = 0;

  Engine(const CableState& s, const CableParams& params, const SimConfig& c)
      : p(params), cfg(c) {
    const std::size_t n = s.nodes.size();
    seg_len = cfg.rest_length_total / cfg.n_segments;
    pos = s.nodes;
    vel = s.velocities;
    force.assign(n, {});
    mass.assign(n, p.mass_per_segment);
    mass.back() = p.mass_per_segment * p.endpoint_mass_scale;
    inv_mass.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) inv_mass[i] = 1.0 / mass[i];
  }

  double kinetic_energy() const {
    double ke = 0.0;
    for (std::size_t i = 1; i < pos.size(); ++i) {
      const Vec3& v = vel[i];
      ke += 0.5 * mass[i] * (v.x * v.x + v.y * v.y + v.z * v.z);
    }
    return ke;
  }

  double max_strain() const {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
      const double dx = pos[i + 1].x - pos[i].x;
      const double dy = pos[i + 1].y - pos[i].y;
      const double dz = pos[i + 1].z - pos[i].z;
      const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
      worst = std::max(worst, std::abs(len - seg_len) / seg_len);
    }
    return worst;
  }

  // One semi-implicit step with node 0 driven to `target`.
  void step(const Vec3& target, double h) {
    const std::size_t n = pos.size();
    const double kb = p.bend_stiffness / (seg_len * seg_len);

    for (auto& f : force) f = {};
    for (std::size_t i = 1; i < n; ++i) force[i].z -= mass[i] * cfg.gravity;

    // Bending as a discrete-Laplacian spring with rate damping, distributed
    // momentum-conservatively over each node triple.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double bx = pos[i - 1].x - 2.0 * pos[i].x + pos[i + 1].x;
      const double by = pos[i - 1].y - 2.0 * pos[i].y + pos[i + 1].y;
      const double bz = pos[i - 1].z - 2.0 * pos[i].z + pos[i + 1].z;
      const double vx = vel[i - 1].x - 2.0 * vel[i].x + vel[i + 1].x;
      const double vy = vel[i - 1].y - 2.0 * vel[i].y + vel[i + 1].y;
      const double vz = vel[i - 1].z - 2.0 * vel[i].z + vel[i + 1].z;
      const double fx = kb * bx + p.angular_damping * mass[i] * vx;
      const double fy = kb * by + p.angular_damping * mass[i] * vy;
      const double fz = kb * bz + p.angular_damping * mass[i] * vz;
      force[i].x += fx;
      force[i].y += fy;
      force[i].z += fz;
      force[i - 1].x -= 0.5 * fx;
      force[i - 1].y -= 0.5 * fy;
      force[i - 1].z -= 0.5 * fz;
      force[i + 1].x -= 0.5 * fx;
      force[i + 1].y -= 0.5 * fy;
      force[i + 1].z -= 0.5 * fz;
    }

    // Integrate free nodes; linear damping is applied implicitly.
    std::vector<Vec3> prev = pos;
    const double damp = 1.0 / (1.0 + p.linear_damping * h);
    for (std::size_t i = 1; i < n; ++i) {
      vel[i].x = (vel[i].x + force[i].x * inv_mass[i] * h) * damp;
      vel[i].y = (vel[i].y + force[i].y * inv_mass[i] * h) * damp;
      vel[i].z = (vel[i].z + force[i].z * inv_mass[i] * h) * damp;
      pos[i].x += vel[i].x * h;
      pos[i].y += vel[i].y * h;
      pos[i].z += vel[i].z * h;
    }
    pos[0] = target;

    // Constraint projection: inextensible segments plus the worksurface.
    for (int it = 0; it < cfg.solver_iters; ++it) {
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dx = pos[i + 1].x - pos[i].x;
        const double dy = pos[i + 1].y - pos[i].y;
        const double dz = pos[i + 1].z - pos[i].z;
        const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (len < 1e-12) continue;
        const double wsum = inv_mass[i] + inv_mass[i + 1];
        if (wsum == 0.0) continue;
        const double corr = (len - seg_len) / (len * wsum);
        pos[i].x += inv_mass[i] * corr * dx;
        pos[i].y += inv_mass[i] * corr * dy;
        pos[i].z += inv_mass[i] * corr * dz;
        pos[i + 1].x -= inv_mass[i + 1] * corr * dx;
        pos[i + 1].y -= inv_mass[i + 1] * corr * dy;
        pos[i + 1].z -= inv_mass[i + 1] * corr * dz;
      }
      for (std::size_t i = 1; i < n; ++i)
        if (pos[i].z < 0.0) pos[i].z = 0.0;
    }

    // Velocity update from projected positions, then plane contact.
    double worst_speed2 = 0.0;
    const double dv_max = p.mu_eff() * cfg.gravity * h;
    for (std::size_t i = 0; i < n; ++i) {
      vel[i].x = (pos[i].x - prev[i].x) / h;
      vel[i].y = (pos[i].y - prev[i].y) / h;
      vel[i].z = (pos[i].z - prev[i].z) / h;
      if (i > 0 && pos[i].z <= kContactEps) {
        if (vel[i].z < 0.0) vel[i].z = 0.0;
        const double vt = std::hypot(vel[i].x, vel[i].y);
        if (vt <= dv_max) {
          vel[i].x = 0.0;
          vel[i].y = 0.0;
        } else {
          const double scale = 1.0 - dv_max / vt;
          vel[i].x *= scale;
          vel[i].y *= scale;
        }
      }
      const double s2 = vel[i].x * vel[i].x + vel[i].y * vel[i].y +
                        vel[i].z * vel[i].z;
      worst_speed2 = std::max(worst_speed2, s2);
    }
    ++step_count;
    if (worst_speed2 > cfg.blowup_speed * cfg.blowup_speed)
      throw BlowUpError(step_count, std::sqrt(worst_speed2));
  }

  CableState state() const {
    CableState s;
    s.nodes = pos;
    s.velocities = vel;
    s.gripped_index = 0;
    return s;
  }
};

}  // namespace

std::array<double, CableParams::kDim> CableParams::to_vector() const {
  return {twist_stiffness,   bend_stiffness, mass_per_segment,
          lateral_friction,  spinning_friction, rolling_friction,
          endpoint_mass_scale, linear_damping, angular_damping,
          worksurface_friction};
}

CableParams CableParams::from_vector(const std::array<double, kDim>& v) {
  return from_vector(v, CableParams{});
}

CableParams CableParams::from_vector(const std::array<double, kDim>& v,
                                     const CableParams& base) {
  CableParams p = base;
  p.twist_stiffness = v[0];
  p.bend_stiffness = v[1];
  p.mass_per_segment = v[2];
  p.lateral_friction = v[3];
  p.spinning_friction = v[4];
  p.rolling_friction = v[5];
  p.endpoint_mass_scale = v[6];
  p.linear_damping = v[7];
  p.angular_damping = v[8];
  p.worksurface_friction = v[9];
  return p;
}

const std::array<const char*, CableParams::kDim>& CableParams::names() {
  static const std::array<const char*, kDim> n = {
      "twist_stiffness",   "bend_stiffness",   "mass_per_segment",
      "lateral_friction",  "spinning_friction", "rolling_friction",
      "endpoint_mass_scale", "linear_damping", "angular_damping",
      "worksurface_friction"};
  return n;
}

CableState reset_state(const SimConfig& cfg, const SystemParams& sys) {
  if (cfg.n_segments < 2) throw std::invalid_argument("n_segments >= 2");
  const double L = cfg.rest_length_total / cfg.n_segments;
  Waypoint w0;
  w0.gripper = {0.0, sys.reset_y};
  w0.wrist = 0.0;
  const Vec3 a0 = attach_point(w0, cfg.attach_lever, sys.ee_height);
  if (cfg.rest_length_total > a0.y + kResetRoom)
    throw std::runtime_error(
        "reset_state: cable longer than available straight-line room");

  CableState s;
  s.nodes.push_back(a0);
  // Walk the chain down onto the plane and then straight toward -y.
  Vec3 cur = a0;
  for (int i = 0; i < cfg.n_segments; ++i) {
    const double dz = std::min(cur.z, L);
    const double dy = std::sqrt(L * L - dz * dz);
    cur = {cur.x, cur.y - dy, cur.z - dz};
    s.nodes.push_back(cur);
  }
  s.velocities.assign(s.nodes.size(), {});
  s.gripped_index = 0;
  return s;
}

RolloutResult rollout(const CableState& state,
                      const EndEffectorTrajectory& traj,
                      const CableParams& params, const SimConfig& cfg,
                      const SystemParams& sys) {
  if (state.nodes.size() != static_cast<std::size_t>(cfg.n_segments) + 1)
    throw std::invalid_argument("rollout: state/config node count mismatch");
  Engine eng(state, params, cfg);

  // Effective step divides the control period exactly so commanded
  // waypoints are hit on the physics grid.
  const int n_sub = std::max(
      1, static_cast<int>(std::ceil(sys.control_period / cfg.dt - 1e-9)));
  const double h = sys.control_period / n_sub;

  TrajectoryTrace trace;
  double t = 0.0;
  int next_trace = 1;
  auto maybe_record = [&]() {
    while (t + 1e-9 >= next_trace * kTraceSpacing) {
      const Vec3& e = eng.pos.back();
      trace.waypoints.push_back({e.x, e.y});
      ++next_trace;
    }
  };

  // Motion phase: track the commanded trajectory through the lever.
  const auto& wps = traj.waypoints;
  for (std::size_t k = 0; k + 1 < wps.size(); ++k) {
    const Waypoint& a = wps[k];
    const Waypoint& b = wps[k + 1];
    const double span = b.t - a.t;
    const int steps =
        std::max(1, static_cast<int>(std::round(span / h)));
    const double hs = span / steps;
    for (int i = 1; i <= steps; ++i) {
      const double u = static_cast<double>(i) / steps;
      Waypoint mid;
      mid.gripper = {a.gripper.x + u * (b.gripper.x - a.gripper.x),
                     a.gripper.y + u * (b.gripper.y - a.gripper.y)};
      mid.wrist = a.wrist + u * (b.wrist - a.wrist);
      eng.step(attach_point(mid, cfg.attach_lever, sys.ee_height), hs);
      t += hs;
      maybe_record();
    }
  }

  // Settle phase: hold the final pose until the chain comes to rest.
  const Vec3 hold = eng.pos[0];
  double settle_t = 0.0;
  double quiet = 0.0;
  while (settle_t < cfg.settle_timeout) {
    eng.step(hold, h);
    settle_t += h;
    t += h;
    maybe_record();
    quiet = (eng.kinetic_energy() < cfg.settle_ke) ? quiet + h : 0.0;
    if (quiet >= cfg.settle_hold) break;
  }

  RolloutResult out;
  out.state = eng.state();
  out.trace = trace;
  out.trace.duration_ms = t * 1000.0;
  out.settle_time = settle_t;
  return out;
}

PlanePoint endpoint_xy(const CableState& state) {
  const Vec3& e = state.nodes.back();
  return {e.x, e.y};
}

PolarPoint endpoint_polar(const CableState& state) {
  return cartesian_to_polar(endpoint_xy(state));
}

CableState perturb(const CableState& state, const NoiseSpec& noise,
                   std::uint64_t seed) {
  CableState out = state;
  if (noise.sigma_pos <= 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise.sigma_pos);
  for (std::size_t i = 1; i < out.nodes.size(); ++i) {
    out.nodes[i].x += g(rng);
    out.nodes[i].y += g(rng);
  }
  return out;
}

Action perturb(const Action& action, const NoiseSpec& noise,
               std::uint64_t seed) {
  Action out = action;
  if (noise.sigma_act <= 0.0) return out;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> g(0.0, noise.sigma_act);
  out.theta1 += g(rng);
  out.theta2 += g(rng);
  out.r2 += g(rng);
  if (out.psi) *out.psi += g(rng);
  return out;
}

std::string trace_to_csv(const TrajectoryTrace& trace) {
  std::ostringstream out;
  out << "t_ms,x,y\n";
  char buf[96];
  for (std::size_t i = 0; i < trace.waypoints.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n",
                  static_cast<int>((i + 1) * 100), trace.waypoints[i].x,
                  trace.waypoints[i].y);
    out << buf;
  }
  return out.str();
}

TrajectoryTrace trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t_ms,x,y", 0) != 0)
    throw std::runtime_error("trace_from_csv: missing header");
  TrajectoryTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t_ms, x, y;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t_ms, &x, &y) != 3)
      throw std::runtime_error("trace_from_csv: bad row: " + line);
    trace.waypoints.push_back({x, y});
    trace.duration_ms = t_ms;
  }
  return trace;
}

}  // namespace dyncable
