#include <cmath>

#include "doctest.h"
#include "dyncable/cablesim.hpp"

using namespace dyncable;

namespace {

const SystemParams kSys;
const SimConfig kCfg;

double max_strain_of(const CableState& s, const SimConfig& cfg) {
  const double L = cfg.rest_length_total / cfg.n_segments;
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < s.nodes.size(); ++i) {
    const double dx = s.nodes[i + 1].x - s.nodes[i].x;
    const double dy = s.nodes[i + 1].y - s.nodes[i].y;
    const double dz = s.nodes[i + 1].z - s.nodes[i].z;
    worst = std::max(
        worst, std::abs(std::sqrt(dx * dx + dy * dy + dz * dz) - L) / L);
  }
  return worst;
}

RolloutResult run(const Action& a, const CableParams& p,
                  const SimConfig& cfg = kCfg) {
  return rollout(reset_state(cfg, kSys), synthesize(a, kSys), p, cfg, kSys);
}

}  // namespace

TEST_CASE("parameter vector round trip and names") {
  CableParams p;
  p.bend_stiffness = 1.7;
  p.worksurface_friction = 0.9;
  const auto v = p.to_vector();
  const CableParams q = CableParams::from_vector(v);
  CHECK(q.bend_stiffness == 1.7);
  CHECK(q.worksurface_friction == 0.9);
  CHECK(CableParams::names().size() == CableParams::kDim);
  CHECK(p.mu_eff() == doctest::Approx(std::sqrt(0.4 * 0.9)));
  // The point-chain model has no meaningful twist/spin/roll directions.
  CHECK_FALSE(p.active_mask[0]);
  CHECK_FALSE(p.active_mask[4]);
  CHECK_FALSE(p.active_mask[5]);
  CHECK(p.active_mask[1]);
}

TEST_CASE("reset state lays an exact-length chain behind the gripper") {
  const CableState s = reset_state(kCfg, kSys);
  REQUIRE(s.nodes.size() == static_cast<std::size_t>(kCfg.n_segments) + 1);
  const double L = kCfg.rest_length_total / kCfg.n_segments;
  for (std::size_t i = 0; i + 1 < s.nodes.size(); ++i) {
    const double dx = s.nodes[i + 1].x - s.nodes[i].x;
    const double dy = s.nodes[i + 1].y - s.nodes[i].y;
    const double dz = s.nodes[i + 1].z - s.nodes[i].z;
    CHECK(std::sqrt(dx * dx + dy * dy + dz * dz) ==
          doctest::Approx(L).epsilon(1e-12));
    CHECK(s.nodes[i].z >= 0.0);
  }
  // Node 0 is the attachment: one lever behind the reset gripper pose.
  CHECK(s.nodes[0].x == doctest::Approx(0.0));
  CHECK(s.nodes[0].y == doctest::Approx(kSys.reset_y - kCfg.attach_lever));
  CHECK(s.nodes[0].z == doctest::Approx(kSys.ee_height));
  for (const Vec3& v : s.velocities) {
    CHECK(v.x == 0.0);
    CHECK(v.y == 0.0);
    CHECK(v.z == 0.0);
  }

  SimConfig longc = kCfg;
  longc.rest_length_total = 5.0;
  CHECK_THROWS(reset_state(longc, kSys));
  SimConfig few = kCfg;
  few.n_segments = 1;
  CHECK_THROWS_AS(reset_state(few, kSys), std::invalid_argument);
}

TEST_CASE("null trajectory leaves the resting cable in place") {
  const RolloutResult rr = run(Action{0.0, 0.0, kSys.r0, std::nullopt},
                               CableParams{});
  const CableState rest = reset_state(kCfg, kSys);
  const PlanePoint before = endpoint_xy(rest);
  const PlanePoint after = endpoint_xy(rr.state);
  CHECK(std::hypot(after.x - before.x, after.y - before.y) < 1e-6);
}

TEST_CASE("gripped node tracks the commanded trajectory exactly") {
  const Action a{-0.9, 1.0, 0.75, 1.5};
  const EndEffectorTrajectory traj = synthesize(a, kSys);
  const RolloutResult rr =
      rollout(reset_state(kCfg, kSys), traj, CableParams{}, kCfg, kSys);
  const Waypoint& last = traj.waypoints.back();
  const double ax = last.gripper.x - kCfg.attach_lever * std::sin(last.wrist);
  const double ay = last.gripper.y - kCfg.attach_lever * std::cos(last.wrist);
  CHECK(std::abs(rr.state.nodes[0].x - ax) < 1e-9);
  CHECK(std::abs(rr.state.nodes[0].y - ay) < 1e-9);
}

TEST_CASE("constraint projection keeps strain small through fast motion") {
  const RolloutResult rr = run(Action{-1.8, 1.8, 0.85, 2.8}, CableParams{});
  CHECK(max_strain_of(rr.state, kCfg) < 0.02);
}

TEST_CASE("mirrored actions produce mirrored rollouts") {
  const Action a{-1.3, 1.1, 0.8, 1.9};
  const RolloutResult r1 = run(a, CableParams{});
  const RolloutResult r2 = run(mirror(a), CableParams{});
  REQUIRE(r1.trace.waypoints.size() == r2.trace.waypoints.size());
  for (std::size_t i = 0; i < r1.trace.waypoints.size(); ++i) {
    CHECK(std::abs(r1.trace.waypoints[i].x + r2.trace.waypoints[i].x) < 1e-6);
    CHECK(std::abs(r1.trace.waypoints[i].y - r2.trace.waypoints[i].y) < 1e-6);
  }
  const PlanePoint e1 = endpoint_xy(r1.state);
  const PlanePoint e2 = endpoint_xy(r2.state);
  CHECK(std::abs(e1.x + e2.x) < 1e-6);
  CHECK(std::abs(e1.y - e2.y) < 1e-6);
}

TEST_CASE("rollouts are deterministic") {
  const Action a{-1.0, 1.2, 0.7, 2.2};
  const RolloutResult r1 = run(a, CableParams{});
  const RolloutResult r2 = run(a, CableParams{});
  CHECK(trace_to_csv(r1.trace) == trace_to_csv(r2.trace));
  for (std::size_t i = 0; i < r1.state.nodes.size(); ++i) {
    CHECK(r1.state.nodes[i].x == r2.state.nodes[i].x);
    CHECK(r1.state.nodes[i].y == r2.state.nodes[i].y);
    CHECK(r1.state.nodes[i].z == r2.state.nodes[i].z);
  }
}

TEST_CASE("higher friction shortens the slide") {
  const Action a{-1.4, 1.4, 0.8, std::nullopt};
  CableParams slick;
  slick.lateral_friction = 0.08;
  CableParams grippy;
  grippy.lateral_friction = 0.9;
  const PlanePoint e_slick = endpoint_xy(run(a, slick).state);
  const PlanePoint e_grippy = endpoint_xy(run(a, grippy).state);
  // The free end travels farther from the base when the surface is slick.
  CHECK(std::hypot(e_slick.x, e_slick.y) > std::hypot(e_grippy.x, e_grippy.y));
}

TEST_CASE("simulation blow-up raises instead of returning garbage") {
  CableParams unstable;
  unstable.bend_stiffness = 4000.0;  // explicit bending force goes unstable
  unstable.angular_damping = 0.0;
  unstable.linear_damping = 0.0;
  CHECK_THROWS_AS(run(Action{-1.5, 1.5, 0.85, std::nullopt}, unstable),
                  BlowUpError);
}

TEST_CASE("state and action perturbations are seed-deterministic") {
  const CableState s = reset_state(kCfg, kSys);
  const NoiseSpec noise{0.01, 0.02};
  const CableState a = perturb(s, noise, 42);
  const CableState b = perturb(s, noise, 42);
  const CableState c = perturb(s, noise, 43);
  bool differs_from_c = false;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    CHECK(a.nodes[i].x == b.nodes[i].x);
    CHECK(a.nodes[i].y == b.nodes[i].y);
    if (a.nodes[i].x != c.nodes[i].x) differs_from_c = true;
  }
  CHECK(differs_from_c);
  // The gripped node is never perturbed; zero sigma is the identity.
  CHECK(a.nodes[0].x == s.nodes[0].x);
  const CableState id = perturb(s, NoiseSpec{0.0, 0.0}, 42);
  CHECK(id.nodes.back().y == s.nodes.back().y);

  const Action act{-1.0, 1.0, 0.7, 1.5};
  const Action pa = perturb(act, noise, 7);
  const Action pb = perturb(act, noise, 7);
  CHECK(pa.theta1 == pb.theta1);
  CHECK(*pa.psi == *pb.psi);
  CHECK(pa.theta1 != act.theta1);
}

TEST_CASE("trace csv round trip") {
  const RolloutResult rr = run(Action{-0.8, 0.9, 0.7, std::nullopt},
                               CableParams{});
  REQUIRE(!rr.trace.waypoints.empty());
  const std::string csv = trace_to_csv(rr.trace);
  CHECK(csv.rfind("t_ms,x,y\n", 0) == 0);
  const TrajectoryTrace back = trace_from_csv(csv);
  REQUIRE(back.waypoints.size() == rr.trace.waypoints.size());
  for (std::size_t i = 0; i < back.waypoints.size(); ++i) {
    CHECK(back.waypoints[i].x == rr.trace.waypoints[i].x);
    CHECK(back.waypoints[i].y == rr.trace.waypoints[i].y);
  }
  CHECK_THROWS(trace_from_csv("bogus\n1,2,3\n"));
}

TEST_CASE("endpoint accessors agree") {
  const CableState s = reset_state(kCfg, kSys);
  const PlanePoint xy = endpoint_xy(s);
  const PolarPoint pol = endpoint_polar(s);
  const PlanePoint back = polar_to_cartesian(pol);
  CHECK(back.x == doctest::Approx(xy.x).epsilon(1e-12));
  CHECK(back.y == doctest::Approx(xy.y).epsilon(1e-12));
}
