#include <cmath>

#include "doctest.h"
#include "dyncable/trajgen.hpp"

using namespace dyncable;

namespace {
const SystemParams kSys;
const WorkspaceLimits kWs;
}  // namespace

TEST_CASE("mirror is an involution and flips angles only") {
  Action a{-1.2, 0.9, 0.75, 1.4};
  const Action m = mirror(a);
  CHECK(m.theta1 == doctest::Approx(1.2));
  CHECK(m.theta2 == doctest::Approx(-0.9));
  CHECK(m.r2 == doctest::Approx(0.75));
  CHECK(*m.psi == doctest::Approx(-1.4));
  const Action mm = mirror(m);
  CHECK(mm.theta1 == doctest::Approx(a.theta1));
  CHECK(mm.theta2 == doctest::Approx(a.theta2));
  CHECK(*mm.psi == doctest::Approx(*a.psi));
  const Action a1 = mirror(Action{-0.5, 0.5, 0.6, std::nullopt});
  CHECK_FALSE(a1.psi.has_value());
}

TEST_CASE("null action produces a single stationary waypoint") {
  const EndEffectorTrajectory t =
      synthesize(Action{0.0, 0.0, kSys.r0, std::nullopt}, kSys);
  REQUIRE(t.waypoints.size() == 1);
  CHECK(t.duration == 0.0);
  CHECK(t.waypoints[0].gripper.x == doctest::Approx(0.0));
  CHECK(t.waypoints[0].gripper.y == doctest::Approx(kSys.reset_y));
  CHECK(t.waypoints[0].wrist == 0.0);
}

TEST_CASE("trajectory starts at reset and ends at the commanded pose") {
  const Action a{-1.1, 1.3, 0.8, 2.0};
  const EndEffectorTrajectory t = synthesize(a, kSys);
  const Waypoint& first = t.waypoints.front();
  CHECK(first.t == 0.0);
  CHECK(first.gripper.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(first.gripper.y == doctest::Approx(kSys.reset_y));

  const Waypoint& last = t.waypoints.back();
  const PlanePoint o = kSys.polar_origin();
  const PlanePoint target = polar_to_cartesian({a.r2, a.theta2});
  CHECK(last.t == doctest::Approx(t.duration));
  CHECK(last.gripper.x == doctest::Approx(o.x + target.x).epsilon(1e-9));
  CHECK(last.gripper.y == doctest::Approx(o.y + target.y).epsilon(1e-9));
  CHECK(last.wrist == doctest::Approx(*a.psi - a.theta2).epsilon(1e-9));
}

TEST_CASE("waypoints are spaced at the control period") {
  const EndEffectorTrajectory t =
      synthesize(Action{-0.8, 0.8, 0.7, std::nullopt}, kSys);
  for (std::size_t i = 1; i + 1 < t.waypoints.size(); ++i)
    CHECK(t.waypoints[i].t - t.waypoints[i - 1].t ==
          doctest::Approx(kSys.control_period));
  // The wrist stays at zero through the first arc when psi is absent.
  for (const Waypoint& w : t.waypoints) CHECK(w.wrist == 0.0);
}

TEST_CASE("wrist motion extends the trajectory when it outlasts arc two") {
  Action slow_wrist{-0.3, 0.35, 0.6, 0.35 + 3.0};  // large wrist rotation
  const EndEffectorTrajectory t = synthesize(slow_wrist, kSys);
  Action no_wrist = slow_wrist;
  no_wrist.psi.reset();
  const EndEffectorTrajectory t0 = synthesize(no_wrist, kSys);
  CHECK(t.duration > t0.duration);
  CHECK(t.waypoints.back().wrist == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("limit checks") {
  CHECK(check_limits(Action{0.0, 0.0, kSys.r0, std::nullopt}, kSys, kWs).ok);
  CHECK(check_limits(Action{-1.2, 1.2, 0.8, 2.0}, kSys, kWs).ok);
  const LimitCheck span =
      check_limits(Action{-2.8, 1.0, 0.7, std::nullopt}, kSys, kWs);
  CHECK_FALSE(span.ok);
  CHECK(span.reason == "angular span");

  WorkspaceLimits tight = kWs;
  tight.r_max = 0.7;
  const LimitCheck reach =
      check_limits(Action{-0.5, 0.5, 0.85, std::nullopt}, kSys, tight);
  CHECK_FALSE(reach.ok);
  CHECK(reach.reason == "radial reach");

  WorkspaceLimits slow = kWs;
  slow.cart_speed_cap = 0.2;
  CHECK_FALSE(check_limits(Action{-1.2, 1.2, 0.8, std::nullopt}, kSys, slow).ok);
}

TEST_CASE("grid sampling is a filtered cartesian product") {
  const std::vector<Action> a1 =
      grid_sample_actions({3, 3, 2}, ActionBounds{}, ActionSet::A1, kSys, kWs);
  CHECK(a1.size() == 18);  // defaults pass every limit
  for (const Action& a : a1) {
    CHECK(a.theta1 < 0.0);
    CHECK(a.theta2 > 0.0);
    CHECK_FALSE(a.psi.has_value());
  }

  const std::vector<Action> a2 =
      grid_sample_actions({2, 2, 2, 3}, ActionBounds{}, ActionSet::A2, kSys,
                          kWs);
  CHECK(a2.size() == 24);
  ActionBounds b;
  for (const Action& a : a2) {
    REQUIRE(a.psi.has_value());
    const double off = *a.psi - a.theta2;
    CHECK(off >= b.psi_off_lo - 1e-12);
    CHECK(off <= b.psi_off_hi + 1e-12);
  }

  // A single level sits at the interval midpoint.
  const std::vector<Action> mid =
      grid_sample_actions({1, 1, 1}, ActionBounds{}, ActionSet::A1, kSys, kWs);
  REQUIRE(mid.size() == 1);
  CHECK(mid[0].theta1 == doctest::Approx(0.5 * (b.theta1_lo + b.theta1_hi)));
  CHECK(mid[0].r2 == doctest::Approx(0.5 * (b.r2_lo + b.r2_hi)));

  CHECK_THROWS_AS(
      grid_sample_actions({2, 2}, ActionBounds{}, ActionSet::A1, kSys, kWs),
      std::invalid_argument);
  CHECK_THROWS_AS(
      grid_sample_actions({0, 2, 2}, ActionBounds{}, ActionSet::A1, kSys, kWs),
      std::invalid_argument);
}

TEST_CASE("trajectory jsonl round trip") {
  const EndEffectorTrajectory t = synthesize(Action{-0.9, 1.1, 0.75, 1.8}, kSys);
  const std::string text = trajectory_to_jsonl(t);
  const EndEffectorTrajectory u = trajectory_from_jsonl(text);
  REQUIRE(u.waypoints.size() == t.waypoints.size());
  CHECK(u.duration == t.duration);
  for (std::size_t i = 0; i < t.waypoints.size(); ++i) {
    CHECK(u.waypoints[i].t == t.waypoints[i].t);
    CHECK(u.waypoints[i].gripper.x == t.waypoints[i].gripper.x);
    CHECK(u.waypoints[i].gripper.y == t.waypoints[i].gripper.y);
    CHECK(u.waypoints[i].wrist == t.waypoints[i].wrist);
  }
  CHECK_THROWS(trajectory_from_jsonl(""));
}

TEST_CASE("trajectory gripper speed is bounded") {
  const EndEffectorTrajectory t = synthesize(Action{-2.6, 2.6, 0.9, 2.6}, kSys);
  for (std::size_t i = 1; i < t.waypoints.size(); ++i) {
    const auto& p = t.waypoints[i - 1].gripper;
    const auto& q = t.waypoints[i].gripper;
    const double dt = t.waypoints[i].t - t.waypoints[i - 1].t;
    if (dt <= 0.0) continue;
    CHECK(std::hypot(q.x - p.x, q.y - p.y) / dt <= kWs.cart_speed_cap);
  }
}
