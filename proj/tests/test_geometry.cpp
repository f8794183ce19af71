#include <cmath>
#include <random>

#include "doctest.h"
#include "dyncable/geometry.hpp"

using namespace dyncable;

namespace {

// Re-integrates a piecewise-constant jerk schedule segment by segment with
// closed-form polynomials; an independent code path from SCurve::eval.
struct IntegratedState {
  double q = 0.0, v = 0.0, a = 0.0;
};

IntegratedState integrate_jerk(
    const std::vector<std::pair<double, double>>& segments, double t) {
  IntegratedState s;
  for (const auto& [len, jerk] : segments) {
    const double dt = std::min(len, t);
    if (dt <= 0.0) break;
    s.q += s.v * dt + 0.5 * s.a * dt * dt + jerk * dt * dt * dt / 6.0;
    s.v += s.a * dt + 0.5 * jerk * dt * dt;
    s.a += jerk * dt;
    t -= dt;
  }
  return s;
}

}  // namespace

TEST_CASE("polar/cartesian convention") {
  // theta = 0 points along +y, positive theta toward +x.
  const PlanePoint ahead = polar_to_cartesian({1.0, 0.0});
  CHECK(ahead.x == doctest::Approx(0.0));
  CHECK(ahead.y == doctest::Approx(1.0));
  const PlanePoint right = polar_to_cartesian({2.0, M_PI / 2.0});
  CHECK(right.x == doctest::Approx(2.0));
  CHECK(right.y == doctest::Approx(0.0).epsilon(1e-12));
  const PlanePoint diag = polar_to_cartesian({std::sqrt(2.0), M_PI / 4.0});
  CHECK(diag.x == doctest::Approx(1.0));
  CHECK(diag.y == doctest::Approx(1.0));

  const PolarPoint origin = cartesian_to_polar({0.0, 0.0});
  CHECK(origin.r == 0.0);
  CHECK(origin.theta == 0.0);
}

TEST_CASE("polar/cartesian round trip") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ur(0.01, 3.0), ut(-M_PI, M_PI);
  for (int i = 0; i < 500; ++i) {
    const PolarPoint p{ur(rng), ut(rng)};
    const PolarPoint q = cartesian_to_polar(polar_to_cartesian(p));
    CHECK(q.r == doctest::Approx(p.r).epsilon(1e-12));
    CHECK(q.theta == doctest::Approx(p.theta).epsilon(1e-12));
  }
}

TEST_CASE("cubic ease endpoints and slopes") {
  const ScalarProfile p = cubic_ease(0.2, 0.8, 1.5);
  CHECK(p.samples.front().value == doctest::Approx(0.2));
  CHECK(p.samples.back().value == doctest::Approx(0.8));
  CHECK(p.samples.front().vel == doctest::Approx(0.0));
  CHECK(p.samples.back().vel == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.samples.back().t == doctest::Approx(1.5));
  // Midpoint is the mean of the endpoints; profile is monotone.
  CHECK(cubic_ease_eval(0.2, 0.8, 1.5, 0.75).value ==
        doctest::Approx(0.5));
  for (std::size_t i = 1; i < p.samples.size(); ++i)
    CHECK(p.samples[i].value >= p.samples[i - 1].value - 1e-15);
  CHECK_THROWS_AS(cubic_ease(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("cubic ease derivatives match finite differences") {
  // A five-point stencil is exact for cubics away from the clamp points.
  const double a = -0.4, b = 1.1, T = 2.0, h = 1e-3;
  for (double t = 5 * h; t < T - 5 * h; t += 0.083) {
    auto f = [&](double tt) { return cubic_ease_eval(a, b, T, tt).value; };
    const double fd_v =
        (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) /
        (12 * h);
    const double fd_a =
        (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) -
         f(t - 2 * h)) /
        (12 * h * h);
    const ProfileSample s = cubic_ease_eval(a, b, T, t);
    CHECK(s.vel == doctest::Approx(fd_v).epsilon(1e-9));
    CHECK(s.acc == doctest::Approx(fd_a).epsilon(1e-6));
  }
}

TEST_CASE("s-curve reaches the target with zero end velocity/acceleration") {
  const double cases[][5] = {
      {0.0, 1.3, 1.5, 4.0, 40.0},    // cruise phase present
      {0.0, 0.05, 1.5, 4.0, 40.0},   // short move, no cruise
      {0.0, 0.001, 1.5, 4.0, 40.0},  // triangular ramp
      {0.5, -2.1, 1.5, 4.0, 40.0},   // negative direction
      {0.0, 2.6, 3.0, 12.0, 120.0},  // wrist-style limits
  };
  for (const auto& c : cases) {
    const SCurve s(c[0], c[1], c[2], c[3], c[4]);
    const ProfileSample endp = s.eval(s.duration());
    CHECK(endp.value == doctest::Approx(c[1]).epsilon(1e-9));
    CHECK(std::abs(endp.vel) < 1e-9);
    CHECK(std::abs(endp.acc) < 1e-9);
    CHECK(s.eval(0.0).value == doctest::Approx(c[0]));
  }
}

TEST_CASE("s-curve respects limits everywhere") {
  const SCurve s(0.0, 2.2, 1.5, 4.0, 40.0);
  for (double t = 0.0; t <= s.duration(); t += 1e-3) {
    const ProfileSample p = s.eval(t);
    CHECK(std::abs(p.vel) <= 1.5 + 1e-9);
    CHECK(std::abs(p.acc) <= 4.0 + 1e-9);
  }
  CHECK(s.peak_velocity() == doctest::Approx(1.5));
}

TEST_CASE("s-curve matches an independent jerk-schedule integrator") {
  const double cases[][5] = {
      {0.0, 1.3, 1.5, 4.0, 40.0},
      {0.0, 0.05, 1.5, 4.0, 40.0},
      {-1.0, 0.7, 1.5, 4.0, 40.0},
      {0.2, -0.9, 3.0, 12.0, 120.0},
  };
  for (const auto& c : cases) {
    const SCurve s(c[0], c[1], c[2], c[3], c[4]);
    const auto segs = s.jerk_segments();
    double total = 0.0;
    for (const auto& [len, jerk] : segs) total += len;
    CHECK(total == doctest::Approx(s.duration()).epsilon(1e-12));

    // jerk_segments are already signed; the integral runs in the world
    // frame starting from c[0].
    for (double t = 0.0; t <= s.duration() + 1e-12; t += s.duration() / 97.0) {
      const IntegratedState ref = integrate_jerk(segs, t);
      const ProfileSample p = s.eval(t);
      CHECK(std::abs(p.value - (c[0] + ref.q)) < 1e-9);
      CHECK(std::abs(p.vel - ref.v) < 1e-9);
      CHECK(std::abs(p.acc - ref.a) < 1e-9);
    }
    const IntegratedState done = integrate_jerk(segs, s.duration());
    CHECK(std::abs(c[0] + done.q - c[1]) < 1e-6);
  }
}

TEST_CASE("s-curve degenerate and invalid input") {
  const SCurve s(0.7, 0.7, 1.5, 4.0, 40.0);
  CHECK(s.duration() == 0.0);
  CHECK(s.eval(0.5).value == doctest::Approx(0.7));
  CHECK(s.jerk_segments().empty());
  CHECK_THROWS_AS(SCurve(0.0, 1.0, 0.0, 4.0, 40.0), std::invalid_argument);
  CHECK_THROWS_AS(SCurve(0.0, 1.0, 1.5, -1.0, 40.0), std::invalid_argument);
}

TEST_CASE("profile sampling grid") {
  const ScalarProfile p = max_velocity_profile(0.0, 1.0, 1.5, 4.0, 40.0);
  CHECK(p.samples.front().t == 0.0);
  CHECK(p.samples.back().t == doctest::Approx(p.duration));
  for (std::size_t i = 1; i + 1 < p.samples.size(); ++i)
    CHECK(p.samples[i].t - p.samples[i - 1].t ==
          doctest::Approx(kDefaultControlPeriod));
}
