#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dyncable {

// Angle convention used everywhere: theta = 0 along +y (forward from the
// robot base), positive theta toward +x. Left/right symmetry is then a
// sign flip on theta.
struct PolarPoint {
  double r = 0.0;      // meters, >= 0
  double theta = 0.0;  // radians, in [-pi, pi]
};

struct PlanePoint {
  double x = 0.0;  // lateral, meters
  double y = 0.0;  // forward, meters
};

inline PlanePoint polar_to_cartesian(const PolarPoint& p) {
  return {p.r * std::sin(p.theta), p.r * std::cos(p.theta)};
}

inline PolarPoint cartesian_to_polar(const PlanePoint& p) {
  const double r = std::hypot(p.x, p.y);
  if (r == 0.0) return {0.0, 0.0};
  return {r, std::atan2(p.x, p.y)};
}

struct ProfileSample {
  double t = 0.0;
  double value = 0.0;
  double vel = 0.0;
  double acc = 0.0;
};

// Time-discretized scalar motion profile. t runs from 0 to duration at the
// control period; the final step may be shorter so the last sample lands
// exactly on duration.
struct ScalarProfile {
  double duration = 0.0;
  std::vector<ProfileSample> samples;
};

constexpr double kDefaultControlPeriod = 0.008;  // seconds

// Hermite cubic ease between two values with zero end slopes.
ScalarProfile cubic_ease(double start, double end, double duration,
                         double period = kDefaultControlPeriod);

ProfileSample cubic_ease_eval(double start, double end, double duration,
                              double t);

// Jerk-limited bang-bang (seven-phase S-curve) with zero velocity and
// acceleration at both ends, minimal duration subject to the limits.
class SCurve {
 public:
  SCurve() = default;
  SCurve(double start, double end, double v_max, double a_max, double j_max);

  double duration() const { return duration_; }
  double start() const { return start_; }
  double end() const { return end_; }
  double peak_velocity() const { return v_peak_; }

  // Clamps t to [0, duration].
  ProfileSample eval(double t) const;

  ScalarProfile sample(double period = kDefaultControlPeriod) const;

  // Piecewise-constant jerk schedule as (segment duration, jerk) pairs;
  // lets tests re-integrate the profile independently.
  std::vector<std::pair<double, double>> jerk_segments() const;

 private:
  double start_ = 0.0, end_ = 0.0;
  double duration_ = 0.0;
  double sign_ = 1.0;
  double j_ = 0.0;      // jerk magnitude
  double tj_ = 0.0;     // jerk ramp time
  double ta_ = 0.0;     // total acceleration phase time
  double tv_ = 0.0;     // cruise time
  double v_peak_ = 0.0;
  // State at the start of each of the 7 phases, in the unsigned frame.
  struct Knot {
    double t, q, v, a, j;
  };
  std::vector<Knot> knots_;
};

ScalarProfile max_velocity_profile(double start, double end, double v_max,
                                   double a_max, double j_max,
                                   double period = kDefaultControlPeriod);

}  // namespace dyncable
