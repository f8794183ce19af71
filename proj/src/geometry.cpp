#include "dyncable/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace dyncable {

namespace {

std::vector<double> sample_times(double duration, double period) {
  std::vector<double> ts;
  if (duration <= 0.0) {
    ts.push_back(0.0);
    return ts;
  }
  double t = 0.0;
  while (t < duration - 1e-12) {
    ts.push_back(t);
    t += period;
  }
  ts.push_back(duration);
  return ts;
}

}  // namespace

ProfileSample cubic_ease_eval(double start, double end, double duration,
                              double t) {
  const double s = std::clamp(t / duration, 0.0, 1.0);
  const double d = end - start;
  ProfileSample out;
  out.t = t;
  out.value = start + d * (3.0 * s * s - 2.0 * s * s * s);
  out.vel = d * (6.0 * s - 6.0 * s * s) / duration;
  out.acc = d * (6.0 - 12.0 * s) / (duration * duration);
  return out;
}

ScalarProfile cubic_ease(double start, double end, double duration,
                         double period) {
  if (duration <= 0.0) throw std::invalid_argument("cubic_ease: duration must be > 0");
  ScalarProfile p;
  p.duration = duration;
  for (double t : sample_times(duration, period))
    p.samples.push_back(cubic_ease_eval(start, end, duration, t));
  return p;
}

SCurve::SCurve(double start, double end, double v_max, double a_max,
               double j_max)
    : start_(start), end_(end) {
  if (v_max <= 0.0 || a_max <= 0.0 || j_max <= 0.0)
    throw std::invalid_argument("SCurve: limits must be positive");
  const double h = std::abs(end - start);
  sign_ = (end >= start) ? 1.0 : -1.0;
  j_ = j_max;
  if (h == 0.0) {
    duration_ = 0.0;
    return;
  }

  // Velocity gained by a full jerk up/down ramp at a_max.
  const double v_a = a_max * a_max / j_max;
  double tj, ta;
  if (v_max >= v_a) {
    tj = a_max / j_max;
    ta = tj + v_max / a_max;
  } else {
    tj = std::sqrt(v_max / j_max);
    ta = 2.0 * tj;
  }
  double tv = h / v_max - ta;
  double v_peak = v_max;
  if (tv < 0.0) {
    // Peak velocity is not reached; shrink the acceleration phase.
    tv = 0.0;
    tj = a_max / j_max;
    ta = 0.5 * (tj + std::sqrt(tj * tj + 4.0 * h / a_max));
    v_peak = (ta - tj) * a_max;
    if (ta < 2.0 * tj) {
      // Acceleration never reaches a_max: triangular ramp.
      tj = std::cbrt(h / (2.0 * j_max));
      ta = 2.0 * tj;
      v_peak = j_max * tj * tj;
    }
  }
  tj_ = tj;
  ta_ = ta;
  tv_ = tv;
  v_peak_ = v_peak;
  duration_ = 2.0 * ta + tv;

  // Build phase knots by integrating the jerk schedule analytically.
  const double jerks[7] = {j_, 0.0, -j_, 0.0, -j_, 0.0, j_};
  const double lens[7] = {tj_, ta_ - 2.0 * tj_, tj_, tv_,
                          tj_, ta_ - 2.0 * tj_, tj_};
  Knot k{0.0, 0.0, 0.0, 0.0, jerks[0]};
  for (int i = 0; i < 7; ++i) {
    k.j = jerks[i];
    knots_.push_back(k);
    const double T = lens[i];
    k.q += k.v * T + 0.5 * k.a * T * T + k.j * T * T * T / 6.0;
    k.v += k.a * T + 0.5 * k.j * T * T;
    k.a += k.j * T;
    k.t += T;
  }
  knots_.push_back({k.t, k.q, k.v, k.a, 0.0});
}

ProfileSample SCurve::eval(double t) const {
  ProfileSample out;
  out.t = t;
  if (duration_ == 0.0 || knots_.empty()) {
    out.value = start_;
    return out;
  }
  t = std::clamp(t, 0.0, duration_);
  // Locate the phase containing t (7 phases, linear scan).
  std::size_t i = 0;
  while (i + 1 < knots_.size() - 1 && knots_[i + 1].t <= t) ++i;
  const Knot& k = knots_[i];
  const double dt = t - k.t;
  const double q = k.q + k.v * dt + 0.5 * k.a * dt * dt + k.j * dt * dt * dt / 6.0;
  const double v = k.v + k.a * dt + 0.5 * k.j * dt * dt;
  const double a = k.a + k.j * dt;
  out.value = start_ + sign_ * q;
  out.vel = sign_ * v;
  out.acc = sign_ * a;
  return out;
}

ScalarProfile SCurve::sample(double period) const {
  ScalarProfile p;
  p.duration = duration_;
  for (double t : sample_times(duration_, period)) p.samples.push_back(eval(t));
  return p;
}

std::vector<std::pair<double, double>> SCurve::jerk_segments() const {
  std::vector<std::pair<double, double>> segs;
  if (duration_ == 0.0) return segs;
  const double jerks[7] = {j_, 0.0, -j_, 0.0, -j_, 0.0, j_};
  const double lens[7] = {tj_, ta_ - 2.0 * tj_, tj_, tv_,
                          tj_, ta_ - 2.0 * tj_, tj_};
  for (int i = 0; i < 7; ++i)
    if (lens[i] > 0.0) segs.emplace_back(lens[i], sign_ * jerks[i]);
  return segs;
}

ScalarProfile max_velocity_profile(double start, double end, double v_max,
                                   double a_max, double j_max, double period) {
  return SCurve(start, end, v_max, a_max, j_max).sample(period);
}

}  // namespace dyncable
