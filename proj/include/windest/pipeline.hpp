#pragma once

// Streaming end-to-end estimator: DOB -> gain-scheduled low-pass ->
// force-air mapping -> frame rotation -> wind triangle -> speed/direction.

#include <utility>

#include "windest/airmodel.hpp"
#include "windest/dob.hpp"
#include "windest/frames.hpp"

namespace windest {

// Cutoff schedule: f_low below v_low, f_high above v_high, linear between;
// cutoff moves toward the scheduled value at most slew_hz_per_s.
struct FilterSchedule {
  double f_low_hz = 0.12;
  double f_high_hz = 0.5;
  double v_low = 0.5;    // m/s
  double v_high = 4.0;   // m/s
  double slew_hz_per_s = 0.5;

  void validate(double dt) const;  // keeps f_high below the Nyquist-safe band
  double scheduled_cutoff(double speed_hint) const;
};

struct FilterState {
  FilterSchedule schedule;  // declared first: cutoff_hz is seeded from it
  Vec3 filtered = Vec3::Zero();
  double cutoff_hz;

  FilterState() : cutoff_hz(schedule.f_low_hz) {}
  explicit FilterState(const FilterSchedule& s) : schedule(s), cutoff_hz(s.f_low_hz) {}
};

// First-order low-pass y += alpha (x - y), alpha = 1 - exp(-2 pi fc dt), with
// the cutoff slewed toward the schedule's value for speed_hint.
std::pair<FilterState, Vec3> filter_step(const FilterState& fs, const Vec3& raw_force,
                                         double speed_hint, double dt);

// A_w = A_r - A_g, all in the inertial frame.
Vec3 wind_triangle(const Vec3& a_r, const Vec3& a_g);

struct WindEstimate {
  double t = 0.0;
  Vec3 a_w = Vec3::Zero();  // wind vector, inertial (m/s)
  double v_wh = 0.0;        // horizontal speed (m/s)
  double v_wv = 0.0;        // vertical component (m/s)
  double theta_w = 0.0;     // horizontal direction, (-pi, pi]
  bool low_confidence = false;
};

WindEstimate extract_wind(const Vec3& a_w, double t);

struct PipelineParams {
  UavParams uav;
  FilterSchedule schedule;
  double low_force_threshold = 0.5;  // N, below which direction is flagged
  // The ground vector handed to the wind triangle is this sign times the
  // measured velocity. -1 resolves the triangle so that reported wind
  // vanishes on a zero-wind dynamic flight; frozen by that test.
  double ground_vector_sign = -1.0;
};

// One estimator per telemetry stream; single writer, strictly causal.
class Pipeline {
 public:
  Pipeline(const PipelineParams& params, const ForceAirModel& model);

  // Consume one sample (timestamps strictly increasing) and emit one estimate.
  WindEstimate step(const UavState& sample);

  // Transient window after the first sample; estimates inside it are flagged.
  double warmup_duration() const { return warmup_s_; }
  const ObserverState& observer() const { return observer_; }
  const FilterState& filter() const { return filter_; }

 private:
  PipelineParams params_;
  ForceAirModel model_;
  ObserverState observer_;
  FilterState filter_;
  double prev_vwh_ = 0.0;  // speed hint, one-step delay
  double last_t_ = 0.0;
  double first_t_ = 0.0;
  bool has_prev_ = false;
  double warmup_s_ = 0.0;
};

}  // namespace windest
