#include "windest/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace windest {

void FilterSchedule::validate(double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("FilterSchedule: dt must be > 0");
  if (!(f_low_hz > 0.0)) throw std::invalid_argument("FilterSchedule: f_low must be > 0");
  if (!(f_high_hz >= f_low_hz))
    throw std::invalid_argument("FilterSchedule: f_high must be >= f_low");
  if (!(f_high_hz <= 0.5 / (kPi * dt)))
    throw std::invalid_argument("FilterSchedule: f_high above the Nyquist-safe band");
  if (!(v_high > v_low)) throw std::invalid_argument("FilterSchedule: v_high must be > v_low");
  if (!(slew_hz_per_s > 0.0))
    throw std::invalid_argument("FilterSchedule: slew limit must be > 0");
}

double FilterSchedule::scheduled_cutoff(double speed_hint) const {
  if (speed_hint <= v_low) return f_low_hz;
  if (speed_hint >= v_high) return f_high_hz;
  const double u = (speed_hint - v_low) / (v_high - v_low);
  return f_low_hz + u * (f_high_hz - f_low_hz);
}

std::pair<FilterState, Vec3> filter_step(const FilterState& fs, const Vec3& raw_force,
                                         double speed_hint, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("filter_step: dt must be > 0");
  if (!raw_force.allFinite()) throw std::invalid_argument("filter_step: non-finite input");

  FilterState next = fs;
  const double target = fs.schedule.scheduled_cutoff(speed_hint);
  const double max_delta = fs.schedule.slew_hz_per_s * dt;
  next.cutoff_hz = fs.cutoff_hz + std::clamp(target - fs.cutoff_hz, -max_delta, max_delta);
  next.cutoff_hz = std::clamp(next.cutoff_hz, fs.schedule.f_low_hz, fs.schedule.f_high_hz);

  const double alpha = 1.0 - std::exp(-2.0 * kPi * next.cutoff_hz * dt);
  next.filtered = fs.filtered + alpha * (raw_force - fs.filtered);
  return {next, next.filtered};
}

Vec3 wind_triangle(const Vec3& a_r, const Vec3& a_g) {
  if (!a_r.allFinite() || !a_g.allFinite())
    throw std::invalid_argument("wind_triangle: non-finite input");
  return a_r - a_g;
}

WindEstimate extract_wind(const Vec3& a_w, double t) {
  if (!a_w.allFinite()) throw std::invalid_argument("extract_wind: non-finite input");
  WindEstimate est;
  est.t = t;
  est.a_w = a_w;
  est.v_wh = std::hypot(a_w.x(), a_w.y());
  est.v_wv = a_w.z();
  est.theta_w = (est.v_wh == 0.0) ? 0.0 : std::atan2(a_w.y(), a_w.x());
  est.low_confidence = est.v_wh < 1e-12;
  return est;
}

Pipeline::Pipeline(const PipelineParams& params, const ForceAirModel& model)
    : params_(params), model_(model), filter_(params.schedule) {
  params_.uav.validate();
  params_.schedule.validate(params_.uav.sample_dt);
  if (!(params_.low_force_threshold >= 0.0))
    throw std::invalid_argument("Pipeline: low_force_threshold must be >= 0");
  if (params_.ground_vector_sign != 1.0 && params_.ground_vector_sign != -1.0)
    throw std::invalid_argument("Pipeline: ground_vector_sign must be +1 or -1");
  const Vec3 tau = convergence_time_constant(params_.uav);
  warmup_s_ = 5.0 * (tau.maxCoeff() + 1.0 / (2.0 * kPi * params_.schedule.f_low_hz));
}

WindEstimate Pipeline::step(const UavState& sample) {
  double dt = params_.uav.sample_dt;
  if (has_prev_) {
    dt = sample.t - last_t_;
    if (!(dt > 0.0))
      throw std::runtime_error("Pipeline: non-monotonic timestamp at t=" +
                               std::to_string(sample.t));
  } else {
    first_t_ = sample.t;
  }
  last_t_ = sample.t;
  has_prev_ = true;

  const double u_f = thrust_from_rpm(sample.rotor_speeds, params_.uav);
  observer_ = dob_step(observer_, sample.acceleration, sample.attitude, u_f, params_.uav, dt);

  // intermediate frame angle: the vehicle's measured yaw (tracks psi_d)
  const double psi = sample.attitude[2];
  const Vec3 f_ce = to_intermediate(observer_.f_e_hat, psi);
  auto [next_filter, f_ce_filtered] = filter_step(filter_, f_ce, prev_vwh_, dt);
  filter_ = next_filter;

  const PredictedAir pred =
      predict_relative_air(f_ce_filtered, model_, params_.low_force_threshold);
  const Vec3 a_r = rotation_intermediate_to_inertial(psi) * pred.a_rc;
  const Vec3 a_g = params_.ground_vector_sign * sample.velocity;
  WindEstimate est = extract_wind(wind_triangle(a_r, a_g), sample.t);
  est.low_confidence = est.low_confidence || pred.low_confidence ||
                       (sample.t - first_t_) < warmup_s_;
  prev_vwh_ = est.v_wh;
  return est;
}

}  // namespace windest
