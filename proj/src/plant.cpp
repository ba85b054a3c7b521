#include "windest/plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace windest {

DragModel::DragModel() {
  // irregular windward shape, mean around 0.2 N/(m/s)^2
  angular_profile = {{0.0, 0.20},
                     {kPi / 4.0, 0.23},
                     {kPi / 2.0, 0.26},
                     {3.0 * kPi / 4.0, 0.22},
                     {kPi, 0.20},
                     {5.0 * kPi / 4.0, 0.24},
                     {3.0 * kPi / 2.0, 0.27},
                     {7.0 * kPi / 4.0, 0.21}};
}

void DragModel::validate() const {
  if (angular_profile.size() < 4)
    throw std::invalid_argument("DragModel: angular_profile needs >= 4 knots");
  double prev = -1.0;
  for (const auto& [angle, coeff] : angular_profile) {
    if (!(angle >= 0.0 && angle < 2.0 * kPi))
      throw std::invalid_argument("DragModel: knot angle outside [0, 2pi)");
    if (!(angle > prev)) throw std::invalid_argument("DragModel: knot angles must increase");
    if (!(coeff > 0.0)) throw std::invalid_argument("DragModel: coefficients must be > 0");
    prev = angle;
  }
  if (!(vertical_coeff > 0.0))
    throw std::invalid_argument("DragModel: vertical_coeff must be > 0");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("DragModel: noise_sigma must be >= 0");
  if (!(speed_exponent >= 0.0) || !std::isfinite(speed_exponent))
    throw std::invalid_argument("DragModel: speed_exponent must be finite and >= 0");
}

double DragModel::coefficient_at(double angle_rad) const {
  double a = std::fmod(angle_rad, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  const size_t n = angular_profile.size();
  // find the knot interval containing a; the last interval wraps to knot 0
  size_t i = n - 1;
  for (size_t j = 0; j + 1 < n; ++j) {
    if (a >= angular_profile[j].first && a < angular_profile[j + 1].first) {
      i = j;
      break;
    }
  }
  if (a < angular_profile.front().first) {
    // between the last knot (shifted by -2pi) and the first
    const double a0 = angular_profile.back().first - 2.0 * kPi;
    const double t = (a - a0) / (angular_profile.front().first - a0);
    return angular_profile.back().second +
           t * (angular_profile.front().second - angular_profile.back().second);
  }
  const auto& [ai, ci] = angular_profile[i];
  const double aj = (i + 1 < n) ? angular_profile[i + 1].first : angular_profile.front().first + 2.0 * kPi;
  const double cj = (i + 1 < n) ? angular_profile[i + 1].second : angular_profile.front().second;
  const double t = (a - ai) / (aj - ai);
  return ci + t * (cj - ci);
}

DragModel DragModel::constant_profile(double coeff, double vertical_coeff,
                                      double speed_exponent) {
  DragModel m;
  m.angular_profile = {{0.0, coeff},
                       {kPi / 2.0, coeff},
                       {kPi, coeff},
                       {3.0 * kPi / 2.0, coeff}};
  m.vertical_coeff = vertical_coeff;
  m.speed_exponent = speed_exponent;
  return m;
}

DragModel DragModel::surface_matched(double c_mm, double c_nn, int knots,
                                     double vertical_coeff) {
  if (!(c_mm > 0.0 && c_nn > 0.0))
    throw std::invalid_argument("surface_matched: coefficients must be > 0");
  if (knots < 4) throw std::invalid_argument("surface_matched: need >= 4 knots");
  DragModel m;
  m.angular_profile.clear();
  for (int i = 0; i < knots; ++i) {
    const double th = 2.0 * kPi * i / knots;
    const double c = std::cos(th), s = std::sin(th);
    m.angular_profile.emplace_back(th, 1.0 / std::sqrt(c_mm * c * c + c_nn * s * s));
  }
  m.vertical_coeff = vertical_coeff;
  m.speed_exponent = 0.5;
  return m;
}

void WindScript::validate() const {
  if (segments.empty()) throw std::invalid_argument("WindScript: empty script");
  for (const auto& [dur, v] : segments) {
    if (!(dur > 0.0)) throw std::invalid_argument("WindScript: durations must be > 0");
    if (!v.allFinite()) throw std::invalid_argument("WindScript: non-finite value");
  }
}

double WindScript::total_duration() const {
  double total = 0.0;
  for (const auto& [dur, v] : segments) total += dur;
  return total;
}

Vec3 WindScript::value_at(double t) const {
  if (segments.empty()) return Vec3::Zero();
  if (t <= 0.0) return segments.front().second;
  double start = 0.0;
  for (size_t i = 0; i < segments.size(); ++i) {
    const double end = start + segments[i].first;
    if (t < end || i + 1 == segments.size()) {
      if (interpolation == Interp::Step) return segments[i].second;
      const Vec3& target = (i + 1 < segments.size()) ? segments[i + 1].second
                                                     : segments[i].second;
      const double u = std::clamp((t - start) / segments[i].first, 0.0, 1.0);
      return segments[i].second + u * (target - segments[i].second);
    }
    start = end;
  }
  return segments.back().second;
}

Vec3 drag_force(const Vec3& relative_air, const DragModel& model) {
  if (!relative_air.allFinite()) throw std::invalid_argument("drag_force: non-finite input");
  const double p = model.speed_exponent;
  Vec3 f = Vec3::Zero();
  const double vh = std::hypot(relative_air.x(), relative_air.y());
  if (vh > 1e-12) {
    const double coeff = model.coefficient_at(std::atan2(relative_air.y(), relative_air.x()));
    const double scale = coeff * std::pow(vh, p - 1.0);
    f.x() = scale * relative_air.x();
    f.y() = scale * relative_air.y();
  }
  const double vz = std::abs(relative_air.z());
  if (vz > 1e-12) f.z() = model.vertical_coeff * std::pow(vz, p - 1.0) * relative_air.z();
  return f;
}

Vec3 drag_force(const Vec3& relative_air, const DragModel& model, std::mt19937_64& rng) {
  Vec3 f = drag_force(relative_air, model);
  if (model.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, model.noise_sigma);
    for (int i = 0; i < 3; ++i) f[i] += noise(rng);
  }
  return f;
}

StepResult step_dynamics(const UavState& state, const ThrustAttitudeCommand& cmd,
                         const Vec3& wind, const DragModel& model, const UavParams& params,
                         double dt, std::mt19937_64& rng, double attitude_tau) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_dynamics: dt must be > 0");
  if (!(dt <= params.sample_dt + 1e-12))
    throw std::invalid_argument("step_dynamics: dt exceeds params.sample_dt");
  if (!state.position.allFinite() || !state.velocity.allFinite() ||
      !state.attitude.allFinite() || !std::isfinite(cmd.u_f))
    throw std::runtime_error("step_dynamics: non-finite state at t=" + std::to_string(state.t));

  StepResult out;
  UavState& next = out.next;
  next.t = state.t + dt;

  // attitude: exact first-order lag toward the setpoint, yaw-wrap aware
  const double decay = std::exp(-dt / attitude_tau);
  for (int i = 0; i < 3; ++i) {
    const double err = wrap_angle(state.attitude[i] - cmd.attitude_setpoint[i]);
    next.attitude[i] = wrap_angle(cmd.attitude_setpoint[i] + err * decay);
  }

  // drag acts in the frame yawed with the vehicle
  const Mat3 r_c = rotation_intermediate_to_inertial(next.attitude[2]);
  const Vec3 rel_air = r_c.transpose() * (wind - state.velocity);
  out.external_force = r_c * drag_force(rel_air, model, rng);

  const double w = rotor_speed_for_thrust(cmd.u_f, params);
  next.rotor_speeds = Vec4::Constant(w);
  const double u_f = thrust_from_rpm(next.rotor_speeds, params);

  const Vec3 z_b = rotation_body_to_inertial(next.attitude).col(2);
  next.acceleration = params.gravity * Vec3::UnitZ() - (u_f / params.mass_kg) * z_b +
                      out.external_force / params.mass_kg;
  next.velocity = state.velocity + dt * next.acceleration;
  next.position = state.position + dt * next.velocity;
  return out;
}

int TunnelProtocol::headings_per_revolution() const {
  if (!(yaw_step_rad > 0.0)) throw std::invalid_argument("TunnelProtocol: yaw step must be > 0");
  return std::max(1, static_cast<int>(std::lround(2.0 * kPi / yaw_step_rad)));
}

int TunnelProtocol::cell_count() const {
  return static_cast<int>(speeds.size()) * headings_per_revolution();
}

Simulator::Simulator(const UavParams& params, const DragModel& drag, double attitude_tau)
    : params_(params), drag_(drag), attitude_tau_(attitude_tau), rng_(drag.rng_seed) {
  params_.validate();
  drag_.validate();
  if (!(attitude_tau_ > 0.0)) throw std::invalid_argument("Simulator: attitude_tau must be > 0");
  reset_hover(Vec3::Zero(), 0.0);
}

void Simulator::reset_hover(const Vec3& position, double yaw) {
  state_ = UavState{};
  state_.position = position;
  state_.attitude = Vec3(0.0, 0.0, wrap_angle(yaw));
  const double hover = params_.mass_kg * params_.gravity;
  state_.rotor_speeds = Vec4::Constant(rotor_speed_for_thrust(hover, params_));
  vel_integrator_.setZero();
  rng_.seed(drag_.rng_seed);
}

namespace {
constexpr double kPosGain = 0.7;        // position -> velocity setpoint (1/s)
constexpr double kVelGain = 2.0;        // velocity error -> accel (1/s)
constexpr double kVelIntGain = 1.0;     // integral (1/s^2)
constexpr double kIntegratorLimit = 4.0;  // m/s (per axis)
constexpr double kAccelLimit = 8.0;     // m/s^2 (per axis)
constexpr double kTiltLimit = 0.8;      // rad
constexpr double kSpeedCeiling = 50.0;  // m/s, divergence guard
}  // namespace

ThrustAttitudeCommand Simulator::control(const Vec3& velocity_sp, double yaw_sp) {
  const Vec3 vel_err = velocity_sp - state_.velocity;
  vel_integrator_ += vel_err * params_.sample_dt;
  for (int i = 0; i < 3; ++i)
    vel_integrator_[i] = std::clamp(vel_integrator_[i], -kIntegratorLimit, kIntegratorLimit);

  Vec3 accel_des = kVelGain * vel_err + kVelIntGain * vel_integrator_;
  for (int i = 0; i < 3; ++i) accel_des[i] = std::clamp(accel_des[i], -kAccelLimit, kAccelLimit);

  // desired thrust vector: -u_f * z_b = m * (a_des - g e3)
  const Vec3 thrust_vec = params_.mass_kg * (accel_des - params_.gravity * Vec3::UnitZ());
  ThrustAttitudeCommand cmd;
  cmd.u_f = std::clamp(thrust_vec.norm(), 0.1,
                       0.92 * 4.0 * (params_.thrust_a + params_.thrust_b + params_.thrust_c));
  const Vec3 d = -thrust_vec.normalized();  // desired body-z direction, inertial
  const Vec3 d_yaw = rotation_intermediate_to_inertial(yaw_sp).transpose() * d;
  const double roll = std::asin(std::clamp(-d_yaw.y(), -1.0, 1.0));
  const double pitch = std::atan2(d_yaw.x(), d_yaw.z());
  cmd.attitude_setpoint = Vec3(std::clamp(roll, -kTiltLimit, kTiltLimit),
                               std::clamp(pitch, -kTiltLimit, kTiltLimit), wrap_angle(yaw_sp));
  return cmd;
}

TelemetrySample Simulator::advance(const ThrustAttitudeCommand& cmd, const Vec3& wind) {
  StepResult r =
      step_dynamics(state_, cmd, wind, drag_, params_, params_.sample_dt, rng_, attitude_tau_);
  state_ = r.next;
  TelemetrySample sample;
  sample.state = state_;
  sample.true_wind = wind;
  sample.true_external_force = r.external_force;
  return sample;
}

TelemetrySample Simulator::step_position_hold(const Vec3& position_sp, double yaw_sp,
                                              const Vec3& wind) {
  const Vec3 vel_sp = kPosGain * (position_sp - state_.position);
  return advance(control(vel_sp, yaw_sp), wind);
}

TelemetrySample Simulator::step_velocity_track(const Vec3& velocity_sp, double yaw_sp,
                                               const Vec3& wind) {
  return advance(control(velocity_sp, yaw_sp), wind);
}

std::vector<TelemetrySample> run_wind_tunnel_scenario(const UavParams& params,
                                                      const DragModel& model,
                                                      const TunnelProtocol& protocol) {
  if (protocol.speeds.empty())
    throw std::invalid_argument("run_wind_tunnel_scenario: empty speed list");
  if (!(protocol.dwell_s > 0.0))
    throw std::invalid_argument("run_wind_tunnel_scenario: dwell must be > 0");

  Simulator sim(params, model);
  const int headings = protocol.headings_per_revolution();
  const int steps_per_cell = static_cast<int>(std::lround(protocol.dwell_s / params.sample_dt));
  const Vec3 blow_dir(std::cos(protocol.wind_azimuth_rad), std::sin(protocol.wind_azimuth_rad),
                      0.0);
  const Vec3 home = Vec3::Zero();

  std::vector<TelemetrySample> log;
  log.reserve(static_cast<size_t>(protocol.cell_count()) * steps_per_cell);
  for (double speed : protocol.speeds) {
    const Vec3 wind = speed * blow_dir;
    for (int h = 0; h < headings; ++h) {
      const double yaw_sp = protocol.yaw_offset_rad + h * protocol.yaw_step_rad;
      for (int s = 0; s < steps_per_cell; ++s) {
        log.push_back(sim.step_position_hold(home, yaw_sp, wind));
        const UavState& st = sim.state();
        if (!st.position.allFinite() || st.velocity.norm() > kSpeedCeiling) {
          std::ostringstream os;
          os << "wind tunnel diverged in cell (speed=" << speed
             << " m/s, yaw=" << yaw_sp * 180.0 / kPi << " deg)";
          throw std::runtime_error(os.str());
        }
      }
    }
  }
  return log;
}

std::vector<TelemetrySample> run_flight_scenario(const UavParams& params, const DragModel& model,
                                                 const VelocityScript& trajectory,
                                                 const WindScript& wind, double attitude_tau) {
  trajectory.validate();
  wind.validate();
  Simulator sim(params, model, attitude_tau);
  const int steps = static_cast<int>(std::lround(trajectory.total_duration() / params.sample_dt));
  std::vector<TelemetrySample> log;
  log.reserve(steps);
  for (int s = 0; s < steps; ++s) {
    const double t = sim.state().t;  // setpoints sampled at the step start
    log.push_back(sim.step_velocity_track(trajectory.value_at(t), params.desired_yaw_rad,
                                          wind.value_at(t)));
    if (!sim.state().position.allFinite() || sim.state().velocity.norm() > kSpeedCeiling) {
      std::ostringstream os;
      os << "flight scenario diverged at t=" << sim.state().t << " s";
      throw std::runtime_error(os.str());
    }
  }
  return log;
}

}  // namespace windest
