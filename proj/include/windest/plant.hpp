#pragma once

// Synthetic truth generator: rigid-body translational dynamics with an
// angle-dependent drag model, a cascaded hover/velocity controller, and
// scripted wind scenarios (wind-tunnel sweep + free flight).

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "windest/frames.hpp"

namespace windest {

// Drag force on the airframe, expressed in the frame yawed with the vehicle.
// Horizontal part: C(theta_air) * |a_h|^(p-1) * a_h, with C piecewise-linear
// periodic in the airflow angle; vertical part: vertical_coeff * |a_z|^(p-1) * a_z.
// p = speed_exponent, default 2 (force quadratic in airspeed).
struct DragModel {
  std::vector<std::pair<double, double>> angular_profile;  // (angle rad in [0,2pi), N/(m/s)^p)
  double vertical_coeff = 0.25;                            // N/(m/s)^p
  double speed_exponent = 2.0;
  double noise_sigma = 0.0;  // additive force noise std-dev per axis (N)
  std::uint64_t rng_seed = 1;

  DragModel();  // default irregular 8-knot profile around 0.2

  void validate() const;
  // piecewise-linear, periodic over 2pi
  double coefficient_at(double angle_rad) const;

  static DragModel constant_profile(double coeff, double vertical_coeff = 0.25,
                                    double speed_exponent = 2.0);
  // Profile C(th) = 1/sqrt(c_mm cos^2 + c_nn sin^2) sampled on `knots` points:
  // with speed_exponent 0.5 the inverse speed-vs-force map is exactly the
  // quadratic surface (0, 0, 0, c_mm, c_nn).
  static DragModel surface_matched(double c_mm, double c_nn, int knots = 72,
                                   double vertical_coeff = 2.0);
};

struct WindScript {
  enum class Interp { Step, Ramp };
  // (duration_s, value); Ramp interpolates each segment toward the next
  // segment's value, the last segment holds.
  std::vector<std::pair<double, Vec3>> segments;
  Interp interpolation = Interp::Step;

  void validate() const;
  double total_duration() const;
  Vec3 value_at(double t) const;
};

// velocity setpoint scripts share the same shape
using VelocityScript = WindScript;

struct TelemetrySample {
  UavState state;
  Vec3 true_wind = Vec3::Zero();
  Vec3 true_external_force = Vec3::Zero();  // inertial (N)
};

struct ThrustAttitudeCommand {
  double u_f = 0.0;                     // total thrust (N)
  Vec3 attitude_setpoint = Vec3::Zero();  // roll, pitch, yaw (rad)
};

// Drag in the intermediate frame for a given relative air vector (noise-free).
Vec3 drag_force(const Vec3& relative_air, const DragModel& model);
// Same plus zero-mean Gaussian noise of std noise_sigma per axis.
Vec3 drag_force(const Vec3& relative_air, const DragModel& model, std::mt19937_64& rng);

struct StepResult {
  UavState next;
  Vec3 external_force = Vec3::Zero();  // inertial (N), consistent with next.acceleration
};

// One semi-implicit Euler step: attitude first-order lag toward the setpoint,
// drag from (wind - velocity) in the current-yaw frame, rotors back-solved
// from u_f. Logged identity: m*a + u_f*R*e3 - m*g*e3 = external_force.
StepResult step_dynamics(const UavState& state, const ThrustAttitudeCommand& cmd,
                         const Vec3& wind, const DragModel& model, const UavParams& params,
                         double dt, std::mt19937_64& rng, double attitude_tau = 0.15);

struct TunnelProtocol {
  std::vector<double> speeds = {0, 1, 2, 3, 4, 5, 6, 7, 8};  // m/s
  double yaw_step_rad = 10.0 * kPi / 180.0;
  double dwell_s = 20.0;
  double yaw_offset_rad = 0.0;  // shift every heading (held-out evaluation)
  double wind_azimuth_rad = 0.0;  // tunnel blow direction in the inertial frame

  int headings_per_revolution() const;
  int cell_count() const;
};

// Cascaded position/velocity controller wrapped around step_dynamics.
class Simulator {
 public:
  Simulator(const UavParams& params, const DragModel& drag, double attitude_tau = 0.15);

  void reset_hover(const Vec3& position, double yaw);
  const UavState& state() const { return state_; }

  // One control + physics step; wind in the inertial frame.
  TelemetrySample step_position_hold(const Vec3& position_sp, double yaw_sp, const Vec3& wind);
  TelemetrySample step_velocity_track(const Vec3& velocity_sp, double yaw_sp, const Vec3& wind);

 private:
  ThrustAttitudeCommand control(const Vec3& velocity_sp, double yaw_sp);
  TelemetrySample advance(const ThrustAttitudeCommand& cmd, const Vec3& wind);

  UavParams params_;
  DragModel drag_;
  double attitude_tau_;
  UavState state_;
  Vec3 vel_integrator_ = Vec3::Zero();
  std::mt19937_64 rng_;
};

// Hovering vehicle steps its yaw through full revolutions while the tunnel
// wind sweeps the speed list. Throws on controller divergence naming the
// (speed, yaw) cell.
std::vector<TelemetrySample> run_wind_tunnel_scenario(const UavParams& params,
                                                      const DragModel& model,
                                                      const TunnelProtocol& protocol = {});

// Velocity-tracking flight through the script under scripted wind.
std::vector<TelemetrySample> run_flight_scenario(const UavParams& params, const DragModel& model,
                                                 const VelocityScript& trajectory,
                                                 const WindScript& wind,
                                                 double attitude_tau = 0.15);

}  // namespace windest
