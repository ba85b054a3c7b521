#pragma once

#include <Eigen/Core>

namespace windest {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Inertial frame is z-DOWN: gravity is +g0 along e3, thrust acts along -R(eta)*e3.
// Euler convention is Z-Y-X intrinsic (yaw-pitch-roll); angles in radians.

/// Vehicle constants shared by the simulator, the observer and the pipeline.
struct UavParams {
  double mass_kg = 8.0;
  double gravity = 9.81;

  // thrust = sum_i (a*w_i^2 + b*w_i + c), w_i = normalized rotor speed
  double thrust_a = 207.0;
  double thrust_b = 11.34;
  double thrust_c = 0.01315;

  // Diagonal of the observer gain matrix K_I, one lambda per inertial axis.
  // Default gives the observer a ~0.3 s time constant (2m/lambda).
  Vec3 observer_gain{2.0 * 8.0 / 0.3, 2.0 * 8.0 / 0.3, 2.0 * 8.0 / 0.3};

  double desired_yaw_rad = 0.0;
  double sample_dt = 0.01;

  /// Throws std::invalid_argument on a violated invariant. Discrete stability
  /// requires dt*lambda_i/(2m) < 2 on every axis.
  void validate() const;
};

/// Observer gain that yields the requested estimator time constant.
Vec3 observer_gain_for_tau(double mass_kg, double tau_s);

/// Full kinematic state in the inertial frame plus normalized rotor speeds.
struct UavState {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 attitude = Vec3::Zero();  // roll, pitch, yaw
  Vec4 rotor_speeds = Vec4::Zero();
};

/// Total thrust from the four normalized rotor speeds.
/// Throws std::domain_error naming the first rotor outside [0, 1].
double thrust_from_rpm(const Vec4& omega, const UavParams& params);

/// Per-motor normalized speed producing thrust u_f split equally across four
/// motors (positive root of the quadratic, floored at 0). The caller keeps
/// u_f within the range achievable with w <= 1.
double rotor_speed_for_thrust(double u_f, const UavParams& params);

/// Body-to-inertial rotation, composed Z(yaw)*Y(pitch)*X(roll).
Mat3 rotation_body_to_inertial(const Vec3& eta);

/// Intermediate-to-inertial rotation: yaw about the inertial z axis by psi_d.
Mat3 rotation_intermediate_to_inertial(double psi_d);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace windest
