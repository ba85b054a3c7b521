#include "windest/frames.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace windest {

void UavParams::validate() const {
  if (!(mass_kg > 0.0)) throw std::invalid_argument("UavParams: mass_kg must be > 0");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("UavParams: sample_dt must be > 0");
  if (!(gravity > 0.0)) throw std::invalid_argument("UavParams: gravity must be > 0");
  for (int i = 0; i < 3; ++i) {
    if (!(observer_gain[i] > 0.0))
      throw std::invalid_argument("UavParams: observer_gain[" + std::to_string(i) +
                                  "] must be > 0");
    const double g = sample_dt * observer_gain[i] / (2.0 * mass_kg);
    if (!(g < 2.0))
      throw std::invalid_argument(
          "UavParams: discrete observer unstable on axis " + std::to_string(i) +
          " (dt*lambda/(2m) = " + std::to_string(g) + " >= 2)");
  }
}

Vec3 observer_gain_for_tau(double mass_kg, double tau_s) {
  if (!(tau_s > 0.0)) throw std::invalid_argument("observer tau must be > 0");
  return Vec3::Constant(2.0 * mass_kg / tau_s);
}

double thrust_from_rpm(const Vec4& omega, const UavParams& params) {
  double u_f = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double w = omega[i];
    if (!(w >= 0.0 && w <= 1.0))
      throw std::domain_error("rotor speed " + std::to_string(i + 1) + " out of [0,1]: " +
                              std::to_string(w));
    u_f += params.thrust_a * w * w + params.thrust_b * w + params.thrust_c;
  }
  return u_f;
}

double rotor_speed_for_thrust(double u_f, const UavParams& params) {
  // a*w^2 + b*w + (c - u_f/4) = 0, positive root
  const double a = params.thrust_a;
  const double b = params.thrust_b;
  const double c = params.thrust_c - u_f / 4.0;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return 0.0;
  return std::max(0.0, (-b + std::sqrt(disc)) / (2.0 * a));
}

Mat3 rotation_body_to_inertial(const Vec3& eta) {
  const double cr = std::cos(eta[0]), sr = std::sin(eta[0]);
  const double cp = std::cos(eta[1]), sp = std::sin(eta[1]);
  const double cy = std::cos(eta[2]), sy = std::sin(eta[2]);
  Mat3 r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp,     cp * sr,               cp * cr;
  return r;
}

Mat3 rotation_intermediate_to_inertial(double psi_d) {
  const double c = std::cos(psi_d), s = std::sin(psi_d);
  Mat3 r;
  r << c, -s, 0.0,
       s,  c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace windest
