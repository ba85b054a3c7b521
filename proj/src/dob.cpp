#include "windest/dob.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace windest {

ObserverState dob_step(const ObserverState& obs, const Vec3& accel, const Vec3& attitude,
                       double u_f, const UavParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dob_step: dt must be > 0");
  if (!accel.allFinite() || !attitude.allFinite() || !std::isfinite(u_f) ||
      !obs.f_e_hat.allFinite())
    throw std::runtime_error("dob_step: non-finite input");

  const Vec3 z_b = rotation_body_to_inertial(attitude).col(2);
  const Vec3 innovation = params.mass_kg * accel -
                          params.mass_kg * params.gravity * Vec3::UnitZ() + u_f * z_b;

  ObserverState next;
  for (int i = 0; i < 3; ++i) {
    const double gain = dt * params.observer_gain[i] / (2.0 * params.mass_kg);
    if (!(gain > 0.0 && gain < 2.0))
      throw std::runtime_error("dob_step: unstable gain on axis " + std::to_string(i));
    next.f_e_hat[i] = (1.0 - gain) * obs.f_e_hat[i] + gain * innovation[i];
  }
  next.t = obs.t + dt;
  return next;
}

Vec3 convergence_time_constant(const UavParams& params) {
  params.validate();
  Vec3 tau;
  for (int i = 0; i < 3; ++i) {
    const double gain = params.sample_dt * params.observer_gain[i] / (2.0 * params.mass_kg);
    if (!(gain < 1.0))
      throw std::domain_error(
          "convergence_time_constant: per-step gain >= 1 on axis " + std::to_string(i));
    tau[i] = -params.sample_dt / std::log1p(-gain);
  }
  return tau;
}

Vec3 to_intermediate(const Vec3& f_e_inertial, double psi_d) {
  return rotation_intermediate_to_inertial(psi_d).transpose() * f_e_inertial;
}

}  // namespace windest
