#pragma once

#include "windest/frames.hpp"

namespace windest {

/// External-force estimate in both frames used by the pipeline.
struct ForceEstimate {
  Vec3 f_e_inertial = Vec3::Zero();
  Vec3 f_ce_intermediate = Vec3::Zero();
  double t = 0.0;
};

/// Recursion state of the discrete force observer.
struct ObserverState {
  Vec3 f_e_hat = Vec3::Zero();
  double t = 0.0;
};

/// One observer update:
///   f_hat(k+1) = (I - dt/(2m) K_I) f_hat(k) + dt/(2m) K_I (m*a - m*g0*e3 + u_f*z_b)
/// with z_b the third column of the body-to-inertial rotation.
/// Throws on non-finite inputs or an unstable gain/step combination.
ObserverState dob_step(const ObserverState& obs, const Vec3& accel, const Vec3& attitude,
                       double u_f, const UavParams& params, double dt);

/// Per-axis exponential time constant of the discrete recursion,
/// tau_i = -dt / ln(1 - dt*lambda_i/(2m)), approximately 2m/lambda_i.
Vec3 convergence_time_constant(const UavParams& params);

/// Inertial force expressed in the intermediate frame (yawed by psi_d).
Vec3 to_intermediate(const Vec3& f_e_inertial, double psi_d);

}  // namespace windest
