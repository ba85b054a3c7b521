#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <random>
#include <stdexcept>

#include "windest/frames.hpp"

using namespace windest;

TEST_CASE("thrust curve: all rotors at full command") {
  Vec4 w = Vec4::Ones();
  // 4 * (207 + 11.34 + 0.01315)
  CHECK(thrust_from_rpm(w, UavParams{}) == doctest::Approx(873.4126).epsilon(1e-12));
}

TEST_CASE("thrust curve: idle rotors leave only the intercept") {
  CHECK(thrust_from_rpm(Vec4::Zero(), UavParams{}) == doctest::Approx(0.0526).epsilon(1e-12));
}

TEST_CASE("thrust curve: hover command round trip") {
  UavParams p;
  const double hover = p.mass_kg * p.gravity;  // 78.48 N
  const double w = rotor_speed_for_thrust(hover, p);
  CHECK(w == doctest::Approx(0.28158986931730046).epsilon(1e-9));
  Vec4 rotors = Vec4::Constant(w);
  CHECK(thrust_from_rpm(rotors, p) == doctest::Approx(hover).epsilon(1e-12));
}

TEST_CASE("thrust curve: monotone in each rotor speed") {
  UavParams p;
  double prev = -1.0;
  for (double w = 0.0; w <= 1.0; w += 0.05) {
    Vec4 rotors(w, 0.3, 0.3, 0.3);
    double u = thrust_from_rpm(rotors, p);
    CHECK(u > prev);
    prev = u;
  }
}

TEST_CASE("thrust curve: out-of-range rotor speed names the rotor") {
  Vec4 w(0.2, 0.2, 1.5, 0.2);
  CHECK_THROWS_WITH_AS(thrust_from_rpm(w, UavParams{}),
                       doctest::Contains("rotor speed 3"), std::domain_error);
  Vec4 neg(-0.1, 0.2, 0.2, 0.2);
  CHECK_THROWS_WITH_AS(thrust_from_rpm(neg, UavParams{}),
                       doctest::Contains("rotor speed 1"), std::domain_error);
}

TEST_CASE("rotor speed solve: clamps to the physical branch") {
  UavParams p;
  // Below the intercept thrust the solve floors at zero rather than going negative.
  CHECK(rotor_speed_for_thrust(0.0, p) == 0.0);
  CHECK(rotor_speed_for_thrust(900.0, p) > 1.0);
  for (double u = 1.0; u <= 800.0; u += 37.0) {
    double w = rotor_speed_for_thrust(u, p);
    CHECK(thrust_from_rpm(Vec4::Constant(w), p) == doctest::Approx(u).epsilon(1e-10));
  }
}

TEST_CASE("body rotation is orthonormal with unit determinant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-3.1, 3.1);
  for (int i = 0; i < 2000; ++i) {
    Vec3 eta(ang(rng), ang(rng), ang(rng));
    Mat3 r = rotation_body_to_inertial(eta);
    CHECK((r.transpose() * r - Mat3::Identity()).norm() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("body z axis for elementary attitudes") {
  // yaw only: thrust axis still vertical
  Vec3 zb = rotation_body_to_inertial(Vec3(0, 0, 1.2)).col(2);
  CHECK((zb - Vec3(0, 0, 1)).norm() < 1e-12);
  // pure roll tilts the axis toward -y
  double phi = 0.3;
  zb = rotation_body_to_inertial(Vec3(phi, 0, 0)).col(2);
  CHECK((zb - Vec3(0, -std::sin(phi), std::cos(phi))).norm() < 1e-12);
  // pure pitch tilts it toward +x
  double th = 0.4;
  zb = rotation_body_to_inertial(Vec3(0, th, 0)).col(2);
  CHECK((zb - Vec3(std::sin(th), 0, std::cos(th))).norm() < 1e-12);
}

TEST_CASE("intermediate frame rotation") {
  CHECK((rotation_intermediate_to_inertial(0.0) - Mat3::Identity()).norm() < 1e-15);
  Mat3 r = rotation_intermediate_to_inertial(kPi);
  CHECK((r * Vec3(1, 0, 0) - Vec3(-1, 0, 0)).norm() < 1e-12);
  CHECK((r * Vec3(0, 1, 0) - Vec3(0, -1, 0)).norm() < 1e-12);
  // inverse composes to identity
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-6.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    double psi = ang(rng);
    Mat3 id = rotation_intermediate_to_inertial(psi) *
              rotation_intermediate_to_inertial(-psi);
    CHECK((id - Mat3::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(wrap_angle(2 * kPi) == doctest::Approx(0.0).epsilon(1e-12));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    double a = ang(rng);
    double w = wrap_angle(a);
    CHECK(w > -kPi - 1e-12);
    CHECK(w <= kPi + 1e-12);
    CHECK(std::abs(std::remainder(w - a, 2 * kPi)) < 1e-9);
  }
}

TEST_CASE("parameter validation") {
  UavParams p;
  CHECK_NOTHROW(p.validate());

  UavParams bad = p;
  bad.mass_kg = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.sample_dt = -0.01;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // discrete observer stability bound: dt * gain / (2 m) must stay below 2
  bad = p;
  bad.observer_gain = Vec3(53.0, 3200.0, 53.0);  // axis 1 hits exactly 2.0
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("axis 1"),
                       std::invalid_argument);
}

TEST_CASE("observer gain from time constant") {
  UavParams p;
  double g = observer_gain_for_tau(p.mass_kg, 0.3)[0];
  CHECK(g == doctest::Approx(2.0 * 8.0 / 0.3).epsilon(1e-12));
  // defaults are consistent with a 0.3 s target
  CHECK(p.observer_gain[0] == doctest::Approx(g).epsilon(1e-12));
  CHECK(p.observer_gain[1] == doctest::Approx(g).epsilon(1e-12));
  CHECK(p.observer_gain[2] == doctest::Approx(g).epsilon(1e-12));
}

TEST_CASE("default state is at rest") {
  UavState s;
  CHECK(s.t == 0.0);
  CHECK(s.position.norm() == 0.0);
  CHECK(s.velocity.norm() == 0.0);
  CHECK(s.acceleration.norm() == 0.0);
  CHECK(s.attitude.norm() == 0.0);
  CHECK(s.rotor_speeds.norm() == 0.0);
}
