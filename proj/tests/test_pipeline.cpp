#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "windest/pipeline.hpp"
#include "windest/plant.hpp"

using namespace windest;

namespace {

// Analytic model mirroring a constant, radially symmetric sqrt drag law
// f = C*sqrt(v): the surface inverse is V = (f/C)^2.
ForceAirModel symmetric_model(double c) {
  ForceAirModel mdl;
  mdl.horizontal_coeffs = {0.0, 0.0, 0.0, 1.0 / (c * c), 1.0 / (c * c)};
  mdl.vertical_coeffs = {0.0, 1.0 / (c * c), 0.0};
  mdl.fh_max = 10.0;
  return mdl;
}

DragModel symmetric_drag(double c) {
  auto model = DragModel::constant_profile(c, c, 0.5);
  return model;
}

}  // namespace

TEST_CASE("filter settles to the DC value") {
  FilterState fs;
  Vec3 out = Vec3::Zero();
  for (int k = 0; k < 20000; ++k)
    std::tie(fs, out) = filter_step(fs, Vec3(5, -2, 1), 0.0, 0.01);
  CHECK((out - Vec3(5, -2, 1)).norm() < 1e-9);
}

TEST_CASE("filter attenuates its cutoff frequency by 3 dB") {
  FilterSchedule sched;
  sched.f_low_hz = sched.f_high_hz = 0.5;  // fixed cutoff
  const double dt = 0.01, fc = 0.5;
  FilterState fs(sched);
  Vec3 out = Vec3::Zero();
  double sumsq = 0.0;
  int n = 0;
  const int total = 4000;  // 40 s = 20 cycles
  for (int k = 0; k < total; ++k) {
    double x = std::sin(2.0 * kPi * fc * k * dt);
    std::tie(fs, out) = filter_step(fs, Vec3(x, 0, 0), 0.0, dt);
    if (k >= total / 2) { sumsq += out[0] * out[0]; ++n; }
  }
  double amplitude = std::sqrt(2.0 * sumsq / n);
  CHECK(std::abs(amplitude - 1.0 / std::sqrt(2.0)) / (1.0 / std::sqrt(2.0)) < 0.05);
}

TEST_CASE("scheduled cutoff is linear between the speed corners") {
  FilterSchedule sched;
  CHECK(sched.scheduled_cutoff(0.0) == doctest::Approx(0.12));
  CHECK(sched.scheduled_cutoff(0.5) == doctest::Approx(0.12));
  CHECK(sched.scheduled_cutoff(4.0) == doctest::Approx(0.5));
  CHECK(sched.scheduled_cutoff(10.0) == doctest::Approx(0.5));
  double mid = sched.scheduled_cutoff(0.5 * (0.5 + 4.0));
  CHECK(mid == doctest::Approx(0.5 * (0.12 + 0.5)).epsilon(1e-12));
}

TEST_CASE("cutoff stays inside the band and honours the slew limit") {
  FilterState fs;
  const double dt = 0.01;
  double prev_cut = fs.cutoff_hz;
  std::vector<double> hints = {0.0, 10.0, 0.0, 2.0, 10.0, 0.0};
  Vec3 out;
  for (double hint : hints) {
    for (int k = 0; k < 300; ++k) {
      std::tie(fs, out) = filter_step(fs, Vec3::Zero(), hint, dt);
      CHECK(fs.cutoff_hz >= fs.schedule.f_low_hz - 1e-12);
      CHECK(fs.cutoff_hz <= fs.schedule.f_high_hz + 1e-12);
      CHECK(std::abs(fs.cutoff_hz - prev_cut) <= fs.schedule.slew_hz_per_s * dt + 1e-12);
      prev_cut = fs.cutoff_hz;
    }
  }
}

TEST_CASE("scheduling shortens the step response in fast air") {
  const double dt = 0.01;
  auto t90 = [&](bool scheduled) {
    FilterSchedule sched;
    if (!scheduled) sched.f_high_hz = sched.f_low_hz;  // pinned to the slow cutoff
    FilterState fs(sched);
    Vec3 out = Vec3::Zero();
    double hint = 0.0;
    for (int k = 0; k < 20000; ++k) {
      std::tie(fs, out) = filter_step(fs, Vec3(10, 0, 0), hint, dt);
      hint = out[0];  // self-scheduled on the filtered magnitude
      if (out[0] >= 9.0) return k * dt;
    }
    return 1e9;
  };
  double fast = t90(true), slow = t90(false);
  CHECK(fast < slow);
  CHECK(slow < 1e9);
}

TEST_CASE("filter schedule validation") {
  FilterSchedule sched;
  CHECK_NOTHROW(sched.validate(0.01));
  sched.f_high_hz = 40.0;  // beyond the usable band at dt = 0.01
  CHECK_THROWS_AS(sched.validate(0.01), std::invalid_argument);
  sched = FilterSchedule{};
  sched.v_high = sched.v_low;
  CHECK_THROWS_AS(sched.validate(0.01), std::invalid_argument);
  sched = FilterSchedule{};
  sched.f_low_hz = -0.1;
  CHECK_THROWS_AS(sched.validate(0.01), std::invalid_argument);
}

TEST_CASE("wind triangle") {
  CHECK((wind_triangle(Vec3(3, 0, 0), Vec3(1, 0, 0)) - Vec3(2, 0, 0)).norm() == 0.0);
  CHECK(wind_triangle(Vec3(2, -1, 0.5), Vec3(2, -1, 0.5)).norm() == 0.0);
  CHECK((wind_triangle(Vec3::Zero(), Vec3(0, 3, 0)) - Vec3(0, -3, 0)).norm() == 0.0);
}

TEST_CASE("wind extraction") {
  WindEstimate w = extract_wind(Vec3(2, 0, 0), 1.5);
  CHECK(w.v_wh == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(w.theta_w == 0.0);
  CHECK(w.v_wv == 0.0);
  CHECK(w.t == 1.5);
  CHECK(!w.low_confidence);

  w = extract_wind(Vec3(1, 1, -1), 0.0);
  CHECK(w.v_wh == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(w.theta_w == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK(w.v_wv == doctest::Approx(-1.0).epsilon(1e-15));

  w = extract_wind(Vec3::Zero(), 0.0);
  CHECK(w.v_wh == 0.0);
  CHECK(w.theta_w == 0.0);
  CHECK(w.low_confidence);
}

TEST_CASE("pipeline rejects non-increasing timestamps") {
  PipelineParams pp;
  Pipeline pipe(pp, symmetric_model(3.0));
  UavState s;
  s.t = 1.0;
  s.rotor_speeds = Vec4::Constant(rotor_speed_for_thrust(78.48, pp.uav));
  pipe.step(s);
  CHECK_THROWS_AS(pipe.step(s), std::runtime_error);
}

TEST_CASE("pipeline constructor validates its parameters") {
  PipelineParams pp;
  pp.ground_vector_sign = 0.5;
  CHECK_THROWS_AS(Pipeline(pp, symmetric_model(3.0)), std::invalid_argument);
  pp = PipelineParams{};
  pp.uav.mass_kg = -1.0;
  CHECK_THROWS_AS(Pipeline(pp, symmetric_model(3.0)), std::invalid_argument);
}

TEST_CASE("hover in still air reports near-zero wind, flagged low confidence") {
  UavParams p;
  VelocityScript traj;
  traj.segments = {{30.0, Vec3::Zero()}};
  WindScript wind;
  wind.segments = {{30.0, Vec3::Zero()}};
  auto log = run_flight_scenario(p, symmetric_drag(3.0), traj, wind);

  PipelineParams pp;
  pp.uav = p;
  Pipeline pipe(pp, symmetric_model(3.0));
  WindEstimate last;
  for (const auto& s : log) last = pipe.step(s.state);
  CHECK(last.low_confidence);  // horizontal force sits under the threshold
  CHECK(last.a_w.norm() < 0.1);
}

TEST_CASE("tunnel wind is recovered at hover") {
  UavParams p;
  TunnelProtocol proto;
  proto.speeds = {5.0};
  proto.yaw_step_rad = kPi / 2;
  proto.dwell_s = 15.0;
  auto log = run_wind_tunnel_scenario(p, symmetric_drag(3.0), proto);

  PipelineParams pp;
  pp.uav = p;
  Pipeline pipe(pp, symmetric_model(3.0));
  std::vector<WindEstimate> est;
  est.reserve(log.size());
  for (const auto& s : log) est.push_back(pipe.step(s.state));

  // average the settled tail of each 15 s dwell
  for (int cell = 0; cell < 4; ++cell) {
    Vec3 mean = Vec3::Zero();
    int n = 0;
    for (const auto& e : est) {
      double rel = e.t - est.front().t - cell * proto.dwell_s;
      if (rel > 10.0 && rel <= 15.0) { mean += e.a_w; ++n; }
    }
    mean /= n;
    CHECK((mean - Vec3(5, 0, 0)).norm() < 0.15);
  }
}

TEST_CASE("zero-wind dynamic flight estimates near-zero wind") {
  UavParams p;
  VelocityScript traj;
  traj.segments = {{10.0, Vec3::Zero()}, {15.0, Vec3(2, 0, 0)},
                   {15.0, Vec3(0, -2, 0)}, {10.0, Vec3::Zero()}};
  WindScript wind;
  wind.segments = {{50.0, Vec3::Zero()}};
  auto log = run_flight_scenario(p, symmetric_drag(3.0), traj, wind);

  PipelineParams pp;
  pp.uav = p;
  Pipeline pipe(pp, symmetric_model(3.0));
  double mean_mag = 0.0;
  int n = 0;
  for (const auto& s : log) {
    auto e = pipe.step(s.state);
    if (e.t - log.front().state.t > pipe.warmup_duration()) { mean_mag += e.a_w.norm(); ++n; }
  }
  REQUIRE(n > 0);
  mean_mag /= n;
  CHECK(mean_mag < 0.25);
}

TEST_CASE("estimates are flagged inside the warmup window") {
  UavParams p;
  PipelineParams pp;
  pp.uav = p;
  Pipeline pipe(pp, symmetric_model(3.0));
  CHECK(pipe.warmup_duration() > 1.0);

  UavState s;
  s.rotor_speeds = Vec4::Constant(rotor_speed_for_thrust(p.mass_kg * p.gravity, p));
  WindEstimate first = pipe.step(s);
  CHECK(first.low_confidence);
}

TEST_CASE("estimated direction rotates with the whole scenario") {
  UavParams p;
  const double alpha = 50.0 * kPi / 180.0;
  Mat3 rz = rotation_intermediate_to_inertial(alpha);

  VelocityScript traj;
  traj.segments = {{12.0, Vec3::Zero()}, {8.0, Vec3(1.5, 0.5, 0)}};
  WindScript wind;
  wind.segments = {{20.0, Vec3(3, 1, 0)}};

  VelocityScript traj_rot = traj;
  for (auto& seg : traj_rot.segments) seg.second = rz * seg.second;
  WindScript wind_rot = wind;
  for (auto& seg : wind_rot.segments) seg.second = rz * seg.second;

  auto log_a = run_flight_scenario(p, symmetric_drag(3.0), traj, wind);
  UavParams p_rot = p;
  p_rot.desired_yaw_rad = p.desired_yaw_rad + alpha;
  auto log_b = run_flight_scenario(p_rot, symmetric_drag(3.0), traj_rot, wind_rot);
  REQUIRE(log_a.size() == log_b.size());

  PipelineParams pa, pb;
  pa.uav = p;
  pb.uav = p_rot;
  Pipeline pipe_a(pa, symmetric_model(3.0));
  Pipeline pipe_b(pb, symmetric_model(3.0));
  for (size_t i = 0; i < log_a.size(); ++i) {
    auto ea = pipe_a.step(log_a[i].state);
    auto eb = pipe_b.step(log_b[i].state);
    if (ea.t - log_a.front().state.t <= pipe_a.warmup_duration()) continue;
    if (ea.v_wh < 1.0) continue;
    CHECK(std::abs(wrap_angle(eb.theta_w - ea.theta_w - alpha)) < 1e-3);
  }
}
