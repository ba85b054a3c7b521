#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "windest/calibration.hpp"
#include "windest/pipeline.hpp"

using namespace windest;

namespace {

const double kCmm = 1.0 / 9.0;
const double kCnn = 1.0 / 12.0;

CalibrationOptions fast_options() {
  CalibrationOptions opt;
  opt.protocol.speeds = {0.0, 2.0, 4.0, 6.0, 8.0};
  opt.protocol.yaw_step_rad = kPi / 6.0;  // 12 headings
  opt.protocol.dwell_s = 8.0;
  opt.filter_cutoff_hz = 0.5;  // faster settling keeps the test short
  opt.vertical_dwell_s = 6.0;
  return opt;
}

}  // namespace

TEST_CASE("dwell slicing yields one point per complete cell") {
  UavParams p;
  CalibrationOptions opt = fast_options();
  opt.protocol.speeds = {0.0, 3.0};
  opt.protocol.yaw_step_rad = kPi / 2.0;
  opt.protocol.dwell_s = 4.0;
  auto model = DragModel::surface_matched(kCmm, kCnn);
  auto log = run_wind_tunnel_scenario(p, model, opt.protocol);
  auto pts = tunnel_calibration_points(log, p, opt);
  CHECK(pts.size() == 8u);  // 2 speeds x 4 headings

  // truncating the log drops the incomplete trailing cell
  log.resize(log.size() - 150);
  CHECK(tunnel_calibration_points(log, p, opt).size() == 7u);

  CHECK_THROWS_AS(tunnel_calibration_points({}, p, opt), std::runtime_error);
}

TEST_CASE("dwell averages match the scripted tunnel conditions") {
  UavParams p;
  CalibrationOptions opt = fast_options();
  opt.protocol.speeds = {4.0};
  opt.protocol.yaw_step_rad = kPi;  // 2 headings
  opt.protocol.dwell_s = 10.0;
  auto model = DragModel::surface_matched(kCmm, kCnn);
  auto log = run_wind_tunnel_scenario(p, model, opt.protocol);
  auto pts = tunnel_calibration_points(log, p, opt);
  REQUIRE(pts.size() == 2u);
  // hovering in a 4 m/s tunnel: relative air is the wind rotated into the
  // vehicle-yaw frame; the hold loop leaves a few 1e-3 of settling residual
  CHECK(std::hypot(pts[0].relative_air[0], pts[0].relative_air[1]) ==
        doctest::Approx(4.0).epsilon(5e-3));
  CHECK(pts[0].relative_air[0] == doctest::Approx(4.0).epsilon(5e-3));
  // second cell yawed by pi: same airflow seen reversed
  CHECK(pts[1].relative_air[0] == doctest::Approx(-4.0).epsilon(5e-3));
  // measured force agrees with the drag law at the dwell condition
  Vec3 expected = drag_force(Vec3(4.0, 0.0, 0.0), model);
  CHECK((pts[0].f_ce - expected).norm() < 0.1);
}

TEST_CASE("calibration recovers the generating surface") {
  UavParams p;
  CalibrationOptions opt = fast_options();
  auto model = DragModel::surface_matched(kCmm, kCnn);  // noiseless
  auto tunnel_log = run_wind_tunnel_scenario(p, model, opt.protocol);

  // three speed magnitudes: the odd basis needs more than two to be full rank
  VelocityScript vert;
  vert.segments = {{10.0, Vec3(0, 0, 0.5)}, {10.0, Vec3(0, 0, -0.5)},
                   {10.0, Vec3(0, 0, 1.0)}, {10.0, Vec3(0, 0, -1.0)},
                   {10.0, Vec3(0, 0, 2.0)}, {10.0, Vec3(0, 0, -2.0)}};
  WindScript calm;
  calm.segments = {{60.0, Vec3::Zero()}};
  opt.vertical_dwell_s = 10.0;
  auto vertical_log = run_flight_scenario(p, model, vert, calm);

  ForceAirModel fitted = calibrate_force_air_model(tunnel_log, vertical_log, p, opt);

  CHECK(std::abs(fitted.horizontal_coeffs[0]) < 0.02);
  CHECK(std::abs(fitted.horizontal_coeffs[1]) < 0.01);
  CHECK(std::abs(fitted.horizontal_coeffs[2]) < 0.01);
  CHECK(fitted.horizontal_coeffs[3] == doctest::Approx(kCmm).epsilon(0.05));
  CHECK(fitted.horizontal_coeffs[4] == doctest::Approx(kCnn).epsilon(0.05));
  CHECK(fitted.fit_residual_rms < 0.05);

  // vertical channel: coeff 2 with exponent 0.5 means V = f|f|/4
  CHECK(std::abs(fitted.vertical_coeffs[0]) < 0.02);
  CHECK(fitted.vertical_coeffs[1] == doctest::Approx(0.25).epsilon(0.05));
  CHECK(fitted.vertical_residual_rms < 0.05);

  // envelope spans the swept forces: up to |f| = sqrt(8/c) at 8 m/s
  CHECK(fitted.fh_min < 3.0);
  CHECK(fitted.fh_max == doctest::Approx(std::sqrt(8.0 / kCnn)).epsilon(0.15));

  // the fitted model drives the pipeline to the true tunnel wind
  PipelineParams pp;
  pp.uav = p;
  Pipeline pipe(pp, fitted);
  TunnelProtocol check_proto;
  check_proto.speeds = {5.0};
  check_proto.yaw_step_rad = 2.0 * kPi / 3.0;
  check_proto.dwell_s = 12.0;
  auto probe = run_wind_tunnel_scenario(p, model, check_proto);
  Vec3 mean = Vec3::Zero();
  int n = 0;
  for (const auto& s : probe) {
    auto e = pipe.step(s.state);
    double rel = std::fmod(e.t - probe.front().state.t, check_proto.dwell_s);
    if (e.t - probe.front().state.t > pipe.warmup_duration() && rel > 9.0) {
      mean += e.a_w;
      ++n;
    }
  }
  REQUIRE(n > 0);
  mean /= n;
  CHECK((mean - Vec3(5, 0, 0)).norm() < 0.15);
}

TEST_CASE("missing vertical log leaves the vertical map zero") {
  UavParams p;
  CalibrationOptions opt = fast_options();
  opt.protocol.speeds = {0.0, 4.0, 8.0};
  auto model = DragModel::surface_matched(kCmm, kCnn);
  auto tunnel_log = run_wind_tunnel_scenario(p, model, opt.protocol);
  ForceAirModel fitted = calibrate_force_air_model(tunnel_log, {}, p, opt);
  CHECK(fitted.vertical_coeffs[0] == 0.0);
  CHECK(fitted.vertical_coeffs[1] == 0.0);
  CHECK(fitted.vertical_coeffs[2] == 0.0);
  CHECK(evaluate_vertical(fitted, 3.0) == 0.0);
  CHECK(fitted.horizontal_coeffs[3] == doctest::Approx(kCmm).epsilon(0.05));
}

TEST_CASE("vertical slicing uses its own dwell length") {
  UavParams p;
  CalibrationOptions opt = fast_options();
  opt.vertical_dwell_s = 10.0;
  VelocityScript vert;
  vert.segments = {{10.0, Vec3(0, 0, 1.5)}, {10.0, Vec3(0, 0, -1.5)}, {10.0, Vec3(0, 0, 0.5)}};
  WindScript calm;
  calm.segments = {{30.0, Vec3::Zero()}};
  auto model = DragModel::surface_matched(kCmm, kCnn);
  auto log = run_flight_scenario(p, model, vert, calm);
  auto pts = vertical_calibration_points(log, p, opt);
  CHECK(pts.size() == 3u);
  // z-down: descending at +1.5 m/s gives negative relative air
  CHECK(pts[0].relative_air[2] == doctest::Approx(-1.5).epsilon(0.02));
  CHECK(pts[1].relative_air[2] == doctest::Approx(+1.5).epsilon(0.02));
}
