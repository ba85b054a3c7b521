#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "windest/airmodel.hpp"
#include "windest/calibration.hpp"
#include "windest/dob.hpp"
#include "windest/frames.hpp"
#include "windest/pipeline.hpp"
#include "windest/plant.hpp"
#include "windest/telemetry.hpp"

namespace py = pybind11;
using namespace windest;

PYBIND11_MODULE(_core, m) {
  m.doc() = "DOB-based 3-D wind estimation: plant simulator, observer, "
            "force-air calibration and the streaming pipeline";

  py::class_<UavParams>(m, "UavParams")
      .def(py::init<>())
      .def_readwrite("mass_kg", &UavParams::mass_kg)
      .def_readwrite("gravity", &UavParams::gravity)
      .def_readwrite("thrust_a", &UavParams::thrust_a)
      .def_readwrite("thrust_b", &UavParams::thrust_b)
      .def_readwrite("thrust_c", &UavParams::thrust_c)
      .def_readwrite("observer_gain", &UavParams::observer_gain)
      .def_readwrite("desired_yaw_rad", &UavParams::desired_yaw_rad)
      .def_readwrite("sample_dt", &UavParams::sample_dt)
      .def("validate", &UavParams::validate);

  py::class_<UavState>(m, "UavState")
      .def(py::init<>())
      .def_readwrite("t", &UavState::t)
      .def_readwrite("position", &UavState::position)
      .def_readwrite("velocity", &UavState::velocity)
      .def_readwrite("acceleration", &UavState::acceleration)
      .def_readwrite("attitude", &UavState::attitude)
      .def_readwrite("rotor_speeds", &UavState::rotor_speeds);

  m.def("thrust_from_rpm", &thrust_from_rpm, py::arg("omega"), py::arg("params"));
  m.def("rotor_speed_for_thrust", &rotor_speed_for_thrust, py::arg("u_f"), py::arg("params"));
  m.def("observer_gain_for_tau", &observer_gain_for_tau, py::arg("mass_kg"), py::arg("tau_s"));
  m.def("rotation_body_to_inertial", &rotation_body_to_inertial, py::arg("eta"));
  m.def("rotation_intermediate_to_inertial", &rotation_intermediate_to_inertial,
        py::arg("psi_d"));
  m.def("wrap_angle", &wrap_angle, py::arg("angle"));

  py::class_<ObserverState>(m, "ObserverState")
      .def(py::init<>())
      .def_readwrite("f_e_hat", &ObserverState::f_e_hat)
      .def_readwrite("t", &ObserverState::t);
  m.def("dob_step", &dob_step, py::arg("obs"), py::arg("accel"), py::arg("attitude"),
        py::arg("u_f"), py::arg("params"), py::arg("dt"));
  m.def("convergence_time_constant", &convergence_time_constant, py::arg("params"));
  m.def("to_intermediate", &to_intermediate, py::arg("f_e_inertial"), py::arg("psi_d"));

  py::class_<CalibrationPoint>(m, "CalibrationPoint")
      .def(py::init<>())
      .def_readwrite("f_ce", &CalibrationPoint::f_ce)
      .def_readwrite("relative_air", &CalibrationPoint::relative_air)
      .def_readwrite("weight", &CalibrationPoint::weight);

  py::class_<ForceAirModel>(m, "ForceAirModel")
      .def(py::init<>())
      .def_readwrite("horizontal_coeffs", &ForceAirModel::horizontal_coeffs)
      .def_readwrite("vertical_coeffs", &ForceAirModel::vertical_coeffs)
      .def_readwrite("fit_residual_rms", &ForceAirModel::fit_residual_rms)
      .def_readwrite("vertical_residual_rms", &ForceAirModel::vertical_residual_rms)
      .def_readwrite("fh_min", &ForceAirModel::fh_min)
      .def_readwrite("fh_max", &ForceAirModel::fh_max);

  m.def("force_polar_components", &force_polar_components, py::arg("f_ce"));
  m.def("clean_dataset", &clean_dataset, py::arg("points"), py::arg("k") = 6,
        py::arg("threshold") = 3.0);
  m.def("evaluate_horizontal", &evaluate_horizontal, py::arg("model"), py::arg("m"),
        py::arg("n"));
  m.def("evaluate_vertical", &evaluate_vertical, py::arg("model"), py::arg("f_cez"));
  m.def(
      "predict_relative_air",
      [](const Vec3& f_ce, const ForceAirModel& model, double threshold) {
        const PredictedAir p = predict_relative_air(f_ce, model, threshold);
        return py::make_tuple(p.a_rc, p.low_confidence);
      },
      py::arg("f_ce"), py::arg("model"), py::arg("low_force_threshold") = kLowForceThreshold);
  m.def("model_to_text", &model_to_text, py::arg("model"));
  m.def("model_from_text", &model_from_text, py::arg("text"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  py::class_<DragModel>(m, "DragModel")
      .def(py::init<>())
      .def_readwrite("angular_profile", &DragModel::angular_profile)
      .def_readwrite("vertical_coeff", &DragModel::vertical_coeff)
      .def_readwrite("speed_exponent", &DragModel::speed_exponent)
      .def_readwrite("noise_sigma", &DragModel::noise_sigma)
      .def_readwrite("rng_seed", &DragModel::rng_seed)
      .def("validate", &DragModel::validate)
      .def("coefficient_at", &DragModel::coefficient_at, py::arg("angle_rad"))
      .def_static("constant_profile", &DragModel::constant_profile, py::arg("coeff"),
                  py::arg("vertical_coeff") = 0.25, py::arg("speed_exponent") = 2.0)
      .def_static("surface_matched", &DragModel::surface_matched, py::arg("c_mm"),
                  py::arg("c_nn"), py::arg("knots") = 72, py::arg("vertical_coeff") = 2.0);

  m.def(
      "drag_force",
      [](const Vec3& relative_air, const DragModel& model) {
        return drag_force(relative_air, model);
      },
      py::arg("relative_air"), py::arg("model"));

  py::class_<WindScript> script(m, "WindScript");
  py::enum_<WindScript::Interp>(script, "Interp")
      .value("Step", WindScript::Interp::Step)
      .value("Ramp", WindScript::Interp::Ramp);
  script.def(py::init<>())
      .def_readwrite("segments", &WindScript::segments)
      .def_readwrite("interpolation", &WindScript::interpolation)
      .def("total_duration", &WindScript::total_duration)
      .def("value_at", &WindScript::value_at, py::arg("t"));

  py::class_<TelemetrySample>(m, "TelemetrySample")
      .def(py::init<>())
      .def_readwrite("state", &TelemetrySample::state)
      .def_readwrite("true_wind", &TelemetrySample::true_wind)
      .def_readwrite("true_external_force", &TelemetrySample::true_external_force);

  m.def(
      "read_telemetry",
      [](const std::string& path) {
        const TelemetryLog log = load_telemetry(path);
        std::vector<TelemetrySample> out;
        out.reserve(log.records.size());
        for (const auto& r : log.records) {
          TelemetrySample s;
          s.state = to_uav_state(r);
          if (log.has_wind) s.true_wind = r.wind;
          if (log.has_force) s.true_external_force = r.external_force;
          out.push_back(s);
        }
        return out;
      },
      py::arg("path"), "read a telemetry CSV; truth columns default to zero when absent");

  py::class_<TunnelProtocol>(m, "TunnelProtocol")
      .def(py::init<>())
      .def_readwrite("speeds", &TunnelProtocol::speeds)
      .def_readwrite("yaw_step_rad", &TunnelProtocol::yaw_step_rad)
      .def_readwrite("dwell_s", &TunnelProtocol::dwell_s)
      .def_readwrite("yaw_offset_rad", &TunnelProtocol::yaw_offset_rad)
      .def_readwrite("wind_azimuth_rad", &TunnelProtocol::wind_azimuth_rad)
      .def("cell_count", &TunnelProtocol::cell_count);

  m.def("run_wind_tunnel_scenario", &run_wind_tunnel_scenario, py::arg("params"),
        py::arg("model"), py::arg("protocol") = TunnelProtocol{});
  m.def("run_flight_scenario", &run_flight_scenario, py::arg("params"), py::arg("model"),
        py::arg("trajectory"), py::arg("wind"), py::arg("attitude_tau") = 0.15);

  py::class_<CalibrationOptions>(m, "CalibrationOptions")
      .def(py::init<>())
      .def_readwrite("protocol", &CalibrationOptions::protocol)
      .def_readwrite("average_fraction", &CalibrationOptions::average_fraction)
      .def_readwrite("filter_cutoff_hz", &CalibrationOptions::filter_cutoff_hz)
      .def_readwrite("vertical_dwell_s", &CalibrationOptions::vertical_dwell_s)
      .def_readwrite("clean_k", &CalibrationOptions::clean_k)
      .def_readwrite("clean_threshold", &CalibrationOptions::clean_threshold);
  m.def("calibrate_force_air_model", &calibrate_force_air_model, py::arg("tunnel_log"),
        py::arg("vertical_log"), py::arg("params"), py::arg("options"));

  py::class_<FilterSchedule>(m, "FilterSchedule")
      .def(py::init<>())
      .def_readwrite("f_low_hz", &FilterSchedule::f_low_hz)
      .def_readwrite("f_high_hz", &FilterSchedule::f_high_hz)
      .def_readwrite("v_low", &FilterSchedule::v_low)
      .def_readwrite("v_high", &FilterSchedule::v_high)
      .def_readwrite("slew_hz_per_s", &FilterSchedule::slew_hz_per_s)
      .def("scheduled_cutoff", &FilterSchedule::scheduled_cutoff, py::arg("speed_hint"));

  m.def("wind_triangle", &wind_triangle, py::arg("a_r"), py::arg("a_g"));

  py::class_<WindEstimate>(m, "WindEstimate")
      .def(py::init<>())
      .def_readwrite("t", &WindEstimate::t)
      .def_readwrite("a_w", &WindEstimate::a_w)
      .def_readwrite("v_wh", &WindEstimate::v_wh)
      .def_readwrite("v_wv", &WindEstimate::v_wv)
      .def_readwrite("theta_w", &WindEstimate::theta_w)
      .def_readwrite("low_confidence", &WindEstimate::low_confidence);
  m.def("extract_wind", &extract_wind, py::arg("a_w"), py::arg("t"));

  py::class_<PipelineParams>(m, "PipelineParams")
      .def(py::init<>())
      .def_readwrite("uav", &PipelineParams::uav)
      .def_readwrite("schedule", &PipelineParams::schedule)
      .def_readwrite("low_force_threshold", &PipelineParams::low_force_threshold)
      .def_readwrite("ground_vector_sign", &PipelineParams::ground_vector_sign);

  py::class_<Pipeline>(m, "Pipeline")
      .def(py::init<const PipelineParams&, const ForceAirModel&>(), py::arg("params"),
           py::arg("model"))
      .def("step", &Pipeline::step, py::arg("sample"))
      .def("warmup_duration", &Pipeline::warmup_duration);
}
