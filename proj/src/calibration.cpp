#include "windest/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "windest/dob.hpp"
#include "windest/pipeline.hpp"

namespace windest {

namespace {

struct FrontEndSample {
  double t = 0.0;
  Vec3 f_ce = Vec3::Zero();        // filtered, intermediate frame
  Vec3 relative_air = Vec3::Zero();  // truth, intermediate frame
};

// Observer + fixed-cutoff filter over a truth-carrying log.
std::vector<FrontEndSample> run_front_end(const std::vector<TelemetrySample>& log,
                                          const UavParams& params, double cutoff_hz) {
  FilterSchedule fixed;
  fixed.f_low_hz = fixed.f_high_hz = cutoff_hz;
  fixed.validate(params.sample_dt);

  ObserverState obs;
  FilterState filt(fixed);
  std::vector<FrontEndSample> out;
  out.reserve(log.size());
  double last_t = 0.0;
  bool has_prev = false;
  for (const auto& sample : log) {
    const UavState& st = sample.state;
    double dt = params.sample_dt;
    if (has_prev) {
      dt = st.t - last_t;
      if (!(dt > 0.0))
        throw std::runtime_error("calibration: non-monotonic timestamp at t=" +
                                 std::to_string(st.t));
    }
    last_t = st.t;
    has_prev = true;

    const double u_f = thrust_from_rpm(st.rotor_speeds, params);
    obs = dob_step(obs, st.acceleration, st.attitude, u_f, params, dt);
    const double psi = st.attitude[2];
    const Mat3 r_c = rotation_intermediate_to_inertial(psi);
    auto [next_filt, f_ce] = filter_step(filt, r_c.transpose() * obs.f_e_hat, 0.0, dt);
    filt = next_filt;

    FrontEndSample fe;
    fe.t = st.t;
    fe.f_ce = f_ce;
    fe.relative_air = r_c.transpose() * (sample.true_wind - st.velocity);
    out.push_back(fe);
  }
  return out;
}

// Average the tail of each complete dwell window into one point.
std::vector<CalibrationPoint> dwell_points(const std::vector<FrontEndSample>& samples,
                                           double dwell_s, double average_fraction) {
  if (samples.empty()) throw std::runtime_error("calibration: empty log");
  if (!(dwell_s > 0.0)) throw std::invalid_argument("calibration: dwell must be > 0");
  if (!(average_fraction > 0.0 && average_fraction <= 1.0))
    throw std::invalid_argument("calibration: average_fraction must be in (0, 1]");

  const double t0 = samples.front().t;
  const double span = samples.back().t - t0;
  const int cells = static_cast<int>(std::floor(span / dwell_s + 1e-9)) + 1;
  const double dt_est = span / std::max<size_t>(1, samples.size() - 1);

  std::vector<Vec3> f_sum(cells, Vec3::Zero()), a_sum(cells, Vec3::Zero());
  std::vector<int> count(cells, 0);
  for (const auto& s : samples) {
    const double rel = s.t - t0;
    const int cell = std::min(cells - 1, static_cast<int>(std::floor(rel / dwell_s + 1e-9)));
    const double in_cell = rel - cell * dwell_s;
    if (in_cell >= (1.0 - average_fraction) * dwell_s - 1e-9) {
      f_sum[cell] += s.f_ce;
      a_sum[cell] += s.relative_air;
      ++count[cell];
    }
  }

  std::vector<CalibrationPoint> points;
  points.reserve(cells);
  for (int c = 0; c < cells; ++c) {
    // only cells the log fully covers, with one sample of slack at the end
    const bool complete = span + 1.5 * dt_est >= (c + 1) * dwell_s;
    if (!complete || count[c] == 0) continue;
    CalibrationPoint p;
    p.f_ce = f_sum[c] / count[c];
    p.relative_air = a_sum[c] / count[c];
    points.push_back(p);
  }
  if (points.empty()) throw std::runtime_error("calibration: no complete dwell cells in log");
  return points;
}

}  // namespace

std::vector<CalibrationPoint> tunnel_calibration_points(const std::vector<TelemetrySample>& log,
                                                        const UavParams& params,
                                                        const CalibrationOptions& options) {
  return dwell_points(run_front_end(log, params, options.filter_cutoff_hz),
                      options.protocol.dwell_s, options.average_fraction);
}

std::vector<CalibrationPoint> vertical_calibration_points(
    const std::vector<TelemetrySample>& log, const UavParams& params,
    const CalibrationOptions& options) {
  return dwell_points(run_front_end(log, params, options.filter_cutoff_hz),
                      options.vertical_dwell_s, options.average_fraction);
}

ForceAirModel calibrate_force_air_model(const std::vector<TelemetrySample>& tunnel_log,
                                        const std::vector<TelemetrySample>& vertical_log,
                                        const UavParams& params,
                                        const CalibrationOptions& options) {
  const auto tunnel_points = tunnel_calibration_points(tunnel_log, params, options);
  const auto cleaned =
      clean_dataset(tunnel_points, options.clean_k, options.clean_threshold);
  const HorizontalFit hfit = fit_horizontal_model(cleaned);

  ForceAirModel model;
  model.horizontal_coeffs = hfit.coeffs;
  model.fit_residual_rms = hfit.residual_rms;
  model.fh_min = std::numeric_limits<double>::infinity();
  model.fh_max = 0.0;
  for (const auto& p : cleaned) {
    const double fh = std::hypot(p.f_ce.x(), p.f_ce.y());
    model.fh_min = std::min(model.fh_min, fh);
    model.fh_max = std::max(model.fh_max, fh);
  }

  if (!vertical_log.empty()) {
    auto vpoints = vertical_calibration_points(vertical_log, params, options);
    // clean in a remapped space so the statistic sees (f_cez, |V_z|)
    std::vector<CalibrationPoint> remapped(vpoints.size());
    for (size_t i = 0; i < vpoints.size(); ++i) {
      remapped[i].f_ce = Vec3(vpoints[i].f_ce.z(), 0.0, 0.0);
      remapped[i].relative_air = Vec3(vpoints[i].relative_air.z(), 0.0, 0.0);
    }
    // deliberate few-leg protocols are too small for the k-NN vote; take all
    std::vector<CalibrationPoint> vclean;
    if (vpoints.size() > static_cast<size_t>(options.clean_k)) {
      for (int idx : clean_dataset_indices(remapped, options.clean_k, options.clean_threshold))
        vclean.push_back(vpoints[idx]);
    } else {
      vclean = vpoints;
    }
    const VerticalFit vfit = fit_vertical_model(vclean);
    model.vertical_coeffs = vfit.coeffs;
    model.vertical_residual_rms = vfit.residual_rms;
  }
  return model;
}

}  // namespace windest
