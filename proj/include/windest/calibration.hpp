#pragma once

// Turns tunnel-sweep and vertical-maneuver telemetry into calibration points
// (observer + fixed-cutoff filter front-end, dwell-cell averaging) and fits
// the force-air model.

#include <vector>

#include "windest/airmodel.hpp"
#include "windest/frames.hpp"
#include "windest/plant.hpp"

namespace windest {

struct CalibrationOptions {
  TunnelProtocol protocol;         // dwell timing used to slice the tunnel log
  double average_fraction = 0.5;   // tail portion of each dwell that is averaged
  double filter_cutoff_hz = 0.12;  // fixed front-end cutoff while calibrating
  double vertical_dwell_s = 8.0;   // leg length in the vertical-maneuver log
  int clean_k = 6;
  double clean_threshold = 3.0;
};

// One point per complete dwell cell: averaged filtered f_ce against averaged
// true relative air R_c(yaw)^T (wind - velocity). The log must carry wind
// ground truth.
std::vector<CalibrationPoint> tunnel_calibration_points(const std::vector<TelemetrySample>& log,
                                                        const UavParams& params,
                                                        const CalibrationOptions& options);

// Same slicing with vertical_dwell_s, for up/down maneuver legs.
std::vector<CalibrationPoint> vertical_calibration_points(
    const std::vector<TelemetrySample>& log, const UavParams& params,
    const CalibrationOptions& options);

// Clean + fit both surfaces. The vertical log may be empty, leaving the
// vertical map zero. Throws on degenerate datasets.
ForceAirModel calibrate_force_air_model(const std::vector<TelemetrySample>& tunnel_log,
                                        const std::vector<TelemetrySample>& vertical_log,
                                        const UavParams& params,
                                        const CalibrationOptions& options);

}  // namespace windest
