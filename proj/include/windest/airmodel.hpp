#pragma once

// Calibration back-end: data cleaning, the horizontal quadratic force-air
// surface, the odd 1-D vertical map, and force -> relative-air prediction.
// All forces/vectors here live in the intermediate frame.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "windest/frames.hpp"

namespace windest {

struct CalibrationPoint {
  Vec3 f_ce = Vec3::Zero();          // estimated external force (N)
  Vec3 relative_air = Vec3::Zero();  // true/pre-calibrated relative air (m/s)
  double weight = 1.0;
};

// V_wh = c0 + c_m*m + c_n*n + c_mm*m^2 + c_nn*n^2 with (m, n) = (f_h cos th_r, f_h sin th_r).
// Vertical map is odd: V_wv = v1*f + v2*f|f| + v3*f^3.
struct ForceAirModel {
  std::array<double, 5> horizontal_coeffs{};  // c0, c_m, c_n, c_mm, c_nn
  std::array<double, 3> vertical_coeffs{};    // basis (f, f|f|, f^3)
  double fit_residual_rms = 0.0;              // horizontal surface RMS (m/s)
  double vertical_residual_rms = 0.0;         // vertical map RMS (m/s)
  double fh_min = 0.0;                        // calibrated horizontal-force envelope (N)
  double fh_max = 0.0;
};

struct PredictedAir {
  Vec3 a_rc = Vec3::Zero();  // relative air vector, intermediate frame (m/s)
  bool low_confidence = false;
};

// Forces below this horizontal magnitude give an indeterminate direction; the
// prediction is still returned but flagged.
inline constexpr double kLowForceThreshold = 0.5;  // N

// (th_r, f_h). th_r = atan2(f_cey, f_cex) with atan2(0,0) = 0; f_h = hypot.
std::pair<double, double> force_polar_components(const Vec3& f_ce);

// k-NN outlier removal in normalized (m, n, V) space. Removes points whose
// mean distance to the k nearest neighbours exceeds threshold * median of
// that statistic, never more than 20% of the set. Throws if fewer than k+1
// points.
std::vector<CalibrationPoint> clean_dataset(const std::vector<CalibrationPoint>& points,
                                            int k = 6, double threshold = 3.0);

// Indices kept by clean_dataset, in input order.
std::vector<int> clean_dataset_indices(const std::vector<CalibrationPoint>& points,
                                       int k = 6, double threshold = 3.0);

struct HorizontalFit {
  std::array<double, 5> coeffs{};
  double residual_rms = 0.0;
};

struct VerticalFit {
  std::array<double, 3> coeffs{};
  double residual_rms = 0.0;
};

// Weighted OLS on basis (1, m, n, m^2, n^2) against horizontal air speed.
// Needs >= 5 points spanning >= 3 distinct force angles and >= 2 distinct
// speeds; rank-deficient systems throw naming the dependent basis terms.
HorizontalFit fit_horizontal_model(const std::vector<CalibrationPoint>& points);

// Weighted OLS on the odd basis (f, f|f|, f^3) against vertical air speed.
// Needs >= 3 distinct f_cez values covering both signs.
VerticalFit fit_vertical_model(const std::vector<CalibrationPoint>& points);

// Surface evaluation, clamped at 0 from below.
double evaluate_horizontal(const ForceAirModel& model, double m, double n);

double evaluate_vertical(const ForceAirModel& model, double f_cez);

// Invert force -> relative air: magnitude from the surface, direction = force
// direction (drag is airflow-aligned), vertical from the odd map.
PredictedAir predict_relative_air(const Vec3& f_ce, const ForceAirModel& model,
                                  double low_force_threshold = kLowForceThreshold);

// Plain-text key=value serialization, bit-exact at 17 significant digits.
std::string model_to_text(const ForceAirModel& model);
ForceAirModel model_from_text(const std::string& text);
void save_model(const ForceAirModel& model, const std::string& path);
ForceAirModel load_model(const std::string& path);

}  // namespace windest
