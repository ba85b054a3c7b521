#pragma once

// CSV telemetry/estimate formats, timestamp-joined error evaluation and the
// Table-style text/CSV reports.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "windest/pipeline.hpp"
#include "windest/plant.hpp"

namespace windest {

// Malformed or inconsistent input data (maps to CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TelemetryRecord {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 attitude = Vec3::Zero();  // roll, pitch, yaw (rad)
  Vec4 rotor_speeds = Vec4::Zero();
  Vec3 wind = Vec3::Zero();            // meaningful iff the log has wind columns
  Vec3 external_force = Vec3::Zero();  // meaningful iff the log has force columns
};

struct TelemetryLog {
  bool has_wind = false;
  bool has_force = false;
  std::vector<TelemetryRecord> records;
};

inline constexpr const char* kTelemetryHeader =
    "t,px,py,pz,vx,vy,vz,ax,ay,az,roll,pitch,yaw,omega1,omega2,omega3,omega4";
inline constexpr const char* kWindColumns = ",wind_x,wind_y,wind_z";
inline constexpr const char* kForceColumns = ",fe_x,fe_y,fe_z";
inline constexpr const char* kEstimateHeader = "t,Awx,Awy,Awz,Vwh,Vwv,theta_w_deg,confidence";

// '#' comments allowed; optional column groups detected from the header;
// timestamps must increase strictly. Throws DataError with a line number.
TelemetryLog parse_telemetry(std::istream& in);
TelemetryLog load_telemetry(const std::string& path);
// Values at 17 significant digits: write-then-parse is lossless.
void write_telemetry(const TelemetryLog& log, std::ostream& out);
void save_telemetry(const TelemetryLog& log, const std::string& path);

TelemetryLog to_telemetry_log(const std::vector<TelemetrySample>& samples,
                              bool include_wind = true, bool include_force = true);
UavState to_uav_state(const TelemetryRecord& record);
// Requires wind columns (calibration truth).
std::vector<TelemetrySample> to_samples(const TelemetryLog& log);

enum class AngleConvention { Heading, BlowingFrom };

struct EstimateRecord {
  double t = 0.0;
  Vec3 a_w = Vec3::Zero();
  double v_wh = 0.0;
  double v_wv = 0.0;
  double theta_w_deg = 0.0;  // [0, 360) in the configured convention
  int confidence = 1;        // 1 = trustworthy, 0 = flagged
};

EstimateRecord to_estimate_record(const WindEstimate& estimate, AngleConvention convention);

std::vector<EstimateRecord> parse_estimates(std::istream& in);
std::vector<EstimateRecord> load_estimates(const std::string& path);
void write_estimates(const std::vector<EstimateRecord>& estimates, std::ostream& out);
void save_estimates(const std::vector<EstimateRecord>& estimates, const std::string& path);

struct EvaluateOptions {
  double join_tolerance_s = 0.005;  // half the nominal sample period
  double warmup_s = 0.0;            // skip estimates this close to the log start
  double angle_speed_floor = 1.0;   // true m/s below which direction is undefined
  double speed_floor = 0.0;         // drop samples below this true speed entirely
};

struct SpeedBin {
  double lo = 0.0, hi = 0.0;  // true speed range (m/s)
  int count = 0;
  int angle_count = 0;
  double mean_speed_err = 0.0;
  double mean_angle_err_deg = 0.0;
};

struct ErrorReport {
  double mean_speed_err = 0.0, max_speed_err = 0.0;          // m/s
  double mean_angle_err_deg = 0.0, max_angle_err_deg = 0.0;  // wrapped to [0, 180]
  int sample_count = 0;
  int angle_sample_count = 0;
  int dropped_unmatched = 0;
  double warmup_excluded_s = 0.0;
  double speed_floor = 0.0;
  std::vector<SpeedBin> bins;  // 1 m/s bins over true speed
};

// Nearest-timestamp join of estimates against wind ground truth. Angles are
// compared from the wind vectors, so the report is convention-free. Throws
// DataError when nothing overlaps.
ErrorReport evaluate_errors(const std::vector<EstimateRecord>& estimates,
                            const TelemetryLog& truth, const EvaluateOptions& options = {});

// Includes the reference targets (mean 0.11 m/s / 2.8 deg, max 0.21 m/s /
// 5.3 deg) the tunnel analog is compared against.
std::string report_to_text(const ErrorReport& report);
std::string report_to_csv(const ErrorReport& report);

}  // namespace windest
