#include "windest/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace windest {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_field(const std::string& field, int lineno, const std::string& column) {
  const std::string s = strip(field);
  if (s.empty())
    throw DataError("line " + std::to_string(lineno) + ": empty value in column '" + column +
                    "'");
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size())
    throw DataError("line " + std::to_string(lineno) + ": bad number '" + s + "' in column '" +
                    column + "'");
  if (!std::isfinite(v))
    throw DataError("line " + std::to_string(lineno) + ": non-finite value in column '" +
                    column + "'");
  return v;
}

void append17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

std::vector<std::string> header_columns(const char* base, bool wind, bool force) {
  std::string h = base;
  if (wind) h += kWindColumns;
  if (force) h += kForceColumns;
  return split_csv(h);
}

}  // namespace

TelemetryLog parse_telemetry(std::istream& in) {
  TelemetryLog log;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  std::vector<std::string> columns;
  double prev_t = 0.0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    if (!header_seen) {
      const auto cols = split_csv(s);
      const auto base = header_columns(kTelemetryHeader, false, false);
      if (cols.size() < base.size() ||
          !std::equal(base.begin(), base.end(), cols.begin(),
                      [](const std::string& a, const std::string& b) { return a == strip(b); }))
        throw DataError("line " + std::to_string(lineno) + ": unexpected telemetry header");
      size_t extra = base.size();
      if (extra < cols.size() && strip(cols[extra]) == "wind_x") {
        if (cols.size() < extra + 3 || strip(cols[extra + 1]) != "wind_y" ||
            strip(cols[extra + 2]) != "wind_z")
          throw DataError("line " + std::to_string(lineno) + ": malformed wind columns");
        log.has_wind = true;
        extra += 3;
      }
      if (extra < cols.size() && strip(cols[extra]) == "fe_x") {
        if (cols.size() < extra + 3 || strip(cols[extra + 1]) != "fe_y" ||
            strip(cols[extra + 2]) != "fe_z")
          throw DataError("line " + std::to_string(lineno) + ": malformed force columns");
        log.has_force = true;
        extra += 3;
      }
      if (extra != cols.size())
        throw DataError("line " + std::to_string(lineno) + ": unexpected trailing columns");
      columns = header_columns(kTelemetryHeader, log.has_wind, log.has_force);
      header_seen = true;
      continue;
    }

    const auto fields = split_csv(s);
    if (fields.size() != columns.size())
      throw DataError("line " + std::to_string(lineno) + ": expected " +
                      std::to_string(columns.size()) + " fields, got " +
                      std::to_string(fields.size()));
    TelemetryRecord r;
    int i = 0;
    auto take = [&]() {
      const double v = parse_field(fields[i], lineno, columns[i]);
      ++i;
      return v;
    };
    r.t = take();
    for (int a = 0; a < 3; ++a) r.position[a] = take();
    for (int a = 0; a < 3; ++a) r.velocity[a] = take();
    for (int a = 0; a < 3; ++a) r.acceleration[a] = take();
    for (int a = 0; a < 3; ++a) r.attitude[a] = take();
    for (int a = 0; a < 4; ++a) r.rotor_speeds[a] = take();
    if (log.has_wind)
      for (int a = 0; a < 3; ++a) r.wind[a] = take();
    if (log.has_force)
      for (int a = 0; a < 3; ++a) r.external_force[a] = take();

    if (!log.records.empty() && !(r.t > prev_t))
      throw DataError("line " + std::to_string(lineno) + ": non-monotonic timestamp " +
                      std::to_string(r.t));
    prev_t = r.t;
    log.records.push_back(r);
  }
  if (!header_seen) throw DataError("telemetry: missing header row");
  return log;
}

TelemetryLog load_telemetry(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open telemetry file '" + path + "'");
  return parse_telemetry(in);
}

void write_telemetry(const TelemetryLog& log, std::ostream& out) {
  std::string line = kTelemetryHeader;
  if (log.has_wind) line += kWindColumns;
  if (log.has_force) line += kForceColumns;
  line += "\n";
  out << line;
  for (const auto& r : log.records) {
    line.clear();
    append17(line, r.t);
    auto push = [&](double v) {
      line += ',';
      append17(line, v);
    };
    for (int a = 0; a < 3; ++a) push(r.position[a]);
    for (int a = 0; a < 3; ++a) push(r.velocity[a]);
    for (int a = 0; a < 3; ++a) push(r.acceleration[a]);
    for (int a = 0; a < 3; ++a) push(r.attitude[a]);
    for (int a = 0; a < 4; ++a) push(r.rotor_speeds[a]);
    if (log.has_wind)
      for (int a = 0; a < 3; ++a) push(r.wind[a]);
    if (log.has_force)
      for (int a = 0; a < 3; ++a) push(r.external_force[a]);
    line += '\n';
    out << line;
  }
}

void save_telemetry(const TelemetryLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_telemetry(log, out);
  if (!out) throw DataError("write failed for '" + path + "'");
}

TelemetryLog to_telemetry_log(const std::vector<TelemetrySample>& samples, bool include_wind,
                              bool include_force) {
  TelemetryLog log;
  log.has_wind = include_wind;
  log.has_force = include_force;
  log.records.reserve(samples.size());
  for (const auto& s : samples) {
    TelemetryRecord r;
    r.t = s.state.t;
    r.position = s.state.position;
    r.velocity = s.state.velocity;
    r.acceleration = s.state.acceleration;
    r.attitude = s.state.attitude;
    r.rotor_speeds = s.state.rotor_speeds;
    if (include_wind) r.wind = s.true_wind;
    if (include_force) r.external_force = s.true_external_force;
    log.records.push_back(r);
  }
  return log;
}

UavState to_uav_state(const TelemetryRecord& record) {
  UavState st;
  st.t = record.t;
  st.position = record.position;
  st.velocity = record.velocity;
  st.acceleration = record.acceleration;
  st.attitude = record.attitude;
  st.rotor_speeds = record.rotor_speeds;
  return st;
}

std::vector<TelemetrySample> to_samples(const TelemetryLog& log) {
  if (!log.has_wind) throw DataError("telemetry log lacks wind ground-truth columns");
  std::vector<TelemetrySample> samples;
  samples.reserve(log.records.size());
  for (const auto& r : log.records) {
    TelemetrySample s;
    s.state = to_uav_state(r);
    s.true_wind = r.wind;
    if (log.has_force) s.true_external_force = r.external_force;
    samples.push_back(s);
  }
  return samples;
}

EstimateRecord to_estimate_record(const WindEstimate& estimate, AngleConvention convention) {
  EstimateRecord r;
  r.t = estimate.t;
  r.a_w = estimate.a_w;
  r.v_wh = estimate.v_wh;
  r.v_wv = estimate.v_wv;
  double deg = estimate.theta_w * 180.0 / kPi;
  if (convention == AngleConvention::BlowingFrom) deg += 180.0;
  deg = std::fmod(deg, 360.0);
  if (deg < 0.0) deg += 360.0;
  r.theta_w_deg = deg;
  r.confidence = estimate.low_confidence ? 0 : 1;
  return r;
}

std::vector<EstimateRecord> parse_estimates(std::istream& in) {
  std::vector<EstimateRecord> out;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  const auto columns = split_csv(kEstimateHeader);
  double prev_t = 0.0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    if (!header_seen) {
      const auto cols = split_csv(s);
      if (cols.size() != columns.size() ||
          !std::equal(columns.begin(), columns.end(), cols.begin(),
                      [](const std::string& a, const std::string& b) { return a == strip(b); }))
        throw DataError("line " + std::to_string(lineno) + ": unexpected estimates header");
      header_seen = true;
      continue;
    }
    const auto fields = split_csv(s);
    if (fields.size() != columns.size())
      throw DataError("line " + std::to_string(lineno) + ": expected " +
                      std::to_string(columns.size()) + " fields, got " +
                      std::to_string(fields.size()));
    EstimateRecord r;
    r.t = parse_field(fields[0], lineno, columns[0]);
    for (int a = 0; a < 3; ++a) r.a_w[a] = parse_field(fields[1 + a], lineno, columns[1 + a]);
    r.v_wh = parse_field(fields[4], lineno, columns[4]);
    r.v_wv = parse_field(fields[5], lineno, columns[5]);
    r.theta_w_deg = parse_field(fields[6], lineno, columns[6]);
    r.confidence = static_cast<int>(parse_field(fields[7], lineno, columns[7]));
    if (!out.empty() && !(r.t > prev_t))
      throw DataError("line " + std::to_string(lineno) + ": non-monotonic timestamp");
    prev_t = r.t;
    out.push_back(r);
  }
  if (!header_seen) throw DataError("estimates: missing header row");
  return out;
}

std::vector<EstimateRecord> load_estimates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open estimates file '" + path + "'");
  return parse_estimates(in);
}

void write_estimates(const std::vector<EstimateRecord>& estimates, std::ostream& out) {
  out << kEstimateHeader << "\n";
  std::string line;
  for (const auto& r : estimates) {
    line.clear();
    append17(line, r.t);
    auto push = [&](double v) {
      line += ',';
      append17(line, v);
    };
    for (int a = 0; a < 3; ++a) push(r.a_w[a]);
    push(r.v_wh);
    push(r.v_wv);
    push(r.theta_w_deg);
    line += ',';
    line += std::to_string(r.confidence);
    line += '\n';
    out << line;
  }
}

void save_estimates(const std::vector<EstimateRecord>& estimates, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_estimates(estimates, out);
  if (!out) throw DataError("write failed for '" + path + "'");
}

ErrorReport evaluate_errors(const std::vector<EstimateRecord>& estimates,
                            const TelemetryLog& truth, const EvaluateOptions& options) {
  if (!truth.has_wind) throw DataError("evaluate: truth log lacks wind columns");
  if (estimates.empty()) throw DataError("evaluate: no estimates");
  if (truth.records.empty()) throw DataError("evaluate: empty truth log");

  ErrorReport report;
  report.warmup_excluded_s = options.warmup_s;
  report.speed_floor = options.speed_floor;

  // the nearest-neighbour walk below needs time order; accept any record order
  std::vector<EstimateRecord> sorted = estimates;
  std::sort(sorted.begin(), sorted.end(),
            [](const EstimateRecord& a, const EstimateRecord& b) { return a.t < b.t; });

  const double t_begin = sorted.front().t + options.warmup_s;
  size_t j = 0;
  double speed_sum = 0.0, angle_sum = 0.0;
  struct BinAcc {
    int count = 0, angle_count = 0;
    double speed = 0.0, angle = 0.0;
  };
  std::vector<BinAcc> bins;

  for (const auto& est : sorted) {
    if (est.t < t_begin) continue;
    while (j + 1 < truth.records.size() &&
           std::abs(truth.records[j + 1].t - est.t) <= std::abs(truth.records[j].t - est.t))
      ++j;
    const TelemetryRecord& tr = truth.records[j];
    if (std::abs(tr.t - est.t) > options.join_tolerance_s) {
      ++report.dropped_unmatched;
      continue;
    }

    const double true_speed = std::hypot(tr.wind.x(), tr.wind.y());
    if (true_speed < options.speed_floor) continue;

    const double est_speed = std::hypot(est.a_w.x(), est.a_w.y());
    const double speed_err = std::abs(est_speed - true_speed);
    speed_sum += speed_err;
    report.max_speed_err = std::max(report.max_speed_err, speed_err);
    ++report.sample_count;

    const size_t bin = static_cast<size_t>(std::max(0.0, std::floor(true_speed)));
    if (bins.size() <= bin) bins.resize(bin + 1);
    bins[bin].count += 1;
    bins[bin].speed += speed_err;

    if (true_speed >= options.angle_speed_floor) {
      const double est_angle = std::atan2(est.a_w.y(), est.a_w.x());
      const double true_angle = std::atan2(tr.wind.y(), tr.wind.x());
      const double err_deg = std::abs(wrap_angle(est_angle - true_angle)) * 180.0 / kPi;
      angle_sum += err_deg;
      report.max_angle_err_deg = std::max(report.max_angle_err_deg, err_deg);
      ++report.angle_sample_count;
      bins[bin].angle_count += 1;
      bins[bin].angle += err_deg;
    }
  }

  if (report.sample_count == 0)
    throw DataError("evaluate: no overlapping samples between estimates and truth");
  report.mean_speed_err = speed_sum / report.sample_count;
  if (report.angle_sample_count > 0)
    report.mean_angle_err_deg = angle_sum / report.angle_sample_count;

  for (size_t b = 0; b < bins.size(); ++b) {
    if (bins[b].count == 0) continue;
    SpeedBin sb;
    sb.lo = static_cast<double>(b);
    sb.hi = static_cast<double>(b + 1);
    sb.count = bins[b].count;
    sb.angle_count = bins[b].angle_count;
    sb.mean_speed_err = bins[b].speed / bins[b].count;
    sb.mean_angle_err_deg =
        bins[b].angle_count > 0 ? bins[b].angle / bins[b].angle_count : 0.0;
    report.bins.push_back(sb);
  }
  return report;
}

std::string report_to_text(const ErrorReport& report) {
  std::ostringstream os;
  char buf[160];
  os << "wind estimation error report\n";
  std::snprintf(buf, sizeof(buf), "samples evaluated:      %d (angle-eligible: %d)\n",
                report.sample_count, report.angle_sample_count);
  os << buf;
  std::snprintf(buf, sizeof(buf), "unmatched estimates:    %d\n", report.dropped_unmatched);
  os << buf;
  std::snprintf(buf, sizeof(buf), "warm-up excluded:       %.3f s\n", report.warmup_excluded_s);
  os << buf;
  std::snprintf(buf, sizeof(buf), "true-speed floor:       %.3f m/s\n", report.speed_floor);
  os << buf;
  std::snprintf(buf, sizeof(buf), "mean speed error:       %.4f m/s\n", report.mean_speed_err);
  os << buf;
  std::snprintf(buf, sizeof(buf), "max speed error:        %.4f m/s\n", report.max_speed_err);
  os << buf;
  std::snprintf(buf, sizeof(buf), "mean angle error:       %.3f deg\n",
                report.mean_angle_err_deg);
  os << buf;
  std::snprintf(buf, sizeof(buf), "max angle error:        %.3f deg\n",
                report.max_angle_err_deg);
  os << buf;
  os << "reference targets (airborne wind-tunnel evaluation):\n";
  os << "  mean speed 0.11 m/s, mean angle 2.8 deg, max speed 0.21 m/s, max angle 5.3 deg\n";
  os << "per-speed breakdown (true horizontal speed, 1 m/s bins):\n";
  for (const auto& b : report.bins) {
    std::snprintf(buf, sizeof(buf),
                  "  [%4.1f, %4.1f) m/s: n=%-7d speed %.4f m/s   angle %.3f deg (n=%d)\n",
                  b.lo, b.hi, b.count, b.mean_speed_err, b.mean_angle_err_deg, b.angle_count);
    os << buf;
  }
  return os.str();
}

std::string report_to_csv(const ErrorReport& report) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count,mean_speed_err,angle_count,mean_angle_err_deg\n";
  char buf[160];
  for (const auto& b : report.bins) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%.17g,%d,%.17g\n", b.lo, b.hi, b.count,
                  b.mean_speed_err, b.angle_count, b.mean_angle_err_deg);
    os << buf;
  }
  os << "# overall\n";
  os << "# mean_speed_err,max_speed_err,mean_angle_err_deg,max_angle_err_deg,samples,angle_"
        "samples,unmatched\n";
  std::snprintf(buf, sizeof(buf), "# %.17g,%.17g,%.17g,%.17g,%d,%d,%d\n", report.mean_speed_err,
                report.max_speed_err, report.mean_angle_err_deg, report.max_angle_err_deg,
                report.sample_count, report.angle_sample_count, report.dropped_unmatched);
  os << buf;
  return os.str();
}

}  // namespace windest
