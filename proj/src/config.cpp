#include "windest/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace windest {

namespace {

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw DataError("config: " + what + ": bad number '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v))
    throw DataError("config: " + what + ": bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Config Config::from_text(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw DataError("config: line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = strip(s.substr(0, eq));
    if (key.empty())
      throw DataError("config: line " + std::to_string(lineno) + ": empty key");
    cfg.kv_[key] = strip(s.substr(eq + 1));
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  return parse_double(it->second, key);
}

int Config::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  const int i = static_cast<int>(std::llround(v));
  if (v != static_cast<double>(i)) throw DataError("config: " + key + ": expected integer");
  return i;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DataError("config: " + key + ": expected boolean, got '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  for (const auto& tok : split(it->second, ',')) {
    const std::string s = strip(tok);
    if (s.empty()) throw DataError("config: " + key + ": empty list element");
    out.push_back(parse_double(s, key));
  }
  return out;
}

UavParams params_from_config(const Config& cfg) {
  UavParams p;
  p.mass_kg = cfg.get_double("mass_kg", p.mass_kg);
  p.gravity = cfg.get_double("gravity", p.gravity);
  p.thrust_a = cfg.get_double("thrust_a", p.thrust_a);
  p.thrust_b = cfg.get_double("thrust_b", p.thrust_b);
  p.thrust_c = cfg.get_double("thrust_c", p.thrust_c);
  p.sample_dt = cfg.get_double("sample_dt", p.sample_dt);
  p.desired_yaw_rad = cfg.get_double("desired_yaw_deg", 0.0) * kPi / 180.0;
  if (cfg.has("observer_gain")) {
    const auto g = cfg.get_list("observer_gain", {});
    if (g.size() != 3) throw DataError("config: observer_gain needs 3 values");
    p.observer_gain = Vec3(g[0], g[1], g[2]);
  } else {
    p.observer_gain = observer_gain_for_tau(p.mass_kg, cfg.get_double("observer_tau_s", 0.3));
  }
  p.validate();
  return p;
}

DragModel drag_from_config(const Config& cfg) {
  const std::string profile = cfg.get_string("drag_profile", "default");
  DragModel m;
  if (profile == "default") {
    // keep the irregular built-in shape
  } else if (profile.rfind("constant:", 0) == 0) {
    m = DragModel::constant_profile(parse_double(profile.substr(9), "drag_profile"));
  } else if (profile.rfind("surface:", 0) == 0) {
    const auto parts = split(profile.substr(8), ',');
    if (parts.size() != 2)
      throw DataError("config: drag_profile surface form needs 'surface:c_mm,c_nn'");
    m = DragModel::surface_matched(parse_double(strip(parts[0]), "drag_profile"),
                                   parse_double(strip(parts[1]), "drag_profile"));
  } else if (profile.rfind("knots:", 0) == 0) {
    // "knots:deg:coeff,deg:coeff,..."
    m.angular_profile.clear();
    for (const auto& knot : split(profile.substr(6), ',')) {
      const auto kv = split(strip(knot), ':');
      if (kv.size() != 2) throw DataError("config: drag_profile knot needs 'deg:coeff'");
      m.angular_profile.emplace_back(parse_double(strip(kv[0]), "drag_profile") * kPi / 180.0,
                                     parse_double(strip(kv[1]), "drag_profile"));
    }
  } else {
    throw DataError("config: unknown drag_profile '" + profile + "'");
  }
  m.vertical_coeff = cfg.get_double("drag_vertical_coeff", m.vertical_coeff);
  m.speed_exponent = cfg.get_double("drag_speed_exponent", m.speed_exponent);
  m.noise_sigma = cfg.get_double("drag_noise_sigma", 0.4);
  m.rng_seed = static_cast<std::uint64_t>(cfg.get_double("seed", 1.0));
  m.validate();
  return m;
}

FilterSchedule schedule_from_config(const Config& cfg) {
  FilterSchedule s;
  s.f_low_hz = cfg.get_double("filter_f_low_hz", s.f_low_hz);
  s.f_high_hz = cfg.get_double("filter_f_high_hz", s.f_high_hz);
  s.v_low = cfg.get_double("filter_v_low", s.v_low);
  s.v_high = cfg.get_double("filter_v_high", s.v_high);
  s.slew_hz_per_s = cfg.get_double("filter_slew_hz_per_s", s.slew_hz_per_s);
  return s;
}

PipelineParams pipeline_params_from_config(const Config& cfg) {
  PipelineParams p;
  p.uav = params_from_config(cfg);
  p.schedule = schedule_from_config(cfg);
  p.schedule.validate(p.uav.sample_dt);
  p.low_force_threshold = cfg.get_double("low_force_threshold", p.low_force_threshold);
  p.ground_vector_sign = cfg.get_double("ground_vector_sign", p.ground_vector_sign);
  return p;
}

TunnelProtocol tunnel_from_config(const Config& cfg) {
  TunnelProtocol t;
  t.speeds = cfg.get_list("tunnel_speeds", t.speeds);
  t.yaw_step_rad = cfg.get_double("tunnel_yaw_step_deg", 10.0) * kPi / 180.0;
  t.dwell_s = cfg.get_double("tunnel_dwell_s", t.dwell_s);
  t.yaw_offset_rad = cfg.get_double("tunnel_yaw_offset_deg", 0.0) * kPi / 180.0;
  t.wind_azimuth_rad = cfg.get_double("tunnel_wind_azimuth_deg", 0.0) * kPi / 180.0;
  if (t.speeds.empty()) throw DataError("config: tunnel_speeds must not be empty");
  if (!(t.dwell_s > 0.0)) throw DataError("config: tunnel_dwell_s must be > 0");
  return t;
}

CalibrationOptions calibration_from_config(const Config& cfg) {
  CalibrationOptions o;
  o.protocol = tunnel_from_config(cfg);
  o.average_fraction = cfg.get_double("cal_average_fraction", o.average_fraction);
  o.filter_cutoff_hz = cfg.get_double("cal_filter_cutoff_hz", o.filter_cutoff_hz);
  o.vertical_dwell_s = cfg.get_double("cal_vertical_dwell_s", o.vertical_dwell_s);
  o.clean_k = cfg.get_int("cal_clean_k", o.clean_k);
  o.clean_threshold = cfg.get_double("cal_clean_threshold", o.clean_threshold);
  return o;
}

EvaluateOptions evaluate_from_config(const Config& cfg, const UavParams& params) {
  EvaluateOptions o;
  o.join_tolerance_s = cfg.get_double("eval_join_tolerance_s", params.sample_dt / 2.0);
  o.warmup_s = cfg.get_double("eval_warmup_s", 0.0);
  o.angle_speed_floor = cfg.get_double("eval_angle_speed_floor", o.angle_speed_floor);
  o.speed_floor = cfg.get_double("eval_speed_floor", o.speed_floor);
  return o;
}

AngleConvention angle_convention_from_config(const Config& cfg) {
  const std::string c = cfg.get_string("angle_convention", "heading");
  if (c == "heading") return AngleConvention::Heading;
  if (c == "blowing_from") return AngleConvention::BlowingFrom;
  throw DataError("config: angle_convention must be 'heading' or 'blowing_from'");
}

WindScript parse_script(const std::string& text, WindScript::Interp interp) {
  WindScript script;
  script.interpolation = interp;
  for (const auto& seg : split(text, ';')) {
    const std::string s = strip(seg);
    if (s.empty()) continue;
    const auto colon = s.find(':');
    if (colon == std::string::npos)
      throw DataError("script segment '" + s + "': expected 'dur:vx,vy,vz'");
    const double dur = parse_double(strip(s.substr(0, colon)), "script duration");
    const auto comps = split(s.substr(colon + 1), ',');
    if (comps.size() != 3)
      throw DataError("script segment '" + s + "': expected three components");
    script.segments.emplace_back(
        dur, Vec3(parse_double(strip(comps[0]), "script value"),
                  parse_double(strip(comps[1]), "script value"),
                  parse_double(strip(comps[2]), "script value")));
  }
  script.validate();
  return script;
}

WindScript script_from_config(const Config& cfg, const std::string& key,
                              const std::string& fallback, WindScript::Interp interp) {
  return parse_script(cfg.get_string(key, fallback), interp);
}

}  // namespace windest
