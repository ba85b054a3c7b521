#pragma once

// Flat key=value configuration and builders for the runtime types. Every key
// has a default; configs/default.cfg documents the full set.

#include <map>
#include <string>
#include <vector>

#include "windest/calibration.hpp"
#include "windest/frames.hpp"
#include "windest/pipeline.hpp"
#include "windest/plant.hpp"
#include "windest/telemetry.hpp"

namespace windest {

class Config {
 public:
  Config() = default;
  static Config from_text(const std::string& text);
  static Config from_file(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;

 private:
  std::map<std::string, std::string> kv_;
};

UavParams params_from_config(const Config& cfg);
DragModel drag_from_config(const Config& cfg);
FilterSchedule schedule_from_config(const Config& cfg);
PipelineParams pipeline_params_from_config(const Config& cfg);
TunnelProtocol tunnel_from_config(const Config& cfg);
CalibrationOptions calibration_from_config(const Config& cfg);
EvaluateOptions evaluate_from_config(const Config& cfg, const UavParams& params);
AngleConvention angle_convention_from_config(const Config& cfg);

// Script syntax: "dur:vx,vy,vz; dur:vx,vy,vz; ..." (seconds, m/s).
WindScript parse_script(const std::string& text, WindScript::Interp interp);
WindScript script_from_config(const Config& cfg, const std::string& key,
                              const std::string& fallback,
                              WindScript::Interp interp = WindScript::Interp::Step);

}  // namespace windest
