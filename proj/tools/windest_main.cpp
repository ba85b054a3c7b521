// windest — simulate / calibrate / estimate / evaluate workflows.
// Exit codes: 0 success, 1 usage error, 2 data or processing fault.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "windest/calibration.hpp"
#include "windest/config.hpp"
#include "windest/pipeline.hpp"
#include "windest/plant.hpp"
#include "windest/telemetry.hpp"

namespace {

using namespace windest;

Config load_config(const std::string& explicit_path) {
  std::string path = explicit_path;
  if (path.empty()) {
    if (const char* env = std::getenv("WINDEST_CONFIG")) path = env;
  }
  if (path.empty()) return Config{};
  return Config::from_file(path);
}

int run_simulate(const std::string& config_path, const std::string& output,
                 const std::string& scenario_override, long long seed_override, bool has_seed) {
  Config cfg = load_config(config_path);
  if (has_seed) cfg.set("seed", std::to_string(seed_override));

  const UavParams params = params_from_config(cfg);
  const DragModel drag = drag_from_config(cfg);
  const std::string scenario =
      scenario_override.empty() ? cfg.get_string("scenario", "tunnel") : scenario_override;

  std::vector<TelemetrySample> log;
  if (scenario == "tunnel") {
    log = run_wind_tunnel_scenario(params, drag, tunnel_from_config(cfg));
  } else if (scenario == "flight") {
    const auto velocity = script_from_config(cfg, "flight_velocity_script", "10:0,0,0");
    const auto interp = cfg.get_string("flight_wind_interp", "step") == "ramp"
                            ? WindScript::Interp::Ramp
                            : WindScript::Interp::Step;
    const auto wind = script_from_config(cfg, "flight_wind_script", "10:0,0,0", interp);
    log = run_flight_scenario(params, drag, velocity, wind,
                              cfg.get_double("attitude_tau_s", 0.15));
  } else {
    throw DataError("unknown scenario '" + scenario + "' (expected tunnel or flight)");
  }
  save_telemetry(to_telemetry_log(log), output);
  std::cout << "wrote " << log.size() << " samples to " << output << "\n";
  return 0;
}

int run_calibrate(const std::string& config_path, const std::string& tunnel_path,
                  const std::string& vertical_path, const std::string& output) {
  Config cfg = load_config(config_path);
  const UavParams params = params_from_config(cfg);
  const CalibrationOptions options = calibration_from_config(cfg);

  const auto tunnel = to_samples(load_telemetry(tunnel_path));
  std::vector<TelemetrySample> vertical;
  if (!vertical_path.empty()) vertical = to_samples(load_telemetry(vertical_path));

  const ForceAirModel model = calibrate_force_air_model(tunnel, vertical, params, options);
  save_model(model, output);
  std::cout << "model written to " << output << "\n"
            << "horizontal residual: " << model.fit_residual_rms << " m/s\n"
            << "vertical residual:   " << model.vertical_residual_rms << " m/s\n"
            << "force envelope:      [" << model.fh_min << ", " << model.fh_max << "] N\n";
  return 0;
}

int run_estimate(const std::string& config_path, const std::string& model_path,
                 const std::string& input, const std::string& output) {
  Config cfg = load_config(config_path);
  const ForceAirModel model = load_model(model_path);
  const TelemetryLog log = load_telemetry(input);
  if (log.records.empty()) throw DataError("estimate: input log '" + input + "' has no rows");

  Pipeline pipeline(pipeline_params_from_config(cfg), model);
  const AngleConvention convention = angle_convention_from_config(cfg);
  std::vector<EstimateRecord> estimates;
  estimates.reserve(log.records.size());
  for (const auto& record : log.records)
    estimates.push_back(to_estimate_record(pipeline.step(to_uav_state(record)), convention));
  save_estimates(estimates, output);
  std::cout << "wrote " << estimates.size() << " estimates to " << output << "\n";
  return 0;
}

int run_evaluate(const std::string& config_path, const std::string& estimates_path,
                 const std::string& truth_path, const std::string& output,
                 const std::string& csv_output) {
  Config cfg = load_config(config_path);
  const UavParams params = params_from_config(cfg);
  const auto estimates = load_estimates(estimates_path);
  const TelemetryLog truth = load_telemetry(truth_path);
  const ErrorReport report = evaluate_errors(estimates, truth, evaluate_from_config(cfg, params));

  const std::string text = report_to_text(report);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw DataError("cannot open '" + output + "' for writing");
    out << text;
  }
  if (!csv_output.empty()) {
    std::ofstream out(csv_output, std::ios::binary);
    if (!out) throw DataError("cannot open '" + csv_output + "' for writing");
    out << report_to_csv(report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DOB-based 3-D wind estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path,
                 "key=value config file (default: $WINDEST_CONFIG if set)");

  auto* simulate = app.add_subcommand("simulate", "run the plant and write a telemetry log");
  std::string sim_output, sim_scenario;
  long long sim_seed = 0;
  simulate->add_option("-o,--output", sim_output, "telemetry CSV path")->required();
  simulate->add_option("--scenario", sim_scenario, "tunnel | flight (overrides config)");
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "noise seed (overrides config)");

  auto* calibrate = app.add_subcommand("calibrate", "fit the force-air model from logs");
  std::string cal_tunnel, cal_vertical, cal_output;
  calibrate->add_option("--tunnel", cal_tunnel, "tunnel-sweep telemetry CSV (with wind truth)")
      ->required();
  calibrate->add_option("--vertical", cal_vertical, "vertical-maneuver telemetry CSV");
  calibrate->add_option("-o,--output", cal_output, "model file path")->required();

  auto* estimate = app.add_subcommand("estimate", "run the estimator over a telemetry log");
  std::string est_model, est_input, est_output;
  estimate->add_option("-m,--model", est_model, "calibrated model file")->required();
  estimate->add_option("-i,--input", est_input, "telemetry CSV")->required();
  estimate->add_option("-o,--output", est_output, "estimates CSV path")->required();

  auto* evaluate = app.add_subcommand("evaluate", "compare estimates against logged truth");
  std::string ev_estimates, ev_truth, ev_output, ev_csv;
  evaluate->add_option("--estimates", ev_estimates, "estimates CSV")->required();
  evaluate->add_option("--truth", ev_truth, "telemetry CSV with wind truth")->required();
  evaluate->add_option("-o,--output", ev_output, "report text path (default: stdout)");
  evaluate->add_option("--csv", ev_csv, "per-bin report CSV path");

  // exit codes: 0 success, 1 runtime/data fault, 2 usage error
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed())
      return run_simulate(config_path, sim_output, sim_scenario, sim_seed, !seed_opt->empty());
    if (calibrate->parsed())
      return run_calibrate(config_path, cal_tunnel, cal_vertical, cal_output);
    if (estimate->parsed()) return run_estimate(config_path, est_model, est_input, est_output);
    if (evaluate->parsed())
      return run_evaluate(config_path, ev_estimates, ev_truth, ev_output, ev_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;  // no subcommand given
}
