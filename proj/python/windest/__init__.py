"""DOB-based 3-D wind estimation for multirotors.

Thin Python surface over the C++ core: plant simulator, disturbance-observer
force estimation, force-air model calibration and the streaming wind pipeline.
"""

from ._core import (  # noqa: F401
    CalibrationOptions,
    CalibrationPoint,
    DragModel,
    FilterSchedule,
    ForceAirModel,
    ObserverState,
    Pipeline,
    PipelineParams,
    TelemetrySample,
    TunnelProtocol,
    UavParams,
    UavState,
    WindEstimate,
    WindScript,
    calibrate_force_air_model,
    clean_dataset,
    convergence_time_constant,
    dob_step,
    drag_force,
    evaluate_horizontal,
    evaluate_vertical,
    extract_wind,
    force_polar_components,
    load_model,
    model_from_text,
    model_to_text,
    observer_gain_for_tau,
    predict_relative_air,
    read_telemetry,
    rotation_body_to_inertial,
    rotation_intermediate_to_inertial,
    rotor_speed_for_thrust,
    run_flight_scenario,
    run_wind_tunnel_scenario,
    save_model,
    thrust_from_rpm,
    to_intermediate,
    wind_triangle,
    wrap_angle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
