"""Configuration, sweeps, calibration and result files."""
from .calibrate import CalibrationError, CalibrationResult, calibrate_r_ol, calibrated_design
from .config import ConfigError, SweepConfig, load_config, parse_config
from .emit import EmitError, emit, read_csv
from .sweep import Series, SweepResult, evaluate_point, run_sweep

__all__ = [
    "CalibrationError", "CalibrationResult", "ConfigError", "EmitError", "Series",
    "SweepConfig", "SweepResult", "calibrate_r_ol", "calibrated_design", "emit",
    "evaluate_point", "load_config", "parse_config", "read_csv", "run_sweep",
]
