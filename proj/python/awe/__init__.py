"""Ground-unit sizing and kite flight simulation."""

import csv
import io
import json

from ._awe import (
    ConfigError,
    CsvError,
    Environment,
    ProtocolError,
    SCHEMA_VERSION,
    WingParams,
    default_config,
    design_report_json,
    force_oscillation_period,
    max_steering_delta,
    max_wind_for_wing,
    min_traction_force,
    normalize_config,
    parse_inbound,
    peak_traction_force,
    steering_force_difference,
    turn_rate,
    validate_outbound,
)
from . import _awe

__all__ = [
    "ConfigError",
    "CsvError",
    "Environment",
    "ProtocolError",
    "SCHEMA_VERSION",
    "WingParams",
    "default_config",
    "design_report",
    "force_oscillation_period",
    "max_steering_delta",
    "max_wind_for_wing",
    "min_traction_force",
    "normalize_config",
    "parse_inbound",
    "peak_traction_force",
    "simulate",
    "steering_force_difference",
    "turn_rate",
    "validate_outbound",
]


def _config_text(config):
    if config is None:
        return "{}"
    if isinstance(config, str):
        return config
    return json.dumps(config)


def design_report(config=None):
    """Design report as a dict; `config` is a dict, JSON text or None for defaults."""
    return json.loads(design_report_json(_config_text(config)))


def simulate(config=None, duration_s=60.0):
    """Runs the closed loop. Returns (summary dict, list of sample dicts)."""
    summary, text = _awe.simulate(_config_text(config), float(duration_s))
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({k: (int(v) if k in ("mode", "status", "flags") else float(v)) for k, v in row.items()})
    return json.loads(summary), rows
