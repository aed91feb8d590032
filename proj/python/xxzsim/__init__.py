"""XXZ spin-squeezing simulator: DTWA engine, exact oracle, and analysis chain."""

from xxzsim._core import (
    ConfigError,
    DomainError,
    NumericError,
    SpinCouplings,
    config_keys,
    derive_couplings,
    jackknife,
    preset_names,
    run_dtwa,
    run_imaging_demo,
    run_oracle,
    run_params,
    squeezing_parameter,
    time_unit_seconds,
    variance_scan,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "NumericError",
    "SpinCouplings",
    "config_keys",
    "derive_couplings",
    "jackknife",
    "preset_names",
    "run_dtwa",
    "run_imaging_demo",
    "run_oracle",
    "run_params",
    "squeezing_parameter",
    "time_unit_seconds",
    "variance_scan",
]
