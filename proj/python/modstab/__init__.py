"""Stability checks for the radical functional equation in modular spaces."""

import json as _json

from ._core import (
    Control,
    ContractViolation,
    ConfigError,
    Equation,
    Function,
    Grid,
    ModularSpec,
    ModstabError,
    ParameterError,
    PreconditionError,
    RegimeError,
    SaturationError,
    check_modular,
    construct_limit,
    corollary_bound,
    defect,
    estimate_L,
    fixed_point_solve,
    radical_combine,
    run_config,
    series_bound_contract,
    series_bound_expand,
    verify_radical_additivity,
)


def run(text):
    """Run a config given as text and return (report dict, exit code)."""
    report, code = run_config(text)
    return _json.loads(report), code


__all__ = [name for name in dir() if not name.startswith("_")]
