"""Reduced-attitude control of a spinning rigid body.

Thin wrapper over the C++ core. ``run`` returns a log whose ``array()`` has
the CSV columns listed in ``columns``.
"""

import json

from ._core import (
    BodyParams,
    Error,
    GainCheck,
    Gains,
    InvalidEquilibrium,
    Law,
    MismatchedScenarios,
    NoConvergence,
    ParseError,
    Scenario,
    SingularSystem,
    TrajectoryLog,
    TrajMetrics,
    ValidationError,
    exp_so3,
    finite_diff_jacobian,
    gain_check,
    geodesic_angle,
    hat,
    linearize,
    load_scenario,
    load_scenario_file,
    phase_portrait,
    run,
    spectral_abscissa,
    vee,
)
from ._core import compare_json as _compare_json

__all__ = [
    "BodyParams",
    "Error",
    "GainCheck",
    "Gains",
    "InvalidEquilibrium",
    "Law",
    "MismatchedScenarios",
    "NoConvergence",
    "ParseError",
    "Scenario",
    "SingularSystem",
    "TrajectoryLog",
    "TrajMetrics",
    "ValidationError",
    "compare",
    "exp_so3",
    "finite_diff_jacobian",
    "gain_check",
    "geodesic_angle",
    "hat",
    "linearize",
    "load_scenario",
    "load_scenario_file",
    "phase_portrait",
    "run",
    "spectral_abscissa",
    "vee",
]


def compare(scenarios):
    """Run the scenarios and return the comparison table as a list of dicts."""
    return json.loads(_compare_json(list(scenarios)))
