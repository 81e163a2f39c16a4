"""Python access to the impulsive matrix Sturm-Liouville solver."""

import json

from ._isl import (
    CharacteristicFunction,
    CharFnValue,
    ConfigError,
    MultiplicityError,
    NumericError,
    ProblemSpec,
    asymptotic_ratio,
    fd_oracle_spectrum,
    find_spectrum,
    omega0_exact,
    omega0_paper,
    rayleigh_quotient,
    trace_conditions,
)
from ._isl import compare_spectra_json as _compare_spectra_json

__all__ = [
    "CharacteristicFunction",
    "CharFnValue",
    "ConfigError",
    "MultiplicityError",
    "NumericError",
    "ProblemSpec",
    "asymptotic_ratio",
    "compare_spectra",
    "fd_oracle_spectrum",
    "find_spectrum",
    "omega0_exact",
    "omega0_paper",
    "problem",
    "rayleigh_quotient",
    "trace_conditions",
]


def problem(N, alpha, a, potential=None):
    """Build a ProblemSpec from plain values; `potential` is the JSON-style dict."""
    doc = {"N": N, "alpha": alpha, "a": a, "potential": potential or {"type": "zero"}}
    return ProblemSpec.from_json(json.dumps(doc))


def compare_spectra(spec_q, spec0, count=20, tol=1e-3):
    """Spectral-distance report as a dict."""
    return json.loads(_compare_spectra_json(spec_q, spec0, count, tol))
