"""Security analysis of two-party Gaussian states."""

import json as _json

from ._cvprivacy import (
    Error,
    GaussianState,
    analyze,
    collective_boundary,
    fock_fidelity,
    is_nppt,
    is_physical,
    key_distillable,
    min_pt_symplectic_eigenvalue,
    purity,
    symmetric_state,
    symplectic_eigenvalues,
    symplectic_form,
    two_mode_squeezed_vacuum,
    williamson,
)
from ._cvprivacy import simulate as _simulate
from ._cvprivacy import sweep as _sweep


def sweep(lam=(1.0, 3.0, 200), c=(0.0, 3.0, 200), x0=1.0):
    """Classify the symmetric family on a grid; returns a list of row dicts."""
    lines = _sweep(tuple(lam), tuple(c), x0).strip().splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        vals = line.split(",")
        row = {"lambda": float(vals[0]), "c": float(vals[1])}
        row.update({k: v == "1" for k, v in zip(header[2:], vals[2:])})
        rows.append(row)
    return rows


def simulate(state, **kwargs):
    """Monte Carlo run; returns the parsed JSON report."""
    return _json.loads(_simulate(state, **kwargs))


__all__ = [
    "Error",
    "GaussianState",
    "analyze",
    "collective_boundary",
    "fock_fidelity",
    "is_nppt",
    "is_physical",
    "key_distillable",
    "min_pt_symplectic_eigenvalue",
    "purity",
    "simulate",
    "sweep",
    "symmetric_state",
    "symplectic_eigenvalues",
    "symplectic_form",
    "two_mode_squeezed_vacuum",
    "williamson",
]
