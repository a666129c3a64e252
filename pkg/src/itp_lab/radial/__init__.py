"""Radial mode solver: shooting for the separated radial equation.

The compiled kernel is used when available; set ``ITP_LAB_PURE=1`` to force
the pure-Python fallback.  :data:`BACKEND` names the active kernel.
"""
from ._backend import BACKEND, kernel as _kern

integrate_path = _kern.integrate_path

from .solver import (
    ModeProblem,
    ModeTrace,
    ScaledValue,
    InhomogeneousResult,
    integrate_mode,
    dtn_eigenvalue,
    itp_characteristic,
    itp_characteristic_scaled,
    inhomogeneous_mode_solve,
    frobenius_start,
)

__all__ = [
    "BACKEND",
    "integrate_path",
    "ModeProblem",
    "ModeTrace",
    "ScaledValue",
    "InhomogeneousResult",
    "integrate_mode",
    "dtn_eigenvalue",
    "itp_characteristic",
    "itp_characteristic_scaled",
    "inhomogeneous_mode_solve",
    "frobenius_start",
]
