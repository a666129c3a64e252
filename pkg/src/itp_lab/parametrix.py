"""Boundary symbols of the Dirichlet-to-Neumann parametrix on the unit disc.

Coordinates near the boundary circle are ``x1 = 1 - r`` (distance to the
boundary) and the angle ``x'``.  In them

    -Laplacian = D_{x1}**2 + i (1 - x1)**-1 D_{x1} + (1 - x1)**-2 D_{x'}**2,

with ``D = -i d``.  Expanding in ``x1`` gives the constants collected in
:data:`DISC`.  All ``x'``-derivatives vanish because nothing depends on the
angle, and the chart cutoff is identically 1 on the circle.

The parametrix phase is ``-x' xi + x1 rho + x1**2 phi2 + x1**3 phi3`` and its
amplitude ``1 + x1 a1 + x1**2 a2``; the phase and amplitude corrections are
chosen so that successive Taylor coefficients in ``x1`` of the eikonal and
transport defects vanish in the elliptic region, where ``rho ~ i|xi|``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spectral import sqrt_upper

__all__ = [
    "DiscGeometry",
    "DISC",
    "BoundarySymbolContext",
    "rho",
    "phase_quadratic",
    "phase_cubic",
    "phase_residuals",
    "amplitude_linear",
    "amplitude_quadratic",
    "amplitude_residuals",
    "boundary_correction",
    "eikonal_defect",
    "transmission_symbols",
    "factorization_residual",
]


@dataclass(frozen=True)
class DiscGeometry:
    """Normal-coordinate coefficients of ``-Laplacian`` near the unit circle.

    ``R(x) = (1 - x1)**-2 = R0 + x1 R0_sharp + x1**2 R1_sharp + ...`` is the
    tangential metric factor and ``Q1(x) = i (1 - x1)**-1 = Q1_0 + x1 Q1_1 +
    ...`` the coefficient of ``D_{x1}``.  There is no first-order tangential
    term (``Qtilde = 0``).
    """

    R0: float = 1.0
    R0_sharp: float = 2.0
    R1_sharp: float = 3.0
    Q1_0: complex = 1j
    Q1_1: complex = 1j
    Qtilde_0: float = 0.0


DISC = DiscGeometry()


@dataclass(frozen=True)
class BoundarySymbolContext:
    """Spectral parameter ``z`` and boundary reduced index ``n/c``."""

    z: complex
    ntilde0: float = 1.0

    def __post_init__(self):
        if not self.ntilde0 > 0.0:
            raise DomainError("reduced index must be positive")


def rho(xi, ctx):
    """Normal symbol ``sqrt(-xi**2 + z ntilde0)`` on the branch ``Im >= 0``."""
    return sqrt_upper(-float(xi) ** 2 + complex(ctx.z) * ctx.ntilde0)


def _abs_xi(xi):
    a = abs(float(xi))
    if a == 0.0:
        raise DomainError("the elliptic symbols are defined for xi != 0 only")
    return a


def phase_quadratic(xi, geom=DISC):
    """Second-order phase coefficient making the ``x1**0`` eikonal term vanish.

    Solves ``4 i |xi| phi2 + R0_sharp xi**2 = 0``; on the disc ``(i/2)|xi|``.
    """
    a = _abs_xi(xi)
    return -geom.R0_sharp * a * a / (4j * a)


def phase_cubic(xi, geom=DISC):
    """Third-order phase coefficient making the ``x1**1`` eikonal term vanish.

    Solves ``6 i |xi| phi3 + 4 phi2**2 + R1_sharp xi**2 = 0``; on the disc
    ``(i/3)|xi|``.
    """
    a = _abs_xi(xi)
    p2 = phase_quadratic(xi, geom)
    return -(4.0 * p2 * p2 + geom.R1_sharp * a * a) / (6j * a)


def phase_residuals(xi, phi2=None, phi3=None, geom=DISC):
    """The two eikonal coefficients that the phase corrections must cancel."""
    a = _abs_xi(xi)
    p2 = phase_quadratic(xi, geom) if phi2 is None else phi2
    p3 = phase_cubic(xi, geom) if phi3 is None else phi3
    res0 = 4j * a * p2 + geom.R0_sharp * a * a
    res1 = 6j * a * p3 + 4.0 * p2 * p2 + geom.R1_sharp * a * a
    return res0, res1


def amplitude_linear(xi, geom=DISC):
    """First amplitude correction ``a1 = a10 + h a11``.

    Returns
    -------
    a10, a11 : complex
        ``a10 = i |xi|**-1 phi2 - (i/2) Q1_0``, which vanishes on the disc;
        ``a11`` only carries derivatives of the chart cutoff and is 0.
    """
    a = _abs_xi(xi)
    a10 = 1j * phase_quadratic(xi, geom) / a - 0.5j * geom.Q1_0
    return a10, 0j


def boundary_correction(xi, geom=DISC):
    """Order-``h`` boundary symbol ``q = -i a10`` of the improved parametrix.

    It depends neither on ``z`` nor on the index; on the disc it is 0.
    """
    return -1j * amplitude_linear(xi, geom)[0]


def amplitude_quadratic(xi, geom=DISC):
    """Second amplitude correction cancelling the ``x1**1`` transport term.

    The transport coefficient is

        4|xi| a2 - 6 i a10 phi2 - 6 i phi3 + 2 Q1_0 phi2
            + i Q1_0 |xi| a10 + i Q1_1 |xi|,

    where ``-6 i phi3`` comes from ``-i a d_{x1}**2 phase`` with the cubic
    phase term ``x1**3 phi3``.  On the disc ``a2 = 0``.
    """
    a = _abs_xi(xi)
    p2 = phase_quadratic(xi, geom)
    p3 = phase_cubic(xi, geom)
    a10 = amplitude_linear(xi, geom)[0]
    rest = (-6j * a10 * p2 - 6j * p3 + 2.0 * geom.Q1_0 * p2
            + 1j * geom.Q1_0 * a * a10 + 1j * geom.Q1_1 * a)
    return -rest / (4.0 * a)


def amplitude_residuals(xi, a10=None, a2=None, geom=DISC):
    """The two transport coefficients that ``a1`` and ``a2`` must cancel."""
    a = _abs_xi(xi)
    p2 = phase_quadratic(xi, geom)
    p3 = phase_cubic(xi, geom)
    a10 = amplitude_linear(xi, geom)[0] if a10 is None else a10
    a2 = amplitude_quadratic(xi, geom) if a2 is None else a2
    res0 = 2.0 * a * a10 - 2j * p2 + 1j * geom.Q1_0 * a
    res1 = (4.0 * a * a2 - 6j * a10 * p2 - 6j * p3 + 2.0 * geom.Q1_0 * p2
            + 1j * geom.Q1_0 * a * a10 + 1j * geom.Q1_1 * a)
    return res0, res1


def eikonal_defect(x1, xi, ctx, improved=True):
    """Eikonal defect of the parametrix phase at depth ``x1``.

    ``(d_{x1} phase)**2 + (1 - x1)**-2 xi**2 - z ntilde0`` for the phase
    ``x1 rho + x1**2 phi2 + x1**3 phi3`` (``improved=True``) or ``x1 rho``.
    """
    x1 = np.asarray(x1, dtype=float)
    r = rho(xi, ctx)
    dphi = r + 0 * x1
    if improved:
        dphi = dphi + 2.0 * x1 * phase_quadratic(xi) + 3.0 * x1 ** 2 * phase_cubic(xi)
    return dphi ** 2 + float(xi) ** 2 / (1.0 - x1) ** 2 - complex(ctx.z) * ctx.ntilde0


def transmission_symbols(bd, xi, z):
    """Symbols of the anisotropic boundary reduction.

    Parameters
    ----------
    bd : BoundaryData or mapping with ``c1, n1, c2, n2``
    xi : float
    z : complex

    Returns
    -------
    dict
        ``a1 = (r0+1)**-1/2 (c1 rho1 + c2 rho2)``, ``a2 = c1 rho1 - c2 rho2``,
        ``m = (c1 n1 - c2 n2)/(c1**2 - c2**2)``,
        ``A1 = (r0+1)/(r0 - z m)``, ``A2 = (r0+1)**-1/2 (r0 - z m)``
        with ``r0 = xi**2`` and ``rho_j`` the normal symbols of each medium.
    """
    c1, n1, c2, n2 = _unpack(bd)
    if c1 == c2:
        raise DomainError("the anisotropic symbols need c1(1) != c2(1)")
    r0 = float(xi) ** 2
    z = complex(z)
    r1 = rho(xi, BoundarySymbolContext(z, n1 / c1))
    r2 = rho(xi, BoundarySymbolContext(z, n2 / c2))
    m = (c1 * n1 - c2 * n2) / (c1 * c1 - c2 * c2)
    root = math.sqrt(r0 + 1.0)
    return {
        "a1": (c1 * r1 + c2 * r2) / root,
        "a2": c1 * r1 - c2 * r2,
        "m": m,
        "A1": (r0 + 1.0) / (r0 - z * m),
        "A2": (r0 - z * m) / root,
    }


def factorization_residual(bd, xi, z):
    """Residual of ``c1**2 rho1**2 - c2**2 rho2**2 = -(c1**2 - c2**2) r0 + z (c1 n1 - c2 n2)``.

    The left side is evaluated as the product ``(c1 rho1 + c2 rho2)(c1 rho1 - c2 rho2)``.
    """
    c1, n1, c2, n2 = _unpack(bd)
    r0 = float(xi) ** 2
    z = complex(z)
    r1 = rho(xi, BoundarySymbolContext(z, n1 / c1))
    r2 = rho(xi, BoundarySymbolContext(z, n2 / c2))
    lhs = (c1 * r1 + c2 * r2) * (c1 * r1 - c2 * r2)
    rhs = -(c1 * c1 - c2 * c2) * r0 + z * (c1 * n1 - c2 * n2)
    return abs(lhs - rhs)


def _unpack(bd):
    if isinstance(bd, dict):
        return float(bd["c1"]), float(bd["n1"]), float(bd["c2"]), float(bd["n2"])
    return float(bd.c1), float(bd.n1), float(bd.c2), float(bd.n2)
