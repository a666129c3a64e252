"""Spectral-parameter conventions.

A spectral parameter ``lam`` is normalized to ``h = 1/|lam|`` and
``z = (h lam)**2``, a point of the unit circle.  The half plane ``Re z >= 0``
is the ``ZPlus`` zone and the rest is ``ZMinus``.  ``theta`` and ``tau``
measure the distance of ``z`` from the positive and negative real axis in the
respective zone.
"""
import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

__all__ = ["Zone", "SpectralPoint", "spectral_point", "sqrt_upper"]


class Zone(str, Enum):
    ZPLUS = "ZPlus"
    ZMINUS = "ZMinus"


@dataclass(frozen=True)
class SpectralPoint:
    """A spectral parameter with its derived semiclassical quantities.

    Attributes
    ----------
    lam : complex
        Spectral parameter.
    h : float
        Semiclassical parameter ``1/|lam|``.
    z : complex
        Normalized parameter ``(h lam)**2`` with ``|z| = 1``.
    zone : Zone
        ``ZPLUS`` iff ``Re z >= 0``.
    theta : float
        ``|Im z|`` in ``ZPLUS``, else 1.
    tau : float
        ``|Im z|`` in ``ZMINUS``, else 1.
    """

    lam: complex
    h: float
    z: complex
    zone: Zone
    theta: float
    tau: float


def spectral_point(lam):
    """Build the :class:`SpectralPoint` for a nonzero finite ``lam``.

    Raises
    ------
    DomainError
        If ``lam`` is zero or not finite.
    """
    lam = complex(lam)
    if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
        raise DomainError(f"spectral parameter must be finite, got {lam!r}")
    mod = abs(lam)
    if mod == 0.0:
        raise DomainError("spectral parameter must be nonzero")
    h = 1.0 / mod
    # (lam/|lam|)**2 keeps |z| = 1 to round-off without squaring large numbers
    u = lam / mod
    z = u * u
    if z.real >= 0.0:
        zone, theta, tau = Zone.ZPLUS, abs(z.imag), 1.0
    else:
        zone, theta, tau = Zone.ZMINUS, 1.0, abs(z.imag)
    return SpectralPoint(lam=lam, h=h, z=z, zone=zone, theta=theta, tau=tau)


def sqrt_upper(w):
    """Square root on the branch with nonnegative imaginary part.

    On the positive real axis the positive root is returned.

    Parameters
    ----------
    w : complex
        Finite complex number.

    Returns
    -------
    complex
        ``s`` with ``s*s == w``, ``Im s >= 0`` and ``Re s >= 0`` when
        ``Im s == 0``.
    """
    s = cmath.sqrt(complex(w))
    if s.imag < 0.0 or (s.imag == 0.0 and s.real < 0.0):
        s = -s
    return s
