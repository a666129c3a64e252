"""Eigenvalue-free regions in the spectral plane.

Regions have the parabolic shape

    |lam| >= C,  |Im lam| >= C |lam|**(1 - p1) * log(|lam|)**p2

with rational exponents depending on the boundary case, the boundary
regularity ``mu`` and the dimension ``d``.  In the anisotropic case with a
negative boundary product an extra condition on ``Re lam`` applies.  ``log``
is the natural logarithm.
"""
import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, UnsupportedCaseError
from .profiles import CaseTag

__all__ = [
    "RegionExponents",
    "RegionSpec",
    "exponents",
    "region_spec",
    "in_free_region",
    "radial_free_region",
    "radial_critical_constant",
    "boundary_curve",
    "write_boundary_curve_csv",
    "thresholds",
]


@dataclass(frozen=True)
class RegionExponents:
    """Exact exponents of a free region; ``p3``/``p4`` only for AnisoNegative."""

    p1: Fraction
    p2: Fraction
    p3: Fraction = None
    p4: Fraction = None

    def as_dict(self):
        out = {"p1": str(self.p1), "p2": str(self.p2)}
        if self.p3 is not None:
            out["p3"] = str(self.p3)
            out["p4"] = str(self.p4)
        return out


@dataclass(frozen=True)
class RegionSpec:
    """Case, regularity, dimension and constant defining a free region."""

    case: CaseTag
    mu: object
    d: int
    C: float
    exponents: RegionExponents
    epsilon: float = 0.1

    def __post_init__(self):
        if not self.C > 2.0:
            raise DomainError("region constant C must exceed 2")
        if not 0.0 < self.epsilon < 0.5:
            raise DomainError("epsilon must lie in (0, 1/2)")


def _check(mu, d):
    if mu < 2:
        raise DomainError("mu must be >= 2")
    if int(d) != d or d < 2:
        raise DomainError("d must be an integer >= 2")


def exponents(case, mu, d):
    """Exponents ``p1..p4`` of the free region as exact fractions.

    Parameters
    ----------
    case : CaseTag
    mu : int or Fraction
        Boundary regularity, at least 2.
    d : int
        Dimension, at least 2.

    Raises
    ------
    UnsupportedCaseError
        For the degenerate case.
    """
    case = CaseTag(case)
    mu = Fraction(mu)
    _check(mu, d)
    d = int(d)
    if case is CaseTag.DEGENERATE:
        raise UnsupportedCaseError("no free region for a degenerate pair")
    if case is CaseTag.ANISO_POSITIVE:
        if mu <= Fraction(4, 3) * (d + 1):
            return RegionExponents(mu / (2 * mu + 2 * d + 2), 1 / (mu + d + 1))
        return RegionExponents(Fraction(2, 7), Fraction(0))
    if mu <= 2 * d - 1:
        p1, p2 = mu / (2 * mu + 2 * d - 1), 2 / (2 * mu + 2 * d - 1)
    elif mu <= 4 * d:
        p1, p2 = (mu + 2) / (2 * mu + 2 * d + 5), 2 / (2 * mu + 2 * d + 5)
    else:
        p1, p2 = Fraction(2, 5), Fraction(0)
    if case is CaseTag.ANISO_NEGATIVE:
        return RegionExponents(p1, p2, mu / (2 * mu + 2 * d + 2), 1 / (mu + d + 1))
    return RegionExponents(p1, p2)


def region_spec(case, mu, d, C, epsilon=0.1):
    """Convenience constructor computing the exponents."""
    case = CaseTag(case)
    return RegionSpec(case, mu, d, float(C), exponents(case, mu, d), epsilon)


def _parabola(a, p, q, C):
    return C * a ** (1.0 - float(p)) * math.log(a) ** float(q)


def in_free_region(lam, spec):
    """Whether ``lam`` lies in the free region described by ``spec``."""
    lam = complex(lam)
    a = abs(lam)
    if a < spec.C:
        return False
    ex = spec.exponents
    if abs(lam.imag) < _parabola(a, ex.p1, ex.p2, spec.C):
        return False
    if spec.case is CaseTag.ANISO_NEGATIVE:
        return lam.real >= _parabola(a, ex.p3, ex.p4, spec.C)
    return True


_RADIAL_POWER = {
    CaseTag.ISOTROPIC: 0.6,
    CaseTag.ANISO_NEGATIVE: 0.6,
    CaseTag.ANISO_POSITIVE: 5.0 / 7.0,
}


def radial_free_region(lam, case, C, epsilon=0.1, C_eps=None):
    """Membership in the free region for radially symmetric media.

    The region is ``|Im lam| >= C |lam|**(3/5)`` for the isotropic case,
    the same plus ``Re lam >= C_eps |lam|**(1/2 + epsilon)`` for the
    negative anisotropic case, and ``|Im lam| >= C |lam|**(5/7)`` for the
    positive anisotropic case, always with ``|lam| >= C``.  ``C_eps``
    defaults to ``C``.
    """
    case = CaseTag(case)
    if case is CaseTag.DEGENERATE:
        raise UnsupportedCaseError("no free region for a degenerate pair")
    lam = complex(lam)
    a = abs(lam)
    if a < C:
        return False
    if abs(lam.imag) < C * a ** _RADIAL_POWER[case]:
        return False
    if case is CaseTag.ANISO_NEGATIVE:
        ce = C if C_eps is None else C_eps
        return lam.real >= ce * a ** (0.5 + epsilon)
    return True


def radial_critical_constant(lam, case, epsilon=0.1):
    """Supremum of the constants ``C`` for which ``lam`` is in the radial region.

    Membership is monotone in ``C`` (with ``C_eps = C``), so ``lam`` lies in
    the region exactly for ``C`` up to this value.
    """
    case = CaseTag(case)
    if case is CaseTag.DEGENERATE:
        raise UnsupportedCaseError("no free region for a degenerate pair")
    lam = complex(lam)
    a = abs(lam)
    if a == 0.0:
        return 0.0
    crit = min(a, abs(lam.imag) / a ** _RADIAL_POWER[case])
    if case is CaseTag.ANISO_NEGATIVE:
        crit = min(crit, max(lam.real, 0.0) / a ** (0.5 + epsilon))
    return crit


def boundary_curve(spec, abs_lambda_range, n):
    """Sample the curve ``|Im lam| = C|lam|**(1-p1) log(|lam|)**p2``.

    Parameters
    ----------
    spec : RegionSpec
    abs_lambda_range : (float, float)
        Range ``[a, b]`` of ``|lam|`` with ``a >= C``.
    n : int
        Number of samples, at least 2.

    Returns
    -------
    list of tuple
        ``(abs_lambda, re_lambda, im_lambda_plus, im_lambda_minus)`` per
        sample; the point lies on the circle of radius ``abs_lambda``.
        ``re_lambda`` is NaN where the curve exceeds that circle.
    """
    a, b = map(float, abs_lambda_range)
    if a < spec.C:
        raise DomainError(f"range start {a} is below C = {spec.C}")
    if b < a:
        raise DomainError("empty |lambda| range")
    if n < 2:
        raise DomainError("need at least two samples")
    ex = spec.exponents
    out = []
    for r in np.linspace(a, b, int(n)):
        y = _parabola(r, ex.p1, ex.p2, spec.C)
        re = math.sqrt(r * r - y * y) if y <= r else float("nan")
        out.append((float(r), re, y, -y))
    return out


def write_boundary_curve_csv(path, samples):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["abs_lambda", "re_lambda", "im_lambda_plus", "im_lambda_minus"])
        for row in samples:
            w.writerow([repr(float(x)) for x in row])


def thresholds(h, mu, d):
    """Threshold scales ``theta1``, ``theta2`` and ``tau3`` at ``h``.

    Returns
    -------
    dict
        Keys ``"theta1"``, ``"theta2"``, ``"tau3"``.
    """
    h = float(h)
    if not 0.0 < h < 1.0:
        raise DomainError("h must lie in (0, 1)")
    _check(Fraction(mu), d)
    mu = float(mu)
    lg = math.log(1.0 / h)
    base = h ** (mu / 2) * lg
    if mu <= 2 * d - 1:
        theta1 = base ** (1.0 / (d + mu - 0.5))
    elif mu <= 4 * d:
        theta1 = (h ** (mu / 2 + 1) * lg) ** (1.0 / (d + mu + 2.5))
    else:
        theta1 = h ** 0.4
    if mu <= 4.0 * (d + 1) / 3.0:
        theta2 = base ** (1.0 / (d + mu + 1))
    else:
        theta2 = h ** (2.0 / 7.0)
    tau3 = base ** (1.0 / (d + mu + 1))
    return {"theta1": theta1, "theta2": theta2, "tau3": tau3}
