"""Piecewise-linear radial coefficient profiles and medium pairs."""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "RadialProfile",
    "MediumPair",
    "CaseTag",
    "Violation",
    "ValidationReport",
    "BoundaryData",
    "constant_profile",
    "boundary_data",
    "classify",
    "merged_nodes",
]


class CaseTag(str, Enum):
    """Boundary sign case of a medium pair."""

    ISOTROPIC = "Isotropic"
    ANISO_NEGATIVE = "AnisoNegative"
    ANISO_POSITIVE = "AnisoPositive"
    DEGENERATE = "Degenerate"

    @classmethod
    def parse(cls, text):
        key = str(text).replace("-", "").replace("_", "").lower()
        for tag in cls:
            if tag.value.lower() == key:
                return tag
        raise DomainError(f"unknown case tag {text!r}")


@dataclass(frozen=True)
class Violation:
    """One failed validation rule.

    Attributes
    ----------
    rule : str
        ``"lower bound"``, ``"not increasing"``, ``"domain incomplete"``,
        ``"non-finite"`` or ``"shape"``.
    index : int or None
        Offending breakpoint index, if any.
    message : str
        Human readable description.
    """

    rule: str
    index: object
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(v.message for v in self.violations)


class RadialProfile:
    """Piecewise-linear function on ``[0, 1]``.

    Parameters
    ----------
    breakpoints : array_like
        Abscissae of the interpolation nodes.
    values : array_like
        Ordinates at the nodes.

    Notes
    -----
    The constructor only checks that both arrays are one-dimensional, of equal
    length and finite.  Use :meth:`validate` for the remaining rules.
    """

    __slots__ = ("_r", "_v")

    def __init__(self, breakpoints, values):
        r = np.array(breakpoints, dtype=float).ravel()
        v = np.array(values, dtype=float).ravel()
        if r.size != v.size or r.size < 1:
            raise DomainError("breakpoints and values must be nonempty and of equal length")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise DomainError("profile data must be finite")
        r.setflags(write=False)
        v.setflags(write=False)
        self._r = r
        self._v = v

    @property
    def breakpoints(self):
        return self._r

    @property
    def values(self):
        return self._v

    def __repr__(self):
        return f"RadialProfile({self._r.tolist()}, {self._v.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, RadialProfile):
            return NotImplemented
        return np.array_equal(self._r, other._r) and np.array_equal(self._v, other._v)

    def __hash__(self):
        return hash((self._r.tobytes(), self._v.tobytes()))

    def __call__(self, r):
        return self.eval(r)

    def eval(self, r):
        """Evaluate the interpolant at ``r`` (scalar or array) in ``[0, 1]``."""
        arr = np.asarray(r, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError("radius must lie in [0, 1]")
        if self._r.size == 1:
            out = np.full(arr.shape, self._v[0])
        else:
            out = np.interp(arr, self._r, self._v)
        return float(out) if out.ndim == 0 else out

    def slope(self, r):
        """Right-sided derivative at ``r`` (left-sided at ``r = 1``)."""
        if self._r.size == 1:
            return 0.0
        i = int(np.searchsorted(self._r, r, side="right")) - 1
        i = min(max(i, 0), self._r.size - 2)
        return float((self._v[i + 1] - self._v[i]) / (self._r[i + 1] - self._r[i]))

    def is_constant_one(self):
        return bool(np.all(self._v == 1.0))

    @property
    def min_value(self):
        return float(self._v.min())

    def validate(self, b0):
        """Check the profile against the lower bound ``b0``.

        Returns
        -------
        ValidationReport
            Truthy when there are no violations.
        """
        out = []
        r, v = self._r, self._v
        for i in np.flatnonzero(np.diff(r) <= 0.0):
            out.append(Violation("not increasing", int(i) + 1,
                                 f"breakpoint {i + 1} (r={r[i + 1]:g}) does not exceed its predecessor"))
        if r[0] != 0.0 or r[-1] != 1.0:
            out.append(Violation("domain incomplete", None,
                                 f"domain incomplete: breakpoints span [{r[0]:g}, {r[-1]:g}], need [0, 1]"))
        for i in np.flatnonzero(v < b0):
            out.append(Violation("lower bound", int(i),
                                 f"value {v[i]:g} at breakpoint {i} (r={r[i]:g}) is below b0={b0:g}"))
        return ValidationReport(tuple(out))


def constant_profile(value):
    """Profile equal to ``value`` on ``[0, 1]``."""
    return RadialProfile([0.0, 1.0], [value, value])


def merged_nodes(*profiles):
    """Sorted union of breakpoints of several profiles, clipped to ``[0, 1]``."""
    pts = np.unique(np.concatenate([[0.0, 1.0]] + [p.breakpoints for p in profiles]))
    return pts[(pts >= 0.0) & (pts <= 1.0)]


@dataclass(frozen=True)
class BoundaryData:
    """Boundary values of a medium pair at ``r = 1``."""

    c1: float
    n1: float
    c2: float
    n2: float

    @property
    def nt1(self):
        """Reduced index ``n1/c1``."""
        return self.n1 / self.c1

    @property
    def nt2(self):
        return self.n2 / self.c2

    def as_dict(self):
        return {"c1": self.c1, "n1": self.n1, "c2": self.c2, "n2": self.n2,
                "nt1": self.nt1, "nt2": self.nt2}


@dataclass(frozen=True)
class MediumPair:
    """Two radial media on the unit ball of dimension ``d``.

    Parameters
    ----------
    c1, n1, c2, n2 : RadialProfile
        Diffusion and index profiles of the two media.
    d : int
        Space dimension (at least 2).
    b0 : float
        Declared positive lower bound of all four profiles.
    """

    c1: RadialProfile
    n1: RadialProfile
    c2: RadialProfile
    n2: RadialProfile
    d: int = 2
    b0: float = field(default=None)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError("dimension d must be an integer >= 2")
        if self.b0 is None:
            object.__setattr__(self, "b0", min(p.min_value for p in self.profiles()))

    def profiles(self):
        return (self.c1, self.n1, self.c2, self.n2)

    def validate(self):
        """Validate all four profiles; returns a dict name -> ValidationReport."""
        if not self.b0 > 0.0:
            raise DomainError("b0 must be positive")
        return {name: p.validate(self.b0)
                for name, p in zip(("c1", "n1", "c2", "n2"), self.profiles())}

    def is_valid(self):
        return all(self.validate().values())

    def swapped(self):
        return MediumPair(self.c2, self.n2, self.c1, self.n1, self.d, self.b0)

    @classmethod
    def constant(cls, c1, n1, c2, n2, d=2):
        return cls(constant_profile(c1), constant_profile(n1),
                   constant_profile(c2), constant_profile(n2), d)


def boundary_data(pair):
    """Boundary values ``c1(1), n1(1), c2(1), n2(1)`` and the reduced indices."""
    return BoundaryData(pair.c1.eval(1.0), pair.n1.eval(1.0),
                        pair.c2.eval(1.0), pair.n2.eval(1.0))


def classify(pair):
    """Boundary sign case of a medium pair.

    Isotropic when both diffusion profiles are identically 1 and the boundary
    indices differ.  Otherwise the sign of ``(c1 - c2)(c1 n1 - c2 n2)`` at the
    boundary decides between the two anisotropic cases, and zero means
    degenerate.
    """
    bd = boundary_data(pair)
    if pair.c1.is_constant_one() and pair.c2.is_constant_one():
        return CaseTag.ISOTROPIC if bd.n1 != bd.n2 else CaseTag.DEGENERATE
    prod = (bd.c1 - bd.c2) * (bd.c1 * bd.n1 - bd.c2 * bd.n2)
    if prod < 0.0:
        return CaseTag.ANISO_NEGATIVE
    if prod > 0.0:
        return CaseTag.ANISO_POSITIVE
    return CaseTag.DEGENERATE
