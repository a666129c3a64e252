"""Shooting solver for one angular mode of a radial medium.

The mode equation

    v'' + ((d-1)/r + c'/c) v' + (lam**2 n/c - L/r**2) v = 0,
    L = ell (ell + d - 2),

is integrated for the solution regular at the origin.  Writing
``v = r**ell * w`` removes the regular singular point and the ``r**ell``
under/overflow: ``w`` is smooth with ``w(0) = 1``, and the kernel integrates
``w`` with periodic renormalization into a running log-scale.  Near the origin
``w`` is started from its power series, which is exact for the linear pieces
of the coefficients.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import DomainError, DtnPoleError, IntegrationError, NearSingularError
from ..profiles import MediumPair, RadialProfile, merged_nodes
from ..spectral import spectral_point
from ._backend import kernel as _kernel

__all__ = [
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

MAX_STEPS = 2_000_000
_MAX_TERMS = 400
_MIN_START = 1e-6
# |v(1)|**2 / int |v|**2 below this is treated as a Dirichlet eigenvalue
_SINGULAR_RATIO = 1e-20


@dataclass(frozen=True)
class ModeProblem:
    """One angular mode of a radial medium at a spectral parameter.

    Parameters
    ----------
    profile_c, profile_n : RadialProfile
        Diffusion and index profiles.
    d : int
        Space dimension.
    ell : int
        Angular degree.
    lam : complex
        Spectral parameter; only ``lam**2`` enters the equation.
    """

    profile_c: RadialProfile
    profile_n: RadialProfile
    d: int
    ell: int
    lam: complex

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 0:
            raise DomainError("ell must be a nonnegative integer")
        if int(self.d) != self.d or self.d < 2:
            raise DomainError("d must be an integer >= 2")
        lam = complex(self.lam)
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            raise DomainError("spectral parameter must be finite")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "ell", int(self.ell))
        object.__setattr__(self, "d", int(self.d))

    @classmethod
    def from_hz(cls, profile_c, profile_n, d, ell, h, z):
        """Build from the semiclassical pair ``(h, z)``, i.e. ``lam**2 = z/h**2``."""
        return cls(profile_c, profile_n, d, ell, complex(z) ** 0.5 / h)

    @property
    def lam2(self):
        return self.lam * self.lam


@dataclass(frozen=True)
class ModeTrace:
    """Boundary data ``v(1) = v1 e**log_scale`` and ``v'(1) = dv1 e**log_scale``."""

    v1: complex
    dv1: complex
    log_scale: float
    nsteps: int = 0

    @property
    def ratio(self):
        """Logarithmic derivative ``v'(1)/v(1)``."""
        if self.v1 == 0:
            raise DtnPoleError("v(1) vanishes")
        return self.dv1 / self.v1


class ScaledValue(NamedTuple):
    """Complex number ``mantissa * exp(log_scale)`` kept in split form."""

    mantissa: complex
    log_scale: float

    @property
    def value(self):
        with np.errstate(over="ignore"):
            return complex(self.mantissa * np.exp(self.log_scale)) if self.mantissa else 0j

    @property
    def log_abs(self):
        m = abs(self.mantissa)
        return math.log(m) + self.log_scale if m > 0 else -math.inf


class InhomogeneousResult(NamedTuple):
    """Output of :func:`inhomogeneous_mode_solve`.

    Attributes
    ----------
    g : complex
        Scaled boundary flux ``-h u'(1)``.
    v_norm : float
        Weighted norm ``(int |F|**2 r**(d-1) dr)**(1/2)`` of the right-hand side.
    gain : float
        ``sup |g| / v_norm`` over all right-hand sides of this mode.
    condition : float
        ``sqrt(int |v|**2 r**(d-1)) / |v(1)|`` for the regular solution ``v``.
    """

    g: complex
    v_norm: float
    gain: float
    condition: float


def _first_segment(profile, r1):
    v0 = profile.eval(0.0)
    return v0, (profile.eval(r1) - v0) / r1


def frobenius_start(problem, r1, rhs_line=None):
    """Series solution on ``[0, r_s]`` for the regular solution.

    Parameters
    ----------
    problem : ModeProblem
    r1 : float
        End of the first interval on which all coefficients are linear.
    rhs_line : (complex, complex), optional
        Intercept and slope of the right-hand side on the first interval.
        When given, the moments ``I = int r**(ell+d-1) w F`` and
        ``J = int r**(2 ell + d - 1) |w|**2`` over ``[0, r_s]`` are returned.

    Returns
    -------
    r_s, w, dw, qi, qj : float, complex, complex, complex, float
    """
    ell, d, lam2 = problem.ell, problem.d, problem.lam2
    c0, c1 = _first_segment(problem.profile_c, r1)
    n0, n1 = _first_segment(problem.profile_n, r1)
    if c0 <= 0.0:
        raise DomainError("diffusion coefficient must be positive")
    rs = min(0.5 * r1, 0.5)
    if c1 != 0.0:
        rs = min(rs, 0.5 * c0 / abs(c1))
    nmax = max(abs(n0), abs(n0 + n1 * r1))
    if abs(lam2) * nmax > 0.0:
        rs = min(rs, math.sqrt(0.5 * (2 * ell + d) * c0 / (abs(lam2) * nmax)))
    rs = max(rs, min(_MIN_START, 0.5 * r1))

    L = ell * (ell + d - 2)
    t = [1.0 + 0j]
    w = 1.0 + 0j
    dw = 0j
    for k in range(1, _MAX_TERMS):
        s = ell + k - 1
        acc = c1 * rs * (s * (s + d - 1) - L) * t[k - 1]
        if k >= 2:
            acc += lam2 * rs * rs * n0 * t[k - 2]
        if k >= 3:
            acc += lam2 * rs ** 3 * n1 * t[k - 3]
        tk = -acc / (c0 * k * (2 * ell + k + d - 2))
        t.append(tk)
        w += tk
        dw += k * tk
        if k >= 4 and abs(tk) + abs(t[k - 1]) + abs(t[k - 2]) <= 1e-18 * abs(w) * k:
            break
    dw /= rs
    if rhs_line is None:
        return rs, w, dw, 0j, 0.0
    f0, f1 = rhs_line
    tk = np.asarray(t)
    kk = np.arange(tk.size)
    base = rs ** (ell + d)
    qi = complex(np.sum(tk * (f0 * base / (ell + d + kk) + f1 * base * rs / (ell + d + kk + 1))))
    base2 = rs ** (2 * ell + d)
    qj = float(np.real(np.sum(np.outer(tk, tk.conj()) * base2
                              / (2 * ell + d + kk[:, None] + kk[None, :]))))
    return rs, w, dw, qi, qj


def _shoot(problem, tol, rhs_r=None, rhs_v=None, max_steps=MAX_STEPS):
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    c, n = problem.profile_c, problem.profile_n
    quad = rhs_r is not None
    nodes = merged_nodes(c, n)
    if quad:
        nodes = np.union1d(nodes, rhs_r)
    r1 = float(nodes[1])
    rhs_line = None
    if quad:
        fa = complex(_interp_c(0.0, rhs_r, rhs_v))
        fb = complex(_interp_c(r1, rhs_r, rhs_v))
        rhs_line = (fa, (fb - fa) / r1)
    rs, w, dw, qi, qj = frobenius_start(problem, r1, rhs_line)
    path = np.concatenate([[rs], nodes[nodes > rs]])
    cv = np.ascontiguousarray(c.eval(path), dtype=float)
    nv = np.ascontiguousarray(n.eval(path), dtype=float)
    if quad:
        fv = np.ascontiguousarray(_interp_c(path, rhs_r, rhs_v), dtype=complex)
    else:
        fv = np.zeros(path.size, dtype=complex)
    out = _kernel.integrate_path(problem.ell, problem.d, problem.lam2, path, cv, nv, fv, quad,
                                 w, dw, qi, qj, tol, tol * 1e-2, max_steps)
    w1, dw1, qi1, qj1, log_scale, nsteps, status, fail_r = out
    if status == 1:
        raise IntegrationError(f"step size underflow at r = {fail_r:.6g}", fail_r, "step underflow")
    if status == 2:
        raise IntegrationError(f"step budget exhausted at r = {fail_r:.6g}", fail_r, "step budget")
    if not (np.isfinite(w1) and np.isfinite(dw1)):
        raise IntegrationError("non-finite boundary values", 1.0, "overflow")
    return w1, dw1, qi1, qj1, log_scale, nsteps


def _interp_c(x, xp, fp):
    fp = np.asarray(fp)
    return np.interp(x, xp, fp.real) + 1j * np.interp(x, xp, fp.imag)


def integrate_mode(problem, tol=1e-10):
    """Boundary trace of the regular solution ``v ~ r**ell`` at ``r = 1``.

    Parameters
    ----------
    problem : ModeProblem
    tol : float
        Relative local error tolerance (absolute tolerance ``tol * 1e-2``).

    Returns
    -------
    ModeTrace

    Raises
    ------
    IntegrationError
        On step-size underflow or budget exhaustion, with the failure radius.
    """
    w1, dw1, _, _, log_scale, nsteps = _shoot(problem, tol)
    return ModeTrace(complex(w1), complex(dw1 + problem.ell * w1), float(log_scale), int(nsteps))


def dtn_eigenvalue(trace, h):
    """DtN eigenvalue ``i h v'(1)/v(1)`` of a mode (inner normal convention).

    Raises
    ------
    DtnPoleError
        If ``v(1)`` vanishes.
    """
    if trace.v1 == 0 or not np.isfinite(trace.dv1 / trace.v1):
        raise DtnPoleError("boundary value vanishes; DtN eigenvalue has a pole")
    return 1j * h * (trace.dv1 / trace.v1)


def itp_characteristic_scaled(lam, ell, pair, tol=1e-10):
    """Characteristic function of one mode in overflow-safe split form.

    ``W = c1(1) v1'(1) v2(1) - c2(1) v2'(1) v1(1)`` with both regular
    solutions normalized by ``v ~ r**ell`` at the origin.  ``W`` is entire
    in ``lam**2`` and vanishes at the transmission eigenvalues of mode ``ell``.

    Returns
    -------
    ScaledValue
        With ``|mantissa| = 1`` unless ``W`` vanishes identically.
    """
    if not isinstance(pair, MediumPair):
        raise DomainError("pair must be a MediumPair")
    ta = integrate_mode(ModeProblem(pair.c1, pair.n1, pair.d, ell, lam), tol)
    if (pair.c2, pair.n2) == (pair.c1, pair.n1):
        tb = ta
    else:
        tb = integrate_mode(ModeProblem(pair.c2, pair.n2, pair.d, ell, lam), tol)
    ca = pair.c1.eval(1.0)
    cb = pair.c2.eval(1.0)
    mant = ca * ta.dv1 * tb.v1 - cb * tb.dv1 * ta.v1
    scale = ta.log_scale + tb.log_scale
    m = abs(mant)
    if m > 0.0 and math.isfinite(m):
        mant /= m
        scale += math.log(m)
    return ScaledValue(complex(mant), float(scale))


def itp_characteristic(lam, ell, pair, tol=1e-10):
    """Characteristic function of one mode as a plain complex number.

    May overflow to infinity for large ``|lam|``; root finding uses
    :func:`itp_characteristic_scaled`.
    """
    return itp_characteristic_scaled(lam, ell, pair, tol).value


def _gauss_norm(r, f, d):
    xg, wg = np.polynomial.legendre.leggauss(d // 2 + 3)
    total = 0.0
    for a, b, fa, fb in zip(r[:-1], r[1:], f[:-1], f[1:]):
        x = 0.5 * (b - a) * xg + 0.5 * (b + a)
        fx = fa + (fb - fa) * (x - a) / (b - a)
        total += 0.5 * (b - a) * np.sum(wg * np.abs(fx) ** 2 * x ** (d - 1))
    return math.sqrt(total)


def _sample_rhs(rhs, n_samples):
    if rhs is None:
        return None
    if callable(rhs):
        r = np.linspace(0.0, 1.0, n_samples)
        return r, np.asarray([complex(rhs(x)) for x in r])
    if np.isscalar(rhs):
        return np.array([0.0, 1.0]), np.array([complex(rhs)] * 2)
    r, v = rhs
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=complex)
    if r.shape != v.shape or r.ndim != 1 or r.size < 2:
        raise DomainError("rhs samples must be two 1-d arrays of equal length")
    if r[0] != 0.0 or r[-1] != 1.0 or np.any(np.diff(r) <= 0):
        raise DomainError("rhs abscissae must increase from 0 to 1")
    return r, v


def inhomogeneous_mode_solve(problem, rhs_profile, tol=1e-10, n_samples=1025):
    """Solve one mode of ``(h**2 div c grad + z n) u = h F``, ``u(1) = 0``.

    Here ``h = 1/|lam|`` and ``z = (h lam)**2``.  By Green's identity against
    the regular solution ``v``, the flux is ``g = -h u'(1) = -I/(c(1) v(1))``
    with ``I = int v F r**(d-1) dr``.

    Parameters
    ----------
    problem : ModeProblem
    rhs_profile : callable, scalar, or (r, values)
        Right-hand side ``F(r)``, interpreted as piecewise linear in ``r``.
        Callables are sampled on ``n_samples`` uniform points.
    tol : float

    Returns
    -------
    InhomogeneousResult

    Raises
    ------
    NearSingularError
        If ``lam**2`` is (numerically) a Dirichlet eigenvalue of the mode.
    """
    spectral_point(problem.lam)  # rejects lam = 0
    sampled = _sample_rhs(rhs_profile, n_samples)
    if sampled is None:
        sampled = (np.array([0.0, 1.0]), np.zeros(2, dtype=complex))
    r, fv = sampled
    w1, _, qi, qj, _, _ = _shoot(problem, tol, r, fv)
    c_one = problem.profile_c.eval(1.0)
    if qj <= 0.0 or abs(w1) ** 2 < _SINGULAR_RATIO * qj:
        cond = math.sqrt(qj) / abs(w1) if w1 != 0 else math.inf
        raise NearSingularError(
            f"mode {problem.ell} is nearly singular (condition {cond:.3g})", cond)
    g = -qi / (c_one * w1)
    vn = _gauss_norm(r, fv, problem.d)
    gain = math.sqrt(qj) / (c_one * abs(w1))
    cond = math.sqrt(qj) / abs(w1)
    return InhomogeneousResult(complex(g), vn, gain, cond)
