"""Numerical experiments turning the asymptotic estimates into checkable fits.

Every experiment returns a :class:`SweepResult` (or a
:class:`ConsistencyReport`) whose content depends only on its arguments:
mode sets, traversal order and seeds are fixed.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import parametrix
from .errors import DomainError, DtnPoleError, NearSingularError
from .profiles import CaseTag, MediumPair, RadialProfile, constant_profile
from .psido import SymbolGrid, composition_remainder, mollify, smoothstep5
from .radial import ModeProblem, dtn_eigenvalue, inhomogeneous_mode_solve, integrate_mode
from .regions import radial_critical_constant, radial_free_region
from .spectral import spectral_point

__all__ = [
    "SweepResult",
    "ConsistencyReport",
    "fit_slope",
    "z_fixed",
    "z_glancing",
    "dtn_parametrix_sweep",
    "dtn_aggregate",
    "apriori_sweep",
    "composition_sweep",
    "mollification_sweep",
    "region_consistency",
    "CALIBRATION_GRID",
]


@dataclass
class SweepResult:
    """Tabulated ``(h, theta, value)`` points and their log-log fit.

    ``fitted_slope`` and ``fit_r2`` are NaN when fewer than four positive
    values are available or when the fit is skipped (``status == "exact"``).
    """

    experiment: str
    points: list
    fitted_slope: float
    fit_r2: float
    params: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    status: str = "fit"

    def summary(self, passed=None):
        out = {
            "experiment": self.experiment,
            "params": self.params,
            "slope": self.fitted_slope,
            "r2": self.fit_r2,
            "status": self.status,
            "skipped": self.skipped,
        }
        out.update(self.extra)
        if passed is not None:
            out["pass"] = bool(passed)
        return out


@dataclass
class ConsistencyReport:
    """Outcome of checking a spectrum against a free region.

    ``calibrated_C`` is None when no constant on the grid clears the spectrum
    ("calibration failed").  ``vacuous`` marks an empty spectrum.
    """

    violations: list
    calibrated_C: float
    vacuous: bool = False
    checked_C: float = None
    n_roots: int = 0

    @property
    def calibration_failed(self):
        return self.calibrated_C is None


def fit_slope(points):
    """Least-squares slope of ``log y`` against ``log x``.

    Parameters
    ----------
    points : sequence of (x, y)
        At least four pairs, all positive.

    Returns
    -------
    slope, r2 : float
        ``r2`` is 1 when ``y`` is exactly constant.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
        raise DomainError("need at least four (x, y) pairs")
    if np.any(~np.isfinite(pts)) or np.any(pts <= 0.0):
        raise DomainError("fit data must be finite and positive")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icpt)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return float(slope), r2


def _fit(points):
    usable = [(h, v) for h, _, v in points if v > 0.0 and math.isfinite(v)]
    if len(usable) < 4:
        return math.nan, math.nan
    return fit_slope(usable)


def z_fixed(z):
    """Spectral-parameter rule returning the same ``z`` for every ``h``."""
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise DomainError("z must lie on the unit circle")
    return lambda h: z


def z_glancing(h):
    """Rule ``theta = h**(2/5)``: ``z = sqrt(1 - theta**2) + i theta``."""
    th = float(h) ** 0.4
    return complex(math.sqrt(1.0 - th * th), th)


def _medium(medium):
    if medium is None:
        one = constant_profile(1.0)
        return one, one
    if isinstance(medium, MediumPair):
        return medium.c1, medium.n1
    c, n = medium
    if not isinstance(c, RadialProfile):
        c = constant_profile(float(c))
    if not isinstance(n, RadialProfile):
        n = constant_profile(float(n))
    return c, n


def _dtn_errors(prof_c, prof_n, d, h, z, ells, ode_tol):
    """Per mode ``(nu - rho, nu - rho - h q)`` at ``xi = h ell``, None at DtN poles."""
    ctx = parametrix.BoundarySymbolContext(z, prof_n.eval(1.0) / prof_c.eval(1.0))
    out = []
    for ell in ells:
        try:
            tr = integrate_mode(ModeProblem.from_hz(prof_c, prof_n, d, ell, h, z), ode_tol)
            nu = dtn_eigenvalue(tr, h)
        except DtnPoleError:
            out.append(None)
            continue
        xi = h * ell
        bare = nu - parametrix.rho(xi, ctx)
        # q lives on the elliptic region, so it is absent at xi = 0
        corr = bare - h * parametrix.boundary_correction(xi) if xi != 0.0 else bare
        out.append((bare, corr))
    return out


def dtn_parametrix_sweep(medium=None, z_rule=None, h_list=(), xi_fixed=0.0, with_q=False,
                         d=2, ode_tol=1e-11):
    """Per-mode error of the principal DtN symbol along ``h ell ~ xi_fixed``.

    Parameters
    ----------
    medium : MediumPair, (c, n) profiles or numbers, optional
        Only the first medium of a pair is used; defaults to ``c = n = 1``.
    z_rule : callable ``h -> z``, optional
        Defaults to :func:`z_fixed` at ``z = -1``.
    h_list : sequence of float
    xi_fixed : float
        Boundary frequency; the mode is ``ell = round(xi_fixed / h)``.
    with_q : bool
        Subtract ``h q`` as well as ``rho``.

    Returns
    -------
    SweepResult
        Value ``|nu_ell - (rho + [with_q] h q)(h ell)|`` per ``h``.  ``extra``
        holds ``prefactor`` (value / h at the smallest ``h``).
    """
    prof_c, prof_n = _medium(medium)
    if z_rule is None:
        z_rule = z_fixed(-1.0)
    points, skipped = [], []
    for h in sorted(float(x) for x in h_list):
        z = z_rule(h)
        ell = int(round(xi_fixed / h))
        errs = _dtn_errors(prof_c, prof_n, d, h, z, [ell], ode_tol)[0]
        th = spectral_point(z ** 0.5 / h).theta
        if errs is None:
            skipped.append({"h": h, "ell": ell, "reason": "dtn pole"})
            continue
        points.append((h, th, abs(errs[1] if with_q else errs[0])))
    slope, r2 = _fit(points)
    extra = {"prefactor": points[0][2] / points[0][0] if points else math.nan}
    return SweepResult("dtn-parametrix", points, slope, r2,
                       {"xi_fixed": xi_fixed, "with_q": with_q, "d": d, "ode_tol": ode_tol},
                       skipped, extra)


def dtn_aggregate(medium=None, z=-1.0, h_list=(), xi_max=4.0, d=2, ode_tol=1e-11):
    """Weighted aggregate DtN errors in the two Sobolev weightings.

    With ``f_ell = <h ell>**-1`` and ``e_ell`` the per-mode error, the value
    is ``(h sum_{|ell| <= xi_max/h} <h ell>**(2k) |e_ell f_ell|**2)**(1/2)``:
    ``k = +1`` with the error against ``rho`` and ``k = -1`` with the error
    against ``rho + h q``.

    Returns
    -------
    dict
        ``"plus"`` and ``"minus"``: SweepResult each, sharing one set of
        integrations per ``h``.
    """
    prof_c, prof_n = _medium(medium)
    z = complex(z)
    pts_plus, pts_minus, skipped = [], [], []
    for h in sorted(float(x) for x in h_list):
        lmax = int(math.floor(xi_max / h))
        ells = list(range(lmax + 1))
        sp, sm = 0.0, 0.0
        for ell, errs in zip(ells, _dtn_errors(prof_c, prof_n, d, h, z, ells, ode_tol)):
            if errs is None:
                skipped.append({"h": h, "ell": ell, "reason": "dtn pole"})
                continue
            eb, ec = errs
            jp2 = 1.0 + (h * ell) ** 2
            mult = 1.0 if ell == 0 else 2.0
            # weight <h ell>**(2k) times |f_ell|**2 = <h ell>**-2
            sp += mult * abs(eb) ** 2
            sm += mult * abs(ec) ** 2 / (jp2 * jp2)
        th = spectral_point(z ** 0.5 / h).theta
        pts_plus.append((h, th, math.sqrt(h * sp)))
        pts_minus.append((h, th, math.sqrt(h * sm)))
    params = {"z": [z.real, z.imag], "xi_max": xi_max, "d": d, "ode_tol": ode_tol}
    out = {}
    for key, pts in (("plus", pts_plus), ("minus", pts_minus)):
        slope, r2 = _fit(pts)
        out[key] = SweepResult(f"dtn-aggregate-{key}", pts, slope, r2, params, skipped)
    return out


def apriori_sweep(medium=None, z=1j, rhs=1.0, h_list=(), ells=range(11), d=2, ode_tol=1e-10):
    """Boundary flux of the Dirichlet problem relative to ``h**(1/2) theta**(-1/2)``.

    For each ``h`` and each mode the flux ``g`` of the solution with right
    side ``rhs`` is computed.  The point value is the largest worst-case
    ratio ``sup_F |g| / (h**(1/2) theta**(-1/2) ||F||)`` over the modes; the
    ratio for the given ``rhs`` is recorded in ``extra["rhs_ratios"]``.

    Parameters
    ----------
    z : complex or callable ``h -> z``
    rhs : callable, scalar or (r, values)
        Radial profile of the right side, the same for every mode.

    Returns
    -------
    SweepResult
        ``extra`` holds ``max_ratio``, ``min_ratio``, ``variation`` (their
        quotient), ``rhs_ratios`` and ``max_rhs_ratio``.
    """
    prof_c, prof_n = _medium(medium)
    rule = z if callable(z) else (lambda h, _z=complex(z): _z)
    points, skipped, rhs_ratios = [], [], []
    for h in sorted(float(x) for x in h_list):
        zh = complex(rule(h))
        sp = spectral_point(zh ** 0.5 / h)
        if sp.theta < h:
            raise DomainError(f"theta = {sp.theta:.3g} is below h = {h:.3g}")
        scale = math.sqrt(h / sp.theta)
        worst, best_rhs = 0.0, 0.0
        for ell in ells:
            try:
                res = inhomogeneous_mode_solve(
                    ModeProblem.from_hz(prof_c, prof_n, d, ell, h, zh), rhs, ode_tol)
            except NearSingularError as exc:
                skipped.append({"h": h, "ell": ell, "reason": "dirichlet eigenvalue",
                                "condition": exc.condition})
                continue
            worst = max(worst, res.gain / scale)
            if res.v_norm > 0.0:
                best_rhs = max(best_rhs, abs(res.g) / (scale * res.v_norm))
        points.append((h, sp.theta, worst))
        rhs_ratios.append((h, sp.theta, best_rhs))
    slope, r2 = _fit(points)
    vals = [p[2] for p in points if p[2] > 0.0]
    extra = {
        "max_ratio": max(vals) if vals else 0.0,
        "min_ratio": min(vals) if vals else 0.0,
        "variation": max(vals) / min(vals) if vals else math.nan,
        "rhs_ratios": rhs_ratios,
        "max_rhs_ratio": max((p[2] for p in rhs_ratios), default=0.0),
    }
    return SweepResult("apriori", points, slope, r2,
                       {"ells": list(ells), "d": d, "ode_tol": ode_tol}, skipped, extra)


def _japanese(xi):
    return np.sqrt(1.0 + xi * xi)


def _frequency_cutoff(xi):
    # equals 1 for |xi| <= 3 and 0 for |xi| >= 5
    return 1.0 - smoothstep5((np.abs(xi) - 3.0) / 2.0)


_SYMBOL_SUPPORT = 5.0


def _family(name):
    """Left and right symbols of a composition family and its ``n_x`` rule."""
    cut = _frequency_cutoff
    if name == "smooth":
        return (lambda x, xi: (2.0 + np.cos(x)) * xi / _japanese(xi) * cut(xi),
                lambda x, xi: (1.0 + 0.5 * np.sin(2.0 * x)) / _japanese(xi) * cut(xi),
                lambda h: 16)
    if name == "multiplier":
        return (lambda x, xi: xi / _japanese(xi) * cut(xi) + 0.0 * x,
                lambda x, xi: 1.0 / _japanese(xi) * cut(xi) + 0.0 * x,
                lambda h: 16)
    if name == "rough":
        # |sin x|**3 is C^2 with a jumping third derivative
        return (lambda x, xi: (2.0 + np.cos(x)) * xi / _japanese(xi) * cut(xi),
                lambda x, xi: (1.0 + 0.5 * np.abs(np.sin(x)) ** 3) / _japanese(xi) * cut(xi),
                lambda h: int(min(max(16, 2 ** math.ceil(math.log2(4.0 / h))), 512)))
    raise DomainError(f"unknown symbol family {name!r}")


def composition_sweep(family, h_list, k=0.0, exact_tol=1e-12):
    """Norm of ``Op(a1) Op(a2) - Op(a1 a2)`` from ``H_h^k`` to ``L^2`` against ``h``.

    Families: ``"smooth"`` (trigonometric in ``x``), ``"multiplier"`` (no
    ``x``-dependence, composition exact) and ``"rough"`` (right factor only
    ``C^2`` in ``x``).  Symbols vanish for ``|xi| >= 5`` and the frequency
    window exceeds that by the band half-width, so truncation of the
    intermediate modes does not enter.

    Returns
    -------
    SweepResult
        ``status`` is ``"exact"`` (fit skipped) when every remainder is at
        most ``exact_tol``.
    """
    left, right, nx_rule = _family(family)
    points = []
    for h in sorted(float(x) for x in h_list):
        n_x = nx_rule(h)
        k_max = int(math.ceil(_SYMBOL_SUPPORT / h)) + n_x // 2 + 1
        a1 = SymbolGrid.from_function(left, h, k_max, n_x)
        a2 = SymbolGrid.from_function(right, h, k_max, n_x)
        points.append((h, 1.0, composition_remainder(a1, a2, k=k)))
    params = {"family": family, "k": k}
    if points and max(p[2] for p in points) <= exact_tol:
        return SweepResult("composition", points, math.nan, math.nan, params,
                           extra={"max_remainder": max(p[2] for p in points)}, status="exact")
    slope, r2 = _fit(points)
    return SweepResult("composition", points, slope, r2, params,
                       extra={"max_remainder": max(p[2] for p in points)})


def mollification_sweep(t_list, n_x=64):
    """Sup-norm error of mollifying ``sin x`` against the scale ``t``.

    Points are ``(t, 1, max |a_t - a|)``; the bump is even, so the error is
    quadratic in ``t``.
    """
    a = SymbolGrid.from_function(lambda x, xi: np.sin(x) + 0.0 * xi, 1.0, 0, n_x)
    points = []
    for t in sorted(float(x) for x in t_list):
        err = float(np.max(np.abs(mollify(a, t).values - a.values)))
        points.append((t, 1.0, err))
    slope, r2 = _fit(points)
    return SweepResult("mollification", points, slope, r2, {"n_x": n_x})


CALIBRATION_GRID = tuple(round(2.0 + 0.1 * i, 1) for i in range(1, 181))


def region_consistency(spectrum, case, search_box, C=None, epsilon=0.1):
    """Check a computed spectrum against the radial free region.

    Parameters
    ----------
    spectrum : iterable of Root (or anything with ``.lam``) or complex
    case : CaseTag
    search_box : SearchBox
        Roots outside the box are ignored.
    C : float, optional
        Constant whose violations are listed; defaults to the calibrated one.

    Returns
    -------
    ConsistencyReport
        ``calibrated_C`` is the smallest grid value ``2.1, 2.2, ..., 20``
        whose region contains no root.
    """
    case = CaseTag(case)
    lams = []
    for r in spectrum:
        lam = complex(getattr(r, "lam", r))
        if search_box.contains(lam):
            lams.append((r, lam))
    if not lams:
        return ConsistencyReport([], CALIBRATION_GRID[0], True, C, 0)
    worst = max(radial_critical_constant(lam, case, epsilon) for _, lam in lams)
    calibrated = None
    for c in CALIBRATION_GRID:
        # membership needs C <= critical constant, so c clears every root iff c > worst
        if c > worst and not any(radial_free_region(lam, case, c, epsilon) for _, lam in lams):
            calibrated = c
            break
    checked = C if C is not None else calibrated
    violations = []
    if checked is not None:
        violations = [(r, {"case": case.value, "C": checked, "epsilon": epsilon})
                      for r, lam in lams if radial_free_region(lam, case, checked, epsilon)]
    return ConsistencyReport(violations, calibrated, False, checked, len(lams))
