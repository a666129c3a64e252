"""Complex root localization by the argument principle.

Zeros of an analytic function inside a rectangle are counted by tracking the
continuous argument of the function along the boundary.  Boxes are
quadrisected until each holds at most one zero, which is then polished by a
damped Newton iteration with a central-difference derivative.

Functions may return a plain complex number or a
:class:`~itp_lab.radial.ScaledValue` (``mantissa * exp(log_scale)``), which
lets characteristic functions of huge modulus be handled without overflow.
"""
import bisect
import cmath
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ContourProximityError, DomainError, ItpLabError, UnsupportedCaseError

__all__ = [
    "SearchBox",
    "Root",
    "RootList",
    "winding_number",
    "find_roots",
    "itp_spectrum",
    "default_ell_max",
    "contour_spacing",
]

_PROXIMITY = math.log(1e-12)
_SPLIT_FRACTIONS = ((0.4813, 0.5279), (0.5371, 0.4627), (0.4419, 0.5633))
_JITTER = 0.017


@dataclass(frozen=True)
class SearchBox:
    """Axis-parallel rectangle ``re_range x im_range`` in the complex plane.

    Parameters
    ----------
    re_range, im_range : (float, float)
        Increasing coordinate ranges.
    min_size : float, optional
        Boxes smaller than this are not subdivided further.  Defaults to
        ``1e-6`` times the larger side.
    """

    re_range: tuple
    im_range: tuple
    min_size: float = None

    def __post_init__(self):
        a, b = map(float, self.re_range)
        c, e = map(float, self.im_range)
        if not (a < b and c < e):
            raise DomainError("box ranges must be increasing")
        object.__setattr__(self, "re_range", (a, b))
        object.__setattr__(self, "im_range", (c, e))
        if self.min_size is None:
            object.__setattr__(self, "min_size", 1e-6 * max(b - a, e - c))
        elif not self.min_size > 0.0:
            raise DomainError("min_size must be positive")

    @property
    def width(self):
        return self.re_range[1] - self.re_range[0]

    @property
    def height(self):
        return self.im_range[1] - self.im_range[0]

    @property
    def center(self):
        return complex(0.5 * sum(self.re_range), 0.5 * sum(self.im_range))

    def contains(self, lam, margin=0.0):
        lam = complex(lam)
        mx, my = margin * self.width, margin * self.height
        return (self.re_range[0] - mx <= lam.real <= self.re_range[1] + mx
                and self.im_range[0] - my <= lam.imag <= self.im_range[1] + my)

    def expanded(self, frac):
        dx, dy = 0.5 * frac * self.width, 0.5 * frac * self.height
        return SearchBox((self.re_range[0] - dx, self.re_range[1] + dx),
                         (self.im_range[0] - dy, self.im_range[1] + dy), self.min_size)

    def split(self, fx=0.5, fy=0.5):
        """Four children, ordered lower-left, lower-right, upper-left, upper-right."""
        (a, b), (c, e) = self.re_range, self.im_range
        xm = a + fx * (b - a)
        ym = c + fy * (e - c)
        ms = self.min_size
        return [SearchBox((a, xm), (c, ym), ms), SearchBox((xm, b), (c, ym), ms),
                SearchBox((a, xm), (ym, e), ms), SearchBox((xm, b), (ym, e), ms)]


@dataclass(frozen=True)
class Root:
    """A located zero.

    Attributes
    ----------
    lam : complex
        Location.
    ell : int
        Angular mode that produced it (smallest one after merging).
    residual : float
        ``|f| / (|f'| max(1, |lam|))`` at ``lam``: the relative Newton
        correction still outstanding.
    winding : int
        Winding number of the enclosing box (multiplicity).
    ells : tuple of int
        All modes contributing this root.
    """

    lam: complex
    ell: int = 0
    residual: float = 0.0
    winding: int = 1
    ells: tuple = ()

    def __post_init__(self):
        if not self.ells:
            object.__setattr__(self, "ells", (self.ell,))


class RootList(list):
    """List of :class:`Root` with a completeness flag and failure log."""

    def __init__(self, roots=(), complete=True, failures=()):
        super().__init__(roots)
        self.complete = complete
        self.failures = list(failures)


def _as_log(value):
    """Return ``(log|f|, arg f)`` for a complex number or a scaled value."""
    if isinstance(value, tuple) and len(value) == 2 and not isinstance(value, complex):
        mant, scale = value
        mant = complex(mant)
        if mant == 0:
            return -math.inf, 0.0
        return math.log(abs(mant)) + float(scale), cmath.phase(mant)
    v = complex(value)
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise ItpLabError(f"function returned a non-finite value {v!r}")
    if v == 0:
        return -math.inf, 0.0
    return math.log(abs(v)), cmath.phase(v)


def _wrap(dphi):
    return (dphi + math.pi) % (2.0 * math.pi) - math.pi


class _Evaluator:
    """Memoized evaluation of ``f`` and per-line argument samples."""

    def __init__(self, f):
        self.f = f
        self.cache = {}
        self.lines = {}
        self.count = 0

    def __call__(self, z):
        z = complex(z)
        hit = self.cache.get(z)
        if hit is None:
            hit = _as_log(self.f(z))
            self.cache[z] = hit
            self.count += 1
        return hit

    def ratio(self, z, z0, base):
        """``f(z)/f(z0)`` as a complex number, with ``base = self(z0)``."""
        la, pa = self(z)
        lb, pb = base
        if la == -math.inf:
            return 0j
        return cmath.exp(complex(la - lb, pa - pb))

    def line(self, horizontal, coord):
        key = (horizontal, coord)
        ln = self.lines.get(key)
        if ln is None:
            ln = self.lines[key] = ([], [])
        return ln

    def point(self, horizontal, coord, t):
        return complex(t, coord) if horizontal else complex(coord, t)

    def edge_increment(self, horizontal, coord, t0, t1, cap, spacing, floor):
        """Continuous argument change of ``f`` along a straight edge.

        Samples are shared between all edges lying on the same line.
        """
        ts, vals = self.line(horizontal, coord)
        lo, hi = min(t0, t1), max(t0, t1)

        def ensure(t):
            i = bisect.bisect_left(ts, t)
            if i < len(ts) and ts[i] == t:
                return
            v = self(self.point(horizontal, coord, t))
            ts.insert(i, t)
            vals.insert(i, v)

        n = max(2, int(math.ceil((hi - lo) / spacing)) + 1)
        for t in np.linspace(lo, hi, n):
            ensure(float(t))
        ensure(lo)
        ensure(hi)
        while True:
            i0 = bisect.bisect_left(ts, lo)
            i1 = bisect.bisect_right(ts, hi)
            seg_t = ts[i0:i1]
            seg_v = vals[i0:i1]
            logs = [v[0] for v in seg_v]
            finite = [x for x in logs if x != -math.inf]
            if len(finite) < len(logs):
                raise ContourProximityError("exact zero on the contour", 0.0, 0.0)
            med = float(np.median(finite))
            mn = min(finite)
            if mn < med + _PROXIMITY:
                raise ContourProximityError("zero too close to the contour",
                                            math.exp(mn - med), 1.0)
            bad = []
            for j in range(len(seg_t) - 1):
                if abs(_wrap(seg_v[j + 1][1] - seg_v[j][1])) > cap:
                    if seg_t[j + 1] - seg_t[j] < floor:
                        raise ContourProximityError(
                            "argument jump unresolved at the sampling floor",
                            math.exp(min(seg_v[j][0], seg_v[j + 1][0]) - med), 1.0)
                    bad.append(0.5 * (seg_t[j] + seg_t[j + 1]))
            if not bad:
                break
            for t in bad:
                ensure(t)
        total = sum(_wrap(seg_v[j + 1][1] - seg_v[j][1]) for j in range(len(seg_t) - 1))
        return total if t1 >= t0 else -total

    def winding(self, box, cap, spacing):
        (a, b), (c, e) = box.re_range, box.im_range
        floor = 1e-13 * max(1.0, abs(a), abs(b), abs(c), abs(e))
        total = (self.edge_increment(True, c, a, b, cap, spacing, floor)
                 + self.edge_increment(False, b, c, e, cap, spacing, floor)
                 + self.edge_increment(True, e, b, a, cap, spacing, floor)
                 + self.edge_increment(False, a, e, c, cap, spacing, floor))
        return total / (2.0 * math.pi)


def _winding(ev, box, quad_tol, spacing=None, max_refine=5):
    base = max(box.width, box.height) / 16.0
    spacing = base if spacing is None else min(spacing, base)
    cap = quad_tol
    for _ in range(max_refine):
        w = ev.winding(box, cap, spacing)
        k = round(w)
        if abs(w - k) <= 0.25:
            return int(k)
        cap *= 0.5
        spacing *= 0.5
    raise ItpLabError(f"winding number did not settle (last value {w:.3f})")


def winding_number(f, box, quad_tol=math.pi / 2, spacing=None):
    """Number of zeros of ``f`` inside ``box`` counted with multiplicity.

    Parameters
    ----------
    f : callable
        Analytic function returning complex or ``(mantissa, log_scale)``.
    box : SearchBox
    quad_tol : float
        Largest argument increment allowed between neighbouring samples.
    spacing : float, optional
        Largest initial distance between contour samples.

    Raises
    ------
    ContourProximityError
        If a zero lies (numerically) on the contour.
    """
    return _winding(_Evaluator(f), box, quad_tol, spacing)


def _newton(ev, z0, box, tol, max_iter=60):
    """Damped Newton iteration; returns ``(z, residual, converged)``."""
    z = complex(z0)
    scale = max(box.width, box.height)
    for _ in range(max_iter):
        base = ev(z)
        if base[0] == -math.inf:
            return z, 0.0, True
        delta = 1e-6 * max(abs(z), scale)
        rp = ev.ratio(z + delta, z, base)
        rm = ev.ratio(z - delta, z, base)
        dlog = (rp - rm) / (2.0 * delta)
        if dlog == 0:
            return z, math.inf, False
        step = -1.0 / dlog
        lim = 0.5 * scale
        if abs(step) > lim:
            step *= lim / abs(step)
        t = 1.0
        for _ in range(30):
            znew = z + t * step
            if ev(znew)[0] < base[0] or abs(t * step) <= tol * max(1.0, abs(z)):
                break
            t *= 0.5
        else:
            return z, abs(step) / max(1.0, abs(z)), False
        z = znew
        if not box.contains(z, margin=0.1):
            return z, math.inf, False
        if abs(t * step) <= tol * max(1.0, abs(z)):
            base = ev(z)
            rp = ev.ratio(z + delta, z, base)
            rm = ev.ratio(z - delta, z, base)
            dlog = (rp - rm) / (2.0 * delta)
            res = 0.0 if base[0] == -math.inf else abs(1.0 / dlog) / max(1.0, abs(z))
            return z, res, True
    return z, math.inf, False


def _jittered_winding(ev, box, quad_tol, spacing, attempts=3):
    for k in range(attempts + 1):
        try:
            return box, _winding(ev, box, quad_tol, spacing)
        except ContourProximityError:
            if k == attempts:
                raise
            box = box.expanded(_JITTER)
    raise AssertionError("unreachable")


def _split_counts(ev, bx, w, quad_tol, spacing, refinements=2):
    """Windings of a quadrisection, refining until they add up to the parent."""
    for fx, fy in _SPLIT_FRACTIONS:
        parts = bx.split(fx, fy)
        cap, sp = quad_tol, spacing
        for _ in range(refinements + 1):
            try:
                ws = [_winding(ev, p, cap, sp) for p in parts]
                if sum(ws) == w:
                    return list(zip(parts, ws)), w
                # the parent count may be the aliased one; recount both finer
                cap *= 0.5
                sp = 0.5 * (sp if sp is not None else max(bx.width, bx.height) / 16.0)
                w = _winding(ev, bx, cap, sp)
            except (ContourProximityError, ItpLabError):
                break
    return None, w


def find_roots(f, box, tol=1e-10, quad_tol=math.pi / 2, max_boxes=20000, ell=0, spacing=None):
    """Locate all zeros of ``f`` inside ``box``.

    Parameters
    ----------
    f : callable
        Analytic function returning complex or ``(mantissa, log_scale)``.
    box : SearchBox
    tol : float
        Newton stopping tolerance relative to ``max(1, |z|)``.
    quad_tol : float
        Argument increment cap for contour sampling.
    max_boxes : int
        Budget of winding-number evaluations.
    ell : int
        Mode label attached to the returned roots.
    spacing : float, optional
        Largest initial distance between contour samples; should resolve the
        oscillation of ``f`` along the contour.

    Returns
    -------
    RootList
        Roots sorted by real then imaginary part; ``complete`` is false when
        the budget ran out or a sub-box could not be resolved.
    """
    ev = _Evaluator(f)
    box, w = _jittered_winding(ev, box, quad_tol, spacing)
    roots = []
    failures = []
    complete = True
    stack = [(box, w)]
    used = 1
    while stack:
        bx, w = stack.pop()
        if w == 0:
            continue
        if w == 1:
            z, res, ok = _newton(ev, bx.center, bx, tol)
            if ok and bx.contains(z):
                roots.append(Root(z, ell, res, 1))
                continue
        if max(bx.width, bx.height) <= bx.min_size:
            z, res, ok = _newton(ev, bx.center, bx, tol)
            roots.append(Root(z if ok and bx.contains(z, 0.5) else bx.center, ell,
                              res if ok else math.inf, w))
            continue
        if used >= max_boxes:
            complete = False
            failures.append(("budget", bx))
            continue
        children, w = _split_counts(ev, bx, w, quad_tol, spacing)
        used += 4
        if children is None:
            complete = False
            failures.append(("unresolved", bx))
            continue
        # push in reverse so boxes are processed lower-left first
        for item in reversed(children):
            stack.append(item)
    roots.sort(key=lambda r: (r.lam.real, r.lam.imag))
    return RootList(roots, complete, failures)


def default_ell_max(pair, box):
    """Heuristic largest mode able to produce zeros in ``box``."""
    lam_max = max(abs(complex(x, y)) for x in box.re_range for y in box.im_range)
    speed = 0.0
    for c, n in ((pair.c1, pair.n1), (pair.c2, pair.n2)):
        r = np.union1d(c.breakpoints, n.breakpoints)
        speed = max(speed, float(np.max(np.sqrt(n.eval(r) / c.eval(r)))))
    return int(math.ceil(1.5 * lam_max * speed)) + 10


class _ModeFunction:
    """Picklable characteristic function of one mode."""

    def __init__(self, pair, ell, ode_tol):
        self.pair = pair
        self.ell = ell
        self.ode_tol = ode_tol

    def __call__(self, lam):
        from .radial import itp_characteristic_scaled
        return itp_characteristic_scaled(lam, self.ell, self.pair, self.ode_tol)


def contour_spacing(pair):
    """Sample spacing resolving the oscillation of the characteristic functions.

    Each regular solution oscillates like ``exp(+-i k lam)`` with ``k`` up to
    the largest ``sqrt(n/c)``, so the product of two oscillates with the sum of
    both rates.
    """
    rate = 0.0
    for c, n in ((pair.c1, pair.n1), (pair.c2, pair.n2)):
        r = np.union1d(c.breakpoints, n.breakpoints)
        rate += float(np.max(np.sqrt(n.eval(r) / c.eval(r))))
    return 0.3 / rate


def _mode_roots(args):
    pair, ell, box, tol, ode_tol = args
    try:
        rl = find_roots(_ModeFunction(pair, ell, ode_tol), box, tol, ell=ell,
                        spacing=contour_spacing(pair))
        return ell, rl, None
    except ItpLabError as exc:
        return ell, None, f"{type(exc).__name__}: {exc}"


def _resolve_jobs(jobs):
    if jobs is None:
        env = os.environ.get("ITP_LAB_JOBS")
        jobs = int(env) if env else 1
    return max(1, int(jobs))


def itp_spectrum(pair, box, ell_max=None, tol=1e-10, ode_tol=1e-12, jobs=None):
    """Interior transmission eigenvalues of a radial pair inside ``box``.

    Parameters
    ----------
    pair : MediumPair
        Non-degenerate medium pair.
    box : SearchBox
    ell_max : int, optional
        Largest angular mode searched; defaults to :func:`default_ell_max`.
    tol : float
        Root tolerance relative to ``max(1, |lam|)``.
    ode_tol : float
        Tolerance of the radial integrations.
    jobs : int, optional
        Worker processes; defaults to ``ITP_LAB_JOBS`` or 1.  Output does not
        depend on it.

    Returns
    -------
    RootList
        Roots merged across modes (within ``10 tol``), each listing the
        contributing modes.  Failures of single modes are recorded in
        ``failures`` and clear ``complete``.
    """
    from .profiles import CaseTag, classify

    if classify(pair) is CaseTag.DEGENERATE:
        raise UnsupportedCaseError("degenerate medium pair: no spectrum search")
    if ell_max is None:
        ell_max = default_ell_max(pair, box)
    if ell_max < 0:
        raise DomainError("ell_max must be nonnegative")
    tasks = [(pair, ell, box, tol, ode_tol) for ell in range(int(ell_max) + 1)]
    jobs = _resolve_jobs(jobs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_mode_roots, tasks))
    else:
        results = [_mode_roots(t) for t in tasks]
    found = []
    failures = []
    complete = True
    for ell, rl, err in results:
        if err is not None:
            failures.append((ell, err))
            complete = False
            continue
        if not rl.complete:
            complete = False
            failures.extend((ell, f"{kind} box {b}") for kind, b in rl.failures)
        found.extend(rl)
    found.sort(key=lambda r: (r.lam.real, r.lam.imag, r.ell))
    merged = []
    for r in found:
        for i, m in enumerate(merged):
            if abs(m.lam - r.lam) <= 10 * tol * max(1.0, abs(r.lam)):
                merged[i] = Root(m.lam, min(m.ell, r.ell), max(m.residual, r.residual),
                                 m.winding + r.winding, tuple(sorted(set(m.ells + r.ells))))
                break
        else:
            merged.append(r)
    return RootList(merged, complete, failures)
