"""Semiclassical pseudodifferential operators on the circle.

A symbol ``a(x, xi)`` is sampled on a uniform periodic grid in ``x`` and at
the frequencies ``xi = h k``, ``|k| <= k_max``.  Its left quantization acts on
trigonometric polynomials by

    Op_h(a) f(x) = sum_k a(x, h k) f_k e^{i k x},

so in the Fourier basis the matrix entry ``(j, k)`` is the ``(j - k)``-th
Fourier coefficient in ``x`` of ``a(., h k)``.  The ``x``-dependence of a
symbol is taken to be the trigonometric interpolant of its samples, so the
matrix is banded with half-width below ``n_x / 2`` and is stored by bands.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "SymbolGrid",
    "CircleOperator",
    "quantize",
    "h_sobolev_norm",
    "op_norm",
    "mollify",
    "bump_multiplier",
    "composition_remainder",
    "eta_cutoff",
    "smoothstep5",
]


def _japanese(x):
    return np.sqrt(1.0 + np.square(x))


@dataclass(frozen=True, eq=False)
class SymbolGrid:
    """Samples ``values[i, k + k_max] = a(2 pi i / n_x, h k)``.

    Parameters
    ----------
    n_x : int
        Number of ``x`` samples, a power of two.
    h : float
        Semiclassical parameter.
    k_max : int
        Largest resolved Fourier mode.
    values : ndarray, shape (n_x, 2 k_max + 1)
    """

    n_x: int
    h: float
    k_max: int
    values: np.ndarray

    def __post_init__(self):
        n = int(self.n_x)
        if n < 2 or n & (n - 1):
            raise DomainError("n_x must be a power of two >= 2")
        if not self.h > 0.0:
            raise DomainError("h must be positive")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (n, 2 * int(self.k_max) + 1):
            raise DomainError(f"values must have shape ({n}, {2 * int(self.k_max) + 1})")
        if not np.all(np.isfinite(vals)):
            raise DomainError("symbol values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "n_x", n)
        object.__setattr__(self, "k_max", int(self.k_max))
        object.__setattr__(self, "h", float(self.h))

    @property
    def x(self):
        return 2.0 * np.pi * np.arange(self.n_x) / self.n_x

    @property
    def xi(self):
        return self.h * np.arange(-self.k_max, self.k_max + 1)

    @classmethod
    def from_function(cls, a, h, k_max, n_x=None):
        """Sample a vectorized ``a(x, xi)`` on the grid.

        ``n_x`` defaults to the smallest power of two that is at least
        ``2 k_max + 1``, capped at 256; it only needs to resolve the
        ``x``-dependence of ``a``.
        """
        if n_x is None:
            n_x = min(1 << int(math.ceil(math.log2(2 * k_max + 1))), 256)
        x = 2.0 * np.pi * np.arange(n_x) / n_x
        xi = h * np.arange(-k_max, k_max + 1)
        vals = np.broadcast_to(a(x[:, None], xi[None, :]), (n_x, 2 * k_max + 1))
        return cls(n_x, h, k_max, np.array(vals, dtype=complex))

    def _check_compatible(self, other):
        if (self.n_x, self.k_max) != (other.n_x, other.k_max) or self.h != other.h:
            raise DomainError("symbol grids differ in n_x, k_max or h")

    def __add__(self, other):
        self._check_compatible(other)
        return SymbolGrid(self.n_x, self.h, self.k_max, self.values + other.values)

    def __mul__(self, other):
        if isinstance(other, SymbolGrid):
            self._check_compatible(other)
            return SymbolGrid(self.n_x, self.h, self.k_max, self.values * other.values)
        return SymbolGrid(self.n_x, self.h, self.k_max, self.values * other)

    __rmul__ = __mul__


class CircleOperator:
    """Banded operator on trigonometric polynomials of degree ``<= k_max``.

    ``bands[m + B, k + k_max]`` is the matrix entry at row ``k + m``, column
    ``k``.  Vectors hold Fourier coefficients ordered ``-k_max .. k_max``.
    """

    def __init__(self, bands, h, k_max):
        bands = np.asarray(bands, dtype=complex)
        if bands.ndim != 2 or bands.shape[1] != 2 * k_max + 1 or bands.shape[0] % 2 != 1:
            raise DomainError("bands must have shape (2B + 1, 2 k_max + 1)")
        self.bands = bands
        self.h = float(h)
        self.k_max = int(k_max)
        self.half_width = (bands.shape[0] - 1) // 2
        self._dense = None

    @property
    def size(self):
        return 2 * self.k_max + 1

    @property
    def matrix(self):
        """Dense matrix (built on first access)."""
        if self._dense is None:
            n, B = self.size, self.half_width
            M = np.zeros((n, n), dtype=complex)
            cols = np.arange(n)
            for m in range(-B, B + 1):
                rows = cols + m
                ok = (rows >= 0) & (rows < n)
                M[rows[ok], cols[ok]] = self.bands[m + B, ok]
            self._dense = M
        return self._dense

    def matvec(self, f):
        f = np.asarray(f, dtype=complex)
        n, B = self.size, self.half_width
        out = np.zeros(n, dtype=complex)
        for m in range(-B, B + 1):
            if m >= 0:
                out[m:] += self.bands[m + B, :n - m] * f[:n - m]
            else:
                out[:n + m] += self.bands[m + B, -m:] * f[-m:]
        return out

    def rmatvec(self, g):
        g = np.asarray(g, dtype=complex)
        n, B = self.size, self.half_width
        out = np.zeros(n, dtype=complex)
        for m in range(-B, B + 1):
            if m >= 0:
                out[:n - m] += np.conj(self.bands[m + B, :n - m]) * g[m:]
            else:
                out[-m:] += np.conj(self.bands[m + B, -m:]) * g[:n + m]
        return out

    def __matmul__(self, other):
        return _Product(self, other)

    def __sub__(self, other):
        return _Difference(self, other)


class _Product:
    def __init__(self, a, b):
        self.a, self.b = a, b
        self.h, self.k_max = a.h, a.k_max

    def matvec(self, f):
        return self.a.matvec(self.b.matvec(f))

    def rmatvec(self, g):
        return self.b.rmatvec(self.a.rmatvec(g))

    def __sub__(self, other):
        return _Difference(self, other)


class _Difference:
    def __init__(self, a, b):
        self.a, self.b = a, b
        self.h, self.k_max = a.h, a.k_max

    def matvec(self, f):
        return self.a.matvec(f) - self.b.matvec(f)

    def rmatvec(self, g):
        return self.a.rmatvec(g) - self.b.rmatvec(g)


def quantize(a):
    """Left quantization of a sampled symbol.

    Parameters
    ----------
    a : SymbolGrid

    Returns
    -------
    CircleOperator
    """
    n_x, K = a.n_x, a.k_max
    coef = np.fft.fft(a.values, axis=0) / n_x
    B = min((n_x - 1) // 2, 2 * K)
    m = np.arange(-B, B + 1)
    bands = coef[m % n_x, :]
    return CircleOperator(bands, a.h, K)


def h_sobolev_norm(f, k, h):
    """Semiclassical Sobolev norm ``(sum <h m>**(2k) |f_m|**2)**(1/2)``.

    Parameters
    ----------
    f : array_like
        Fourier coefficients for modes ``-M .. M`` (odd length, centered).
    k : float
    h : float
    """
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1 or f.size % 2 != 1:
        raise DomainError("coefficients must be a centered array of odd length")
    M = (f.size - 1) // 2
    w = _japanese(h * np.arange(-M, M + 1)) ** k
    return float(np.linalg.norm(w * f))


def _weighted(A, k_from, k_to):
    K, h = A.k_max, A.h
    w = _japanese(h * np.arange(-K, K + 1))
    right = w ** (-float(k_from))
    left = w ** float(k_to)

    def normal(v):
        return right * A.rmatvec(left * left * A.matvec(right * v))

    return normal, 2 * K + 1


def _power(normal, v, rtol, max_iter):
    lam = 0.0
    gap = math.inf
    for it in range(max_iter):
        u = normal(v)
        lam_new = float(np.real(np.vdot(v, u)))
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0, 0.0
        v = u / nu
        gap = abs(lam_new - lam) / max(lam_new, 1e-300)
        lam = lam_new
        if it >= 3 and gap <= rtol:
            return lam, gap
    return None, gap


def _lanczos(normal, v, rtol, max_iter, block=60):
    """Largest eigenvalue of a Hermitian PSD map; restarted with the top Ritz vector."""
    used = 0
    gap = math.inf
    while used < max_iter:
        m = min(block, max_iter - used)
        V = np.zeros((m + 1, v.size), dtype=complex)
        alpha = np.zeros(m)
        beta = np.zeros(m)
        V[0] = v / np.linalg.norm(v)
        j_end = m
        for j in range(m):
            u = normal(V[j])
            used += 1
            alpha[j] = float(np.real(np.vdot(V[j], u)))
            u = u - V[:j + 1].T @ (V[:j + 1].conj() @ u)
            u = u - V[:j + 1].T @ (V[:j + 1].conj() @ u)
            beta[j] = np.linalg.norm(u)
            T = np.diag(alpha[:j + 1]) + np.diag(beta[:j], 1) + np.diag(beta[:j], -1)
            evals, evecs = np.linalg.eigh(T)
            theta = evals[-1]
            resid = abs(beta[j] * evecs[-1, -1])
            gap = resid / max(theta, 1e-300)
            if theta <= 0.0 or gap <= rtol or beta[j] <= 1e-14 * max(theta, 1e-300):
                return max(theta, 0.0), gap
            V[j + 1] = u / beta[j]
        v = evecs[:, -1] @ V[:j_end]
    return None, gap


def op_norm(A, k_from=0.0, k_to=0.0, rtol=1e-10, max_iter=5000, seed=0, method="lanczos"):
    """Operator norm ``H_h^{k_from} -> H_h^{k_to}``.

    The largest eigenvalue of the weighted normal operator ``T^* T`` is found
    matrix-free, by Lanczos with restarts (default) or plain power iteration.

    Parameters
    ----------
    A : CircleOperator or composite with ``matvec``/``rmatvec``
    k_from, k_to : float
        Sobolev orders of the source and target norms.
    rtol : float
        Relative accuracy of the squared norm (Ritz residual for Lanczos,
        change between iterates for power iteration).
    max_iter : int
        Budget of applications of ``T^* T``.

    Raises
    ------
    ConvergenceError
        When the budget is exhausted; carries the last relative gap.
    """
    normal, n = _weighted(A, k_from, k_to)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    if method == "lanczos":
        lam, gap = _lanczos(normal, v, rtol, max_iter)
    elif method == "power":
        lam, gap = _power(normal, v, rtol, max_iter)
    else:
        raise DomainError(f"unknown method {method!r}")
    if lam is None:
        raise ConvergenceError(f"norm iteration did not converge (relative gap {gap:.3g})", gap)
    return math.sqrt(lam)


_BUMP_NODES = 129


def _bump_weights():
    w = np.linspace(-1.0, 1.0, _BUMP_NODES)
    inner = np.abs(w) < 1.0
    phi = np.zeros_like(w)
    phi[inner] = np.exp(-1.0 / (1.0 - w[inner] ** 2))
    simpson = np.ones(_BUMP_NODES)
    simpson[1:-1:2] = 4.0
    simpson[2:-1:2] = 2.0
    simpson *= (w[1] - w[0]) / 3.0
    q = simpson * phi
    return w, q / q.sum()


_BUMP_W, _BUMP_Q = _bump_weights()


def bump_multiplier(s):
    """``int phi0(w) exp(i s w) dw`` for the normalized bump (real, even in ``s``)."""
    s = np.asarray(s, dtype=float)
    return np.cos(np.multiply.outer(s, _BUMP_W)) @ _BUMP_Q


def mollify(a, t):
    """Average ``a(x + t w, xi)`` against the bump ``phi0(w)``.

    Acts on the trigonometric interpolant in ``x``: Fourier mode ``m`` of
    every slice is multiplied by ``int phi0(w) e^{i t m w} dw``.
    """
    if not 0.0 < t <= 1.0:
        raise DomainError("mollification scale t must lie in (0, 1]")
    n = a.n_x
    m = np.fft.fftfreq(n, 1.0 / n)
    mult = bump_multiplier(t * m)
    vals = np.fft.ifft(np.fft.fft(a.values, axis=0) * mult[:, None], axis=0)
    return SymbolGrid(a.n_x, a.h, a.k_max, vals)


def composition_remainder(a1, a2, k=0.0, **kwargs):
    """``|| Op(a1) Op(a2) - Op(a1 a2) ||`` from ``H_h^k`` to ``L^2``."""
    a1._check_compatible(a2)
    R = (quantize(a1) @ quantize(a2)) - quantize(a1 * a2)
    return op_norm(R, k_from=k, **kwargs)


def smoothstep5(s):
    """Quintic smoothstep ``6s^5 - 15s^4 + 10s^3`` clipped to ``[0, 1]``."""
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (s * (6.0 * s - 15.0) + 10.0)


def eta_cutoff(C0, h, k_max, n_x=2):
    """Cutoff equal to 1 for ``xi**2 <= C0`` and 0 for ``xi**2 >= 2 C0``.

    Constant in ``x``; the transition is a quintic smoothstep in ``xi**2``.
    """
    if not C0 > 0.0:
        raise DomainError("C0 must be positive")
    return SymbolGrid.from_function(lambda x, xi: 1.0 - smoothstep5((xi * xi - C0) / C0) + 0 * x,
                                    h, k_max, n_x)
