"""Independent reference computations used by the test-suite.

Nothing here imports the package's solver or root finder.
"""
import numpy as np
from scipy import optimize, special


def bessel_itp_determinant(ell, lam, k2=2.0):
    """Mode determinant for the constant disc pair ``n1 = 1``, ``n2 = k2**2``, ``c = 1``, d = 2.

    ``W = (d/dr J_l(lam r)) J_l(k2 lam r) - (d/dr J_l(k2 lam r)) J_l(lam r)`` at ``r = 1``.
    """
    lam = np.asarray(lam, dtype=complex)
    a = lam
    b = k2 * lam
    return a * special.jvp(ell, a) * special.jv(ell, b) - b * special.jvp(ell, b) * special.jv(ell, a)


def _envelope(lam, k2):
    # growth of the determinant off the real axis
    return np.exp((1.0 + k2) * np.abs(np.imag(lam)))


def argument_count(f, box, n_per_unit=2000):
    """Winding number of ``f`` on the box boundary by dense sampling and ``np.unwrap``."""
    (a, b), (c, e) = box
    def edge(p, q):
        n = int(np.ceil(abs(q - p) * n_per_unit)) + 2
        return p + (q - p) * np.linspace(0.0, 1.0, n)
    z = np.concatenate([edge(complex(a, c), complex(b, c)), edge(complex(b, c), complex(b, e)),
                        edge(complex(b, e), complex(a, e)), edge(complex(a, e), complex(a, c))])
    ph = np.unwrap(np.angle(f(z)))
    return int(round((ph[-1] - ph[0]) / (2 * np.pi)))


def itp_disc_roots(box, ell_max, k2=2.0, real_step=5e-4, grid=0.01):
    """Transmission eigenvalues of the constant disc pair inside ``box``.

    Returns a sorted list of ``(lam, ell)``; also asserts per mode that the
    located roots account for the dense argument count.
    """
    (a, b), (c, e) = box
    out = []
    for ell in range(ell_max + 1):
        f = lambda z, ell=ell: bessel_itp_determinant(ell, z, k2)
        found = []
        if c < 0.0 < e:
            xs = np.arange(a, b + real_step, real_step)
            v = np.real(f(xs))
            for i in np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0):
                found.append(complex(optimize.brentq(lambda x: np.real(f(x)), xs[i], xs[i + 1],
                                                     xtol=1e-15, rtol=1e-15)))
        xs = np.arange(a, b + grid, grid)
        ys = np.arange(c, e + grid, grid)
        Z = xs[None, :] + 1j * ys[:, None]
        M = np.abs(f(Z)) / _envelope(Z, k2)
        inner = M[1:-1, 1:-1]
        mask = np.ones_like(inner, dtype=bool)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di or dj:
                    mask &= inner < M[1 + di:M.shape[0] - 1 + di, 1 + dj:M.shape[1] - 1 + dj]
        for i, j in zip(*np.nonzero(mask)):
            z0 = Z[i + 1, j + 1]
            if abs(z0.imag) < 2 * grid:
                continue
            try:
                z = optimize.newton(f, z0, x1=z0 + grid * 0.1, tol=1e-15, maxiter=200)
            except RuntimeError:
                continue
            z = complex(z)
            if a <= z.real <= b and c <= z.imag <= e and abs(z.imag) > 1e-8:
                if all(abs(z - q) > 1e-7 for q in found):
                    found.append(z)
        count = argument_count(f, box)
        assert count == len(found), (ell, count, found)
        out.extend((z, ell) for z in found)
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def dtn_constant_disc(ell, h, z, nt=1.0):
    """Exact DtN eigenvalue ``i h v'(1)/v(1)`` for ``c = 1``, ``n = nt``, d = 2.

    ``v = J_l(k r)`` with ``k = sqrt(z nt)/h``; computed with mpmath so that
    large orders and arguments do not overflow.
    """
    import mpmath as mp

    with mp.workdps(40):
        k = mp.sqrt(mp.mpc(z) * nt) / h
        ratio = k * mp.besselj(ell, k, derivative=1) / mp.besselj(ell, k)
        return complex(1j * h * ratio)


def bump_cosine_moment(t):
    """``int phi0(w) cos(t w) dw`` for the normalized bump ``exp(-1/(1-w**2))``."""
    from scipy import integrate

    def bump(w):
        return np.exp(-1.0 / (1.0 - w * w)) if abs(w) < 1 else 0.0

    mass = integrate.quad(bump, -1, 1, epsabs=1e-14, epsrel=1e-14)[0]
    val = integrate.quad(lambda w: bump(w) * np.cos(t * w), -1, 1, epsabs=1e-14, epsrel=1e-14)[0]
    return val / mass
