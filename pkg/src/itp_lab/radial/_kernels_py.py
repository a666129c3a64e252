"""Pure-Python fallback for the radial shooting kernel.

Algorithmically identical to the compiled ``_kernels`` extension.  Used when
the extension is not built or when ``ITP_LAB_PURE=1`` is set.
"""
import math

_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0
_A64, _A65 = 49.0 / 176.0, -5103.0 / 18656.0
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4 = 71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0
_E5, _E6, _E7 = -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0

_RENORM_HI = 1e64
_RENORM_LO = 1e-64


def _rhs(r, seg, ell, d, lam2, quad, y):
    a, ca, cs, na, ns, fa, fs = seg
    c = ca + cs * (r - a)
    n = na + ns * (r - a)
    gam = cs / c
    w, dw = y[0], y[1]
    ddw = -((2 * ell + d - 1) / r + gam) * dw - (gam * ell / r + lam2 * n / c) * w
    if quad:
        rp = r ** (ell + d - 1)
        return (dw, ddw, rp * w * (fa + fs * (r - a)),
                rp * r ** ell * (w.real * w.real + w.imag * w.imag))
    return (dw, ddw, 0j, 0j)


def integrate_path(ell, d, lam2, nodes, cvals, nvals, fvals, quad,
                   w, dw, qi, qj, rtol, atol, max_steps):
    """Integrate from ``nodes[0]`` to ``nodes[-1]``.

    Same signature and return tuple as the compiled kernel:
    ``(w, dw, qi, qj, log_scale, nsteps, status, fail_r)``.
    """
    ell = int(ell)
    d = int(d)
    lam2 = complex(lam2)
    nodes = [float(x) for x in nodes]
    cvals = [float(x) for x in cvals]
    nvals = [float(x) for x in nvals]
    fv = [complex(x) for x in fvals] if quad else None
    ncomp = 4 if quad else 2
    y = [complex(w), complex(dw), complex(qi), complex(qj)]
    ymax = [abs(v) for v in y]
    log_scale = 0.0
    nsteps = 0

    r = nodes[0]
    kmag = math.sqrt(abs(lam2) * nvals[0] / cvals[0]) + 1.0
    hs = min(0.1 * r / (ell + 1.0), 0.1 / kmag)
    k1 = None

    for i in range(len(nodes) - 1):
        a = nodes[i]
        b = nodes[i + 1]
        span = b - a
        if quad:
            fa, fs = fv[i], (fv[i + 1] - fv[i]) / span
        else:
            fa, fs = 0j, 0j
        seg = (a, cvals[i], (cvals[i + 1] - cvals[i]) / span,
               nvals[i], (nvals[i + 1] - nvals[i]) / span, fa, fs)
        r = a
        fresh = True
        while r < b:
            if nsteps >= max_steps:
                return (y[0], y[1], y[2], y[3].real, log_scale, nsteps, 2, r)
            last = False
            hsave = hs
            if r + hs >= b - 1e-14 * b:
                hs = b - r
                last = True
            if hs < 1e-14 * r:
                return (y[0], y[1], y[2], y[3].real, log_scale, nsteps, 1, r)
            if fresh:
                k1 = _rhs(r, seg, ell, d, lam2, quad, y)
                fresh = False
            yt = [y[j] + hs * _A21 * k1[j] for j in range(4)]
            k2 = _rhs(r + _C2 * hs, seg, ell, d, lam2, quad, yt)
            yt = [y[j] + hs * (_A31 * k1[j] + _A32 * k2[j]) for j in range(4)]
            k3 = _rhs(r + _C3 * hs, seg, ell, d, lam2, quad, yt)
            yt = [y[j] + hs * (_A41 * k1[j] + _A42 * k2[j] + _A43 * k3[j]) for j in range(4)]
            k4 = _rhs(r + _C4 * hs, seg, ell, d, lam2, quad, yt)
            yt = [y[j] + hs * (_A51 * k1[j] + _A52 * k2[j] + _A53 * k3[j] + _A54 * k4[j])
                  for j in range(4)]
            k5 = _rhs(r + _C5 * hs, seg, ell, d, lam2, quad, yt)
            yt = [y[j] + hs * (_A61 * k1[j] + _A62 * k2[j] + _A63 * k3[j]
                               + _A64 * k4[j] + _A65 * k5[j]) for j in range(4)]
            k6 = _rhs(r + hs, seg, ell, d, lam2, quad, yt)
            yn = [y[j] + hs * (_B1 * k1[j] + _B3 * k3[j] + _B4 * k4[j]
                               + _B5 * k5[j] + _B6 * k6[j]) for j in range(4)]
            k7 = _rhs(r + hs, seg, ell, d, lam2, quad, yn)
            # (w, w') share one amplitude scale, w' measured in units of the
            # local wavenumber; the running max is used only for the moments
            a, ca, cs, na, ns = seg[:5]
            kap = math.sqrt(abs(lam2) * (na + ns * (r - a)) / (ca + cs * (r - a))) + (ell + 1.0) / r
            amp = max(abs(y[0]), abs(yn[0]), abs(y[1]) / kap, abs(yn[1]) / kap)
            sc = rtol * amp + 1e-300
            err = max(abs(hs * (_E1 * k1[0] + _E3 * k3[0] + _E4 * k4[0] + _E5 * k5[0]
                                + _E6 * k6[0] + _E7 * k7[0])) / sc,
                      abs(hs * (_E1 * k1[1] + _E3 * k3[1] + _E4 * k4[1] + _E5 * k5[1]
                                + _E6 * k6[1] + _E7 * k7[1])) / (kap * sc))
            for j in range(2, ncomp):
                e = abs(hs * (_E1 * k1[j] + _E3 * k3[j] + _E4 * k4[j] + _E5 * k5[j]
                              + _E6 * k6[j] + _E7 * k7[j]))
                m = max(abs(y[j]), abs(yn[j]))
                sc = rtol * m + atol * max(ymax[j], m) + 1e-300
                err = max(err, e / sc)
            nsteps += 1
            if err <= 1.0:
                r = b if last else r + hs
                y = yn
                k1 = k7
                for j in range(4):
                    ymax[j] = max(ymax[j], abs(y[j]))
                m = max(abs(y[0]), abs(y[1]))
                if m > _RENORM_HI or 0.0 < m < _RENORM_LO:
                    scale = 1.0 / m
                    y = [y[0] * scale, y[1] * scale, y[2] * scale, y[3] * scale * scale]
                    ymax = [ymax[0] * scale, ymax[1] * scale, ymax[2] * scale,
                            ymax[3] * scale * scale]
                    log_scale += math.log(m)
                    fresh = True
                fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
                hs = max(hsave, hs * fac) if last else hs * fac
            else:
                hs = hs * max(0.2, 0.9 * err ** -0.2)
    return (y[0], y[1], y[2], y[3].real, log_scale, nsteps, 0, r)
