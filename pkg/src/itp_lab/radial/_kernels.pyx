# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Dormand-Prince 5(4) shooting kernel for the radial mode equation.

Integrates the r**ell-factored mode equation

    w'' + ((2 ell + d - 1)/r + c'/c) w' + (ell c'/(c r) + lam2 n/c) w = 0

across a grid of nodes on which c, n (and the optional right-hand side F)
are linear.  Steps never straddle a node.  Optionally accumulates

    I = int r**(ell+d-1) w F dr,    J = int r**(2 ell+d-1) |w|**2 dr.

Must stay numerically identical in algorithm to ``_kernels_py``.
"""
from libc.math cimport sqrt, log, pow, fabs

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0
cdef double C2 = 0.2, C3 = 0.3, C4 = 0.8, C5 = 8.0 / 9.0

cdef double RENORM_HI = 1e64
cdef double RENORM_LO = 1e-64


cdef inline double cmod(double complex z) nogil:
    cdef double a = fabs(z.real), b = fabs(z.imag), t
    if a < b:
        a, b = b, a
    if a == 0.0:
        return 0.0
    t = b / a
    return a * sqrt(1.0 + t * t)


cdef struct Seg:
    double a
    double ca
    double cs
    double na
    double ns
    double complex fa
    double complex fs


cdef inline void rhs(double r, Seg* s, int ell, int d, double complex lam2, bint quad,
                     double complex* y, double complex* out) nogil:
    cdef double c = s.ca + s.cs * (r - s.a)
    cdef double n = s.na + s.ns * (r - s.a)
    cdef double gam = s.cs / c
    cdef double rp
    out[0] = y[1]
    out[1] = -((2 * ell + d - 1) / r + gam) * y[1] - (gam * ell / r + lam2 * n / c) * y[0]
    if quad:
        rp = pow(r, ell + d - 1)
        out[2] = rp * y[0] * (s.fa + s.fs * (r - s.a))
        out[3] = rp * pow(r, ell) * (y[0].real * y[0].real + y[0].imag * y[0].imag)
    else:
        out[2] = 0
        out[3] = 0


def integrate_path(int ell, int d, double complex lam2,
                   const double[::1] nodes, const double[::1] cvals, const double[::1] nvals,
                   const double complex[::1] fvals, bint quad,
                   double complex w, double complex dw, double complex qi, double qj,
                   double rtol, double atol, long max_steps):
    """Integrate from nodes[0] to nodes[-1].

    Returns ``(w, dw, qi, qj, log_scale, nsteps, status, fail_r)`` where
    status is 0 on success, 1 on step-size underflow, 2 on step budget
    exhaustion.
    """
    cdef int ncomp = 4 if quad else 2
    cdef double complex y[4]
    cdef double complex yn[4]
    cdef double complex yt[4]
    cdef double complex k1[4]
    cdef double complex k2[4]
    cdef double complex k3[4]
    cdef double complex k4[4]
    cdef double complex k5[4]
    cdef double complex k6[4]
    cdef double complex k7[4]
    cdef double ymax[4]
    cdef Seg seg
    cdef Py_ssize_t i, j, nnodes = nodes.shape[0]
    cdef double r, b, hs, hsave, err, sc, e, m, fac, scale, span
    cdef double log_scale = 0.0
    cdef long nsteps = 0
    cdef bint last, fresh
    cdef double kmag, kap, amp

    y[0] = w
    y[1] = dw
    y[2] = qi
    y[3] = qj
    for j in range(4):
        ymax[j] = cmod(y[j])

    r = nodes[0]
    kmag = sqrt(cmod(lam2) * nvals[0] / cvals[0]) + 1.0
    hs = 0.1 * r / (ell + 1.0)
    if hs > 0.1 / kmag:
        hs = 0.1 / kmag

    for i in range(nnodes - 1):
        seg.a = nodes[i]
        b = nodes[i + 1]
        span = b - seg.a
        seg.ca = cvals[i]
        seg.cs = (cvals[i + 1] - cvals[i]) / span
        seg.na = nvals[i]
        seg.ns = (nvals[i + 1] - nvals[i]) / span
        if quad:
            seg.fa = fvals[i]
            seg.fs = (fvals[i + 1] - fvals[i]) / span
        else:
            seg.fa = 0
            seg.fs = 0
        r = seg.a
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
                rhs(r, &seg, ell, d, lam2, quad, y, k1)
                fresh = False
            for j in range(4):
                yt[j] = y[j] + hs * A21 * k1[j]
            rhs(r + C2 * hs, &seg, ell, d, lam2, quad, yt, k2)
            for j in range(4):
                yt[j] = y[j] + hs * (A31 * k1[j] + A32 * k2[j])
            rhs(r + C3 * hs, &seg, ell, d, lam2, quad, yt, k3)
            for j in range(4):
                yt[j] = y[j] + hs * (A41 * k1[j] + A42 * k2[j] + A43 * k3[j])
            rhs(r + C4 * hs, &seg, ell, d, lam2, quad, yt, k4)
            for j in range(4):
                yt[j] = y[j] + hs * (A51 * k1[j] + A52 * k2[j] + A53 * k3[j] + A54 * k4[j])
            rhs(r + C5 * hs, &seg, ell, d, lam2, quad, yt, k5)
            for j in range(4):
                yt[j] = y[j] + hs * (A61 * k1[j] + A62 * k2[j] + A63 * k3[j]
                                     + A64 * k4[j] + A65 * k5[j])
            rhs(r + hs, &seg, ell, d, lam2, quad, yt, k6)
            for j in range(4):
                yn[j] = y[j] + hs * (B1 * k1[j] + B3 * k3[j] + B4 * k4[j]
                                     + B5 * k5[j] + B6 * k6[j])
            rhs(r + hs, &seg, ell, d, lam2, quad, yn, k7)
            # (w, w') share one amplitude scale, w' measured in units of the
            # local wavenumber; the running max is used only for the moments
            kap = sqrt(cmod(lam2) * (seg.na + seg.ns * (r - seg.a)) / (seg.ca + seg.cs * (r - seg.a))) \
                + (ell + 1.0) / r
            amp = cmod(y[0])
            if cmod(yn[0]) > amp:
                amp = cmod(yn[0])
            if cmod(y[1]) / kap > amp:
                amp = cmod(y[1]) / kap
            if cmod(yn[1]) / kap > amp:
                amp = cmod(yn[1]) / kap
            sc = rtol * amp + 1e-300
            err = cmod(hs * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0]
                             + E6 * k6[0] + E7 * k7[0])) / sc
            e = cmod(hs * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1]
                           + E6 * k6[1] + E7 * k7[1])) / (kap * sc)
            if e > err:
                err = e
            for j in range(2, ncomp):
                e = cmod(hs * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j]
                               + E6 * k6[j] + E7 * k7[j]))
                m = cmod(y[j])
                if cmod(yn[j]) > m:
                    m = cmod(yn[j])
                sc = rtol * m + atol * (ymax[j] if ymax[j] > m else m) + 1e-300
                if e / sc > err:
                    err = e / sc
            nsteps += 1
            if err <= 1.0:
                if last:
                    r = b
                else:
                    r = r + hs
                for j in range(4):
                    y[j] = yn[j]
                    k1[j] = k7[j]
                    if cmod(y[j]) > ymax[j]:
                        ymax[j] = cmod(y[j])
                m = cmod(y[0])
                if cmod(y[1]) > m:
                    m = cmod(y[1])
                if m > RENORM_HI or (m < RENORM_LO and m > 0.0):
                    scale = 1.0 / m
                    y[0] = y[0] * scale
                    y[1] = y[1] * scale
                    y[2] = y[2] * scale
                    y[3] = y[3] * scale * scale
                    ymax[0] *= scale
                    ymax[1] *= scale
                    ymax[2] *= scale
                    ymax[3] *= scale * scale
                    log_scale += log(m)
                    fresh = True
                if err == 0.0:
                    fac = 5.0
                else:
                    fac = 0.9 * pow(err, -0.2)
                    if fac > 5.0:
                        fac = 5.0
                if last:
                    hs = hsave if hsave > hs * fac else hs * fac
                else:
                    hs = hs * fac
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac < 0.2:
                    fac = 0.2
                hs = hs * fac
    return (y[0], y[1], y[2], y[3].real, log_scale, nsteps, 0, r)
