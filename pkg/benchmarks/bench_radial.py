"""Compare the compiled and pure-Python radial shooting kernels.

Usage: python benchmarks/bench_radial.py [--repeat N]

Runs the same set of mode integrations with each kernel, reports wall time
per integration, the speedup and the largest relative disagreement of the
boundary ratio ``v'(1)/v(1)``.
"""
import argparse
import time

from itp_lab.profiles import RadialProfile, constant_profile
from itp_lab.radial import ModeProblem, integrate_mode, solver
from itp_lab.radial import _kernels_py

try:
    from itp_lab.radial import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

ONE = constant_profile(1.0)
KINK = RadialProfile([0.0, 0.5, 1.0], [2.0, 3.0, 2.5])

# (label, problem): low and high modes, real and complex lambda, smooth and kinked index
CASES = [
    ("ell=0 lam=20", ModeProblem(ONE, ONE, 2, 0, 20.0)),
    ("ell=5 lam=30+2i", ModeProblem(ONE, constant_profile(4.0), 2, 5, 30.0 + 2.0j)),
    ("ell=40 lam=40", ModeProblem(ONE, ONE, 2, 40, 40.0)),
    ("ell=3 kink lam=25", ModeProblem(ONE, KINK, 2, 3, 25.0)),
    ("ell=0 d=3 lam=15i", ModeProblem(ONE, ONE, 3, 0, 15.0j)),
]


def _time(kernel, repeat, tol):
    solver._kernel = kernel
    ratios, best = [], {}
    for label, prob in CASES:
        t_best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            tr = integrate_mode(prob, tol)
            t_best = min(t_best, time.perf_counter() - t0)
        ratios.append(tr.ratio)
        best[label] = (t_best, tr.nsteps)
    return best, ratios


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--tol", type=float, default=1e-10)
    args = ap.parse_args()
    saved = solver._kernel
    try:
        py, r_py = _time(_kernels_py, args.repeat, args.tol)
        if _kernels_c is None:
            print("compiled kernel not built; pure-Python timings only")
            for label, (t, n) in py.items():
                print(f"{label:22s} python {t * 1e3:9.2f} ms  ({n} steps)")
            return
        cy, r_cy = _time(_kernels_c, args.repeat, args.tol)
    finally:
        solver._kernel = saved
    print(f"{'case':22s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s} {'steps':>7s}")
    tot_c = tot_p = 0.0
    for label in py:
        tc, n = cy[label]
        tp, _ = py[label]
        tot_c += tc
        tot_p += tp
        print(f"{label:22s} {tc * 1e3:10.2f} {tp * 1e3:10.2f} {tp / tc:8.1f} {n:7d}")
    dev = max(abs(a - b) / abs(b) for a, b in zip(r_cy, r_py))
    print(f"{'total':22s} {tot_c * 1e3:10.2f} {tot_p * 1e3:10.2f} {tot_p / tot_c:8.1f}")
    print(f"max relative disagreement of v'(1)/v(1): {dev:.1e}")


if __name__ == "__main__":
    main()
