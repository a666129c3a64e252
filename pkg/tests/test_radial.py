import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from oracles import bessel_itp_determinant, dtn_constant_disc
from itp_lab.errors import DomainError, DtnPoleError, IntegrationError, NearSingularError
from itp_lab.profiles import MediumPair, RadialProfile, constant_profile
from itp_lab.radial import (
    BACKEND, ModeProblem, ModeTrace, dtn_eigenvalue, frobenius_start, inhomogeneous_mode_solve,
    integrate_mode, itp_characteristic, itp_characteristic_scaled,
)
from itp_lab.radial import _kernels_py, solver

ONE = constant_profile(1.0)


def mode(ell, lam, c=ONE, n=ONE, d=2):
    return ModeProblem(c, n, d, ell, lam)


def test_bessel_ratio_real():
    tr = integrate_mode(mode(0, 1.0), 1e-12)
    expected = -special.j1(1.0) / special.j0(1.0)
    assert tr.ratio == pytest.approx(expected, rel=1e-10)
    assert expected == pytest.approx(-0.44005 / 0.76520, rel=1e-4)


def test_modified_bessel_ratio():
    h = 0.05
    tr = integrate_mode(ModeProblem.from_hz(ONE, ONE, 2, 0, h, -1.0), 1e-12)
    expected = special.ive(1, 20.0) / special.ive(0, 20.0) / h
    assert tr.ratio == pytest.approx(expected, rel=1e-10)
    assert tr.ratio == pytest.approx(19.4934, abs=1e-4)
    assert dtn_eigenvalue(tr, h) == pytest.approx(1j * 0.974670, abs=1e-6)


def test_debye_elliptic_mode():
    h = 0.05
    nu = dtn_eigenvalue(integrate_mode(ModeProblem.from_hz(ONE, ONE, 2, 100, h, -1.0)), h)
    assert abs(nu - 1j * math.sqrt(26.0)) < 0.1
    assert nu == pytest.approx(dtn_constant_disc(100, h, -1.0), rel=1e-9)


def test_tolerance_self_consistency():
    r8 = integrate_mode(mode(3, 7.0 + 0.5j), 1e-8).ratio
    r10 = integrate_mode(mode(3, 7.0 + 0.5j), 1e-10).ratio
    assert abs(r8 - r10) <= 1e-7 * abs(r10)


@pytest.mark.parametrize("z", [-1.0, 1j, cmath.exp(0.1j)])
@pytest.mark.parametrize("h", [0.5, 0.1, 0.01])
@pytest.mark.parametrize("ell", [0, 1, 7, 40, 200])
def test_dtn_matches_bessel_oracle(ell, h, z):
    tr = integrate_mode(ModeProblem.from_hz(ONE, ONE, 2, ell, h, z), 1e-11)
    nu = dtn_eigenvalue(tr, h)
    assert nu == pytest.approx(dtn_constant_disc(ell, h, z), rel=1e-8)


def test_overflow_safety_large_ell():
    tr = integrate_mode(ModeProblem.from_hz(ONE, ONE, 2, 500, 0.01, 1j), 1e-10)
    assert math.isfinite(tr.log_scale) and cmath.isfinite(tr.ratio)
    assert dtn_eigenvalue(tr, 0.01) == pytest.approx(dtn_constant_disc(500, 0.01, 1j), rel=1e-8)


def test_scale_invariance_of_dtn():
    tr = integrate_mode(mode(2, 4.0 + 1j))
    scaled = ModeTrace(tr.v1 * 1e30, tr.dv1 * 1e30, tr.log_scale - math.log(1e30))
    assert dtn_eigenvalue(scaled, 0.25) == pytest.approx(dtn_eigenvalue(tr, 0.25), rel=1e-15)


def test_dtn_pole():
    with pytest.raises(DtnPoleError):
        dtn_eigenvalue(ModeTrace(0j, 1 + 0j, 0.0), 0.1)


def test_three_dimensional_mode():
    # d = 3: regular solution is the spherical Bessel function j_l(lam r)
    lam, ell = 5.0 + 0.3j, 2
    tr = integrate_mode(mode(ell, lam, d=3), 1e-12)
    expected = lam * special.spherical_jn(ell, lam, derivative=True) / special.spherical_jn(ell, lam)
    assert tr.ratio == pytest.approx(expected, rel=1e-9)


def test_variable_coefficient_agrees_with_refined_profile():
    # a profile split at extra breakpoints must give the same answer
    n = RadialProfile([0, 0.5, 1], [2, 3, 2.5])
    n_split = RadialProfile([0, 0.25, 0.5, 0.75, 1], [2, 2.5, 3, 2.75, 2.5])
    a = integrate_mode(mode(4, 6.0 + 0.2j, n=n), 1e-12).ratio
    b = integrate_mode(mode(4, 6.0 + 0.2j, n=n_split), 1e-12).ratio
    assert a == pytest.approx(b, rel=1e-10)


def test_characteristic_matches_bessel_determinant():
    pair = MediumPair.constant(1, 1, 1, 4)
    for ell, lam in [(0, 3.3), (2, 6.1 + 0.4j), (5, 11.0 - 0.2j)]:
        # v ~ r**ell at the origin while J_l(k r) ~ (k r/2)**l / l!
        fac = (lam / 2) ** ell * lam ** ell / math.factorial(ell) ** 2
        w = itp_characteristic(lam, ell, pair, 1e-12)
        assert w * fac == pytest.approx(bessel_itp_determinant(ell, lam), rel=1e-8)


def test_characteristic_identical_media_vanishes():
    pair = MediumPair.constant(2, 3, 2, 3)
    assert itp_characteristic(4.0 + 1j, 1, pair) == 0


def test_characteristic_scaled_form():
    pair = MediumPair.constant(1, 1, 1, 4)
    s = itp_characteristic_scaled(30.0 + 10j, 3, pair)
    assert abs(abs(s.mantissa) - 1.0) < 1e-14
    assert math.isfinite(s.log_scale)


@settings(max_examples=25)
@given(st.floats(1.0, 20.0), st.floats(-2.0, 2.0), st.integers(0, 8))
def test_schwarz_reflection(re, im, ell):
    pair = MediumPair.constant(1, 1, 1, 4)
    a = itp_characteristic(complex(re, im), ell, pair, 1e-12)
    b = itp_characteristic(complex(re, -im), ell, pair, 1e-12)
    assert abs(b - a.conjugate()) <= 1e-8 * abs(a)


def test_frobenius_series_matches_bessel():
    p = mode(3, 8.0)
    rs, w, dw, _, _ = frobenius_start(p, 1.0)
    # v = r**ell w with v proportional to J_3(8 r)
    v = rs ** 3 * w
    dv = 3 * rs ** 2 * w + rs ** 3 * dw
    assert dv / v == pytest.approx(8.0 * special.jvp(3, 8.0 * rs) / special.jv(3, 8.0 * rs),
                                   rel=1e-12)


def test_mode_problem_validation():
    with pytest.raises(DomainError):
        mode(-1, 1.0)
    with pytest.raises(DomainError):
        ModeProblem(ONE, ONE, 1, 0, 1.0)
    with pytest.raises(DomainError):
        mode(0, complex(math.nan, 0))


def test_step_budget_error():
    with pytest.raises(IntegrationError) as exc:
        solver._shoot(mode(0, 200.0), 1e-12, max_steps=10)
    assert exc.value.reason == "step budget"
    assert 0.0 < exc.value.radius < 1.0


def test_inhomogeneous_zero_rhs():
    res = inhomogeneous_mode_solve(ModeProblem.from_hz(ONE, ONE, 2, 0, 0.1, 1j), None)
    assert res.g == 0 and res.v_norm == 0


def test_inhomogeneous_manufactured_solution():
    # u = 1 - r**2 solves (h**2 Laplacian + z) u = h F with F = (z (1 - r**2) - 4 h**2)/h
    h, z = 0.1, 1j
    rhs = lambda r: (z * (1 - r * r) - 4 * h * h) / h
    res = inhomogeneous_mode_solve(ModeProblem.from_hz(ONE, ONE, 2, 0, h, z), rhs, 1e-12,
                                   n_samples=4097)
    assert res.g == pytest.approx(2 * h, rel=1e-6)


def test_inhomogeneous_gain_bounds_flux():
    p = ModeProblem.from_hz(ONE, ONE, 2, 2, 0.1, 1j)
    res = inhomogeneous_mode_solve(p, lambda r: 1 + r * r)
    assert abs(res.g) <= res.gain * res.v_norm * (1 + 1e-8)


def test_inhomogeneous_dirichlet_collision():
    # first Dirichlet eigenvalue of mode 0 is the first zero of J_0
    lam = special.jn_zeros(0, 1)[0]
    with pytest.raises(NearSingularError) as exc:
        inhomogeneous_mode_solve(mode(0, lam), 1.0, 1e-12)
    assert exc.value.condition > 1e9


def test_backends_agree(monkeypatch):
    probs = [mode(0, 3.0), mode(12, 20.0 + 3j), ModeProblem.from_hz(ONE, ONE, 2, 300, 0.01, -1.0)]
    ref = [integrate_mode(p, 1e-11) for p in probs]
    monkeypatch.setattr(solver, "_kernel", _kernels_py)
    for p, r in zip(probs, ref):
        t = integrate_mode(p, 1e-11)
        # same algorithm and step sequence; only floating-point contraction differs
        assert (t.log_scale, t.nsteps) == (r.log_scale, r.nsteps)
        assert t.v1 == pytest.approx(r.v1, rel=1e-13)
        assert t.dv1 == pytest.approx(r.dv1, rel=1e-13)


def test_backend_name():
    assert BACKEND in ("cython", "python")
