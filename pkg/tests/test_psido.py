import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import bump_cosine_moment
from itp_lab.errors import ConvergenceError, DomainError
from itp_lab.psido import (
    SymbolGrid, bump_multiplier, composition_remainder, eta_cutoff, h_sobolev_norm, mollify,
    op_norm, quantize, smoothstep5,
)
from itp_lab.verify import fit_slope


def jap(x):
    return np.sqrt(1 + x * x)


def grid(a, h=0.1, k_max=16, n_x=32):
    return SymbolGrid.from_function(a, h, k_max, n_x)


def dense(a):
    return quantize(a).matrix


def test_quantize_identity():
    M = dense(grid(lambda x, xi: 1.0 + 0 * x * xi))
    assert np.allclose(M, np.eye(33), atol=1e-15)


def test_quantize_multiplier():
    g = grid(lambda x, xi: xi + 0 * x)
    assert np.allclose(dense(g), np.diag(0.1 * np.arange(-16, 17)), atol=1e-15)


def test_quantize_shift():
    M = dense(grid(lambda x, xi: np.exp(1j * x) + 0 * xi))
    assert np.allclose(M, np.eye(33, k=-1), atol=1e-15)


def test_quantize_matches_direct_sum():
    # Op(a) e^{ikx} evaluated pointwise is a(x, hk) e^{ikx}
    a = lambda x, xi: (2 + np.cos(x)) * xi + np.sin(2 * x) / jap(xi)
    g = grid(a)
    M = dense(g)
    k = 5
    f = np.zeros(33, complex)
    f[k + 16] = 1.0
    coef = M @ f
    x = np.linspace(0, 2 * np.pi, 7)
    vals = np.exp(1j * np.outer(x, np.arange(-16, 17))) @ coef
    assert np.allclose(vals, a(x, 0.1 * k) * np.exp(1j * k * x), atol=1e-13)


@settings(max_examples=50)
@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_quantize_linear(al, be):
    a = grid(lambda x, xi: np.cos(x) * xi)
    b = grid(lambda x, xi: np.exp(2j * x) / jap(xi))
    lhs = dense(al * a + be * b)
    rhs = al * dense(a) + be * dense(b)
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * (1 + abs(al) + abs(be))


def test_symbol_grid_validation():
    with pytest.raises(DomainError):
        SymbolGrid(6, 0.1, 1, np.zeros((6, 3)))
    with pytest.raises(DomainError):
        SymbolGrid(4, 0.1, 1, np.zeros((4, 4)))
    with pytest.raises(DomainError):
        SymbolGrid(4, 0.1, 1, np.full((4, 3), np.nan))
    with pytest.raises(DomainError):
        grid(lambda x, xi: 0 * x * xi) * grid(lambda x, xi: 0 * x * xi, h=0.2)


def test_sobolev_constant():
    f = np.zeros(9)
    f[4] = 1.0
    for k in (-2.0, 0.0, 1.0, 3.5):
        assert h_sobolev_norm(f, k, 0.1) == pytest.approx(1.0)


def test_sobolev_single_mode():
    f = np.zeros(21)
    f[10 + 7] = 1.0
    assert h_sobolev_norm(f, 1, 0.2) == pytest.approx(math.sqrt(1 + 1.4 ** 2))


def test_sobolev_k0_is_l2():
    f = np.random.default_rng(1).standard_normal(31)
    assert h_sobolev_norm(f, 0, 0.3) == pytest.approx(np.linalg.norm(f))
    with pytest.raises(DomainError):
        h_sobolev_norm(np.ones(4), 0, 0.1)


def test_op_norm_identity():
    assert op_norm(quantize(grid(lambda x, xi: 1 + 0 * x * xi))) == pytest.approx(1.0, rel=1e-9)


def test_op_norm_multiplier_closed_form():
    g = grid(lambda x, xi: xi + 0 * x)
    hk = 0.1 * 16
    assert op_norm(quantize(g), k_from=1) == pytest.approx(hk / math.sqrt(1 + hk * hk), rel=1e-9)


def test_op_norm_shift():
    g = SymbolGrid.from_function(lambda x, xi: np.exp(1j * x) + 0 * xi, 0.01, 64, 4)
    assert abs(op_norm(quantize(g)) - 1.0) < 1e-6


@pytest.mark.parametrize("method", ["lanczos", "power"])
def test_op_norm_matches_svd(method):
    a = lambda x, xi: (2 + np.cos(x)) * np.tanh(xi) + 0.3j * np.sin(3 * x) / jap(xi)
    g = grid(a, h=0.05, k_max=40, n_x=16)
    A = quantize(g)
    w = jap(0.05 * np.arange(-40, 41))
    for k in (0.0, 1.0, -0.5):
        ref = np.linalg.svd(A.matrix * w[None, :] ** (-k), compute_uv=False)[0]
        assert op_norm(A, k_from=k, method=method, rtol=1e-12) == pytest.approx(ref, rel=1e-8)


def test_op_norm_target_weight():
    g = grid(lambda x, xi: (1 + 0.5 * np.cos(x)) / jap(xi), h=0.1, k_max=20, n_x=8)
    A = quantize(g)
    w = jap(0.1 * np.arange(-20, 21))
    ref = np.linalg.svd(w[:, None] * A.matrix, compute_uv=False)[0]
    assert op_norm(A, k_to=1.0, rtol=1e-12) == pytest.approx(ref, rel=1e-8)


def test_op_norm_budget():
    g = grid(lambda x, xi: (2 + np.cos(x)) * xi, h=0.05, k_max=40, n_x=16)
    with pytest.raises(ConvergenceError) as exc:
        op_norm(quantize(g), method="power", max_iter=2, rtol=1e-15)
    assert exc.value.args


def test_operator_norm_excess_scaling():
    # smooth band-limited symbol: excess over sup|a| shrinks with h
    a = lambda x, xi: (1.5 + np.cos(x)) * np.exp(-xi * xi)
    pts = []
    for j in range(4, 11):
        h = 2.0 ** -j
        K = int(math.ceil(6 / h))
        g = SymbolGrid.from_function(a, h, K, 8)
        sup = np.max(np.abs(g.values))
        pts.append((h, max(op_norm(quantize(g), rtol=1e-13) - sup, 0.0) + 1e-16))
    excess = [p[1] for p in pts]
    assert max(excess) < 0.1
    pos = [p for p in pts if p[1] > 1e-12]
    if len(pos) >= 4:
        assert fit_slope(pos)[0] >= 0.4


def test_bump_multiplier_oracle():
    # fixed 129-node Simpson rule: accurate to about 1e-7 for t <= 3
    for t in (0.0, 0.5, 1.0, 3.0):
        assert bump_multiplier(t) == pytest.approx(bump_cosine_moment(t), abs=1e-7)


def test_mollify_constant_in_x():
    g = grid(lambda x, xi: jap(xi) + 0 * x)
    assert np.allclose(mollify(g, 0.5).values, g.values, atol=1e-14)


def test_mollify_sine():
    g = grid(lambda x, xi: np.sin(x) + 0 * xi, n_x=64)
    s = bump_cosine_moment(0.5)
    assert np.allclose(mollify(g, 0.5).values, s * np.sin(g.x)[:, None], atol=2e-8)


def test_mollify_decreases():
    g = grid(lambda x, xi: np.abs(np.sin(x)) ** 3 + 0 * xi, n_x=128)
    errs = [np.max(np.abs(mollify(g, 2.0 ** -j).values - g.values)) for j in range(1, 7)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    with pytest.raises(DomainError):
        mollify(g, 0.0)
    with pytest.raises(DomainError):
        mollify(g, 1.5)


def test_mollify_c2_slope():
    g = SymbolGrid.from_function(lambda x, xi: np.abs(np.sin(x)) ** 3 * np.exp(-xi * xi), 0.1, 4, 1024)
    pts = [(t, np.max(np.abs(mollify(g, t).values - g.values)))
           for t in (2.0 ** -j for j in range(1, 7))]
    assert abs(fit_slope(pts)[0] - 2.0) <= 0.3


def test_composition_constant_right_factor():
    a1 = grid(lambda x, xi: (2 + np.cos(x)) * np.tanh(xi))
    a2 = grid(lambda x, xi: 3.0 + 0 * x * xi)
    assert composition_remainder(a1, a2) <= 1e-12


def test_composition_multipliers_exact():
    a1 = grid(lambda x, xi: np.tanh(xi) + 0 * x)
    a2 = grid(lambda x, xi: 1 / jap(xi) + 0 * x)
    assert composition_remainder(a1, a2) <= 1e-12


def test_composition_x_then_xi_exact():
    a1 = grid(lambda x, xi: 2 + np.cos(x) + 0 * xi)
    a2 = grid(lambda x, xi: np.tanh(xi) + 0 * x)
    assert composition_remainder(a1, a2) <= 1e-12


def test_composition_xi_then_x_order_h():
    pts = []
    for j in range(3, 9):
        h = 2.0 ** -j
        K = int(math.ceil(5 / h))
        a1 = SymbolGrid.from_function(lambda x, xi: np.exp(-xi * xi) + 0 * x, h, K, 8)
        a2 = SymbolGrid.from_function(lambda x, xi: 2 + np.cos(x) + 0 * xi, h, K, 8)
        pts.append((h, composition_remainder(a1, a2)))
    assert abs(fit_slope(pts)[0] - 1.0) <= 0.1


def test_composition_matches_dense():
    a1 = grid(lambda x, xi: (2 + np.cos(x)) * np.tanh(xi), k_max=20, n_x=8)
    a2 = grid(lambda x, xi: np.sin(x) / jap(xi), k_max=20, n_x=8)
    R = dense(a1) @ dense(a2) - dense(a1 * a2)
    ref = np.linalg.svd(R, compute_uv=False)[0]
    assert composition_remainder(a1, a2, rtol=1e-12) == pytest.approx(ref, rel=1e-8)


def test_eta_cutoff_values():
    C0, h = 2.0, 0.01
    g = eta_cutoff(C0, h, 400)
    xi = g.xi
    def at(v):
        return g.values[0, int(np.argmin(np.abs(xi - v)))].real
    assert at(math.sqrt(C0 / 2)) == pytest.approx(1.0)
    assert at(math.sqrt(3 * C0)) == pytest.approx(0.0)
    assert 1.0 - smoothstep5(0.5) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        eta_cutoff(0.0, h, 4)


@settings(max_examples=100)
@given(st.floats(0.0, 1.0))
def test_smoothstep_symmetry(s):
    assert smoothstep5(s) + smoothstep5(1 - s) == pytest.approx(1.0, abs=1e-14)


def test_rough_symbol_log_bound():
    # Lipschitz-in-x symbol of order -1, measured from H^0 (k' > k = -1)
    rng = np.random.default_rng(7)
    nodes = rng.uniform(-1, 1, 9)
    def lip(x):
        xs = np.linspace(0, 2 * np.pi, 10)
        return np.interp(np.mod(x, 2 * np.pi), xs, np.append(nodes, nodes[0]))
    ratios = []
    for j in range(3, 9):
        h = 2.0 ** -j
        K = int(math.ceil(5 / h))
        g = SymbolGrid.from_function(lambda x, xi: lip(x) / jap(xi) * np.exp(-xi * xi / 25), h, K, 256)
        ratios.append(op_norm(quantize(g)) / math.log(1 + 1 / h))
    assert max(ratios) <= 10 * np.median(ratios)
