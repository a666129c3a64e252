import numpy as np
import pytest
from hypothesis import given, strategies as st

from itp_lab.errors import DomainError
from itp_lab.profiles import (
    BoundaryData, CaseTag, MediumPair, RadialProfile, boundary_data, classify, constant_profile,
    merged_nodes,
)


def test_eval_examples():
    assert constant_profile(4.0).eval(0.3) == 4.0
    assert RadialProfile([0, 1], [1, 2]).eval(0.5) == 1.5
    assert RadialProfile([0, 0.9, 1], [1, 1, 3]).eval(0.95) == pytest.approx(2.0, rel=1e-14)


def test_eval_exact_at_breakpoints_and_vectorized():
    p = RadialProfile([0, 0.25, 1], [1.5, 2.5, 0.75])
    assert p.eval(0.25) == 2.5
    np.testing.assert_array_equal(p.eval(np.array([0.0, 0.25, 1.0])), [1.5, 2.5, 0.75])


@pytest.mark.parametrize("r", [-0.1, 1.0000001, float("nan")])
def test_eval_outside_domain(r):
    with pytest.raises(DomainError):
        constant_profile(1.0).eval(r)


def test_validate_examples():
    assert constant_profile(1.0).validate(0.5).ok
    rep = RadialProfile([0, 0.5, 1], [1, 0.1, 1]).validate(0.5)
    assert not rep
    assert [(v.rule, v.index) for v in rep.violations] == [("lower bound", 1)]
    rep = RadialProfile([0, 0.5, 0.9], [1, 1, 1]).validate(0.5)
    assert [v.rule for v in rep.violations] == ["domain incomplete"]
    rep = RadialProfile([0, 0.6, 0.5, 1], [1, 1, 1, 1]).validate(0.5)
    assert [(v.rule, v.index) for v in rep.violations] == [("not increasing", 2)]


def test_boundary_data_examples():
    bd = boundary_data(MediumPair.constant(1, 1, 1, 4))
    assert (bd.nt1, bd.nt2) == (1.0, 4.0)
    assert boundary_data(MediumPair.constant(2, 1, 1, 1)).nt1 == 0.5
    ramp = MediumPair(constant_profile(1), RadialProfile([0, 1], [1, 3]),
                      constant_profile(1), constant_profile(1))
    assert boundary_data(ramp).n1 == 3.0
    assert isinstance(bd, BoundaryData)


def test_classify_examples():
    assert classify(MediumPair.constant(1, 1, 1, 4)) is CaseTag.ISOTROPIC
    assert classify(MediumPair.constant(1, 3, 2, 1)) is CaseTag.ANISO_NEGATIVE
    assert classify(MediumPair.constant(2, 3, 1, 1)) is CaseTag.ANISO_POSITIVE
    assert classify(MediumPair.constant(1, 2, 1, 2)) is CaseTag.DEGENERATE
    assert classify(MediumPair.constant(1, 2, 2, 1)) is CaseTag.DEGENERATE


def test_isotropic_needs_identically_one():
    c = RadialProfile([0, 0.5, 1], [2, 1, 1])
    pair = MediumPair(c, constant_profile(1), constant_profile(1), constant_profile(4))
    assert classify(pair) is not CaseTag.ISOTROPIC


def test_case_tag_parse():
    assert CaseTag.parse("aniso-positive") is CaseTag.ANISO_POSITIVE
    assert CaseTag.parse("Isotropic") is CaseTag.ISOTROPIC
    with pytest.raises(DomainError):
        CaseTag.parse("elliptic")


def test_pair_validation_report():
    pair = MediumPair(constant_profile(1), RadialProfile([0, 1], [0.2, 1]),
                      constant_profile(1), constant_profile(4), b0=0.5)
    rep = pair.validate()
    assert rep["c1"].ok and not rep["n1"].ok
    assert not pair.is_valid()


def test_merged_nodes():
    a = RadialProfile([0, 0.3, 1], [1, 2, 1])
    b = RadialProfile([0, 0.7, 1], [1, 2, 1])
    np.testing.assert_array_equal(merged_nodes(a, b), [0, 0.3, 0.7, 1])


@st.composite
def profiles(draw):
    k = draw(st.integers(1, 6))
    inner = sorted(set(draw(st.lists(st.floats(0.01, 0.99), min_size=k, max_size=k))))
    r = [0.0] + inner + [1.0]
    v = draw(st.lists(st.floats(0.1, 10.0), min_size=len(r), max_size=len(r)))
    return RadialProfile(r, v)


@given(profiles(), st.floats(0.0, 1.0))
def test_eval_bounded_by_neighbouring_nodes(p, x):
    r, v = p.breakpoints, p.values
    i = min(max(int(np.searchsorted(r, x, side="right")) - 1, 0), r.size - 2)
    lo, hi = sorted((v[i], v[i + 1]))
    assert lo - 1e-12 <= p.eval(x) <= hi + 1e-12


@given(profiles(), st.floats(0.0, 1.0))
def test_eval_continuous(p, x):
    eps = 1e-9
    a, b = max(0.0, x - eps), min(1.0, x + eps)
    lip = np.max(np.abs(np.diff(p.values) / np.diff(p.breakpoints)))
    assert abs(p.eval(b) - p.eval(a)) <= lip * (b - a) + 1e-12


vals = st.sampled_from([0.5, 1.0, 2.0, 3.0, 4.0])


@given(vals, vals, vals, vals)
def test_classify_swap_symmetry(c1, n1, c2, n2):
    pair = MediumPair.constant(c1, n1, c2, n2)
    assert classify(pair.swapped()) is classify(pair)
