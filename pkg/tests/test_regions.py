import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import assume, given, strategies as st

from itp_lab.errors import DomainError, UnsupportedCaseError
from itp_lab.profiles import CaseTag
from itp_lab.regions import (
    boundary_curve, exponents, in_free_region, radial_critical_constant, radial_free_region,
    region_spec, thresholds, write_boundary_curve_csv,
)

FIXTURE = json.loads((Path(__file__).parent / "data" / "region_exponents.json").read_text())


def test_exponent_examples():
    e = exponents(CaseTag.ISOTROPIC, 2, 2)
    assert (e.p1, e.p2) == (Fraction(2, 7), Fraction(2, 7))
    e = exponents(CaseTag.ISOTROPIC, 9, 2)
    assert (e.p1, e.p2) == (Fraction(2, 5), 0)
    e = exponents(CaseTag.ANISO_POSITIVE, 2, 2)
    assert (e.p1, e.p2) == (Fraction(1, 5), Fraction(1, 5))
    e = exponents(CaseTag.ANISO_NEGATIVE, 2, 2)
    assert (e.p3, e.p4) == (Fraction(1, 5), Fraction(1, 5))


def test_exponents_are_exact_fractions():
    for row in FIXTURE:
        e = exponents(CaseTag(row["case"]), row["mu"], row["d"])
        assert isinstance(e.p1, Fraction) and isinstance(e.p2, Fraction)
        assert 0 < e.p1 <= Fraction(2, 5) and e.p2 >= 0


def test_exponent_errors():
    with pytest.raises(UnsupportedCaseError):
        exponents(CaseTag.DEGENERATE, 2, 2)
    with pytest.raises(DomainError):
        exponents(CaseTag.ISOTROPIC, 1, 2)
    with pytest.raises(DomainError):
        region_spec(CaseTag.ISOTROPIC, 2, 2, 2.0)


def test_in_free_region_examples():
    spec = region_spec(CaseTag.ISOTROPIC, 2, 2, 3.0)
    assert not in_free_region(2.0, spec)
    spec = region_spec(CaseTag.ISOTROPIC, 9, 2, 3.0)
    assert 100 >= 3.0 * abs(100 + 100j) ** 0.6
    assert in_free_region(100 + 100j, spec)
    spec = region_spec(CaseTag.ANISO_NEGATIVE, 2, 2, 3.0)
    assert not in_free_region(100j, spec)


def test_radial_free_region_examples():
    assert radial_free_region(10 + 10j, CaseTag.ISOTROPIC, 2.0)
    assert not radial_free_region(10 + 10j, CaseTag.ANISO_POSITIVE, 2.0)
    for case in (CaseTag.ISOTROPIC, CaseTag.ANISO_NEGATIVE, CaseTag.ANISO_POSITIVE):
        assert not radial_free_region(1.0, case, 2.0)
    with pytest.raises(UnsupportedCaseError):
        radial_free_region(10j, CaseTag.DEGENERATE, 3.0)


lams = st.builds(complex, st.floats(-200, 200), st.floats(-200, 200))
cases = st.sampled_from([CaseTag.ISOTROPIC, CaseTag.ANISO_NEGATIVE, CaseTag.ANISO_POSITIVE])


@given(lams, cases, st.floats(2.01, 30), st.floats(2.01, 30))
def test_free_region_monotone_in_C(lam, case, c_a, c_b):
    lo, hi = sorted((c_a, c_b))
    spec_hi = region_spec(case, 3, 2, hi)
    spec_lo = region_spec(case, 3, 2, lo)
    if in_free_region(lam, spec_hi):
        assert in_free_region(lam, spec_lo)
    if radial_free_region(lam, case, hi):
        assert radial_free_region(lam, case, lo)


@given(lams, cases, st.floats(2.01, 30))
def test_critical_constant_decides_membership(lam, case, C):
    crit = radial_critical_constant(lam, case)
    assume(abs(crit - C) > 1e-9 * max(1.0, C))
    assert radial_free_region(lam, case, C) == (C <= crit)


@given(lams, st.integers(2, 10), st.integers(2, 10), st.integers(2, 3))
def test_smaller_p1_shrinks_region(lam, mu_a, mu_b, d):
    # Isotropic p1 increases with mu while p2 is nonincreasing beyond a branch
    assume(abs(lam) >= math.e)
    ea, eb = exponents(CaseTag.ISOTROPIC, mu_a, d), exponents(CaseTag.ISOTROPIC, mu_b, d)
    assume(ea.p1 <= eb.p1 and ea.p2 >= eb.p2)
    sa = region_spec(CaseTag.ISOTROPIC, mu_a, d, 3.0)
    sb = region_spec(CaseTag.ISOTROPIC, mu_b, d, 3.0)
    if in_free_region(lam, sa):
        assert in_free_region(lam, sb)


def test_boundary_curve(tmp_path):
    spec = region_spec(CaseTag.ISOTROPIC, 9, 2, 3.0)
    pts = boundary_curve(spec, (100, 100), 2)
    y = 3.0 * 100 ** 0.6
    assert len(pts) == 2
    assert pts[0][2] == pytest.approx(y) and pts[0][3] == pytest.approx(-y)
    assert pts[0][1] == pytest.approx(math.sqrt(100 ** 2 - y * y))
    assert math.isnan(boundary_curve(spec, (10, 10), 2)[0][1])
    curve = boundary_curve(region_spec(CaseTag.ISOTROPIC, 2, 2, 3.0), (3, 500), 50)
    ims = [p[2] for p in curve]
    assert all(b > a for a, b in zip(ims, ims[1:]))
    with pytest.raises(DomainError):
        boundary_curve(spec, (1, 10), 5)
    path = tmp_path / "curve.csv"
    write_boundary_curve_csv(path, curve)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["abs_lambda", "re_lambda", "im_lambda_plus", "im_lambda_minus"]
    assert len(rows) == 51


def test_thresholds_examples():
    t = thresholds(1e-3, 9, 2)
    assert t["theta1"] == pytest.approx(1e-3 ** 0.4, rel=1e-12)
    assert t["theta1"] == pytest.approx(0.0631, abs=1e-4)
    assert t["theta2"] == pytest.approx(0.1389, abs=1e-4)
    # direct evaluation of (h log(1/h))**(1/5)
    tau = (1e-3 * math.log(1e3)) ** 0.2
    assert thresholds(1e-3, 2, 2)["tau3"] == pytest.approx(tau, rel=1e-14)
    assert tau == pytest.approx(0.36971, abs=1e-5)
    with pytest.raises(DomainError):
        thresholds(1.0, 2, 2)
