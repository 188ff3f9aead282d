import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wignercorr import majorant, wick
from wignercorr.errors import DomainError, RegimeError
from oracles import semicircle_moment


@given(st.integers(min_value=0, max_value=10**60))
def test_icbrt_is_floor_cube_root(v):
    r = majorant.icbrt(v)
    assert r**3 <= v < (r + 1) ** 3


def test_floor_cbrt_exact_cubes():
    assert majorant.floor_cbrt_fraction(Fraction(1) * (2**15) ** 2) == 2**10
    assert majorant.floor_cbrt_fraction(Fraction(64000)) == 40
    assert majorant.floor_cbrt_fraction(Fraction(63999)) == 39
    assert majorant.floor_cbrt_fraction(Fraction(1, 10) * 800 * 800) == 40


def test_params_validation():
    majorant.BoundParams().validate_moment()
    majorant.BoundParams().validate_majorant()
    majorant.BoundParams().validate_correlation()
    with pytest.raises(DomainError):
        majorant.BoundParams(h=Fraction(1, 16)).validate_moment()
    with pytest.raises(RegimeError):
        majorant.BoundParams(chi=Fraction(1, 32)).validate_correlation()


def test_moment_bound_points_and_negative_control():
    for n in range(2, 7):
        for s in range(1, 5):
            if s**3 <= 5 * n * n:
                assert majorant.check_moment_bound(n, s)["pass"]
    with pytest.raises(DomainError):
        majorant.check_moment_bound(3, 2, h=Fraction(1, 16))
    with pytest.raises(RegimeError):
        majorant.check_moment_bound(1, 3)
    assert majorant.moment_bound_margin(3, 2, Fraction(1, 16)) < 0


def test_degenerate_feed_gives_catalan():
    t = majorant.iterate_majorants(5, 20, d_feed=False)
    assert t.U == [semicircle_moment(s) for s in range(21)]


def test_initial_values_reproduced():
    n = 4
    t = majorant.iterate_majorants(n, 3)
    assert t.d(1, 2) == Fraction(1, 4 * n * n)
    pqt = majorant.iterate_pqt_majorants(n, 2)
    assert pqt.get("P", 1, 2) == 0


def test_monotone_in_inputs():
    base = majorant.iterate_majorants(3, 6)
    bumped = majorant.iterate_majorants(3, 6, bump={("D", 2, 3): Fraction(1, 100)})
    assert all(b >= a for a, b in zip(base.U, bumped.U))
    assert all(bumped.D[k] >= v for k, v in base.D.items())
    assert bumped.U[6] > base.U[6]


def test_majorants_dominate_oracle():
    for n in (2, 3):
        rep = majorant.check_hierarchy_majorants(n)
        assert rep["pass"] and rep["pass_all"]
        assert any(p["check"] == "D_domination" for p in rep["points"])


def test_hierarchy_closed_forms_in_literal_regime():
    rep = majorant.check_hierarchy_majorants(60)
    assert any(p["regime"] and p["check"] == "D_closed_form" for p in rep["points"])
    assert rep["pass"]


def test_pqt_domination_and_feed():
    rep = majorant.check_correlation_bounds(3, s_max=2)
    assert rep["domination_pass"]
    full = majorant.iterate_pqt_majorants(3, 4)
    cut = majorant.iterate_pqt_majorants(3, 4, couple_pq=False)
    assert any(cut.Q[k] < v for k, v in full.Q.items())
    assert all(cut.Q[k] <= v for k, v in full.Q.items())


def test_worked_example_q22():
    n = 5
    table = wick.pqt_table(n, 1, 2)
    assert table.sup("Q", 1, 2) == Fraction(1, 4 * n)
    assert majorant.qt_closed_form(n, 1, 2, Fraction(1, 12)) == Fraction(1, 2 * n)


def test_recomposition_exact():
    for n in (1, 2, 3):
        for s1 in (1, 2):
            for s2 in (1, 2):
                dec = majorant.assemble_R(n, s1, s2)
                assert dec.recomposes
                assert sum(dec.S) == dec.S_direct


def test_single_index_direct_sum():
    dec = majorant.assemble_R(1, 1, 1)
    # alpha = beta = 1: U_1 = 0, so everything sits in the centred-centred term
    assert dec.direct == Fraction(1, 16) == dec.R[3]
    assert dec.R[0] == 0


def test_edge_constant_value():
    c = majorant.edge_constant(Fraction(1, 10), Fraction(1, 10))
    assert math.isclose(c, 16 * (1 + 0.0125) ** 2 / (math.pi * 0.1))


def test_exact_r1_matches_oracle_r1():
    dec = majorant.assemble_R(3, 2, 2)
    assert majorant.exact_R1(3, 2, 2) == dec.R[0]


def test_regime_mismatch_warns():
    with pytest.warns(UserWarning):
        majorant.assemble_R(2, 1, 1, chi=(Fraction(1, 10), Fraction(1, 10)))
