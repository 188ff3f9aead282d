from fractions import Fraction
from math import comb

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from wignercorr import series
from oracles import semicircle_moment

tau = sp.symbols("tau")


def _sympy_coeffs(expr, S):
    poly = sp.series(expr, tau, 0, S + 1).removeO()
    return [Fraction(str(sp.Rational(poly.coeff(tau, k)))) for k in range(S + 1)]


def test_catalan_moments_match_closed_form():
    assert [series.catalan_moment(s) for s in range(30)] == [semicircle_moment(s) for s in range(30)]
    assert series.catalan_moment(2) == Fraction(1, 8)


@pytest.mark.parametrize("p", [Fraction(1, 2), Fraction(3, 2), Fraction(5, 2), Fraction(-1, 2), 2, 3])
def test_power_coeffs_against_sympy(p):
    q = Fraction(p)
    want = _sympy_coeffs((1 - tau) ** -sp.Rational(q.numerator, q.denominator), 12)
    assert [series.power_coeff(p, s) for s in range(13)] == want


def test_shifted_power_coeff():
    want = _sympy_coeffs(tau**2 * (1 - tau) ** sp.Rational(-5, 2), 10)
    assert [series.power_coeff(Fraction(5, 2), s, shift=2) for s in range(11)] == want


@given(st.lists(st.fractions(max_denominator=20), min_size=1, max_size=8),
       st.lists(st.fractions(max_denominator=20), min_size=1, max_size=8))
@settings(max_examples=50, deadline=None)
def test_convolution_matches_polynomial_product(a, b):
    x = sp.symbols("x")
    pa = sum(sp.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(a))
    pb = sum(sp.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(b))
    prod = sp.Poly(sp.expand(pa * pb), x)
    got = series.convolve(a, b)
    assert len(got) == min(len(a), len(b))  # higher terms are not determined
    for k in range(len(got)):
        assert got[k] == Fraction(str(prod.coeff_monomial(x**k)))


def test_half_power_ratio_identity_spot():
    # [(1-tau)^{-(r+1/2)}]_s = r * C(2r+2s, 2s) / C(r+s, s+1) * m_s
    for r in range(1, 6):
        for s in range(0, 8):
            rhs = r * Fraction(comb(2 * r + 2 * s, 2 * s), comb(r + s, s + 1)) * semicircle_moment(s)
            assert series.half_power_coeff(r, s) == rhs


def test_identity_report_small_grid_passes():
    rep = series.identity_report(30, 10)
    assert rep["pass"], [c for c in rep["checks"] if not c["pass"]]


def test_semicircle_asymptotic_ratio_tends_to_one():
    assert abs(series.semicircle_asymptotic(400) / float(series.catalan_moment(400)) - 1) < 1e-2
