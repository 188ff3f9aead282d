"""Oracles independent of the package code paths they check."""

from fractions import Fraction
from math import comb, prod

import sympy as sp

LAW_MOMENTS = {
    # E Z^{2k} for the unit-variance version of each law
    "gaussian": lambda k: prod(range(2 * k - 1, 0, -2)),
    "rademacher": lambda k: 1,
    "three-point:1/4": lambda k: Fraction(4) ** (k - 1) if k else 1,
}


def _symbolic_matrix(n):
    diag = sp.symbols(f"d1:{n + 1}", real=True)
    M = sp.zeros(n, n)
    variances = {}
    for i in range(n):
        M[i, i] = diag[i]
        variances[diag[i]] = Fraction(1, 4)
    for i in range(n):
        for j in range(i + 1, n):
            x, y = sp.symbols(f"x{i}{j} y{i}{j}", real=True)
            M[i, j] = x + sp.I * y
            M[j, i] = x - sp.I * y
            variances[x] = variances[y] = Fraction(1, 8)
    return M, variances


def _expect(expr, variances, law):
    mom = LAW_MOMENTS[law]
    gens = list(variances)
    poly = sp.Poly(sp.expand(expr), *gens)
    total = Fraction(0)
    for exps, coeff in poly.terms():
        if any(e % 2 for e in exps):
            continue
        c = sp.nsimplify(coeff)
        assert c.is_rational, c
        term = Fraction(int(c.p), int(c.q))
        for g, e in zip(gens, exps):
            term *= variances[g] ** (e // 2) * Fraction(mom(e // 2))
        total += term
    return total


def direct_covariance(n, s1, s2, law):
    """``Cov(Tr W^{2s1}, Tr W^{2s2})`` straight from the entry model, ``W = M / sqrt(n)``."""
    M, var = _symbolic_matrix(n)
    t1 = sp.expand((M ** (2 * s1)).trace())
    t2 = sp.expand((M ** (2 * s2)).trace())
    cov = _expect(t1 * t2, var, law) - _expect(t1, var, law) * _expect(t2, var, law)
    return cov / Fraction(n) ** (s1 + s2)


def semicircle_moment(s):
    return Fraction(comb(2 * s, s), 4**s * (s + 1))


def gaussian_entry_product(n, factors):
    """``E prod (A^p)_{xy}`` for the GUE (1-based indices), by symbolic expansion."""
    M, var = _symbolic_matrix(n)
    expr = sp.Integer(1)
    deg = 0
    for p, x, y in factors:
        expr *= (M**p)[x - 1, y - 1]
        deg += p
    if deg % 2:
        return Fraction(0)
    return _expect(expr, var, "gaussian") / Fraction(n) ** (deg // 2)
