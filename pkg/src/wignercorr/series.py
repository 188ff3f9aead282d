"""Exact rational arithmetic on generating-function coefficients.

Everything here works with :class:`fractions.Fraction`; floats only show up in
:func:`semicircle_asymptotic`.  The notation ``[f]_s`` is the coefficient of
``tau**s`` in the power series ``f(tau)``.

Powers of ``(1 - tau)`` are passed as a :class:`~fractions.Fraction` exponent
``p`` meaning ``(1 - tau)**(-p)``; integer and half-integer ``p`` use closed
forms, anything else falls back to the generalized binomial series.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

Rational = Fraction


class CoeffSeq:
    """Immutable, finite sequence of exact coefficients ``c_0 .. c_S``.

    Arithmetic never extends a sequence: binary operations truncate to the
    shorter operand.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable):
        c = tuple(Fraction(x) for x in coeffs)
        if not c:
            raise ValueError("CoeffSeq needs at least one coefficient")
        self._c = c

    @classmethod
    def delta(cls, length: int, at: int = 0) -> "CoeffSeq":
        return cls(1 if i == at else 0 for i in range(length))

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._c

    def __len__(self) -> int:
        return len(self._c)

    def __getitem__(self, s):
        return self._c[s]

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, CoeffSeq):
            return self._c == other._c
        if isinstance(other, (tuple, list)):
            return self._c == tuple(Fraction(x) for x in other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._c)

    def __repr__(self) -> str:
        return f"CoeffSeq({', '.join(str(c) for c in self._c)})"

    def __add__(self, other: "CoeffSeq") -> "CoeffSeq":
        return CoeffSeq(a + b for a, b in zip(self._c, other._c))

    def __sub__(self, other: "CoeffSeq") -> "CoeffSeq":
        return CoeffSeq(a - b for a, b in zip(self._c, other._c))

    def scale(self, k) -> "CoeffSeq":
        k = Fraction(k)
        return CoeffSeq(k * a for a in self._c)

    def shift(self, k: int = 1) -> "CoeffSeq":
        """Multiply by ``tau**k``; the length is kept."""
        if k < 0:
            raise ValueError("negative shift")
        return CoeffSeq([Fraction(0)] * min(k, len(self)) + list(self._c[: len(self) - k]))


def convolve(a: Sequence, b: Sequence, length: int | None = None) -> CoeffSeq:
    """Cauchy product ``(a*b)_s = sum_j a_j b_{s-j}``.

    The result has ``min(len(a), len(b))`` terms unless ``length`` asks for
    fewer; it can never be longer because higher terms are not determined.
    """
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        raise ValueError("convolve needs nonempty sequences")
    usable = min(la, lb)
    if length is None:
        length = usable
    elif length > usable:
        raise ValueError(f"only {usable} coefficients are determined, asked for {length}")
    return CoeffSeq(sum((a[j] * b[s - j] for j in range(s + 1)), Fraction(0)) for s in range(length))


def conv_at(a: Sequence, b: Sequence, s: int) -> Fraction:
    """Single coefficient of the Cauchy product; zero for ``s < 0``."""
    if s < 0:
        return Fraction(0)
    return sum((a[j] * b[s - j] for j in range(s + 1)), Fraction(0))


@lru_cache(maxsize=None)
def catalan_moment(s: int) -> Fraction:
    """Even semicircle moment ``m_s = 4**-s * (2s)! / (s! (s+1)!)``."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    return Fraction(math.comb(2 * s, s), 4**s * (s + 1))


def phi_coeffs(S: int) -> CoeffSeq:
    """Coefficients ``m_0 .. m_S`` of ``phi(tau)``, the solution of ``phi = 1 + tau phi^2 / 4``."""
    if S < 0:
        raise ValueError("S must be nonnegative")
    return CoeffSeq(catalan_moment(s) for s in range(S + 1))


semicircle_moments = phi_coeffs


@lru_cache(maxsize=None)
def half_power_coeff(r: int, s: int) -> Fraction:
    """``[(1 - tau)**-(r + 1/2)]_s`` in closed form."""
    if r < 0 or s < 0:
        raise ValueError("r and s must be nonnegative")
    f = math.factorial
    return Fraction(f(2 * r + 2 * s) * f(r), 4**s * f(s) * f(r + s) * f(2 * r))


@lru_cache(maxsize=None)
def integer_power_coeff(k: int, s: int) -> Fraction:
    """``[(1 - tau)**-(k + 1)]_s = binomial(s + k, k)``."""
    if k < 0 or s < 0:
        raise ValueError("k and s must be nonnegative")
    return Fraction(math.comb(s + k, k))


@lru_cache(maxsize=None)
def binomial_series_coeff(p, s: int) -> Fraction:
    """``[(1 - tau)**-p]_s = p (p+1) ... (p+s-1) / s!`` for any rational ``p``.

    This is the generic route; the closed forms above are checked against it.
    """
    p = Fraction(p)
    a, b = p.numerator, p.denominator
    num = math.prod(a + i * b for i in range(s))
    return Fraction(num, b**s * math.factorial(s))


def power_coeff(p, s: int, shift: int = 0) -> Fraction:
    """``[tau**shift * (1 - tau)**-p]_s``."""
    p = Fraction(p)
    s -= shift
    if s < 0:
        return Fraction(0)
    if p > 0 and p.denominator == 1:
        return integer_power_coeff(p.numerator - 1, s)
    if p > 0 and p.denominator == 2:
        return half_power_coeff((p.numerator - 1) // 2, s)
    return binomial_series_coeff(p, s)


def power_series(p, S: int, shift: int = 0) -> CoeffSeq:
    return CoeffSeq(power_coeff(p, s, shift) for s in range(S + 1))


def semicircle_asymptotic(s: int) -> float:
    """Large-``s`` law ``m_s ~ (pi s^3)**-1/2``."""
    if s < 1:
        raise ValueError("s must be positive")
    return (math.pi * s**3) ** -0.5


# --------------------------------------------------------------------------
# identity report
# --------------------------------------------------------------------------

def _run(name: str, points: Iterable, test: Callable) -> dict:
    count = 0
    failure = None
    for pt in points:
        count += 1
        if not test(*pt):
            failure = list(pt)
            break
    return {"check": name, "pass": failure is None, "points": count, "first_failure": failure}


def identity_report(s_max: int = 100, r_max: int = 50) -> dict:
    """Check the coefficient identities used by the majorant analysis.

    Every check is an exact rational equality (or inequality) over the grid
    ``0 <= s <= s_max``, ``r <= r_max``.  Returns a JSON-ready dict.
    """
    H = Fraction(1, 2)
    m = phi_coeffs(s_max + 1)
    sq = [binomial_series_coeff(-H, s) for s in range(s_max + 1)]  # sqrt(1 - tau)
    phi2 = convolve(m, m)
    ss = range(0, s_max + 1)
    ss1 = range(1, s_max + 1)
    rr1 = range(1, r_max + 1)
    grid = lambda rs, sv: ((r, s) for r in rs for s in sv)  # noqa: E731

    def tpc(p, s):  # [tau (1-tau)^-p]_s
        return power_coeff(p, s, shift=1)

    checks = [
        _run("catalan_recursion", ((s,) for s in ss1), lambda s: m[s] == phi2[s - 1] / 4),
        _run(
            "quadratic_equation",
            ((s,) for s in ss),
            lambda s: m[s] - (1 if s == 0 else 0) - (phi2[s - 1] / 4 if s else 0) == 0,
        ),
        _run(
            "sqrt_form",
            ((s,) for s in ss),
            lambda s: (m[s - 1] / 2 if s else 0) == (1 if s == 0 else 0) - sq[s],
        ),
        _run(
            "half_power_closed_form",
            grid(range(0, r_max + 1), ss),
            lambda r, s: half_power_coeff(r, s) == binomial_series_coeff(r + H, s),
        ),
        _run(
            "half_power_binomial_ratio",
            grid(rr1, ss),
            lambda r, s: half_power_coeff(r, s)
            == r * Fraction(math.comb(2 * r + 2 * s, 2 * s), math.comb(r + s, s + 1)) * m[s],
        ),
        _run(
            "three_halves",
            ((s,) for s in ss),
            lambda s: half_power_coeff(1, s) == Fraction((2 * s + 1) * (2 * s + 2), 2) * m[s]
            and half_power_coeff(1, s) == (s + 1) * (2 * s + 1) * m[s],
        ),
        _run(
            "five_halves",
            ((s,) for s in ss),
            lambda s: half_power_coeff(2, s) == Fraction((2 * s + 1) * (2 * s + 2) * (2 * s + 3), 6) * m[s],
        ),
        _run(
            "integer_power",
            grid(range(0, r_max + 1), ss),
            lambda k, s: integer_power_coeff(k, s) == binomial_series_coeff(k + 1, s)
            and integer_power_coeff(k, s) * math.factorial(k) == math.prod(range(s + 1, s + k + 1)),
        ),
        _run("shift_law", grid(range(0, 4), ss1), lambda k, s: power_coeff(k + H, s, 1) == power_coeff(k + H, s - 1)),
        _run(
            "odd_ratio",
            grid(rr1, ss1),
            lambda r, s: tpc(2 * r + 1, s) * (s + 2 * r) == (2 * r + 1) * tpc(2 * r + 2, s),
        ),
        _run(
            "even_ratio",
            grid(rr1, ss1),
            lambda r, s: tpc(2 * r, s) * (s + 2 * r - 1) * (s + 2 * r) == 2 * r * (2 * r + 1) * tpc(2 * r + 2, s),
        ),
        _run(
            "half_step_up",
            grid(rr1, ss1),
            lambda r, s: tpc(2 * r + H, s) * (4 * r - 1) == (2 * s + 4 * r - 3) * tpc(2 * r - H, s),
        ),
        _run(
            "three_half_steps_up",
            grid(rr1, ss1),
            lambda r, s: tpc(2 * r + 5 * H, s) * (4 * r - 1) * (4 * r + 1) * (4 * r + 3)
            == (2 * s + 4 * r - 3) * (2 * s + 4 * r - 1) * (2 * s + 4 * r + 1) * tpc(2 * r - H, s),
        ),
        _run(
            "half_step_down",
            grid(rr1, ss1),
            lambda r, s: tpc(2 * r - 3 * H, s) * (2 * s + 4 * r - 5) == (4 * r - 3) * tpc(2 * r - H, s),
        ),
        _run(
            "two_half_steps",
            grid(rr1, ss1),
            lambda r, s: tpc(2 * r + H, s) * (4 * r - 3) * (4 * r - 1)
            == (2 * s + 4 * r - 5) * (2 * s + 4 * r - 3) * tpc(2 * r - 3 * H, s),
        ),
        _run(
            "integer_ladder",
            ((r, s, q) for r in range(2, r_max + 1) for s in ss1 for q in (1, 2, 3, 5, 6)),
            lambda r, s, q: tpc(2 * r - 2 + q, s) * math.prod(range(2 * r - 2, 2 * r - 2 + q))
            == math.prod(range(s + 2 * r - 3, s + 2 * r - 3 + q)) * tpc(2 * r - 2, s),
        ),
        _run(
            "cubic_domination",
            grid(rr1, ss1),
            lambda r, s: power_coeff(2 * r + 5, s, 4) * (2 * r + 2) * (2 * r + 3) * (2 * r + 4)
            <= s**3 * tpc(2 * r + 2, s),
        ),
        _run(
            "monotone_in_exponent",
            ((q, s) for q in range(1, 2 * r_max + 1) for s in ss1),
            lambda q, s: power_coeff(Fraction(q, 2), s) <= power_coeff(Fraction(q + 1, 2), s),
        ),
    ]
    return {
        "kind": "identities",
        "s_max": s_max,
        "r_max": r_max,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }
