"""Majorant recursions for GUE moment hierarchies and their closed-form bounds.

The scalar majorants are indexed by the half-degree: ``U[s]`` dominates
``E (A^{2s})_xx`` and ``D[s, r]`` dominates ``D^{(r)}_{2s}``.  Recursions that
are stated as inequalities are iterated with equality; every coefficient is
nonnegative so the resulting sequence still dominates whenever the inequality
itself holds, and the oracle comparisons below test exactly that.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from . import wick
from .errors import DomainError, RegimeError
from .series import catalan_moment, power_coeff


def icbrt(v: int) -> int:
    """Largest integer ``k`` with ``k**3 <= v`` (``v >= 0``)."""
    if v < 0:
        raise ValueError("negative argument")
    if v < 8:
        return int(v > 0)
    k = 1 << ((v.bit_length() + 2) // 3)  # >= cube root
    while True:
        nxt = (2 * k + v // (k * k)) // 3
        if nxt >= k:
            return k
        k = nxt


def floor_cbrt_fraction(q: Fraction) -> int:
    """``floor(q**(1/3))`` for a nonnegative rational, exactly."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative argument")
    k = icbrt(q.numerator // q.denominator)
    while Fraction((k + 1) ** 3) <= q:
        k += 1
    return k


@dataclass(frozen=True)
class BoundParams:
    """Constants of the moment bounds.

    ``h`` scales the finite-n correction, ``kappa`` bounds ``s^3/n^2`` for the
    moment bounds, ``C`` is the constant of the D/P/Q/T bounds and ``chi``
    bounds ``s^3/n^2`` for the correlation-term bounds.
    """

    h: Fraction = Fraction(1, 8)
    kappa: Fraction = Fraction(5)
    C: Fraction = Fraction(1, 12)
    chi: Fraction = Fraction(1, 128)

    def __post_init__(self):
        for name in ("h", "kappa", "C", "chi"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def validate_moment(self) -> None:
        """Domain of the single-moment bound: ``h > 1/16`` and
        ``0 < kappa < 12 - 3/(4h)``."""
        if self.h <= Fraction(1, 16):
            raise DomainError(f"h = {self.h} <= 1/16: the admissible kappa range is empty")
        if not 0 < self.kappa < 12 - Fraction(3, 4) / self.h:
            raise DomainError(f"kappa = {self.kappa} outside (0, {12 - Fraction(3, 4) / self.h})")

    def validate_majorant(self) -> None:
        """Domain of the majorant closed forms: additionally ``h > 1/12`` and
        ``1/24 < C <= min(2h/3, 24)``.

        The upper end for ``C`` is accepted with equality because the default
        ``C = 1/12`` sits exactly at ``2h/3`` for ``h = 1/8``.
        """
        self.validate_moment()
        if self.h <= Fraction(1, 12):
            raise DomainError(f"h = {self.h} <= 1/12")
        if not Fraction(1, 24) < self.C <= min(2 * self.h / 3, Fraction(24)):
            raise DomainError(f"C = {self.C} outside (1/24, min(2h/3, 24)]")

    def validate_correlation(self) -> None:
        self.validate_majorant()
        if not 0 < self.chi < min(self.kappa, Fraction(1, 64)):
            raise RegimeError(f"chi = {self.chi} outside (0, min(kappa, 1/64))")

    def s0(self, n: int, ratio: Fraction) -> int:
        """Largest ``s0`` with ``s0^3 <= ratio * n^2``."""
        return floor_cbrt_fraction(ratio * n * n)


def _frac(num, den=1) -> dict:
    q = Fraction(num) / den
    return {"margin_num": q.numerator, "margin_den": q.denominator}


# --------------------------------------------------------------------------
# U / D majorants
# --------------------------------------------------------------------------

@dataclass
class MajorantTable:
    n: int
    s_max: int
    U: list
    D: dict = field(default_factory=dict)

    def d(self, s: int, r: int) -> Fraction:
        """``D[s, r]`` with the boundary conventions ``D^(0) = delta_s0``,
        ``D^(1) = 0`` and zero outside ``r <= 2s``."""
        if s < 0:
            return Fraction(0)
        if r == 0:
            return Fraction(int(s == 0))
        if r == 1 or r > 2 * s or r < 0:
            return Fraction(0)
        return self.D[(s, r)]

    def u1(self, s: int) -> Fraction:
        return (2 * s + 2) * self.U[s]

    def u2(self, s: int) -> Fraction:
        return Fraction((2 * s + 2) * (2 * s + 1), 2) * self.U[s]

    def conv(self, f: Callable[[int], Fraction], g: Callable[[int], Fraction], s: int) -> Fraction:
        return sum((f(j) * g(s - j) for j in range(s + 1)), Fraction(0))


def iterate_majorants(
    n: int,
    s_max: int,
    *,
    d_feed: bool = True,
    bump: Mapping[tuple, Fraction] | None = None,
) -> MajorantTable:
    """Scalar majorants on the triangle ``1 <= s <= s_max``, ``2 <= r <= 2s``.

    ``d_feed=False`` drops the D term from the U recursion, which then reduces
    to the Catalan recursion.  ``bump`` adds a nonnegative amount to selected
    entries right after they are computed (keys ``("U", s)`` or
    ``("D", s, r)``); used to probe monotonicity.
    """
    if s_max < 1:
        raise DomainError("s_max must be >= 1")
    bump = dict(bump or {})
    nn = Fraction(n * n)
    t = MajorantTable(n, s_max, [Fraction(1) + bump.get(("U", 0), 0)])
    U = lambda j: t.U[j]  # noqa: E731
    for s in range(1, s_max + 1):
        u = t.conv(U, U, s - 1) / 4
        if d_feed:
            u += t.d(s - 1, 2) / 4
        t.U.append(u + bump.get(("U", s), 0))
        for r in range(2, 2 * s + 1):
            Dr = lambda j, r=r: t.d(j, r)  # noqa: E731
            v = t.conv(U, Dr, s - 1) / 2
            v += t.d(s - 1, r + 1) / 4
            v += t.conv(lambda j: t.d(j, 2), lambda j, r=r: t.d(j, r - 1), s - 1) / 4
            v += Fraction(r - 1) / (4 * nn) * t.conv(t.u2, lambda j, r=r: t.d(j, r - 2), s - 1)
            v += Fraction(s * s * r) / (2 * nn) * t.d(s - 1, r - 1)
            t.D[(s, r)] = v + bump.get(("D", s, r), 0)
    return t


def u_closed_form(n: int, s: int, h) -> Fraction:
    """``[phi(tau) + h n^-2 tau^2 (1-tau)^{-5/2}]_s``."""
    return catalan_moment(s) + Fraction(h) / (n * n) * power_coeff(Fraction(5, 2), s, shift=2)


def d_closed_form(n: int, s: int, r: int, C) -> Fraction:
    C = Fraction(C)
    if r % 2 == 0:
        k = r // 2
        return C * math.factorial(3 * k) / Fraction(n) ** (2 * k) * power_coeff(2 * k, s, 1)
    k = (r - 1) // 2
    return C * math.factorial(3 * k + 3) / Fraction(n) ** (2 * k + 2) * power_coeff(Fraction(4 * k + 5, 2), s, 1)


def moment_bound(n: int, s: int, h) -> Fraction:
    return (1 + Fraction(h) * s * (s * s - 1) / (n * n)) * catalan_moment(s)


def moment_bound_margin(n: int, s: int, h) -> Fraction:
    """Bound minus the exact ``sup_x U_{2s}(x)``, with no domain checks."""
    return moment_bound(n, s, h) - wick.gue_moment(n, 2 * s)


def check_moment_bound(n: int, s: int, h=Fraction(1, 8), kappa=None, cap: int = wick.DEFAULT_DEGREE_CAP) -> dict:
    """Compare ``sup_x U_{2s}(x)`` with ``(1 + h s(s^2-1)/n^2) m_s``.

    ``U`` comes from the Wick oracle when ``2s`` is within ``cap`` and from the
    exact averaged moment otherwise (the diagonal is x-independent).
    Raises :class:`DomainError` for ``h <= 1/16`` and :class:`RegimeError`
    when ``s^3 > kappa n^2``.
    """
    h = Fraction(h)
    if h <= Fraction(1, 16):
        raise DomainError(f"h = {h} <= 1/16: no admissible kappa")
    kmax = 12 - Fraction(3, 4) / h
    kappa = Fraction(kappa) if kappa is not None else min(Fraction(5), kmax)
    BoundParams(h=h, kappa=kappa).validate_moment()
    if s < 1:
        raise DomainError("s must be >= 1")
    if s**3 > kappa * n * n:
        raise RegimeError(f"s^3 = {s**3} > kappa n^2 = {kappa * n * n}")
    if 2 * s <= cap:
        value = max(wick.u_value(n, s, x, x, cap) for x in range(1, n + 1))
        source = "wick"
    else:
        value = wick.gue_moment(n, 2 * s)
        source = "exact"
    bound = moment_bound(n, s, h)
    return {
        "check": "moment_bound", "n": n, "s": s, "h": str(h), "kappa": str(kappa),
        "value": str(value), "bound": str(bound), "source": source,
        "regime": True, "pass": value <= bound, **_frac(bound - value),
    }


def check_hierarchy_majorants(
    n: int,
    params: BoundParams = BoundParams(),
    s0: int | None = None,
    oracle_s_max: int | None = None,
) -> dict:
    """Domination of the oracle by the majorants and the closed forms for the
    majorants.

    Domination is checked for ``n <= 4`` on every oracle point with
    ``s <= oracle_s_max`` (default 4).  Closed forms are checked for every
    ``s <= s0`` (and r on the triangle).  Points satisfying ``s + 2r + 5 <= s0``
    are marked ``regime: true``; the rest are still evaluated and reported
    with ``regime: false``.
    """
    params.validate_majorant()
    s0_max = params.s0(n, params.kappa)
    if s0 is None:
        s0 = s0_max
    if s0 < 1:
        raise RegimeError(f"no s0 >= 1 with s0^3 <= kappa n^2 at n = {n}")
    if s0 > s0_max:
        raise RegimeError(f"s0 = {s0} violates s0^3 <= kappa n^2 = {params.kappa * n * n}")
    maj = iterate_majorants(n, max(s0, oracle_s_max or 4))
    points = []
    if n <= 4:
        os_max = 4 if oracle_s_max is None else oracle_s_max
        ut = wick.u_table(n, os_max)
        dt = wick.d_table(n, os_max, 2 * os_max)
        for s in range(1, os_max + 1):
            for x in range(1, n + 1):
                for y in range(1, n + 1):
                    v = ut.get("U", s, 0, x, y)
                    b = maj.U[s] if x == y else Fraction(0)
                    points.append({"check": "U_domination", "s": s, "r": 0, "x": x, "y": y,
                                   "regime": True, "pass": v <= b, **_frac(b - v)})
            for r in range(2, 2 * s + 1):
                v = max(dt.get("D", s, r, x, y) for x in range(1, n + 1) for y in range(1, n + 1))
                b = maj.d(s, r)
                points.append({"check": "D_domination", "s": s, "r": r, "regime": True,
                               "pass": v <= b, **_frac(b - v)})
    for s in range(1, s0 + 1):
        b = u_closed_form(n, s, params.h)
        points.append({"check": "U_closed_form", "s": s, "r": 0, "regime": True,
                       "pass": maj.U[s] <= b, **_frac(b - maj.U[s])})
        for r in range(2, 2 * s + 1):
            b = d_closed_form(n, s, r, params.C)
            v = maj.d(s, r)
            points.append({"check": "D_closed_form", "s": s, "r": r, "regime": s + 2 * r + 5 <= s0,
                           "pass": v <= b, **_frac(b - v)})
    return _summarize("hierarchy_majorants", n, points, s0=s0, params=params)


def _summarize(kind: str, n: int, points: list, **extra) -> dict:
    params = extra.pop("params", None)
    in_regime = [p for p in points if p["regime"]]
    out = {
        "kind": kind,
        "n": n,
        **extra,
        "points": points,
        "pass_in_regime": all(p["pass"] for p in in_regime),
        "pass_all": all(p["pass"] for p in points),
        "first_failure": next((p for p in points if not p["pass"]), None),
    }
    if params is not None:
        out["params"] = {k: str(getattr(params, k)) for k in ("h", "kappa", "C", "chi")}
    out["pass"] = out["pass_in_regime"]
    return out


# --------------------------------------------------------------------------
# P / Q / T
# --------------------------------------------------------------------------

def p_closed_form(n: int, s: int, r: int, C) -> Fraction:
    C = Fraction(C)
    if r % 2 == 0:
        k = r // 2
        return C * math.factorial(3 * k + 1) / Fraction(n) ** (2 * k) * power_coeff(2 * k, s, 1)
    k = (r - 1) // 2
    return C * math.factorial(3 * k + 4) / Fraction(n) ** (2 * k + 2) * power_coeff(Fraction(4 * k + 5, 2), s, 1)


def qt_closed_form(n: int, s: int, r: int, C) -> Fraction:
    C = Fraction(C)
    if r % 2 == 0:
        k = r // 2
        return C * math.factorial(3 * k) / Fraction(n) ** (2 * k - 1) * power_coeff(Fraction(4 * k - 3, 2), s, 1)
    k = (r - 1) // 2
    return C * math.factorial(3 * k + 3) / Fraction(n) ** (2 * k + 1) * power_coeff(2 * k + 1, s, 1)


CLOSED_FORMS = {"P": p_closed_form, "Q": qt_closed_form, "T": qt_closed_form}


@dataclass
class PQTMajorants:
    n: int
    s_max: int
    r_max: int
    P: dict
    Q: dict
    T: dict
    base: MajorantTable

    def get(self, q: str, s: int, r: int) -> Fraction:
        table = getattr(self, q)
        if s < 1 or r < 2 or r > 2 * s:
            return Fraction(0)
        return table[(s, r)]


def iterate_pqt_majorants(n: int, s_max: int, r_max: int | None = None, *, couple_pq: bool = True) -> PQTMajorants:
    """Iterate the recursions for the non-crossing (P), crossing (Q) and
    diagonal (T) terms with U, D, U', U'' replaced by their majorants.

    The triangle is filled completely (``r <= 2s``); ``r_max`` only limits what
    callers usually look at.  ``couple_pq=False`` drops the ``(s/2n) P`` feed
    of the Q recursion.
    """
    base = iterate_majorants(n, s_max)
    r_max = 2 * s_max if r_max is None else r_max
    nf = Fraction(n)
    nn = nf * nf
    res = PQTMajorants(n, s_max, r_max, {}, {}, {}, base)
    U, D, U1, U2 = (lambda j: base.U[j]), base.d, base.u1, base.u2
    cv = base.conv
    g = res.get
    for s in range(1, s_max + 1):
        sm = s - 1
        w = Fraction((2 * s + 2) * (2 * s + 1), 2)
        for r in range(2, 2 * s + 1):
            Dr, Dr1, Dr2 = (lambda j, r=r: D(j, r)), (lambda j, r=r: D(j, r - 1)), (lambda j, r=r: D(j, r - 2))
            UU1 = lambda j: cv(U1, U, j)  # noqa: E731

            P = cv(U, lambda j, r=r: g("P", j, r), sm) / 4
            P += cv(U, Dr, sm) / 4
            P += g("P", sm, r + 1) / 4
            P += cv(lambda j: g("P", j, 2), Dr1, sm) / 4
            P += s / (2 * nf) * g("Q", sm, r)
            P += Fraction(r - 2) / (4 * nn) * cv(U2, Dr2, sm)
            P += Fraction(r - 2) / (4 * nn) * w * g("P", sm, r - 1)

            Q = cv(U, lambda j, r=r: g("Q", j, r), sm) / 4
            Q += g("Q", sm, r + 1) / 4
            Q += cv(lambda j: g("Q", j, 2), Dr1, sm) / 4
            Q += cv(UU1, Dr2, sm) / (4 * nf)
            Q += cv(U1, Dr1, sm) / (4 * nf)
            Q += s / (2 * nf) * cv(U, Dr1, sm)
            if couple_pq:
                Q += s / (2 * nf) * g("P", sm, r)
            Q += Fraction(r - 2) / (4 * nn) * w * g("Q", sm, r - 1)

            T = cv(U, lambda j, r=r: g("T", j, r), sm) / 4
            T += cv(U, Dr, sm) / 4
            T += g("T", sm, r + 1) / 4
            T += cv(lambda j: g("T", j, 2), Dr1, sm) / 4
            T += cv(UU1, Dr2, sm) / (4 * nf)
            T += s / nf * cv(U, Dr1, sm)
            T += s / (2 * nf) * g("T", sm, r)
            T += Fraction(r - 2) / (4 * nn) * cv(U2, Dr2, sm)
            T += Fraction(r - 2) / (4 * nn) * w * g("T", sm, r - 1)

            res.P[(s, r)], res.Q[(s, r)], res.T[(s, r)] = P, Q, T
    return res


def _oracle_sup(table: wick.MomentTable, q: str, s: int, r: int) -> Fraction:
    return table.sup(q, s, r)


def check_correlation_bounds(
    n: int,
    params: BoundParams = BoundParams(),
    s_max: int = 2,
    r_max: int = 2,
    oracle_s_max: int | None = None,
) -> dict:
    """Oracle P/Q/T sup values against the closed forms, and the iterated
    majorants against both.

    Closed-form points are flagged ``regime: true`` only when
    ``s + 2r + 5 <= s0`` with ``s0^3 <= chi n^2``; every point is evaluated.
    Majorant domination of the oracle is checked on every point with
    ``s <= oracle_s_max`` (default ``s_max``) and ``r <= 2s``.
    """
    params.validate_correlation()
    s0 = params.s0(n, params.chi)
    os_max = s_max if oracle_s_max is None else oracle_s_max
    top = max(s_max, os_max)
    table = wick.pqt_table(n, top, 2 * top) if n >= 2 else None
    maj = iterate_pqt_majorants(n, top)
    points = []
    for q in ("P", "Q", "T"):
        if q in "PQ" and table is None:
            continue
        for s in range(1, s_max + 1):
            for r in range(2, min(r_max, 2 * s) + 1):
                v = _oracle_sup(table, q, s, r)
                b = CLOSED_FORMS[q](n, s, r, params.C)
                points.append({"check": f"{q}_closed_form", "s": s, "r": r, "value": str(v), "bound": str(b),
                               "regime": s + 2 * r + 5 <= s0, "pass": v <= b, **_frac(b - v)})
        for s in range(1, os_max + 1):
            for r in range(2, 2 * s + 1):
                v = _oracle_sup(table, q, s, r)
                b = maj.get(q, s, r)
                points.append({"check": f"{q}_domination", "s": s, "r": r, "value": str(v), "bound": str(b),
                               "regime": True, "pass": v <= b, **_frac(b - v)})
    rep = _summarize("correlation_terms", n, points, s0=s0, params=params)
    closed = [p for p in points if p["check"].endswith("closed_form")]
    dom = [p for p in points if p["check"].endswith("domination")]
    rep["closed_form_pass_all"] = all(p["pass"] for p in closed)
    rep["domination_pass"] = all(p["pass"] for p in dom)
    return rep


def check_pqt_closed_forms(n: int, s_max: int, params: BoundParams = BoundParams()) -> dict:
    """Iterated P/Q/T majorants against the closed forms on the triangle
    ``s <= s_max``; regime flags as in :func:`check_correlation_bounds`."""
    params.validate_correlation()
    s0 = params.s0(n, params.chi)
    maj = iterate_pqt_majorants(n, s_max)
    points = []
    for q in ("P", "Q", "T"):
        for s in range(1, s_max + 1):
            for r in range(2, 2 * s + 1):
                v = maj.get(q, s, r)
                b = CLOSED_FORMS[q](n, s, r, params.C)
                points.append({"check": f"{q}_majorant_closed_form", "s": s, "r": r,
                               "regime": s + 2 * r + 5 <= s0, "pass": v <= b, **_frac(b - v)})
    return _summarize("correlation_majorants", n, points, s0=s0, params=params)


# --------------------------------------------------------------------------
# R / S assembly
# --------------------------------------------------------------------------

def edge_constant(chi1, chi2, h=Fraction(1, 8)) -> float:
    """``16 (1 + h chi') (1 + h chi'') / (pi sqrt(chi' chi''))``."""
    chi1, chi2, h = float(chi1), float(chi2), float(h)
    return 16 * (1 + h * chi1) * (1 + h * chi2) / (math.pi * math.sqrt(chi1 * chi2))


@dataclass
class RDecomposition:
    n: int
    s1: int
    s2: int
    source: str
    R: tuple
    v4: Fraction | float
    R_stderr: tuple | None = None
    direct: Fraction | float | None = None
    S: tuple | None = None
    S_direct: Fraction | float | None = None
    edge_bound: float | None = None
    min_power: int = 1

    @property
    def total(self):
        return sum(self.R)

    @property
    def assembled(self):
        """``(V4 / n^2) * sum_k R^(k)``."""
        return self.v4 * self.total / (self.n * self.n)

    @property
    def recomposes(self) -> bool | None:
        if self.direct is None:
            return None
        if isinstance(self.direct, Fraction):
            return self.total == self.direct
        return math.isclose(self.total, self.direct, rel_tol=1e-9, abs_tol=1e-12)

    def to_dict(self) -> dict:
        def enc(v):
            if v is None:
                return None
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, (tuple, list)):
                return [enc(x) for x in v]
            return v

        return {
            "n": self.n, "s1": self.s1, "s2": self.s2, "source": self.source, "min_power": self.min_power,
            "R": enc(self.R), "R_stderr": enc(self.R_stderr), "R_sum": enc(self.total),
            "assembled": enc(self.assembled), "v4": enc(self.v4), "direct": enc(self.direct),
            "recomposes": self.recomposes, "S": enc(self.S), "S_direct": enc(self.S_direct),
            "edge_bound": self.edge_bound,
        }


def _splits(total: int, min_power: int):
    return [(a, total - a) for a in range(min_power, total - min_power + 1)]


def exact_R1(n: int, s1: int, s2: int, min_power: int = 1) -> Fraction:
    """``R^(1)`` from exact averaged moments (the diagonal is x-independent)."""
    f = lambda s: sum((wick.gue_moment(n, a) * wick.gue_moment(n, b) for a, b in _splits(2 * s, min_power)), Fraction(0))  # noqa: E731
    return n * n * f(s1) * f(s2)


def assemble_R(
    n: int,
    s1: int,
    s2: int,
    source: str = "oracle",
    *,
    estimates: Mapping | None = None,
    v4=Fraction(3, 64),
    min_power: int = 1,
    chi: tuple | None = None,
    h=Fraction(1, 8),
    with_S: bool = True,
    cap: int = wick.DEFAULT_DEGREE_CAP,
) -> RDecomposition:
    """Four-way split of the GUE bounding sum for the shared-diagonal-step class.

    With ``source="oracle"`` every term is exact and the split is checked
    against the direct double sum.  With ``source="montecarlo"`` the
    ``estimates`` mapping (from :func:`wignercorr.montecarlo.estimate_R_terms`)
    supplies ``R`` and ``R_stderr``.  ``min_power`` is the smallest power
    allowed in each split ``alpha + beta = 2s``; the default 1 drops the
    constant ``(A^0)_xx`` factors.
    """
    if s1 < 1 or s2 < 1:
        raise DomainError("s', s'' must be >= 1")
    edge = edge_constant(*chi, h=h) if chi else None
    if chi:
        s_chk = [floor_cbrt_fraction(Fraction(c) * n * n) for c in chi]
        if [s1 + 1, s2 + 1] != s_chk:
            warnings.warn(f"s'={s1}, s''={s2} do not equal floor((chi n^2)^(1/3)) - 1 = {[x - 1 for x in s_chk]}",
                          stacklevel=2)
    if source == "montecarlo":
        if estimates is None:
            raise DomainError("montecarlo source needs estimates")
        return RDecomposition(
            n, s1, s2, "montecarlo", tuple(estimates["R"]), float(v4),
            R_stderr=tuple(estimates.get("R_stderr") or ()) or None,
            S=tuple(estimates["S"]) if estimates.get("S") is not None else None,
            edge_bound=edge, min_power=min_power,
        )
    if source != "oracle":
        raise DomainError(f"unknown source {source!r}")
    if max(2 * s1, 2 * s2) > cap:
        raise wick.CapacityError(f"2s = {max(2 * s1, 2 * s2)} exceeds the oracle cap {cap}")
    E = lambda *fs: wick.expectation(n, *fs, cap=cap)  # noqa: E731
    ends = [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)]

    def parts(s, i, j, k, l):
        uu = cc = raw = Fraction(0)
        for a, b in _splits(2 * s, min_power):
            ua, ub = E(wick.Entry(a, i, j)), E(wick.Entry(b, k, l))
            c = E(wick.Entry(a, i, j, True), wick.Entry(b, k, l, True))
            uu += ua * ub
            cc += c
            raw += E(wick.Entry(a, i, j), wick.Entry(b, k, l))
        return uu, cc, raw

    R = [Fraction(0)] * 4
    direct = Fraction(0)
    S = [Fraction(0)] * 4
    S_direct = Fraction(0)
    for x, y in ends:
        u1, c1, d1 = parts(s1, x, x, y, y)
        u2, c2, d2 = parts(s2, x, x, y, y)
        R[0] += u1 * u2
        R[1] += u1 * c2
        R[2] += c1 * u2
        R[3] += c1 * c2
        direct += d1 * d2
        if with_S:
            u1, c1, d1 = parts(s1, x, y, x, y)
            u2, c2, d2 = parts(s2, x, y, x, y)
            S[0] += u1 * u2
            S[1] += u1 * c2
            S[2] += c1 * u2
            S[3] += c1 * c2
            S_direct += d1 * d2
    return RDecomposition(
        n, s1, s2, "oracle", tuple(R), Fraction(v4), direct=direct,
        S=tuple(S) if with_S else None, S_direct=S_direct if with_S else None,
        edge_bound=edge, min_power=min_power,
    )
