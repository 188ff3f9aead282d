"""Exact GUE mixed moments by Wick pairing.

The ensemble has ``E A_ab A_cd = delta_ad delta_bc / (4n)``.  A monomial is a
product of matrix-power entries ``(A^p)_xy`` and normalized traces
``L_p = Tr(A^p) / n``; any factor, and any parenthesized group of factors, may
be centered (``X° = X - E X``).

Centering is removed algebraically first: every factor becomes a linear
combination of raw products of atoms, and the expectation of each raw product
is a sum over perfect matchings of the ``D`` individual entry slots.  For one
matching the index variables are merged by union-find; a component holding two
different endpoint labels kills the term, and every label-free component
contributes a factor ``n``.  So each raw product evaluates to

    sum_matchings n**(free components - D/2 - #traces) * 4**(-D/2)

which only depends on the equality pattern of the endpoint labels.  That
Laurent polynomial is cached per pattern.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

from .errors import CapacityError, DomainError

DEFAULT_DEGREE_CAP = 12


# --------------------------------------------------------------------------
# monomial description
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Entry:
    """``(A^power)_{row,col}``, optionally centered.  Rows/cols are 1-based."""

    power: int
    row: int
    col: int
    centered: bool = False

    def __str__(self):
        return f"A{self.power}[{self.row},{self.col}]" + ("o" if self.centered else "")


@dataclass(frozen=True)
class Trace:
    """``L_power = n^-1 Tr A^power``, optionally centered."""

    power: int
    centered: bool = False

    def __str__(self):
        return f"L{self.power}" + ("o" if self.centered else "")


@dataclass(frozen=True)
class Group:
    """Product of factors treated as one random variable, centered by default."""

    factors: tuple
    centered: bool = True

    def __init__(self, factors: Iterable, centered: bool = True):
        object.__setattr__(self, "factors", tuple(factors))
        object.__setattr__(self, "centered", centered)

    def __str__(self):
        return "[" + " ".join(str(f) for f in self.factors) + "]" + ("o" if self.centered else "")


Factor = Union[Entry, Trace, Group]


@dataclass(frozen=True)
class MonomialSpec:
    n: int
    factors: tuple

    def __init__(self, n: int, factors: Iterable[Factor]):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "factors", tuple(factors))

    def degree(self) -> int:
        return _degree(self.factors)

    def __str__(self):
        return " ".join(str(f) for f in self.factors)


def _degree(factors) -> int:
    total = 0
    for f in factors:
        total += _degree(f.factors) if isinstance(f, Group) else f.power
    return total


def _validate(n: int, factors) -> None:
    if n < 1:
        raise DomainError("n must be >= 1")
    for f in factors:
        if isinstance(f, Group):
            _validate(n, f.factors)
            continue
        if f.power < 0:
            raise DomainError(f"negative power in {f}")
        if isinstance(f, Entry) and not (1 <= f.row <= n and 1 <= f.col <= n):
            raise DomainError(f"endpoint of {f} outside 1..{n}")


_TOKEN = re.compile(r"\s*(?:(A)(\d+)\[(\d+),(\d+)\](o?)|(L)(\d+)(o?)|(\[)|(\])(o?))")


def parse_monomial(text: str) -> tuple:
    """Parse ``"A2[1,1]o L1o [L2o L1o]o"`` into factors.

    ``o`` after a factor or a closing bracket marks centering.  Brackets
    without a trailing ``o`` just group.
    """
    stack: list[list] = [[]]
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse monomial at {text[pos:]!r}")
        pos = m.end()
        if m.group(1):
            stack[-1].append(Entry(int(m.group(2)), int(m.group(3)), int(m.group(4)), bool(m.group(5))))
        elif m.group(6):
            stack[-1].append(Trace(int(m.group(7)), bool(m.group(8))))
        elif m.group(9):
            stack.append([])
        else:
            if len(stack) == 1:
                raise DomainError("unbalanced ']' in monomial")
            inner = stack.pop()
            stack[-1].append(Group(inner, centered=bool(m.group(11))))
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if len(stack) != 1:
        raise DomainError("unbalanced '[' in monomial")
    return tuple(stack[0])


# --------------------------------------------------------------------------
# raw products and their Wick evaluation
# --------------------------------------------------------------------------

# An atom is ("A", p, x, y) or ("L", p) with p >= 1.  A raw product is a
# sorted tuple of atoms; a polynomial is a dict {raw product: coefficient}.

def _atom_poly(f) -> dict:
    if isinstance(f, Entry):
        if f.power == 0:
            return {(): Fraction(int(f.row == f.col))}
        return {(("A", f.power, f.row, f.col),): Fraction(1)}
    if f.power == 0:
        return {(): Fraction(1)}
    return {(("L", f.power),): Fraction(1)}


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            k = tuple(sorted(k1 + k2))
            out[k] = out.get(k, 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


class _Evaluator:
    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap

    def raw(self, atoms: tuple) -> Fraction:
        deg = sum(a[1] for a in atoms)
        if deg % 2:
            return Fraction(0)
        if deg > self.cap:
            raise CapacityError(f"total degree {deg} exceeds the Wick oracle cap {self.cap}")
        key, ntr = _canonical(atoms)
        return _eval_laurent(_raw_laurent(key), self.n) / Fraction(self.n) ** ntr

    def expect(self, poly: dict) -> Fraction:
        return sum((c * self.raw(k) for k, c in poly.items()), Fraction(0))

    def expand(self, factors) -> dict:
        poly = {(): Fraction(1)}
        for f in factors:
            if isinstance(f, Group):
                fp = self.expand(f.factors)
            else:
                fp = _atom_poly(f)
            if f.centered:
                mean = self.expect(fp)
                fp = dict(fp)
                fp[()] = fp.get((), 0) - mean
                fp = {k: c for k, c in fp.items() if c}
            poly = _mul(poly, fp)
            if not poly:
                break
        return poly


def _canonical(atoms: tuple) -> tuple[tuple, int]:
    """Relabel endpoints by first occurrence; returns (key, number of traces)."""
    relabel: dict = {}
    out = []
    ntr = 0
    for a in atoms:
        if a[0] == "L":
            out.append(a)
            ntr += 1
        else:
            x = relabel.setdefault(a[2], len(relabel))
            y = relabel.setdefault(a[3], len(relabel))
            out.append(("A", a[1], x, y))
    return tuple(out), ntr


@lru_cache(maxsize=None)
def _matchings(m: int) -> tuple:
    """All perfect matchings of range(m), each as a tuple of pairs."""
    if m == 0:
        return ((),)
    out = []
    for k in range(1, m):
        rest = [i for i in range(1, m) if i != k]
        for sub in _matchings(m - 2):
            out.append(((0, k),) + tuple((rest[a], rest[b]) for a, b in sub))
    return tuple(out)


def _slots(key: tuple) -> tuple[list, int, int]:
    """Entry slots (row var, col var) for a canonical raw product.

    Variables ``0..L-1`` are the endpoint labels, the rest are summed.
    """
    nlabels = 1 + max((max(a[2], a[3]) for a in key if a[0] == "A"), default=-1)
    nxt = nlabels
    slots = []
    for a in key:
        p = a[1]
        if a[0] == "A":
            chain = [a[2]] + list(range(nxt, nxt + p - 1)) + [a[3]]
            nxt += p - 1
        else:
            chain = list(range(nxt, nxt + p)) + [nxt]
            nxt += p
        slots.extend(zip(chain[:-1], chain[1:]))
    return slots, nlabels, nxt


@lru_cache(maxsize=None)
def _raw_laurent(key: tuple) -> tuple:
    """``{exponent of n: count}`` for E of a canonical raw product, before the
    ``4**(-D/2)`` and trace normalizations."""
    slots, nlabels, nvars = _slots(key)
    D = len(slots)
    counts: Counter = Counter()
    for matching in _matchings(D):
        parent = list(range(nvars))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        ok = True
        for i, j in matching:
            (a, b), (c, d) = slots[i], slots[j]
            for u, v in ((a, d), (b, c)):
                ru, rv = find(u), find(v)
                if ru == rv:
                    continue
                if ru < nlabels and rv < nlabels:
                    ok = False
                    break
                # keep the label as the root so label-carrying components are recognisable
                if rv < nlabels:
                    ru, rv = rv, ru
                parent[rv] = ru
            if not ok:
                break
        if not ok:
            continue
        free = sum(1 for v in range(nlabels, nvars) if find(v) == v)
        counts[free - D // 2] += 1
    return tuple(sorted(counts.items())), D


def _eval_laurent(lau: tuple, n: int) -> Fraction:
    terms, D = lau
    total = sum((c * Fraction(n) ** e for e, c in terms), Fraction(0))
    return total / 4 ** (D // 2)


def mixed_moment(spec: MonomialSpec, cap: int = DEFAULT_DEGREE_CAP) -> Fraction:
    """Exact GUE expectation of ``spec``.

    Odd total degree gives 0.  Any raw product of degree above ``cap`` raises
    :class:`CapacityError`.
    """
    _validate(spec.n, spec.factors)
    if spec.degree() % 2:
        return Fraction(0)
    ev = _Evaluator(spec.n, cap)
    return ev.expect(ev.expand(spec.factors))


def expectation(n: int, *factors: Factor, cap: int = DEFAULT_DEGREE_CAP) -> Fraction:
    return mixed_moment(MonomialSpec(n, factors), cap=cap)


# --------------------------------------------------------------------------
# slow reference: explicit index expansion
# --------------------------------------------------------------------------

def _edge_moment(n: int, edges: Sequence[tuple[int, int]]) -> Fraction:
    """E of a product of GUE entries from closed-form Gaussian moments."""
    diag: Counter = Counter()
    off: Counter = Counter()
    for a, b in edges:
        if a == b:
            diag[a] += 1
        else:
            off[(a, b)] += 1
    v = Fraction(1, 4 * n)
    val = Fraction(1)
    for m in diag.values():
        if m % 2:
            return Fraction(0)
        val *= math.prod(range(m - 1, 0, -2)) * v ** (m // 2)
    seen = set()
    for (a, b), j in off.items():
        if (a, b) in seen:
            continue
        seen.add((b, a))
        if off.get((b, a), 0) != j:
            return Fraction(0)
        val *= math.factorial(j) * v**j
    for (a, b) in off:
        if (b, a) not in off:
            return Fraction(0)
    return val


def mixed_moment_by_paths(spec: MonomialSpec, max_terms: int = 2_000_000) -> Fraction:
    """Same expectation as :func:`mixed_moment` by summing over all index
    paths.  Exponential in ``n``; intended as an independent check."""
    _validate(spec.n, spec.factors)
    n = spec.n

    def raw(atoms: tuple) -> Fraction:
        chains = []
        nfree = 0
        for a in atoms:
            p = a[1]
            if a[0] == "A":
                chains.append(("A", a[2], a[3], nfree, p))
                nfree += p - 1
            else:
                chains.append(("L", None, None, nfree, p))
                nfree += p
        if n**nfree > max_terms:
            raise CapacityError(f"{n}**{nfree} index paths exceed {max_terms}")
        total = Fraction(0)
        for idx in itertools.product(range(1, n + 1), repeat=nfree):
            edges = []
            for kind, x, y, off, p in chains:
                if kind == "A":
                    walk = [x, *idx[off:off + p - 1], y]
                else:
                    walk = [*idx[off:off + p], idx[off]]
                edges.extend(zip(walk[:-1], walk[1:]))
            total += _edge_moment(n, edges)
        ntr = sum(1 for a in atoms if a[0] == "L")
        return total / Fraction(n) ** ntr

    ev = _Evaluator(n, cap=10**9)
    ev.raw = raw  # type: ignore[method-assign]
    return ev.expect(ev.expand(spec.factors))


# --------------------------------------------------------------------------
# exact GUE moments
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _hz(k: int) -> tuple:
    """Harer-Zagier polynomials ``E Tr(a^{2k})`` for unit-variance GUE as
    coefficient tuples in n (index = power)."""
    if k == 0:
        return (0, 1)
    if k == 1:
        return (0, 0, 1)
    prev, cur = _hz(k - 2), _hz(k - 1)
    kk = k - 1  # (kk+2) T_{kk+1} = (4kk+2) n T_kk + kk(4kk^2-1) T_{kk-1}
    out = [0] * (len(cur) + 1)
    for i, c in enumerate(cur):
        out[i + 1] += (4 * kk + 2) * c
    for i, c in enumerate(prev):
        out[i] += kk * (4 * kk * kk - 1) * c
    assert all(c % (kk + 2) == 0 for c in out)
    return tuple(c // (kk + 2) for c in out)


def gue_moment(n: int, p: int) -> Fraction:
    """``M_p = E L_p`` exactly, for any even or odd ``p >= 0``."""
    if n < 1 or p < 0:
        raise DomainError("need n >= 1 and p >= 0")
    if p % 2:
        return Fraction(0)
    k = p // 2
    tr = sum(c * n**i for i, c in enumerate(_hz(k)))
    return Fraction(tr, n * (4 * n) ** k)


# --------------------------------------------------------------------------
# tables of U, D, P, Q, T
# --------------------------------------------------------------------------

def compositions(total: int, parts: int) -> Iterator[tuple]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for cut in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cut + (total,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def _check_cap(deg: int, cap: int) -> None:
    if deg > cap:
        raise CapacityError(f"total degree {deg} exceeds the Wick oracle cap {cap}")


def u_value(n: int, s: int, x: int, y: int, cap: int = DEFAULT_DEGREE_CAP) -> Fraction:
    """``U_{2s}(x,y) = E (A^{2s})_xy``."""
    _check_cap(2 * s, cap)
    return expectation(n, Entry(2 * s, x, y), cap=cap)


def d_value(n: int, s: int, r: int, x: int, y: int, cap: int = DEFAULT_DEGREE_CAP) -> Fraction:
    """``D^{(r)}_{2s}(x,y)``: sum over compositions of ``|E (A^a1)°_xy L°_a2 ... L°_ar|``."""
    if r == 0:
        return Fraction(int(s == 0))
    if r == 1 or r > 2 * s:
        return Fraction(0)
    _check_cap(2 * s, cap)
    total = Fraction(0)
    for alpha in compositions(2 * s, r):
        fs = [Entry(alpha[0], x, y, True)] + [Trace(a, True) for a in alpha[1:]]
        total += abs(expectation(n, *fs, cap=cap))
    return total


def _pair_sum(n, s, r, e1, e2, cap) -> Fraction:
    _check_cap(2 * s, cap)
    total = Fraction(0)
    for comp in compositions(2 * s, r):
        a, b, *gam = comp
        fs = [e1(a), e2(b)] + [Trace(g, True) for g in gam]
        total += abs(expectation(n, *fs, cap=cap))
    return total


def _pqt_guard(r: int, s: int) -> bool:
    return r >= 2 and 2 * s >= r


def p_value(n: int, s: int, r: int, x: int, y: int, cap: int = DEFAULT_DEGREE_CAP) -> Fraction:
    """Non-crossing term: ``(A^a)°_xx (A^b)°_yy`` with ``x != y``."""
    if x == y:
        raise DomainError("non-crossing term needs x != y")
    if not _pqt_guard(r, s):
        return Fraction(0)
    return _pair_sum(n, s, r, lambda a: Entry(a, x, x, True), lambda b: Entry(b, y, y, True), cap)


def q_value(n: int, s: int, r: int, x: int, y: int, cap: int = DEFAULT_DEGREE_CAP) -> Fraction:
    """Crossing term: ``(A^a)°_xy (A^b)°_yx`` with ``x != y``."""
    if x == y:
        raise DomainError("crossing term needs x != y")
    if not _pqt_guard(r, s):
        return Fraction(0)
    return _pair_sum(n, s, r, lambda a: Entry(a, x, y, True), lambda b: Entry(b, y, x, True), cap)


def t_value(n: int, s: int, r: int, x: int, cap: int = DEFAULT_DEGREE_CAP) -> Fraction:
    """Diagonal term: ``(A^a)°_xx (A^b)°_xx``."""
    if not _pqt_guard(r, s):
        return Fraction(0)
    return _pair_sum(n, s, r, lambda a: Entry(a, x, x, True), lambda b: Entry(b, x, x, True), cap)


@dataclass
class MomentTable:
    """Exact values keyed by ``(quantity, s, r, x, y)``.

    ``s`` is the half-degree: the entry for ``("U", s, 0, x, y)`` is
    ``U_{2s}(x,y)``.  ``r`` is 0 for U and ``y`` is 0 for T and the averaged
    ``Dbar``.
    """

    n: int
    s_max: int
    r_max: int = 0
    values: dict = field(default_factory=dict)

    def get(self, quantity: str, s: int, r: int = 0, x: int = 0, y: int = 0) -> Fraction:
        return self.values[(quantity, s, r, x, y)]

    def sup(self, quantity: str, s: int, r: int = 0) -> Fraction:
        vals = [v for (q, ss, rr, _, _), v in self.values.items() if q == quantity and ss == s and rr == r]
        if not vals:
            raise KeyError((quantity, s, r))
        return max(vals)

    def merge(self, other: "MomentTable") -> "MomentTable":
        if other.n != self.n:
            raise DomainError("cannot merge tables for different n")
        out = MomentTable(self.n, max(self.s_max, other.s_max), max(self.r_max, other.r_max), dict(self.values))
        out.values.update(other.values)
        return out

    def rows(self) -> list[tuple]:
        return [
            (q, s, r, x, y, v.numerator, v.denominator)
            for (q, s, r, x, y), v in sorted(self.values.items())
        ]

    def to_csv(self, fh=None) -> str:
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("quantity", "s", "r", "x", "y", "numerator", "denominator"))
        w.writerows(self.rows())
        return buf.getvalue() if fh is None else ""


def _endpoints(n: int):
    return itertools.product(range(1, n + 1), repeat=2)


def u_table(n: int, s_max: int, cap: int = DEFAULT_DEGREE_CAP) -> MomentTable:
    _check_cap(2 * s_max, cap)
    t = MomentTable(n, s_max)
    for s in range(s_max + 1):
        for x, y in _endpoints(n):
            t.values[("U", s, 0, x, y)] = u_value(n, s, x, y, cap)
    return t


def _delta(s_max: int, r_max: int):
    for s in range(1, s_max + 1):
        for r in range(2, min(2 * s, r_max) + 1):
            yield s, r


def d_table(n: int, s_max: int, r_max: int, cap: int = DEFAULT_DEGREE_CAP) -> MomentTable:
    _check_cap(2 * s_max, cap)
    t = MomentTable(n, s_max, r_max)
    for s, r in _delta(s_max, r_max):
        diag = Fraction(0)
        for x, y in _endpoints(n):
            v = d_value(n, s, r, x, y, cap)
            t.values[("D", s, r, x, y)] = v
            if x == y:
                diag += v
        t.values[("Dbar", s, r, 0, 0)] = diag / n
    return t


def pqt_table(n: int, s_max: int, r_max: int, cap: int = DEFAULT_DEGREE_CAP) -> MomentTable:
    _check_cap(2 * s_max, cap)
    t = MomentTable(n, s_max, r_max)
    for s, r in _delta(s_max, r_max):
        for x, y in _endpoints(n):
            if x == y:
                t.values[("T", s, r, x, 0)] = t_value(n, s, r, x, cap)
            else:
                t.values[("P", s, r, x, y)] = p_value(n, s, r, x, y, cap)
                t.values[("Q", s, r, x, y)] = q_value(n, s, r, x, y, cap)
    return t


# --------------------------------------------------------------------------
# identity checks
# --------------------------------------------------------------------------

def _report(name: str, lhs: Fraction, rhs: Fraction, **where) -> dict:
    return {"check": name, **where, "lhs": str(lhs), "rhs": str(rhs), "pass": lhs == rhs}


def verify_entry_ibp(n: int, k: int, x: int, y: int, u: int, v: int, cap: int = DEFAULT_DEGREE_CAP) -> dict:
    """``E A_xy (A^k)_uv = (4n)^-1 sum_j E (A^j)_uy (A^{k-1-j})_xv``."""
    lhs = expectation(n, Entry(1, x, y), Entry(k, u, v), cap=cap)
    rhs = sum(
        (expectation(n, Entry(j, u, y), Entry(k - 1 - j, x, v), cap=cap) for j in range(k)),
        Fraction(0),
    ) / (4 * n)
    return _report("entry_ibp", lhs, rhs, n=n, k=k, endpoints=[x, y, u, v])


def verify_moment_recursion(n: int, s: int, x: int, y: int, cap: int = DEFAULT_DEGREE_CAP) -> dict:
    """``U_{2s}(x,y)`` against its integration-by-parts split.

    ``U_{2s} = 1/4 sum_j M_{2j} U_{2s-2-2j} + 1/4 sum_{a+b=2s-2} E (A^a)°_xy L°_b``.
    Also reports the intermediate form ``(4n)^-1 sum_t sum_j E (A^j)_tt (A^{2s-2-j})_xy``.
    """
    if s < 1:
        raise DomainError("need s >= 1")
    lhs = u_value(n, s, x, y, cap)
    middle = sum(
        (
            expectation(n, Entry(j, t, t), Entry(2 * s - 2 - j, x, y), cap=cap)
            for t in range(1, n + 1)
            for j in range(2 * s - 1)
        ),
        Fraction(0),
    ) / (4 * n)
    mu = sum((gue_moment(n, 2 * j) * u_value(n, s - 1 - j, x, y, cap) for j in range(s)), Fraction(0)) / 4
    dpart = sum(
        (expectation(n, Entry(a, x, y, True), Trace(2 * s - 2 - a, True), cap=cap) for a in range(2 * s - 1)),
        Fraction(0),
    ) / 4
    rep = _report("moment_recursion", lhs, mu + dpart, n=n, s=s, endpoints=[x, y])
    rep.update(moment_part=str(mu), centered_part=str(dpart), intermediate=str(middle))
    rep["pass"] = rep["pass"] and middle == lhs
    return rep


def ten_terms(
    n: int, alpha: int, beta: int, gammas: Sequence[int], a: int, b: int, c: int, d: int,
    cap: int = DEFAULT_DEGREE_CAP,
) -> list[Fraction]:
    """The ten pieces of ``E (A^alpha)°_ab (A^beta)°_cd prod L°_gamma`` after one
    integration by parts on the first entry."""
    if alpha < 1:
        raise DomainError("alpha must be >= 1")
    E = lambda *fs: expectation(n, *fs, cap=cap)  # noqa: E731
    U = lambda p, i, j: u_value(n, p // 2, i, j, cap) if p % 2 == 0 else Fraction(0)  # noqa: E731
    M = lambda p: gue_moment(n, p)  # noqa: E731
    G = [Trace(g, True) for g in gammas]
    Bcd = Entry(beta, c, d, True)
    J = [Fraction(0)] * 10
    for j in range(alpha - 1):
        Y = Entry(alpha - 2 - j, a, b, True)
        Lj = Trace(j, True)
        J[0] += M(j) * E(Y, Bcd, *G)
        J[1] += U(alpha - 2 - j, a, b) * E(Bcd, Lj, *G)
        J[2] += E(Y, Bcd, Lj, *G)
        J[3] -= E(Lj, Y) * E(Bcd, *G)
    for j in range(beta):
        p = alpha + beta - 2 - j
        J[4] += U(j, a, d) * U(p, c, b) * E(*G)
        J[5] += U(p, c, b) * E(Entry(j, a, d, True), *G)
        J[6] += U(j, a, d) * E(Entry(p, c, b, True), *G)
        J[7] += E(Entry(j, a, d, True), Entry(p, c, b, True), *G)
    for l, g in enumerate(gammas):
        rest = G[:l] + G[l + 1:]
        p = alpha + g - 2
        J[8] += g * U(p, a, b) * E(Bcd, *rest)
        J[9] += g * E(Entry(p, a, b, True), Bcd, *rest)
    scale = [Fraction(1, 4)] * 4 + [Fraction(1, 4 * n)] * 4 + [Fraction(1, 4 * n * n)] * 2
    return [s * v for s, v in zip(scale, J)]


def verify_ten_term(
    n: int, alpha: int, beta: int, gammas: Sequence[int], a: int, b: int, c: int, d: int,
    cap: int = DEFAULT_DEGREE_CAP,
) -> dict:
    if alpha < 2:
        raise DomainError("alpha must be >= 2")
    _check_cap(alpha + beta + sum(gammas), cap)
    lhs = expectation(n, Entry(alpha, a, b, True), Entry(beta, c, d, True), *(Trace(g, True) for g in gammas), cap=cap)
    parts = ten_terms(n, alpha, beta, gammas, a, b, c, d, cap)
    rep = _report(
        "ten_term", lhs, sum(parts, Fraction(0)), n=n, alpha=alpha, beta=beta,
        gammas=list(gammas), endpoints=[a, b, c, d],
    )
    rep["terms"] = [str(p) for p in parts]
    return rep


def ibp_report(ns: Iterable[int] = (1, 2, 3), k_max: int = 5, s_max: int = 3) -> dict:
    """Entry-level and moment-level integration by parts over all endpoints."""
    checks = []
    for n in ns:
        for k in range(k_max + 1):
            for x, y, u, v in itertools.product(range(1, n + 1), repeat=4):
                checks.append(verify_entry_ibp(n, k, x, y, u, v))
        for s in range(1, s_max + 1):
            for x, y in _endpoints(n):
                checks.append(verify_moment_recursion(n, s, x, y))
    failed = [c for c in checks if not c["pass"]]
    return {"kind": "ibp", "checks": len(checks), "failed": failed, "pass": not failed}


def ten_term_report(ns: Iterable[int] = (2, 3), max_degree: int = 8) -> dict:
    """Ten-term decomposition over every (alpha, beta, gammas) of total degree
    up to ``max_degree`` and every endpoint pattern."""
    checks = []
    for n in ns:
        ends = list(itertools.product(range(1, n + 1), repeat=4))
        for deg in range(2, max_degree + 1):
            for r in range(2, deg + 1):
                for comp in compositions(deg, r):
                    alpha, beta, *gam = comp
                    if alpha < 2:
                        continue
                    for e in ends:
                        checks.append(verify_ten_term(n, alpha, beta, gam, *e))
    failed = [c for c in checks if not c["pass"]]
    return {"kind": "ten_term", "checks": len(checks), "failed": failed, "pass": not failed}
