"""Path-pair expansion of the covariance of trace moments at tiny sizes.

``Tr W^{2s} = sum over closed index walks of length 2s`` of the product of
entries along the walk, so the covariance of two traces is a sum over pairs
of walks.  Everything here is exact and exhaustive, hence the hard guard on
``n`` and ``s' + s''``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .errors import CapacityError, DomainError
from .laws import DIAG_VAR, OFFDIAG_VAR, EntryLaw, get_law

MAX_N = 3
MAX_S_TOTAL = 4

CLASSES = ("no-common-step", "simply-correlated", "multiplicity-4+", "other")


@dataclass(frozen=True)
class ClosedPath:
    """Vertices ``i_0 .. i_{L-1}``; the step ``i_{L-1} -> i_0`` closes it."""

    vertices: tuple

    def __init__(self, vertices):
        object.__setattr__(self, "vertices", tuple(vertices))

    def __len__(self):
        return len(self.vertices)

    def steps(self) -> list[tuple[int, int]]:
        v = self.vertices
        return [(v[t], v[(t + 1) % len(v)]) for t in range(len(v))]

    def edge_counts(self) -> Counter:
        """Undirected edge -> number of traversals."""
        return Counter(tuple(sorted(st)) for st in self.steps())

    def is_even(self) -> bool:
        return all(c % 2 == 0 for c in self.edge_counts().values())


@dataclass(frozen=True)
class PathPair:
    first: ClosedPath
    second: ClosedPath

    @classmethod
    def of(cls, first, second) -> "PathPair":
        return cls(ClosedPath(first), ClosedPath(second))

    def multiplicities(self) -> dict:
        """Undirected edge -> (count in first, count in second)."""
        c1, c2 = self.first.edge_counts(), self.second.edge_counts()
        return {e: (c1.get(e, 0), c2.get(e, 0)) for e in set(c1) | set(c2)}

    def common_edges(self) -> dict:
        return {e: c for e, c in self.multiplicities().items() if c[0] and c[1]}


# --------------------------------------------------------------------------
# weights
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _offdiag_moment(law: EntryLaw, a: int, b: int) -> Fraction:
    """``E[w^a conj(w)^b]`` for ``w = X + iY``, ``X, Y`` iid with variance 1/8."""
    total = Fraction(0)
    for j in range(a + 1):
        for k in range(b + 1):
            p, q = a - j, b - k  # powers of iY and of -iY
            if (p + q) % 2 or (j + k) % 2:
                continue
            sign = (-1) ** q * (-1) ** ((p + q) // 2)
            total += (
                sign * math.comb(a, j) * math.comb(b, k)
                * law.moment(OFFDIAG_VAR, j + k) * law.moment(OFFDIAG_VAR, p + q)
            )
    return total


def _directed_counts(steps) -> Counter:
    return Counter(steps)


def _weight_from_counts(counts: Counter, law: EntryLaw, n: int) -> Fraction:
    val = Fraction(1)
    seen = set()
    length = 0
    for (u, v), c in counts.items():
        length += c
        if u == v:
            val *= law.moment(DIAG_VAR, c)
        else:
            e = (min(u, v), max(u, v))
            if e in seen:
                continue
            seen.add(e)
            val *= _offdiag_moment(law, counts.get(e, 0), counts.get((e[1], e[0]), 0))
        if not val:
            return Fraction(0)
    return val / Fraction(n) ** (length // 2) if length % 2 == 0 else val / Fraction(n) ** Fraction(length, 2)


def path_weight(path: ClosedPath, law: EntryLaw, n: int) -> Fraction:
    """Expectation of the entry product along one closed path."""
    if len(path) % 2:
        return Fraction(0)
    return _weight_from_counts(_directed_counts(path.steps()), law, n)


def weight(pair: PathPair, law: EntryLaw, n: int) -> Fraction:
    """Expectation of the product of all entries along both paths.

    Steps ``u -> v`` with ``u < v`` carry ``w_uv / sqrt(n)`` and ``v -> u`` its
    conjugate; diagonal steps carry the real ``x_uu / sqrt(n)``.
    """
    for v in pair.first.vertices + pair.second.vertices:
        if not 1 <= v <= n:
            raise DomainError(f"vertex {v} outside 1..{n}")
    if (len(pair.first) + len(pair.second)) % 2:
        return Fraction(0)
    return _weight_from_counts(_directed_counts(pair.first.steps() + pair.second.steps()), law, n)


def connected_weight(pair: PathPair, law: EntryLaw, n: int) -> Fraction:
    """``weight(pair) - weight(first) * weight(second)``; the term of the covariance."""
    return weight(pair, law, n) - path_weight(pair.first, law, n) * path_weight(pair.second, law, n)


# --------------------------------------------------------------------------
# classification and two-step reduction
# --------------------------------------------------------------------------

@dataclass
class Classification:
    label: str
    instants: tuple | None = None  # (t', t'') for simply-correlated pairs
    common: dict = field(default_factory=dict)  # edge -> (count first, count second)

    @property
    def single_multiplicity4(self) -> bool:
        """Exactly one common edge, seen four times in total."""
        return len(self.common) == 1 and sum(next(iter(self.common.values()))) == 4


def classify(pair: PathPair) -> Classification:
    common = pair.common_edges()
    if not common:
        return Classification("no-common-step", None, common)
    simple = {e for e, (a, b) in common.items() if a + b == 2}
    if simple:
        s1, s2 = pair.first.steps(), pair.second.steps()
        t1 = next(t for t, st in enumerate(s1) if tuple(sorted(st)) in simple)
        edge = tuple(sorted(s1[t1]))
        t2 = next(t for t, st in enumerate(s2) if tuple(sorted(st)) == edge)
        return Classification("simply-correlated", (t1, t2), common)
    if all(a + b >= 4 for a, b in common.values()):
        return Classification("multiplicity-4+", None, common)
    return Classification("other", None, common)


def reduce_two_steps(pair: PathPair) -> ClosedPath:
    """Glue a simply-correlated pair along its first shared step.

    The shared step ``(t', t'+1)`` of the first path is removed together with
    its inverse ``(t'', t''+1)`` in the second path, giving a closed path of
    length ``2s' + 2s'' - 2``.
    """
    cl = classify(pair)
    if cl.label != "simply-correlated":
        raise DomainError(f"pair is {cl.label}, not simply-correlated")
    t1, t2 = cl.instants
    a, b = pair.first.vertices, pair.second.vertices
    L1, L2 = len(a), len(b)
    if not (a[t1] == b[(t2 + 1) % L2] and a[(t1 + 1) % L1] == b[t2]):
        raise DomainError("shared step is passed in the same orientation; gluing is undefined")
    walk = list(a[: t1 + 1])
    walk += [b[(t2 + 2 + k) % L2] for k in range(L2 - 1)]
    walk += [a[k % L1] for k in range(t1 + 2, L1 + 1)]
    return ClosedPath(walk[:-1])


# --------------------------------------------------------------------------
# exhaustive sums
# --------------------------------------------------------------------------

def _guard(n: int, s1: int, s2: int) -> None:
    if n < 1 or s1 < 0 or s2 < 0:
        raise DomainError("need n >= 1 and s', s'' >= 0")
    if n > MAX_N or s1 + s2 > MAX_S_TOTAL:
        raise CapacityError(
            f"exhaustive enumeration limited to n <= {MAX_N}, s'+s'' <= {MAX_S_TOTAL} (got n={n}, s'+s''={s1 + s2})"
        )


def all_paths(n: int, length: int) -> Iterator[ClosedPath]:
    for v in itertools.product(range(1, n + 1), repeat=length):
        yield ClosedPath(v)


def _class_chunk(args) -> tuple[dict, Fraction, Fraction]:
    n, s1, s2, law_spec, lead = args
    law = get_law(law_spec) if isinstance(law_spec, str) else law_spec
    sums = {c: Fraction(0) for c in CLASSES}
    single4 = only2 = Fraction(0)
    seconds = list(all_paths(n, 2 * s2))
    w2 = [path_weight(p, law, n) for p in seconds]
    for rest in itertools.product(range(1, n + 1), repeat=2 * s1 - 1):
        p1 = ClosedPath((lead,) + rest)
        w1 = path_weight(p1, law, n)
        for p2, pw2 in zip(seconds, w2):
            pair = PathPair(p1, p2)
            cw = weight(pair, law, n) - w1 * pw2
            if not cw:
                continue
            cl = classify(pair)
            sums[cl.label] += cw
            if cl.single_multiplicity4:
                single4 += cw
            if all(a + b == 2 for a, b in pair.multiplicities().values()):
                only2 += cw
    return sums, single4, only2


def sum_by_class(n: int, s1: int, s2: int, law: EntryLaw | str, workers: int | None = None) -> dict:
    """Covariance split by class of the path pair.

    Keys are the four classes (a partition), ``total``, and two sub-sums:
    ``single-multiplicity-4`` over pairs whose only common edge is seen exactly
    four times, and ``only-multiplicity-2`` over pairs in which every edge is
    seen exactly twice (these depend on second moments only).
    """
    _guard(n, s1, s2)
    if s1 == 0 or s2 == 0:
        zero = Fraction(0)
        return {**{c: zero for c in CLASSES}, "total": zero, "single-multiplicity-4": zero, "only-multiplicity-2": zero}
    law_arg = law.label() if isinstance(law, EntryLaw) and workers and workers > 1 else law
    tasks = [(n, s1, s2, law_arg, lead) for lead in range(1, n + 1)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_class_chunk, tasks))
    else:
        parts = [_class_chunk(t) for t in tasks]
    out = {c: sum((p[0][c] for p in parts), Fraction(0)) for c in CLASSES}
    out["total"] = sum(out[c] for c in CLASSES)
    out["single-multiplicity-4"] = sum((p[1] for p in parts), Fraction(0))
    out["only-multiplicity-2"] = sum((p[2] for p in parts), Fraction(0))
    return out


def covariance_routes(n: int, s1: int, s2: int, law: EntryLaw) -> dict:
    """The covariance two ways: full expansion ``E[T1 T2] - E T1 E T2`` and the
    sum of connected weights over pairs that share a step."""
    _guard(n, s1, s2)
    firsts = list(all_paths(n, 2 * s1))
    seconds = list(all_paths(n, 2 * s2))
    w1 = [path_weight(p, law, n) for p in firsts]
    w2 = [path_weight(p, law, n) for p in seconds]
    joint = Fraction(0)
    shared = Fraction(0)
    for p1, a in zip(firsts, w1):
        e1 = p1.edge_counts()
        for p2, b in zip(seconds, w2):
            w = weight(PathPair(p1, p2), law, n)
            joint += w
            if any(e in e1 for e in p2.edge_counts()):
                shared += w - a * b
    full = joint - sum(w1, Fraction(0)) * sum(w2, Fraction(0))
    return {"full_expansion": full, "shared_step_sum": shared}


def covariance_bruteforce(n: int, s1: int, s2: int, law: EntryLaw) -> Fraction:
    """Exact ``Cov(Tr W^{2s'}, Tr W^{2s''})``; both routes must agree."""
    r = covariance_routes(n, s1, s2, law)
    if r["full_expansion"] != r["shared_step_sum"]:
        raise ArithmeticError(f"path routes disagree: {r}")
    return r["full_expansion"]


def iter_pair_records(n: int, s1: int, s2: int, law: EntryLaw) -> Iterator[dict]:
    """Every pair with nonzero connected weight, with its class (for CSV dumps)."""
    _guard(n, s1, s2)
    for p1 in all_paths(n, 2 * s1):
        for p2 in all_paths(n, 2 * s2):
            pair = PathPair(p1, p2)
            cw = connected_weight(pair, law, n)
            if cw:
                cl = classify(pair)
                yield {
                    "first": " ".join(map(str, p1.vertices)),
                    "second": " ".join(map(str, p2.vertices)),
                    "class": cl.label,
                    "weight": str(cw),
                }


def reduction_report(n: int, s1: int, s2: int, law: EntryLaw) -> dict:
    """Check ``4n * weight(pair) == weight(reduced)`` on every simply-correlated
    pair whose removed edge occurs nowhere else, plus evenness and orientation."""
    _guard(n, s1, s2)
    checked = failures = nonzero = 0
    first_failure = None
    for p1 in all_paths(n, 2 * s1):
        for p2 in all_paths(n, 2 * s2):
            pair = PathPair(p1, p2)
            cl = classify(pair)
            if cl.label != "simply-correlated":
                continue
            w = weight(pair, law, n)
            t1, t2 = cl.instants
            a, b = p1.vertices, p2.vertices
            inverse = a[t1] == b[(t2 + 1) % len(b)] and a[(t1 + 1) % len(a)] == b[t2]
            ok = True
            if not inverse:
                ok = w == 0
            else:
                red = reduce_two_steps(pair)
                ok = len(red) == len(a) + len(b) - 2 and 4 * n * w == path_weight(red, law, n)
                if w:
                    ok = ok and red.is_even()
            checked += 1
            nonzero += bool(w)
            if not ok:
                failures += 1
                first_failure = first_failure or [list(a), list(b)]
    return {"kind": "two_step_reduction", "n": n, "s1": s1, "s2": s2, "law": law.label(),
            "checked": checked, "nonzero": nonzero, "failures": failures,
            "first_failure": first_failure, "pass": failures == 0}
