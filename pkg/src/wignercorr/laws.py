"""Symmetric entry laws for Wigner matrices.

A law is described by the even moments of its unit-variance version,
``mu_{2k} = E Z^{2k}`` with ``E Z^2 = 1``.  Off-diagonal entries are
``(X + iY) / sqrt(n)`` with ``X, Y`` independent of variance 1/8 each; the
diagonal is real with variance 1/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DomainError

OFFDIAG_VAR = Fraction(1, 8)
DIAG_VAR = Fraction(1, 4)


@dataclass(frozen=True)
class EntryLaw:
    name: str
    std_moment: Callable[[int], Fraction]  # k -> E Z^{2k} for unit variance
    sampler: Callable[[np.random.Generator, tuple, float], np.ndarray]
    param: Fraction | None = None

    def moment(self, variance, order: int) -> Fraction:
        """``E X^order`` for the law scaled to ``variance``."""
        if order < 0:
            raise DomainError("negative moment order")
        if order % 2:
            return Fraction(0)
        k = order // 2
        return Fraction(variance) ** k * self.std_moment(k)

    @property
    def v4_offdiag(self) -> Fraction:
        """Fourth moment of the real part of an off-diagonal entry."""
        return self.moment(OFFDIAG_VAR, 4)

    @property
    def v4_diag(self) -> Fraction:
        return self.moment(DIAG_VAR, 4)

    @property
    def kappa4_offdiag(self) -> Fraction:
        return self.v4_offdiag - 3 * OFFDIAG_VAR**2

    def subgaussian_constant(self, k_max: int = 32) -> float:
        """Smallest ``c`` with ``V_{2k} <= (c k)^k`` for ``k <= k_max`` (off-diagonal scale)."""
        return max(float(self.moment(OFFDIAG_VAR, 2 * k)) ** (1 / k) / k for k in range(1, k_max + 1))

    def sample(self, rng: np.random.Generator, size, variance: float) -> np.ndarray:
        return self.sampler(rng, size, float(variance))

    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}:{self.param}"


def _gauss_sampler(rng, size, var):
    return rng.standard_normal(size) * math.sqrt(var)


def _rademacher_sampler(rng, size, var):
    return (2.0 * rng.integers(0, 2, size) - 1.0) * math.sqrt(var)


def gaussian() -> EntryLaw:
    return EntryLaw("gaussian", lambda k: Fraction(math.prod(range(2 * k - 1, 0, -2))), _gauss_sampler)


def rademacher() -> EntryLaw:
    return EntryLaw("rademacher", lambda k: Fraction(1), _rademacher_sampler)


def three_point(p=Fraction(1, 4)) -> EntryLaw:
    """``0`` with probability ``1 - p`` and ``+-sigma/sqrt(p)`` otherwise."""
    p = Fraction(p)
    if not 0 < p <= 1:
        raise DomainError("three-point law needs 0 < p <= 1")
    pf = float(p)

    def sampler(rng, size, var):
        mag = math.sqrt(var / pf)
        u = rng.random(size)
        sign = np.where(rng.integers(0, 2, size) == 1, 1.0, -1.0)
        return np.where(u < pf, sign * mag, 0.0)

    return EntryLaw("three-point", lambda k: p ** (1 - k) if k else Fraction(1), sampler, param=p)


def get_law(spec: str) -> EntryLaw:
    """``gaussian``, ``rademacher``, ``three-point`` or ``three-point:p``."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name in ("gaussian", "gue", "normal"):
        return gaussian()
    if name in ("rademacher", "bernoulli", "two-point"):
        return rademacher()
    if name in ("three-point", "threepoint", "sparse"):
        return three_point(Fraction(arg) if arg else Fraction(1, 4))
    raise DomainError(f"unknown law {spec!r}")
