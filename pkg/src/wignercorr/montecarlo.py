"""Monte Carlo for Wigner matrices: spectra, trace powers, covariances, R-terms.

Every sample ``i`` draws from its own generator seeded by
``SeedSequence(seed, spawn_key=(stream, law_index, i))`` so results do not
depend on how samples are split across workers.  Samples are processed in
fixed blocks whose size depends only on ``n``; per-sample statistics are
concatenated in index order before any reduction, which makes every
estimate bitwise reproducible for 1 or many workers.
"""

from __future__ import annotations

import math
import multiprocessing
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import DomainError, NumericalError, RegimeError
from .laws import DIAG_VAR, OFFDIAG_VAR, EntryLaw, get_law
from .majorant import floor_cbrt_fraction

WORKERS_ENV = "WIGNERCORR_WORKERS"
CHI0 = Fraction(1, 64)
MAX_EXCLUDED_FRACTION = 0.01
MIN_SAMPLES = 100
_BLOCK_ELEMS = 1 << 22

# seed streams, one per estimator kind
STREAM_TRACES = 0
STREAM_RTERMS = 1
STREAM_ENTRIES = 2


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------------
# samples and spectra
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HermitianSample:
    n: int
    matrix: np.ndarray
    law: str = "gaussian"
    seed: int | None = None

    def packed(self) -> np.ndarray:
        """Upper triangle in row-major order (diagonal included)."""
        return self.matrix[np.triu_indices(self.n)]


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)


def _seed_sequence(seed: int, stream: int, law_index: int, i: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(stream, law_index, i))


@lru_cache(maxsize=64)
def _upper(n: int):
    return np.triu_indices(n, 1)


def _draw(n: int, law: EntryLaw, rng: np.random.Generator) -> np.ndarray:
    iu = _upper(n)
    m = len(iu[0])
    scale = 1 / math.sqrt(n)
    diag = law.sample(rng, n, DIAG_VAR) * scale
    x = law.sample(rng, m, OFFDIAG_VAR) * scale
    y = law.sample(rng, m, OFFDIAG_VAR) * scale
    w = np.empty((n, n), dtype=complex)
    w[iu] = x + 1j * y
    w[iu[1], iu[0]] = x - 1j * y
    w[np.diag_indices(n)] = diag
    return w


def sample_wigner(n: int, law: EntryLaw | str = "gaussian", seed: int = 0) -> HermitianSample:
    """One Wigner matrix: off-diagonal ``(X + iY)/sqrt(n)``, real diagonal."""
    if n < 1:
        raise DomainError("n must be >= 1")
    law = get_law(law) if isinstance(law, str) else law
    w = _draw(n, law, np.random.default_rng(seed))
    return HermitianSample(n, w, law.label(), seed)


def eigenvalues(sample: HermitianSample | np.ndarray) -> Spectrum:
    a = sample.matrix if isinstance(sample, HermitianSample) else np.asarray(sample)
    try:
        vals = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    return Spectrum(vals)


def _powers(vals: np.ndarray, p: int) -> np.ndarray:
    a = np.abs(vals)
    big = a > 1e-100
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        out = np.where(big, np.exp(p * np.log(np.where(big, a, 1.0))), a**p)
    if p % 2:
        out = np.copysign(out, vals)
    return out


def trace_power(spec: Spectrum | np.ndarray, p: int) -> float:
    """``sum_i lambda_i^p`` with compensated summation; ``inf`` on overflow."""
    if p < 0:
        raise DomainError("power must be >= 0")
    vals = spec.values if isinstance(spec, Spectrum) else np.asarray(spec)
    if p == 0:
        return float(len(vals))
    terms = _powers(vals, p)
    if not np.all(np.isfinite(terms)):
        return math.inf
    try:
        return math.fsum(terms)
    except OverflowError:
        return math.inf


# --------------------------------------------------------------------------
# regime
# --------------------------------------------------------------------------

def regime_s(n: int, chi) -> int:
    """``floor((chi n^2)^(1/3))`` in exact arithmetic."""
    return floor_cbrt_fraction(Fraction(chi) * n * n)


@dataclass(frozen=True)
class RegimePoint:
    n: int
    s1: int
    s2: int
    chi1: Fraction | None = None
    chi2: Fraction | None = None

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.s1 < 1 or self.s2 < 1:
            raise RegimeError(
                f"s' = {self.s1}, s'' = {self.s2} at n = {self.n}: regime needs s >= 1 (increase chi or n, or set s)")

    @classmethod
    def from_chi(cls, n: int, chi1, chi2=None, chi0=CHI0) -> "RegimePoint":
        chi1 = Fraction(chi1)
        chi2 = chi1 if chi2 is None else Fraction(chi2)
        if chi1 <= 0 or chi2 <= 0:
            raise DomainError("chi must be positive")
        if max(chi1, chi2) >= chi0:
            warnings.warn(f"chi above chi0 = {chi0}", stacklevel=2)
        return cls(n, regime_s(n, chi1), regime_s(n, chi2), chi1, chi2)

    @classmethod
    def from_s(cls, n: int, s1: int, s2: int | None = None) -> "RegimePoint":
        return cls(n, s1, s1 if s2 is None else s2)

    def to_dict(self) -> dict:
        enc = lambda c: None if c is None else str(c)  # noqa: E731
        return {"n": self.n, "s1": self.s1, "s2": self.s2, "chi1": enc(self.chi1), "chi2": enc(self.chi2)}


# --------------------------------------------------------------------------
# block runner
# --------------------------------------------------------------------------

def _block_size(n: int) -> int:
    return max(1, min(256, _BLOCK_ELEMS // (n * n)))


def _sample_block(n, law_label, seed, stream, law_index, start, stop):
    law = get_law(law_label)
    out = np.empty((stop - start, n, n), dtype=complex)
    for j, i in enumerate(range(start, stop)):
        out[j] = _draw(n, law, np.random.default_rng(_seed_sequence(seed, stream, law_index, i)))
    return out


def _eig(batch, vectors: bool):
    try:
        return np.linalg.eigh(batch) if vectors else np.linalg.eigvalsh(batch)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc


def _traces_block(job, start, stop):
    batch = _sample_block(job["n"], job["law"], job["seed"], STREAM_TRACES, job["law_index"], start, stop)
    vals = _eig(batch, False)
    return np.array([[trace_power(v, p) for p in job["powers"]] for v in vals])


def _split_powers(total: int, min_power: int) -> np.ndarray:
    return np.arange(min_power, total - min_power + 1)


def _rterms_block(job, start, stop):
    n, totals, amax = job["n"], job["totals"], job["amax"]
    batch = _sample_block(n, "gaussian", job["seed"], STREAM_RTERMS, 0, start, stop)
    lam, vec = _eig(batch, True)
    rows = []
    alphas = np.arange(amax + 1)
    for lv, v in zip(lam, vec):
        pw = lv[:, None] ** alphas[None, :]  # (k, alpha)
        tr = pw.sum(axis=0)
        d = (np.abs(v) ** 2) @ pw  # (x, alpha): (A^alpha)_xx
        gram = d.T @ d
        b = np.abs(v.T @ v) ** 2
        sb = pw.T @ b @ pw
        parts = [tr]
        for t in totals:
            a = _split_powers(t, job["min_power"])
            parts += [tr[a] * tr[t - a], gram[a, t - a], sb[a, t - a]]
        rows.append(np.concatenate(parts))
    return np.array(rows)


def _entries_block(job, start, stop):
    batch = _sample_block(job["n"], job["law"], job["seed"], STREAM_ENTRIES, 0, start, stop)
    prod = np.ones(len(batch), dtype=complex)
    for p, x, y in job["factors"]:
        prod = prod * np.linalg.matrix_power(batch, p)[:, x - 1, y - 1]
    return np.stack([prod.real, prod.imag], axis=1)


_KINDS = {"traces": _traces_block, "rterms": _rterms_block, "entries": _entries_block}


def _run_block(kind, job, start, stop):
    with threadpool_limits(limits=1):
        return _KINDS[kind](job, start, stop)


def _run(kind: str, job: dict, n_samples: int, workers: int | None) -> np.ndarray:
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise DomainError("workers must be >= 1")
    bs = _block_size(job["n"])
    blocks = [(a, min(a + bs, n_samples)) for a in range(0, n_samples, bs)]
    if workers == 1 or len(blocks) == 1:
        parts = [_run_block(kind, job, a, b) for a, b in blocks]
    else:
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            futs = [pool.submit(_run_block, kind, job, a, b) for a, b in blocks]
            parts = [f.result() for f in futs]
    return np.concatenate(parts, axis=0)


# --------------------------------------------------------------------------
# estimators
# --------------------------------------------------------------------------

def jackknife(stats: np.ndarray, func) -> tuple[np.ndarray, np.ndarray]:
    """Plug-in estimate ``func(mean)`` and its delete-1 jackknife standard error.

    ``func`` maps an ``(m, d)`` array of mean vectors to ``(m, k)``.
    """
    stats = np.asarray(stats, dtype=float)
    N = len(stats)
    if N < 2:
        raise DomainError("jackknife needs at least 2 samples")
    total = stats.sum(axis=0)
    est = func((total / N)[None, :])[0]
    loo = func((total[None, :] - stats) / (N - 1))
    dev = loo - loo.mean(axis=0)
    se = np.sqrt((N - 1) / N * (dev**2).sum(axis=0))
    return est, se


@dataclass
class CovarianceEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int
    regime: RegimePoint
    law: str
    excluded: int = 0
    valid: bool = True

    def to_dict(self) -> dict:
        return {
            "law": self.law, "K_mean": self.mean, "K_stderr": self.stderr, "n_samples": self.n_samples,
            "seed": self.seed, "regime": self.regime.to_dict(), "excluded": self.excluded, "valid": self.valid,
        }


def trace_samples(n: int, powers, n_samples: int, seed: int, law="gaussian", *, law_index: int = 0,
                  workers: int | None = None) -> np.ndarray:
    """Per-sample ``Tr W^p`` for each ``p`` in ``powers`` (shape ``(n_samples, len(powers))``)."""
    law = get_law(law) if isinstance(law, str) else law
    job = {"n": n, "law": law.label(), "seed": seed, "law_index": law_index, "powers": list(powers)}
    return _run("traces", job, n_samples, workers)


def estimate_K(regime: RegimePoint, law="gaussian", n_samples: int = 1000, seed: int = 0, *,
               law_index: int = 0, workers: int | None = None) -> CovarianceEstimate:
    """Sample covariance of ``Tr W^{2s'}`` and ``Tr W^{2s''}`` with jackknife error."""
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"n_samples must be >= {MIN_SAMPLES}")
    law = get_law(law) if isinstance(law, str) else law
    t = trace_samples(regime.n, (2 * regime.s1, 2 * regime.s2), n_samples, seed, law,
                      law_index=law_index, workers=workers)
    ok = np.all(np.isfinite(t), axis=1)
    excluded = int(n_samples - ok.sum())
    t = t[ok]
    N = len(t)
    valid = excluded <= MAX_EXCLUDED_FRACTION * n_samples and N >= 2
    if N < 2:
        return CovarianceEstimate(math.nan, math.nan, n_samples, seed, regime, law.label(), excluded, False)
    c = t - t.mean(axis=0)
    a, b = c[:, 0], c[:, 1]
    sa, sb, sab = a.sum(), b.sum(), (a * b).sum()
    est = (sab - sa * sb / N) / (N - 1)
    loo = ((sab - a * b) - (sa - a) * (sb - b) / (N - 1)) / (N - 2)
    se = math.sqrt((N - 1) / N * float(((loo - loo.mean()) ** 2).sum()))
    return CovarianceEstimate(float(est), se, n_samples, seed, regime, law.label(), excluded, bool(valid))


def estimate_moments(n: int, powers, n_samples: int, seed: int = 0, law="gaussian", *,
                     workers: int | None = None) -> dict:
    """``E (1/n) Tr W^p`` for each ``p``: mean and standard error."""
    t = trace_samples(n, powers, n_samples, seed, law, workers=workers) / n
    ok = np.all(np.isfinite(t), axis=1)
    t = t[ok]
    mean = t.mean(axis=0)
    se = t.std(axis=0, ddof=1) / math.sqrt(len(t))
    return {int(p): (float(m), float(s)) for p, m, s in zip(powers, mean, se)} | {"excluded": int((~ok).sum())}


def estimate_entry_product(n: int, factors, n_samples: int, seed: int = 0, law="gaussian", *,
                           workers: int | None = None) -> dict:
    """``E prod (W^p)_{xy}`` over ``factors = [(p, x, y), ...]`` (1-based indices)."""
    if n > 16:
        raise DomainError("entry products use direct powering; keep n <= 16")
    for p, x, y in factors:
        if not (1 <= x <= n and 1 <= y <= n) or p < 0:
            raise DomainError(f"bad factor {(p, x, y)}")
    law = get_law(law) if isinstance(law, str) else law
    job = {"n": n, "law": law.label(), "seed": seed, "factors": [tuple(f) for f in factors]}
    z = _run("entries", job, n_samples, workers)
    mean = z.mean(axis=0)
    se = z.std(axis=0, ddof=1) / math.sqrt(len(z))
    return {"real": float(mean[0]), "real_stderr": float(se[0]), "imag": float(mean[1]), "imag_stderr": float(se[1])}


# --------------------------------------------------------------------------
# R-terms for the GUE bounding sum
# --------------------------------------------------------------------------

def _rterms_func(n: int, s1: int, s2: int, amax: int, min_power: int):
    totals = sorted({2 * s1, 2 * s2})
    offs, pos = {}, amax + 1
    for t in totals:
        k = len(_split_powers(t, min_power))
        offs[t] = (pos, k)
        pos += 3 * k
    pair = n * (n - 1)

    def parts(m, t):
        o, k = offs[t]
        a = _split_powers(t, min_power)
        M = m[:, : amax + 1] / n
        mm = M[:, a] * M[:, t - a]
        trtr, gram, sb = m[:, o:o + k], m[:, o + k:o + 2 * k], m[:, o + 2 * k:o + 3 * k]
        P = mm.sum(axis=1)
        cov = (trtr - m[:, a] * m[:, t - a]).sum(axis=1)
        Gd = (gram / n - mm).sum(axis=1)
        Go = ((trtr - gram) / pair - mm).sum(axis=1) if pair else np.zeros(len(m))
        GoS = ((sb - gram) / pair).sum(axis=1) if pair else np.zeros(len(m))
        return P, cov, Gd, Go, GoS

    def func(m):
        P1, c1, Gd1, Go1, GS1 = parts(m, 2 * s1)
        P2, c2, Gd2, Go2, GS2 = parts(m, 2 * s2)
        R = [n * n * P1 * P2, P1 * c2, c1 * P2, n * Gd1 * Gd2 + pair * Go1 * Go2]
        S = [n * P1 * P2, n * P1 * Gd2, n * Gd1 * P2, n * Gd1 * Gd2 + pair * GS1 * GS2]
        return np.stack(R + S, axis=1)

    return totals, func


def estimate_R_terms(regime: RegimePoint, n_samples: int = 200, seed: int = 0, *, min_power: int = 1,
                     shift: int = 1, workers: int | None = None) -> dict:
    """GUE estimates of ``R^(1..4)`` and ``S^(1..4)`` with jackknife errors.

    The split sums run over ``alpha + beta = 2 s_bar`` with ``s_bar = s - shift``
    (one shared step removed, by default).  ``(A^p)_xx`` comes from the
    eigendecomposition; exchangeability of the GUE reduces the endpoint
    sums to averaged spectral statistics.
    """
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"n_samples must be >= {MIN_SAMPLES}")
    n = regime.n
    s1, s2 = regime.s1 - shift, regime.s2 - shift
    if s1 < 1 or s2 < 1:
        raise RegimeError(f"s - {shift} must be >= 1")
    amax = 2 * max(s1, s2)
    totals, func = _rterms_func(n, s1, s2, amax, min_power)
    job = {"n": n, "seed": seed, "totals": totals, "amax": amax, "min_power": min_power}
    stats = _run("rterms", job, n_samples, workers)
    if not np.all(np.isfinite(stats)):
        raise NumericalError("non-finite R-term statistics")
    est, se = jackknife(stats, func)
    return {
        "regime": regime.to_dict(), "s1": s1, "s2": s2, "min_power": min_power, "n_samples": n_samples, "seed": seed,
        "R": [float(v) for v in est[:4]], "R_stderr": [float(v) for v in se[:4]],
        "S": [float(v) for v in est[4:]], "S_stderr": [float(v) for v in se[4:]],
    }


# --------------------------------------------------------------------------
# universality
# --------------------------------------------------------------------------

@dataclass
class UniversalityReport:
    params: dict
    per_law: list = field(default_factory=list)
    comparisons: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if any(not e.valid for e in self.per_law):
            return "inconclusive"
        return "pass" if all(c["pass"] for c in self.comparisons) else "fail"

    def to_dict(self) -> dict:
        per = [{"law": e.law, "K_mean": e.mean, "K_stderr": e.stderr, "excluded": e.excluded, "valid": e.valid}
               for e in self.per_law]
        return {"params": self.params, "per_law": per, "comparisons": self.comparisons, "status": self.status}


def universality_test(n: int, chi, laws, n_samples: int, seed: int = 0, *, s: int | None = None,
                      workers: int | None = None) -> UniversalityReport:
    """``K_n(s, s)`` for each law and all pairwise differences (pass if ``|d| <= 3 SE``)."""
    laws = [get_law(x) if isinstance(x, str) else x for x in laws]
    if not laws:
        raise DomainError("need at least one law")
    regime = RegimePoint.from_s(n, s) if s is not None else RegimePoint.from_chi(n, chi)
    params = {"n": n, "chi": None if chi is None else str(Fraction(chi)), "s": regime.s1, "samples": n_samples,
              "seed": seed, "laws": [x.label() for x in laws]}
    rep = UniversalityReport(params)
    for i, law in enumerate(laws):
        rep.per_law.append(estimate_K(regime, law, n_samples, seed, law_index=i, workers=workers))
    for i in range(len(laws)):
        for j in range(i + 1, len(laws)):
            a, b = rep.per_law[i], rep.per_law[j]
            delta = a.mean - b.mean
            se = math.hypot(a.stderr, b.stderr)
            ok = a.valid and b.valid and abs(delta) <= 3 * se
            rep.comparisons.append({"law_a": a.law, "law_b": b.law, "delta": delta, "se_combined": se,
                                    "pass": bool(ok)})
    return rep
