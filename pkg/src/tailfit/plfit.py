"""Power-law tail estimation: exponent MLE, KS-minimizing cutoff, bootstrap SEs."""

from dataclasses import dataclass, field
from functools import cached_property, partial
from typing import NamedTuple, Optional

import numpy as np

from .errors import BootstrapFailure, EmptyTailError, InsufficientTailError
from .models import ALPHA_BOUNDS, PowerLaw, powerlaw_alpha_mle
from .seeding import as_generator, derive_seed, parallel_map
from .specfun import hurwitz_zeta

__all__ = [
    "CountSample",
    "FitConfig",
    "PowerLawFit",
    "ScanLog",
    "BootstrapSE",
    "empirical_tail_cdf",
    "ks_statistic",
    "estimate_xmin",
    "bootstrap_se",
]

# upper bound on candidate-by-value matrix size in the KS scan
_KS_CHUNK = 1 << 21


@dataclass(frozen=True, eq=False)
class CountSample:
    """A named multiset of non-negative integer counts.

    Stored as sorted distinct ``values`` with multiplicities ``freq``;
    ``counts`` gives the expanded sorted array.
    """

    name: str
    values: np.ndarray
    freq: np.ndarray

    def __post_init__(self):
        if self.values.size == 0:
            raise EmptyTailError("a sample needs at least one observation")
        if np.any(self.values < 0):
            raise ValueError("counts must be non-negative")
        if np.any(np.diff(self.values) <= 0) or np.any(self.freq <= 0):
            raise ValueError("values must be strictly increasing with positive frequencies")

    @classmethod
    def from_counts(cls, name, counts):
        arr = np.asarray(counts)
        if arr.dtype.kind == "f":
            if np.any(arr != np.round(arr)):
                raise ValueError("counts must be integers")
        arr = arr.astype(np.int64).ravel()
        values, freq = np.unique(arr, return_counts=True)
        return cls(name, values, freq.astype(np.int64))

    @classmethod
    def from_histogram(cls, name, values, freq):
        values = np.asarray(values, dtype=np.int64)
        freq = np.asarray(freq, dtype=np.int64)
        keep = freq > 0
        values, freq = values[keep], freq[keep]
        order = np.argsort(values, kind="stable")
        values, freq = values[order], freq[order]
        if values.size and np.any(np.diff(values) == 0):
            uniq, inv = np.unique(values, return_inverse=True)
            freq = np.bincount(inv, weights=freq).astype(np.int64)
            values = uniq
        return cls(name, values, freq)

    @property
    def n(self):
        return int(self.freq.sum())

    @cached_property
    def counts(self):
        return np.repeat(self.values, self.freq)

    def tail(self, x0):
        """Observations >= x0, sorted."""
        i = np.searchsorted(self.values, x0)
        return np.repeat(self.values[i:], self.freq[i:])

    def n_tail(self, x0):
        i = np.searchsorted(self.values, x0)
        return int(self.freq[i:].sum())

    def renamed(self, name):
        return CountSample(name, self.values, self.freq)


@dataclass(frozen=True)
class FitConfig:
    """Cutoff scan settings: minimum tail size and exponent search interval."""

    min_tail: int = 50
    alpha_bounds: tuple = ALPHA_BOUNDS

    def __post_init__(self):
        if int(self.min_tail) != self.min_tail or self.min_tail < 1:
            raise ValueError(f"min_tail must be a positive integer, got {self.min_tail}")
        lo, hi = self.alpha_bounds
        if not 1.0 < lo < hi:
            raise ValueError(f"alpha_bounds must satisfy 1 < lo < hi, got {self.alpha_bounds}")


class ScanLog(NamedTuple):
    x0: np.ndarray
    alpha: np.ndarray
    ks: np.ndarray
    n_tail: np.ndarray


@dataclass(frozen=True)
class PowerLawFit:
    model: PowerLaw
    n_tail: int
    n_total: int
    ks: float
    se_alpha: float = float("nan")
    se_x0: float = float("nan")
    n_boot_failed: int = 0
    scan: Optional[ScanLog] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.n_tail <= self.n_total or self.n_total < 1:
            raise ValueError("need 0 <= n_tail <= n_total and n_total >= 1")
        if not 0.0 <= self.ks <= 1.0:
            raise ValueError(f"KS statistic must lie in [0, 1], got {self.ks}")

    @property
    def alpha(self):
        return self.model.alpha

    @property
    def x0(self):
        return self.model.x0

    @property
    def frac_tail(self):
        return self.n_tail / self.n_total

    def with_se(self, se_alpha, se_x0, n_failed=0):
        return PowerLawFit(self.model, self.n_tail, self.n_total, self.ks,
                           float(se_alpha), float(se_x0), int(n_failed), self.scan)


def empirical_tail_cdf(sample, x0):
    """Right-continuous S(x) = #{x0 <= x_i <= x} / n_tail, as a vectorized callable."""
    i = np.searchsorted(sample.values, x0)
    vals = sample.values[i:]
    if vals.size == 0:
        raise EmptyTailError(f"no observations >= {x0}")
    cum = np.cumsum(sample.freq[i:])
    n_tail = cum[-1]

    def cdf(x):
        k = np.searchsorted(vals, np.asarray(x), side="right")
        out = np.where(k > 0, cum[np.maximum(k - 1, 0)], 0) / n_tail
        return float(out) if out.ndim == 0 else out

    return cdf


def _ks_rows(values, cum, first, n_tail, alpha):
    """KS distance for each candidate (start index ``first``) at its exponent.

    Between consecutive observed values the empirical CDF is flat and the
    model CDF increases, so the supremum over all integers is attained at
    observed values or one below them.
    """
    d = values.size
    lo = int(first.min())
    v = values[lo:].astype(float)
    j = np.arange(lo, d)
    out = np.empty(first.size)
    rows = max(1, _KS_CHUNK // max(v.size, 1))
    for s in range(0, first.size, rows):
        f = first[s:s + rows]
        a = alpha[s:s + rows, None]
        z = hurwitz_zeta(a, v[None, :])
        z0 = z[np.arange(f.size), f - lo][:, None]
        ccdf_at = z / z0
        ccdf_next = (z - np.exp(-a * np.log(v))) / z0
        before = np.where(f > 0, cum[np.maximum(f - 1, 0)], 0)[:, None]
        emp = (cum[lo:][None, :] - before) / n_tail[s:s + rows, None]
        gap_at = np.abs(emp - (1.0 - ccdf_next))
        emp_prev = np.concatenate([np.zeros((f.size, 1)), emp[:, :-1]], axis=1)
        gap_below = np.abs(emp_prev - (1.0 - ccdf_at))
        valid = j[None, :] >= f[:, None]
        below_ok = j[None, :] > f[:, None]
        g = np.maximum(np.where(valid, gap_at, 0.0), np.where(below_ok, gap_below, 0.0))
        out[s:s + rows] = g.max(axis=1)
    return np.minimum(out, 1.0)


def _scan(values, freq, config):
    """Fit every admissible cutoff; returns a ScanLog (possibly empty)."""
    cum = np.cumsum(freq)
    total = cum[-1]
    tail_n = total - np.concatenate([[0], cum[:-1]])
    logv = np.log(np.maximum(values, 1).astype(float))
    tail_slog = np.cumsum((freq * logv)[::-1])[::-1]
    idx = np.nonzero((values >= 1) & (tail_n >= config.min_tail))[0]
    idx = idx[idx < values.size - 1]  # a single-valued tail has no finite MLE
    if idx.size == 0:
        empty = np.array([])
        return ScanLog(empty, empty, empty, empty)
    alpha, _ = powerlaw_alpha_mle(tail_n[idx], tail_slog[idx], values[idx],
                                  config.alpha_bounds)
    ks = _ks_rows(values, cum, idx, tail_n[idx].astype(float), alpha)
    return ScanLog(values[idx], alpha, ks, tail_n[idx])


def _best(values, freq, config):
    log = _scan(values, freq, config)
    if log.x0.size == 0:
        raise InsufficientTailError(
            f"no cutoff leaves a tail of at least {config.min_tail} observations"
        )
    k = int(np.argmin(log.ks))  # first minimum: smallest x0 on ties
    return log, k


def ks_statistic(sample, model):
    """Plain KS distance between the tail of ``sample`` at model.x0 and ``model``."""
    i = np.searchsorted(sample.values, model.x0)
    if i >= sample.values.size:
        raise EmptyTailError(f"no observations >= {model.x0}")
    values = sample.values[i:]
    freq = sample.freq[i:]
    cum = np.cumsum(freq)
    if values[0] != model.x0:
        # the scan kernel starts its rows at an observed value
        values = np.concatenate([[model.x0], values])
        cum = np.concatenate([[0], cum])
    ks = _ks_rows(values, cum, np.array([0]), np.array([float(cum[-1])]),
                  np.array([model.alpha]))
    return float(ks[0])


def estimate_xmin(sample, config=FitConfig()):
    """Scan candidate cutoffs, fit the exponent by MLE at each, keep the KS minimizer.

    Candidates are the distinct observed values >= 1 whose tail holds at
    least ``config.min_tail`` observations and at least two distinct
    values. Ties in KS go to the smallest cutoff. The returned fit carries
    the full scan in ``fit.scan``; bootstrap errors are left as NaN.
    """
    log, k = _best(sample.values, sample.freq, config)
    model = PowerLaw(float(log.alpha[k]), int(log.x0[k]))
    return PowerLawFit(model, int(log.n_tail[k]), sample.n, float(log.ks[k]), scan=log)


class BootstrapSE(NamedTuple):
    se_alpha: float
    se_x0: float
    n_failed: int


def _boot_one(rep, values, freq, seed, config):
    rng = as_generator(derive_seed(seed, "bootstrap", rep))
    n = int(freq.sum())
    draw = rng.multinomial(n, freq / n)
    keep = draw > 0
    try:
        log, k = _best(values[keep], draw[keep], config)
    except InsufficientTailError:
        return None
    return float(log.alpha[k]), float(log.x0[k])


def bootstrap_se(sample, fit, reps, seed, config=FitConfig(), workers=None):
    """Nonparametric bootstrap standard errors of the exponent and the cutoff.

    Each replicate resamples the whole sample with replacement and reruns
    the cutoff scan. Replicate r draws from a generator seeded by
    ``derive_seed(seed, "bootstrap", r)``, so the result is independent of
    the number of workers. Failed replicates are dropped and counted.
    """
    reps = int(reps)
    if reps < 2:
        raise ValueError("reps must be >= 2")
    job = partial(_boot_one, values=sample.values, freq=sample.freq, seed=seed, config=config)
    results = parallel_map(job, range(reps), workers)
    ok = [r for r in results if r is not None]
    n_failed = reps - len(ok)
    if n_failed > reps / 2 or len(ok) < 2:
        raise BootstrapFailure(f"{n_failed} of {reps} bootstrap replicates failed")
    arr = np.array(ok)
    return BootstrapSE(float(arr[:, 0].std(ddof=1)), float(arr[:, 1].std(ddof=1)), n_failed)
