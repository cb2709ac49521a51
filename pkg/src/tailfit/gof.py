"""Semi-parametric bootstrap goodness-of-fit test for a fitted power-law tail."""

from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import GofFailure, InsufficientTailError
from .plfit import CountSample, FitConfig, _best
from .seeding import as_generator, derive_seed, parallel_map

__all__ = ["GofResult", "synthesize", "gof_pvalue", "MIN_SIMS"]

MIN_SIMS = 100


@dataclass(frozen=True)
class GofResult:
    """Outcome of the bootstrap test.

    ``p_value`` is ``n_exceed / n_valid`` where ``n_valid = n_sims - n_failed``
    counts the synthetic sets whose refit succeeded.
    """

    k: float
    n_sims: int
    n_exceed: int
    p_value: float
    reject: bool
    threshold: float = 0.1
    n_failed: int = 0

    @property
    def n_valid(self):
        return self.n_sims - self.n_failed


def _synth_arrays(values, freq, x0, alpha_model, n_tail, rng):
    n = int(freq.sum())
    split = np.searchsorted(values, x0)
    body_v, body_f = values[:split], freq[:split]
    if body_v.size == 0:
        k = n
    else:
        k = int(rng.binomial(n, n_tail / n))
    parts_v, parts_f = [], []
    if n - k > 0:
        parts_v.append(body_v)
        parts_f.append(rng.multinomial(n - k, body_f / body_f.sum()))
    if k > 0:
        tv, tf = np.unique(alpha_model.sample(k, rng), return_counts=True)
        parts_v.append(tv)
        parts_f.append(tf)
    v = np.concatenate(parts_v)
    f = np.concatenate(parts_f)
    keep = f > 0
    # body values are < x0 <= tail values, so the concatenation is sorted
    return v[keep], f[keep].astype(np.int64)


def synthesize(sample, fit, seed):
    """Hybrid synthetic sample of the same size as ``sample``.

    Each point is, with probability n_tail/n, a draw from the fitted power
    law on [x0, inf), and otherwise a draw with replacement from the observed
    values below x0. Without a body every point comes from the model.
    """
    rng = as_generator(seed)
    v, f = _synth_arrays(sample.values, sample.freq, fit.x0, fit.model, fit.n_tail, rng)
    return CountSample(f"{sample.name}~synthetic", v, f)


def _gof_one(rep, values, freq, fit, seed, config):
    rng = as_generator(derive_seed(seed, "gof", rep))
    v, f = _synth_arrays(values, freq, fit.x0, fit.model, fit.n_tail, rng)
    try:
        log, k = _best(v, f, config)
    except InsufficientTailError:
        return None
    return float(log.ks[k])


def gof_pvalue(sample, fit, n_sims, seed, config=FitConfig(), threshold=0.1, workers=None):
    """Bootstrap p-value of the power-law hypothesis.

    Every synthetic set is refit with the full cutoff scan under ``config``
    and its KS statistic compared to the observed one; ties count as
    exceedances. Synthetic set r uses ``derive_seed(seed, "gof", r)``.

    Raises
    ------
    GofFailure
        If more than 10% of the synthetic refits fail.
    """
    n_sims = int(n_sims)
    if n_sims < MIN_SIMS:
        raise ValueError(f"n_sims must be >= {MIN_SIMS}, got {n_sims}")
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    job = partial(_gof_one, values=sample.values, freq=sample.freq, fit=fit, seed=seed,
                  config=config)
    stats = parallel_map(job, range(n_sims), workers)
    ok = np.array([s for s in stats if s is not None])
    n_failed = n_sims - ok.size
    if n_failed > 0.1 * n_sims:
        raise GofFailure(f"{n_failed} of {n_sims} synthetic refits failed")
    n_exceed = int(np.count_nonzero(ok >= fit.ks))
    p = n_exceed / ok.size
    return GofResult(float(fit.ks), n_sims, n_exceed, p, p < threshold, threshold, n_failed)
