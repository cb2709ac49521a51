"""Likelihood-ratio comparison of the power law against alternative tail families.

Non-nested alternatives use Vuong's normalized ratio with a two-sided normal
p-value; the power law with exponential cutoff, which contains the pure
power law, uses the chi-squared(1) ratio test.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .errors import (
    IndistinguishableModelsError,
    LikelihoodEvaluationError,
    NestingViolationError,
    TailfitError,
)
from .models import ALPHA_BOUNDS, ALTERNATIVES, fit_mle

__all__ = [
    "ComparisonResult",
    "vuong_test",
    "nested_lr_test",
    "compare_all",
    "POWER_LAW",
    "ALTERNATIVE",
    "INDETERMINATE",
    "NESTING_TOL",
]

POWER_LAW = "power_law"
ALTERNATIVE = "alternative"
INDETERMINATE = "indeterminate"

NESTING_TOL = 1e-6


@dataclass(frozen=True)
class ComparisonResult:
    """One row of the model-selection table.

    ``lr`` is the log-likelihood of the power law minus that of the
    alternative. ``stat`` is the normalized ratio for non-nested pairs and
    2|LR| for the nested pair; ``nlr`` is the normalized ratio in both
    cases. A failed comparison carries ``error`` and ``None`` numbers.
    """

    alternative: str
    lr: Optional[float]
    stat: Optional[float]
    nlr: Optional[float]
    sigma_lr: Optional[float]
    p_value: Optional[float]
    nested: bool
    verdict: Optional[str]
    n: int = 0
    params: Optional[tuple] = None
    error: Optional[str] = None

    @property
    def failed(self):
        return self.error is not None

    @classmethod
    def failure(cls, alternative, nested, n, exc):
        msg = f"{type(exc).__name__}: {exc}"
        return cls(alternative, None, None, None, None, None, nested, None, n, None, msg)


def _verdict(lr, p, threshold):
    if p < threshold and lr > 0:
        return POWER_LAW
    if p < threshold and lr < 0:
        return ALTERNATIVE
    return INDETERMINATE


def _pointwise(tail_data, m1, m2):
    if m1.x0 != m2.x0:
        raise ValueError(f"models must share x0 (got {m1.x0} and {m2.x0})")
    vals, w = np.unique(np.asarray(tail_data, dtype=np.int64), return_counts=True)
    if vals.size == 0:
        raise ValueError("no tail data")
    d = np.asarray(m1.log_pmf(vals)) - np.asarray(m2.log_pmf(vals))
    if not np.all(np.isfinite(d)):
        raise LikelihoodEvaluationError("non-finite pointwise log-likelihood difference")
    w = w.astype(float)
    n = int(w.sum())
    lr = float(np.sum(w * d))
    mean = lr / n
    sigma = float(np.sqrt(np.sum(w * (d - mean) ** 2) / n))
    return lr, sigma, n


def vuong_test(tail_data, model1, model2, threshold=0.1):
    """Vuong's test of ``model1`` (normally the power law) against ``model2``.

    d_i = ln p1(x_i) - ln p2(x_i), LR = Σ d_i, σ is the standard deviation
    of the d_i with divisor n, NLR = LR / (σ √n) and the p-value is
    two-sided standard normal.

    Raises
    ------
    IndistinguishableModelsError
        If every d_i is the same (σ = 0).
    LikelihoodEvaluationError
        If some d_i is not finite.
    """
    lr, sigma, n = _pointwise(tail_data, model1, model2)
    if sigma == 0.0:
        raise IndistinguishableModelsError("pointwise log-likelihood differences have zero spread")
    nlr = lr / (sigma * np.sqrt(n))
    p = float(2.0 * stats.norm.sf(abs(nlr)))
    return ComparisonResult(model2.family, lr, float(nlr), float(nlr), sigma, p, False,
                            _verdict(lr, p, threshold), n, tuple(model2.params))


def nested_lr_test(tail_data, pl_fit, cutoff_fit, threshold=0.1):
    """Chi-squared(1) ratio test of the power law inside the cutoff family.

    stat = 2 (LL_cutoff - LL_pl); ``lr`` keeps the power-law-minus-alternative
    sign and is therefore <= 0 up to optimizer tolerance. Tiny negative
    stats from the optimizer are clipped to zero.

    Raises
    ------
    NestingViolationError
        If stat < -1e-6, meaning the cutoff fit is broken.
    """
    lr, sigma, n = _pointwise(tail_data, pl_fit, cutoff_fit)
    stat = -2.0 * lr
    if stat < -NESTING_TOL:
        raise NestingViolationError(
            f"cutoff fit is worse than the nested power law (2*LR = {stat:.3g})"
        )
    stat = max(stat, 0.0)
    p = float(stats.chi2.sf(stat, 1))
    nlr = lr / (sigma * np.sqrt(n)) if sigma > 0 else 0.0
    return ComparisonResult(cutoff_fit.family, lr, stat, float(nlr), sigma, p, True,
                            _verdict(lr, p, threshold), n, tuple(cutoff_fit.params))


def compare_all(sample, fit, threshold=0.1, alternatives=ALTERNATIVES,
                alpha_bounds=ALPHA_BOUNDS):
    """Fit each alternative on the tail at ``fit.x0`` and compare it with the power law.

    Fit or test failures become rows with ``error`` set instead of aborting.
    """
    tail = sample.tail(fit.x0)
    rows = []
    for family in alternatives:
        nested = family == "cutoff"
        try:
            alt = fit_mle(family, tail, fit.x0, alpha_bounds=alpha_bounds)
            if nested:
                rows.append(nested_lr_test(tail, fit.model, alt, threshold))
            else:
                rows.append(vuong_test(tail, fit.model, alt, threshold))
        except TailfitError as exc:
            rows.append(ComparisonResult.failure(family, nested, tail.size, exc))
    return rows
