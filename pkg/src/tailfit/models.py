"""Discrete tail models on [x0, inf): the power law and six alternatives.

Every model is an immutable dataclass exposing ``log_pmf``, ``pmf``,
``ccdf`` (P(X >= x)), ``cdf``, ``loglik`` and an exact inverse-transform
``sample``. ``fit_mle`` fits any family by maximum likelihood on a tail.
"""

from dataclasses import dataclass, field
from functools import cached_property

import mpmath
import numpy as np
from scipy import optimize, special

from .errors import (
    DegenerateDataError,
    DomainError,
    FitFailure,
    InvalidModelError,
)
from .seeding import as_generator
from .specfun import (
    euler_maclaurin_coefficients,
    hurwitz_zeta,
    hurwitz_zeta_derivs,
    truncated_tail_sum,
)

__all__ = [
    "PowerLaw",
    "Exponential",
    "Weibull",
    "LogNormal",
    "Tsallis",
    "Yule",
    "PowerLawCutoff",
    "FAMILIES",
    "ALTERNATIVES",
    "log_pmf",
    "ccdf",
    "sample",
    "fit_mle",
    "powerlaw_alpha_mle",
]

ALPHA_BOUNDS = (1.01, 20.0)
_TABLE_START = 1024
_TABLE_CAP = 1 << 20


def _as_int_array(x):
    arr = np.asarray(x)
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise DomainError("support points must be integers")
        arr = arr.astype(np.int64)
    elif arr.dtype.kind not in "iu":
        raise DomainError(f"support points must be integers, got dtype {arr.dtype}")
    return arr


def _log_diff_exp(la, lb):
    """log(exp(la) - exp(lb)) for la >= lb."""
    with np.errstate(divide="ignore"):
        return la + np.log(-np.expm1(lb - la))


class TailModel:
    """Shared machinery; subclasses implement ``_log_pmf`` and ``_ccdf``."""

    family = None
    x0 = 1

    @property
    def params(self):
        raise NotImplementedError

    def _check_x0(self):
        if int(self.x0) != self.x0 or self.x0 < 1:
            raise InvalidModelError(f"x0 must be an integer >= 1, got {self.x0}")

    def _support(self, x):
        arr = _as_int_array(x)
        if np.any(arr < self.x0):
            raise DomainError(f"x must be >= x0={self.x0}")
        return arr

    def log_pmf(self, x):
        arr = self._support(x)
        out = self._log_pmf(arr.astype(float))
        return float(out) if np.ndim(out) == 0 else out

    def pmf(self, x):
        return np.exp(self.log_pmf(x))

    def ccdf(self, x):
        """P(X >= x)."""
        arr = self._support(x)
        out = np.asarray(self._ccdf(arr), dtype=float)
        out = np.where(arr == self.x0, 1.0, out)
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        """P(X <= x)."""
        arr = self._support(x)
        out = 1.0 - np.asarray(self._ccdf(arr + 1), dtype=float)
        return float(out) if out.ndim == 0 else out

    def loglik(self, data):
        return float(np.sum(self.log_pmf(data)))

    def _ccdf_range(self, a, b):
        return np.asarray(self._ccdf(np.arange(a, b, dtype=np.int64)), dtype=float)

    @cached_property
    def _base_table(self):
        t = self._ccdf_range(self.x0, self.x0 + _TABLE_START)
        t[0] = 1.0
        return t

    def sample(self, n, seed=None):
        """Draw ``n`` i.i.d. values by inverse transform on the CCDF.

        A draw u in (0, 1] maps to the largest x with ccdf(x) >= u. The CCDF
        table is extended by doubling as far as the smallest u requires;
        draws beyond the table cap are located by a doubling bracket and
        bisection on the closed-form CCDF. Draws that would exceed 2**62 - 1
        are clamped to it.
        """
        n = int(n)
        if n < 1:
            raise DomainError("n must be >= 1")
        rng = as_generator(seed)
        u = 1.0 - rng.random(n)
        return self._inverse_ccdf(u)

    def _inverse_ccdf(self, u):
        table = self._base_table
        umin = float(u.min())
        while table[-1] >= umin and table.size < _TABLE_CAP:
            a = self.x0 + table.size
            table = np.concatenate([table, self._ccdf_range(a, a + table.size)])
        # number of table entries with ccdf >= u, table being non-increasing
        cnt = np.searchsorted(-table, -u, side="right")
        out = self.x0 + cnt.astype(np.int64) - 1
        far = u <= table[-1]
        if np.any(far):
            out[far] = self._bracket_search(u[far], self.x0 + table.size - 1)
        return out

    def _bracket_search(self, u, lo0):
        lo = np.full(u.shape, lo0, dtype=np.int64)
        hi = lo * 2
        limit = np.int64(1) << 62
        active = np.ones(u.shape, dtype=bool)
        while np.any(active):
            idx = np.nonzero(active)[0]
            above = self._ccdf(hi[idx]) >= u[idx]
            grow = idx[above & (hi[idx] < limit)]
            lo[grow] = hi[grow]
            hi[grow] = np.minimum(hi[grow] * 2, limit)
            active[:] = False
            active[grow] = True
        while True:
            gap = hi - lo > 1
            if not np.any(gap):
                break
            idx = np.nonzero(gap)[0]
            mid = lo[idx] + (hi[idx] - lo[idx]) // 2
            ok = self._ccdf(mid) >= u[idx]
            lo[idx[ok]] = mid[ok]
            hi[idx[~ok]] = mid[~ok]
        return lo


@dataclass(frozen=True)
class PowerLaw(TailModel):
    """p(x) = x^(-alpha) / ζ(alpha, x0)."""

    alpha: float
    x0: int = 1
    family = "power_law"

    def __post_init__(self):
        self._check_x0()
        if not self.alpha > 1.0:
            raise InvalidModelError(f"power-law alpha must be > 1, got {self.alpha}")

    @property
    def params(self):
        return (self.alpha,)

    @cached_property
    def _zeta_x0(self):
        return hurwitz_zeta(self.alpha, self.x0)

    def _log_pmf(self, x):
        return -self.alpha * np.log(x) - np.log(self._zeta_x0)

    def _ccdf(self, x):
        return hurwitz_zeta(self.alpha, np.asarray(x, dtype=float)) / self._zeta_x0


@dataclass(frozen=True)
class Exponential(TailModel):
    """Geometric tail: p(x) = (1 - e^-lam) e^(-lam (x - x0))."""

    lam: float
    x0: int = 1
    family = "exponential"

    def __post_init__(self):
        self._check_x0()
        if not self.lam > 0.0:
            raise InvalidModelError(f"exponential rate must be > 0, got {self.lam}")

    @property
    def params(self):
        return (self.lam,)

    def _log_pmf(self, x):
        return np.log(-np.expm1(-self.lam)) - self.lam * (x - self.x0)

    def _ccdf(self, x):
        return np.exp(-self.lam * (np.asarray(x, dtype=float) - self.x0))


@dataclass(frozen=True)
class Weibull(TailModel):
    """Stretched exponential: p(x) = (q^(x^beta) - q^((x+1)^beta)) / q^(x0^beta)."""

    q: float
    beta: float
    x0: int = 1
    rate_: float = field(default=None, repr=False, compare=False)
    family = "weibull"

    def __post_init__(self):
        self._check_x0()
        if self.rate_ is None and not 0.0 < self.q < 1.0:
            raise InvalidModelError(f"Weibull q must lie in (0, 1), got {self.q}")
        if self.rate_ is not None and not self.rate_ > 0.0:
            raise InvalidModelError(f"Weibull rate must be > 0, got {self.rate_}")
        if not self.beta > 0.0:
            raise InvalidModelError(f"Weibull beta must be > 0, got {self.beta}")

    @classmethod
    def from_rate(cls, rate, beta, x0=1):
        """Build from c = -ln q, keeping full precision when q is close to 1."""
        return cls(float(np.exp(-rate)), beta, x0, float(rate))

    @property
    def params(self):
        return (self.q, self.beta)

    @property
    def rate(self):
        return self.rate_ if self.rate_ is not None else -np.log(self.q)

    def _log_pmf(self, x):
        c = self.rate
        xb = x**self.beta
        step = xb * np.expm1(self.beta * np.log1p(1.0 / x))
        with np.errstate(divide="ignore"):
            return -c * (xb - float(self.x0) ** self.beta) + np.log(-np.expm1(-c * step))

    def _ccdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-self.rate * (x**self.beta - float(self.x0) ** self.beta))


def _log_sf(z):
    return special.log_ndtr(-z)


@dataclass(frozen=True)
class LogNormal(TailModel):
    """Discrete log-normal on [x0, inf).

    With ``discretization="rounding"`` (default) p(x) is the log-normal mass
    of [x - 1/2, x + 1/2) divided by the mass of [x0 - 1/2, inf), i.e. the
    exact law of a rounded log-normal variate conditioned on the tail.
    ``"density"`` evaluates the continuous density at integers, normalized by
    its continuous tail integral; that variant does not sum to one and only
    supports likelihood evaluation and fitting.
    """

    mu: float
    sigma: float
    x0: int = 1
    discretization: str = "rounding"
    family = "lognormal"

    def __post_init__(self):
        self._check_x0()
        if not self.sigma > 0.0:
            raise InvalidModelError(f"log-normal sigma must be > 0, got {self.sigma}")
        if not np.isfinite(self.mu):
            raise InvalidModelError("log-normal mu must be finite")
        if self.discretization not in ("rounding", "density"):
            raise InvalidModelError(f"unknown discretization {self.discretization!r}")

    @property
    def params(self):
        return (self.mu, self.sigma)

    def _z(self, x):
        return (np.log(x) - self.mu) / self.sigma

    @cached_property
    def _log_tail_mass(self):
        if self.discretization == "rounding":
            return float(_log_sf(self._z(self.x0 - 0.5)))
        # log erfc(w) = log 2 + log Phi(-sqrt(2) w)
        return float(np.log(2.0) + _log_sf(self._z(float(self.x0))))

    def _log_pmf(self, x):
        if self.discretization == "density":
            z = self._z(x)
            return (0.5 * np.log(2.0 / (np.pi * self.sigma**2)) - self._log_tail_mass
                    - np.log(x) - 0.5 * z * z)
        a = np.asarray(self._z(x - 0.5))
        b = np.asarray(self._z(x + 0.5))
        upper = _log_diff_exp(_log_sf(a), _log_sf(b))
        lower = _log_diff_exp(special.log_ndtr(b), special.log_ndtr(a))
        return np.where(a > 0, upper, lower) - self._log_tail_mass

    def _ccdf(self, x):
        if self.discretization != "rounding":
            raise InvalidModelError("ccdf requires the rounding discretization")
        x = np.asarray(x, dtype=float)
        return np.exp(_log_sf(self._z(x - 0.5)) - self._log_tail_mass)

    def sample(self, n, seed=None):
        if self.discretization != "rounding":
            raise InvalidModelError("sampling requires the rounding discretization")
        return super().sample(n, seed)


@dataclass(frozen=True)
class Tsallis(TailModel):
    """p(x) ∝ (1 + x/sigma)^(-theta-1) on [x0, inf).

    The normalizer is sigma^(theta+1) ζ(theta+1, x0 + sigma).
    """

    sigma: float
    theta: float
    x0: int = 1
    family = "tsallis"

    def __post_init__(self):
        self._check_x0()
        if not self.sigma > 0.0:
            raise InvalidModelError(f"Tsallis sigma must be > 0, got {self.sigma}")
        if not self.theta > 0.0:
            raise InvalidModelError(f"Tsallis theta must be > 0, got {self.theta}")

    @property
    def params(self):
        return (self.sigma, self.theta)

    @cached_property
    def _zeta_x0(self):
        return hurwitz_zeta(self.theta + 1.0, self.x0 + self.sigma)

    def _log_pmf(self, x):
        s = self.theta + 1.0
        return -s * np.log(self.sigma + x) - np.log(self._zeta_x0)

    def _ccdf(self, x):
        q = np.asarray(x, dtype=float) + self.sigma
        return hurwitz_zeta(self.theta + 1.0, q) / self._zeta_x0


@dataclass(frozen=True)
class Yule(TailModel):
    """p(x) = (alpha-1) Γ(x0+alpha-1)/Γ(x0) · Γ(x)/Γ(x+alpha).

    Evaluated as B(x, alpha) / B(x0, alpha - 1); the tail telescopes to
    P(X >= x) = B(x, alpha - 1) / B(x0, alpha - 1).
    """

    alpha: float
    x0: int = 1
    family = "yule"

    def __post_init__(self):
        self._check_x0()
        if not self.alpha > 1.0:
            raise InvalidModelError(f"Yule alpha must be > 1, got {self.alpha}")

    @property
    def params(self):
        return (self.alpha,)

    def _log_pmf(self, x):
        return special.betaln(x, self.alpha) - special.betaln(self.x0, self.alpha - 1.0)

    def _ccdf(self, x):
        x = np.asarray(x, dtype=float)
        a1 = self.alpha - 1.0
        return np.exp(special.betaln(x, a1) - special.betaln(self.x0, a1))


_EM_COEF = euler_maclaurin_coefficients()
_CUTOFF_EM_START = 128
_CUTOFF_EM_MAX_RATE = 0.5


def _cutoff_log_tail(alpha, lam, start):
    """log Σ_{x >= start} x^(-alpha) e^(-lam x)."""
    start = int(start)
    if lam >= _CUTOFF_EM_MAX_RATE:
        # geometric decay: a few dozen terms, scaled by the first one
        def term(x):
            x = np.asarray(x, dtype=float)
            return np.exp(-alpha * np.log(x / start) - lam * (x - start))

        def integral(n):
            return float(_em_integral_ratio(alpha, lam, n)) * float(term(np.asarray(n)))

        s = truncated_tail_sum(term, start, integral=integral)
        return -alpha * np.log(start) - lam * start + np.log(s)

    m = max(start, _CUTOFF_EM_START)
    parts = []
    if m > start:
        x = np.arange(start, m, dtype=float)
        parts.append(special.logsumexp(-alpha * np.log(x) - lam * x))
    # Euler-Maclaurin from m: f(m) * [∫_m^∞ f / f(m) + 1/2 + Σ_j c_j (-f^(2j-1)(m) / f(m))]
    bracket = _em_integral_ratio(alpha, lam, m) + 0.5
    for j, c in enumerate(_EM_COEF, start=1):
        k = 2 * j - 1
        acc = 0.0
        poch = 1.0
        binom = 1.0
        for i in range(k + 1):
            acc += binom * poch * m ** (-i) * lam ** (k - i)
            poch *= alpha + i
            binom = binom * (k - i) / (i + 1)
        bracket += c * acc
    parts.append(-alpha * np.log(m) - lam * m + np.log(bracket))
    return float(special.logsumexp(parts))


def _em_integral_ratio(alpha, lam, m):
    """∫_m^∞ x^-alpha e^(-lam x) dx divided by m^-alpha e^(-lam m)."""
    z = lam * m
    with mpmath.workdps(20):
        val = m * mpmath.expint(alpha, z) * mpmath.exp(z)
    return float(val)


@dataclass(frozen=True)
class PowerLawCutoff(TailModel):
    """p(x) ∝ x^(-alpha) e^(-lam x) on [x0, inf), alpha >= 0, lam > 0."""

    alpha: float
    lam: float
    x0: int = 1
    family = "cutoff"

    def __post_init__(self):
        self._check_x0()
        if not self.alpha >= 0.0:
            raise InvalidModelError(f"cutoff alpha must be >= 0, got {self.alpha}")
        if not self.lam > 0.0:
            raise InvalidModelError(f"cutoff rate must be > 0, got {self.lam}")

    @property
    def params(self):
        return (self.alpha, self.lam)

    @cached_property
    def _log_norm(self):
        return _cutoff_log_tail(self.alpha, self.lam, self.x0)

    def _log_pmf(self, x):
        return -self.alpha * np.log(x) - self.lam * x - self._log_norm

    def _ccdf_range(self, a, b):
        x = np.arange(a, b, dtype=float)
        tail_b = np.exp(_cutoff_log_tail(self.alpha, self.lam, b) - self._log_norm)
        p = np.exp(self._log_pmf(x))
        return tail_b + np.cumsum(p[::-1])[::-1]

    def _ccdf(self, x):
        x = np.asarray(x, dtype=np.int64)
        if x.size == 0:
            return np.zeros(x.shape)
        lo, hi = int(x.min()), int(x.max())
        if hi - lo <= (1 << 16):
            table = self._ccdf_range(lo, hi + 1)
            return table[x - lo]
        uniq, inv = np.unique(x, return_inverse=True)
        vals = np.array([np.exp(_cutoff_log_tail(self.alpha, self.lam, u) - self._log_norm)
                         for u in uniq])
        return vals[inv].reshape(x.shape)


FAMILIES = {
    cls.family: cls
    for cls in (PowerLaw, Exponential, Weibull, LogNormal, Tsallis, Yule, PowerLawCutoff)
}
ALTERNATIVES = ("exponential", "weibull", "lognormal", "tsallis", "yule", "cutoff")


def log_pmf(model, x):
    return model.log_pmf(x)


def ccdf(model, x):
    return model.ccdf(x)


def sample(model, n, seed):
    return model.sample(n, seed)


# --------------------------------------------------------------------------
# maximum likelihood


def powerlaw_alpha_mle(n, sum_log, x0, bounds=ALPHA_BOUNDS, tol=1e-10, max_iter=100):
    """Vectorized maximizer of L(alpha) = -n ln ζ(alpha, x0) - alpha Σ ln x.

    L is concave in alpha, so the score is decreasing and a Newton iteration
    safeguarded by a shrinking bracket converges from any start. Returns the
    estimates and a boolean mask of those pinned at a bound.
    """
    n = np.asarray(n, dtype=float)
    s_log = np.asarray(sum_log, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    n, s_log, x0 = np.broadcast_arrays(n, s_log, x0)
    shape = n.shape
    n, s_log, x0 = n.ravel(), s_log.ravel(), x0.ravel()
    lo_b, hi_b = bounds

    def score(a, idx):
        z, z1, z2 = hurwitz_zeta_derivs(a, x0[idx])
        r1 = z1 / z
        g = -n[idx] * r1 - s_log[idx]
        gp = -n[idx] * (z2 / z - r1 * r1)
        return g, gp

    alpha = np.empty_like(n)
    pinned = np.zeros(n.shape, dtype=bool)
    idx_all = np.arange(n.size)
    g_lo, _ = score(np.full(n.size, lo_b), idx_all)
    g_hi, _ = score(np.full(n.size, hi_b), idx_all)
    at_lo = g_lo <= 0
    at_hi = (g_hi >= 0) & ~at_lo
    alpha[at_lo] = lo_b
    alpha[at_hi] = hi_b
    pinned[at_lo | at_hi] = True

    act = np.nonzero(~pinned)[0]
    lo = np.full(act.size, lo_b)
    hi = np.full(act.size, hi_b)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = 1.0 + n[act] / (s_log[act] - n[act] * np.log(x0[act] - 0.5))
    a = np.where(np.isfinite(a), a, 0.5 * (lo_b + hi_b))
    a = np.clip(a, lo_b + 1e-3, hi_b - 1e-3)
    for _ in range(max_iter):
        if act.size == 0:
            break
        g, gp = score(a, act)
        lo = np.where(g > 0, a, lo)
        hi = np.where(g > 0, hi, a)
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = a - g / gp
        bad = ~((nxt > lo) & (nxt < hi))
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = (np.abs(nxt - a) < tol) | (hi - lo < tol)
        alpha[act[done]] = nxt[done]
        keep = ~done
        act, a, lo, hi = act[keep], nxt[keep], lo[keep], hi[keep]
    if act.size:
        alpha[act] = a
    return alpha.reshape(shape), pinned.reshape(shape)


def _tail_histogram(data, x0):
    arr = _as_int_array(np.asarray(data).ravel())
    if arr.size == 0:
        raise DegenerateDataError("no data to fit")
    if np.any(arr < x0):
        raise DomainError(f"all data must be >= x0={x0}")
    vals, w = np.unique(arr, return_counts=True)
    return vals.astype(float), w.astype(float)


def _fit_power_law(vals, w, x0, bounds):
    n = w.sum()
    a, pinned = powerlaw_alpha_mle(n, np.sum(w * np.log(vals)), x0, bounds)
    return PowerLaw(float(a), x0)


def _fit_exponential(vals, w, x0):
    # geometric tail: 1 / (e^lam - 1) = mean excess over x0
    m = np.sum(w * (vals - x0)) / w.sum()
    return Exponential(float(np.log1p(1.0 / m)), x0)


def _fit_yule(vals, w, x0, bounds):
    def negll(a):
        return -(np.sum(w * special.betaln(vals, a)) - w.sum() * special.betaln(x0, a - 1.0))

    res = optimize.minimize_scalar(negll, bounds=bounds, method="bounded",
                                   options={"xatol": 1e-9})
    if not res.success:
        raise FitFailure("Yule fit did not converge", best=(float(res.x),), loglik=-res.fun)
    return Yule(float(res.x), x0)


# transformed parameter vector -> model; box bounds in transformed space;
# whether an optimum on the box boundary counts as converged
def _weibull_from(t, x0):
    return Weibull.from_rate(float(np.exp(t[0])), float(np.exp(t[1])), x0)


def _lognormal_from(t, x0, discretization="rounding"):
    return LogNormal(float(t[0]), float(np.exp(t[1])), x0, discretization)


def _tsallis_from(t, x0):
    return Tsallis(float(np.exp(t[0])), float(np.exp(t[1])), x0)


def _cutoff_from(t, x0):
    return PowerLawCutoff(float(t[0]), float(np.exp(t[1])), x0)


_BOX = {
    "weibull": (np.array([-50.0, np.log(1e-3)]), np.array([30.0, np.log(20.0)]), False),
    "lognormal": (np.array([-50.0, np.log(1e-3)]), np.array([50.0, np.log(50.0)]), False),
    "tsallis": (np.array([np.log(1e-8), np.log(1e-3)]), np.array([np.log(1e8), np.log(100.0)]), True),
    "cutoff": (np.array([0.0, -40.0]), np.array([20.0, np.log(50.0)]), True),
}

_JITTER_RESTARTS = 4


def _starts(family, vals, w, x0, bounds):
    n = w.sum()
    mean = np.sum(w * vals) / n
    if family == "weibull":
        return [np.array([np.log(1.0 / mean), 0.0])]
    if family == "lognormal":
        lx = np.log(vals)
        mu = np.sum(w * lx) / n
        sd = np.sqrt(max(np.sum(w * (lx - mu) ** 2) / n, 1e-6))
        return [np.array([mu, np.log(sd)])]
    if family == "tsallis":
        return [np.array([np.log(mean), np.log(2.0)])]
    if family == "cutoff":
        a_pl = _fit_power_law(vals, w, x0, bounds).alpha
        # the second start sits at the power-law limit so that the
        # nesting family can never end up below the nested fit
        return [np.array([a_pl, np.log(1.0 / vals.max())]), np.array([a_pl, -35.0])]
    raise ValueError(family)


def _nm_fit(family, vals, w, x0, bounds, make):
    lo, hi, boundary_ok = _BOX[family]

    def negll(t):
        if np.any(t < lo) or np.any(t > hi):
            return np.inf
        try:
            m = make(t, x0)
            v = -np.sum(w * m._log_pmf(vals))
        except (InvalidModelError, FloatingPointError, OverflowError, ValueError):
            return np.inf
        return v if np.isfinite(v) else np.inf

    base = _starts(family, vals, w, x0, bounds)
    jit = np.random.default_rng(0x5EED + len(family))
    starts = [np.clip(s, lo, hi) for s in base]
    for _ in range(_JITTER_RESTARTS):
        starts.append(np.clip(base[0] + jit.normal(0.0, 0.5, size=2), lo, hi))

    opts = {"xatol": 1e-8, "fatol": 1e-9, "maxiter": 3000, "maxfev": 6000}
    best_t, best_f, best_ok = None, np.inf, False
    with np.errstate(all="ignore"):
        for s0 in starts:
            if not np.isfinite(negll(s0)):
                continue
            r1 = optimize.minimize(negll, s0, method="Nelder-Mead", options=opts)
            r2 = optimize.minimize(negll, r1.x, method="Nelder-Mead", options=opts)
            ok = bool(r1.success and r2.success and np.isfinite(r2.fun))
            if ok and not boundary_ok:
                span = hi - lo
                ok = bool(np.all(r2.x - lo > 1e-6 * span) and np.all(hi - r2.x > 1e-6 * span))
            better = r2.fun < best_f - 1e-12
            if (ok and not best_ok) or (ok == best_ok and better):
                best_t, best_f, best_ok = r2.x, r2.fun, ok
    if best_t is None or not best_ok:
        best = None if best_t is None else make(best_t, x0).params
        raise FitFailure(f"{family} maximum likelihood did not converge",
                         best=best, loglik=None if best_t is None else -best_f)
    return make(best_t, x0)


def fit_mle(family, data, x0, alpha_bounds=ALPHA_BOUNDS, discretization="rounding"):
    """Maximum likelihood fit of ``family`` to the tail ``data`` (all >= x0).

    ``family`` is one of ``FAMILIES``. Power law and Yule use bounded 1-D
    maximization over ``alpha_bounds``; the exponential rate has a closed
    form; the two-parameter families use multi-start Nelder-Mead and raise
    ``FitFailure`` when no start converges.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    x0 = int(x0)
    if x0 < 1:
        raise DomainError("x0 must be >= 1")
    vals, w = _tail_histogram(data, x0)
    if vals.size == 1 and (vals[0] == x0 or family not in ("power_law", "exponential", "yule")):
        raise DegenerateDataError(f"all observations equal {int(vals[0])}; likelihood is unbounded")
    if family == "power_law":
        return _fit_power_law(vals, w, x0, alpha_bounds)
    if family == "exponential":
        return _fit_exponential(vals, w, x0)
    if family == "yule":
        return _fit_yule(vals, w, x0, alpha_bounds)
    if family == "lognormal":
        return _nm_fit(family, vals, w, x0, alpha_bounds,
                       lambda t, x: _lognormal_from(t, x, discretization))
    make = {"weibull": _weibull_from, "tsallis": _tsallis_from, "cutoff": _cutoff_from}[family]
    return _nm_fit(family, vals, w, x0, alpha_bounds, make)
