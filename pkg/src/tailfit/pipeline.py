"""Run configuration, ingestion, per-field analysis and CCDF export."""

import json
import logging
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    BootstrapFailure,
    ConfigError,
    GofFailure,
    InsufficientTailError,
    ParseError,
)
from .gof import MIN_SIMS, GofResult, gof_pvalue
from .models import ALPHA_BOUNDS
from .plfit import CountSample, FitConfig, PowerLawFit, bootstrap_se, estimate_xmin
from .seeding import derive_seed
from .selection import compare_all
from .specfun import DEFAULT_TOLERANCE, SeriesTolerance, series_tolerance

__all__ = [
    "PROFILES",
    "RunConfig",
    "FieldReport",
    "AnalysisReport",
    "ingest",
    "emit",
    "pool",
    "analyze_field",
    "run_analysis",
    "export_ccdf",
]

log = logging.getLogger(__name__)

PROFILES = {
    "test": {"bootstrap_reps": 200, "gof_sims": 200},
    "paper": {"bootstrap_reps": 1000, "gof_sims": 1000},
}
FORMATS = ("csv", "json")
POOLED_NAME = "pooled"


@dataclass(frozen=True)
class RunConfig:
    """Settings for a full analysis run.

    ``workers`` only controls parallelism and never affects results, so it
    is left out of the serialized configuration.
    """

    master_seed: int = 0
    bootstrap_reps: int = 1000
    gof_sims: int = 1000
    gof_threshold: float = 0.1
    min_tail: int = 50
    alpha_bounds: tuple = ALPHA_BOUNDS
    series_tol: SeriesTolerance = DEFAULT_TOLERANCE
    formats: tuple = FORMATS
    workers: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        def integer(name, lo):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < lo:
                raise ConfigError(f"{name} must be an integer >= {lo}, got {v!r}")

        integer("master_seed", 0)
        if self.master_seed >= 1 << 64:
            raise ConfigError("master_seed must fit in 64 bits")
        integer("bootstrap_reps", 2)
        integer("gof_sims", MIN_SIMS)
        integer("min_tail", 1)
        if not 0.0 < float(self.gof_threshold) < 1.0:
            raise ConfigError(f"gof_threshold must lie in (0, 1), got {self.gof_threshold}")
        try:
            FitConfig(self.min_tail, tuple(self.alpha_bounds))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if not isinstance(self.series_tol, SeriesTolerance):
            raise ConfigError("series_tol must be a SeriesTolerance")
        bad = set(self.formats) - set(FORMATS)
        if bad or not self.formats:
            raise ConfigError(f"formats must be a non-empty subset of {FORMATS}, got {self.formats}")
        if self.workers is not None and (not isinstance(self.workers, int) or self.workers < 1):
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")

    @classmethod
    def from_profile(cls, profile="paper", **overrides):
        if profile not in PROFILES:
            raise ConfigError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
        return cls(**{**PROFILES[profile], **overrides})

    @classmethod
    def from_mapping(cls, data):
        """Build from a plain dict as read from a JSON config file."""
        data = dict(data)
        profile = data.pop("profile", None)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "alpha_bounds" in data:
            data["alpha_bounds"] = tuple(data["alpha_bounds"])
        if "formats" in data:
            data["formats"] = tuple(data["formats"])
        if "series_tol" in data:
            try:
                data["series_tol"] = SeriesTolerance(**data["series_tol"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"series_tol: {exc}") from None
        if profile is not None:
            return cls.from_profile(profile, **data)
        return cls(**data)

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_mapping(data)

    @property
    def fit_config(self):
        return FitConfig(self.min_tail, tuple(self.alpha_bounds))

    def to_dict(self):
        d = asdict(self)
        d.pop("workers")
        d["alpha_bounds"] = list(self.alpha_bounds)
        d["formats"] = list(self.formats)
        return d

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


# --------------------------------------------------------------------------
# ingestion

_FIELD_RE = re.compile(r"^#\s*field\s*:\s*(.+?)\s*$", re.IGNORECASE)
_INT_RE = re.compile(r"^[+-]?\d+$")


def _parse_int(tok, path, lineno, what="count"):
    tok = tok.strip()
    if not _INT_RE.match(tok):
        raise ParseError(f"{what} {tok!r} is not an integer", path, lineno)
    v = int(tok)
    if v < 0:
        raise ParseError(f"{what} {v} is negative", path, lineno)
    return v


def _detect_format(path):
    return "histogram" if Path(path).suffix.lower() in (".hist", ".csv") else "raw"


def ingest(path, format=None, name=None):
    """Read a count file into a CountSample.

    ``raw``: one non-negative integer per line; ``#`` starts a comment and
    a ``# field: <name>`` line sets the field name. ``histogram``: lines
    ``citations,count`` with an optional header line. The format defaults
    to ``histogram`` for ``.hist``/``.csv`` files and ``raw`` otherwise;
    the name defaults to the file stem.
    """
    path = Path(path)
    fmt = format or _detect_format(path)
    if fmt not in ("raw", "histogram"):
        raise ConfigError(f"unknown input format {fmt!r}")
    label = path.stem
    values, freqs = [], []
    lineno = 0
    seen_data = False
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _FIELD_RE.match(line)
                if m:
                    label = m.group(1)
                continue
            if fmt == "raw":
                values.append(_parse_int(line, path, lineno))
                seen_data = True
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError("expected 'citations,count'", path, lineno)
            if not seen_data and not any(_INT_RE.match(p.strip()) for p in parts):
                seen_data = True  # header line
                continue
            values.append(_parse_int(parts[0], path, lineno, "citation value"))
            freqs.append(_parse_int(parts[1], path, lineno, "frequency"))
            seen_data = True
    if not values or (freqs and sum(freqs) == 0):
        raise ParseError("no observations in file", path, max(lineno, 1))
    if name is not None:
        label = name
    if fmt == "raw":
        return CountSample.from_counts(label, np.array(values, dtype=np.int64))
    return CountSample.from_histogram(label, values, freqs)


def emit(sample, path, format="raw"):
    """Write ``sample`` in a format ``ingest`` reads back to the same multiset."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"# field: {sample.name}\n")
        if format == "raw":
            np.savetxt(fh, sample.counts, fmt="%d")
        elif format == "histogram":
            fh.write("citations,count\n")
            for v, f in zip(sample.values, sample.freq):
                fh.write(f"{v},{f}\n")
        else:
            raise ConfigError(f"unknown output format {format!r}")
    return path


def pool(samples, name=POOLED_NAME):
    """Concatenate several samples into one."""
    values = np.concatenate([s.values for s in samples])
    freq = np.concatenate([s.freq for s in samples])
    return CountSample.from_histogram(name, values, freq)


# --------------------------------------------------------------------------
# analysis


@dataclass
class FieldReport:
    """Descriptive statistics, power-law fit, GoF test and model comparisons for one field."""

    name: str
    n: int
    mean: float
    sd: float
    max: int
    status: str = "ok"
    reason: Optional[str] = None
    fit: Optional[PowerLawFit] = None
    gof: Optional[GofResult] = None
    comparisons: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    seeds: dict = field(default_factory=dict)

    @property
    def pct_tail(self):
        return None if self.fit is None else 100.0 * self.fit.frac_tail


@dataclass
class AnalysisReport:
    config: RunConfig
    fields: list
    version: str = ""

    def field(self, name):
        for row in self.fields:
            if row.name == name:
                return row
        raise KeyError(name)


def describe(sample):
    c = sample.counts
    sd = float(np.std(c, ddof=1)) if c.size > 1 else 0.0
    return {"n": sample.n, "mean": float(np.mean(c)), "sd": sd, "max": int(c[-1])}


def analyze_field(sample, config):
    """Fit, bootstrap, GoF-test and compare one field.

    Stage seeds come from ``derive_seed(master_seed, name, stage)``, so a
    row depends only on its own sample, the config and its name. Failures
    of later stages degrade the row rather than aborting.
    """
    row = FieldReport(sample.name, **describe(sample))
    row.seeds = {
        "bootstrap": derive_seed(config.master_seed, sample.name, "bootstrap"),
        "gof": derive_seed(config.master_seed, sample.name, "gof"),
    }
    fc = config.fit_config
    with series_tolerance(config.series_tol):
        try:
            fit = estimate_xmin(sample, fc)
        except InsufficientTailError as exc:
            row.status, row.reason = "skipped", str(exc)
            log.warning("field %s skipped: %s", sample.name, exc)
            return row
        log.info("field %s: x0=%d alpha=%.4f n_tail=%d", sample.name, fit.x0, fit.alpha, fit.n_tail)
        try:
            se = bootstrap_se(sample, fit, config.bootstrap_reps, row.seeds["bootstrap"], fc,
                              config.workers)
            fit = fit.with_se(se.se_alpha, se.se_x0, se.n_failed)
        except BootstrapFailure as exc:
            row.notes.append(f"bootstrap: {exc}")
        row.fit = fit
        try:
            row.gof = gof_pvalue(sample, fit, config.gof_sims, row.seeds["gof"], fc,
                                 config.gof_threshold, config.workers)
        except GofFailure as exc:
            row.notes.append(f"gof: {exc}")
        row.comparisons = compare_all(sample, fit, config.gof_threshold,
                                      alpha_bounds=tuple(config.alpha_bounds))
    for c in row.comparisons:
        if c.failed:
            row.notes.append(f"{c.alternative}: {c.error}")
    return row


def run_analysis(samples, config, pooled=False):
    """Analyze every sample (and optionally their union); rows sorted by name."""
    from . import __version__

    names = [s.name for s in samples]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate field names: {sorted(n for n in set(names) if names.count(n) > 1)}")
    if pooled and POOLED_NAME in names:
        raise ConfigError(f"field name {POOLED_NAME!r} is reserved for the pooled row")
    todo = list(samples) + ([pool(samples)] if pooled else [])
    rows = [analyze_field(s, config) for s in todo]
    rows.sort(key=lambda r: r.name)
    return AnalysisReport(config, rows, __version__)


def export_ccdf(sample, fit, path):
    """Write ``x, ccdf_empirical, ccdf_fit`` for every distinct observed x >= 1.

    The empirical CCDF is P(X >= x) over the whole sample. The fitted
    column is filled for x >= x0 only and scaled by the tail fraction so
    that both columns agree at x0.
    """
    v = sample.values
    tail_counts = sample.n - np.concatenate([[0], np.cumsum(sample.freq)[:-1]])
    keep = v >= 1
    v, emp = v[keep], tail_counts[keep] / sample.n
    in_tail = v >= fit.x0
    model = np.full(v.size, np.nan)
    if np.any(in_tail):
        model[in_tail] = fit.frac_tail * np.asarray(fit.model.ccdf(v[in_tail]), dtype=float)
    path = Path(path)
    with path.open("w") as fh:
        fh.write("x,ccdf_empirical,ccdf_fit\n")
        for x, e, m in zip(v, emp, model):
            fh.write(f"{x},{float(e)!r},{'' if np.isnan(m) else repr(float(m))}\n")
    return path
