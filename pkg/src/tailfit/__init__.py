"""Discrete power-law tail fitting for citation-count data.

Fits a discrete power law above a KS-selected cutoff, attaches bootstrap
standard errors, runs a semi-parametric bootstrap goodness-of-fit test and
compares the power law with six alternative tail families by likelihood
ratio.
"""

__version__ = "0.1.0"

from .errors import TailfitError
from .gof import GofResult, gof_pvalue, synthesize
from .models import ALTERNATIVES, FAMILIES, fit_mle
from .pipeline import RunConfig, analyze_field, export_ccdf, ingest, run_analysis
from .plfit import CountSample, FitConfig, PowerLawFit, bootstrap_se, estimate_xmin, ks_statistic
from .selection import ComparisonResult, compare_all, nested_lr_test, vuong_test
from .specfun import hurwitz_zeta

__all__ = [
    "__version__",
    "TailfitError",
    "GofResult",
    "gof_pvalue",
    "synthesize",
    "ALTERNATIVES",
    "FAMILIES",
    "fit_mle",
    "RunConfig",
    "analyze_field",
    "export_ccdf",
    "ingest",
    "run_analysis",
    "CountSample",
    "FitConfig",
    "PowerLawFit",
    "bootstrap_se",
    "estimate_xmin",
    "ks_statistic",
    "ComparisonResult",
    "compare_all",
    "nested_lr_test",
    "vuong_test",
    "hurwitz_zeta",
]
