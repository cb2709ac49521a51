"""JSON and CSV rendering of an AnalysisReport.

JSON keeps full precision. CSV uses fixed decimals: cutoff SE with one
decimal, exponent and its SE with two, percentages with one and p-values
and likelihood ratios with three.
"""

import csv
import io
import json
import math

from .models import ALTERNATIVES

__all__ = [
    "fmt_x0",
    "fmt_alpha",
    "fmt_pct",
    "fmt_p",
    "fmt_num",
    "csv_header",
    "csv_row",
    "render_csv",
    "report_to_dict",
    "render_json",
]

MISSING = "-"


def _finite(v):
    return v is not None and math.isfinite(v)


def fmt_x0(x0, se):
    return f"{int(x0)} ({se:.1f})" if _finite(se) else f"{int(x0)} ({MISSING})"


def fmt_alpha(alpha, se):
    return f"{alpha:.2f} ({se:.2f})" if _finite(se) else f"{alpha:.2f} ({MISSING})"


def fmt_pct(pct):
    return f"{pct:.1f}" if _finite(pct) else MISSING


def fmt_p(p):
    return f"{p:.3f}" if _finite(p) else MISSING


def fmt_num(v, spec=".3f"):
    return format(v, spec) if _finite(v) else MISSING


def csv_header():
    head = ["field", "status", "n", "mean", "sd", "max", "x0", "alpha", "n_tail", "pct_total",
            "gof_p"]
    for alt in ALTERNATIVES:
        head += [f"{alt}_lr", f"{alt}_nlr", f"{alt}_p", f"{alt}_verdict"]
    return head


def csv_row(row):
    """Table cells for one FieldReport, in ``csv_header`` order."""
    cells = [row.name, row.status, str(row.n), fmt_num(row.mean, ".4g"), fmt_num(row.sd, ".4g"),
             str(row.max)]
    fit = row.fit
    if fit is None:
        cells += [MISSING] * 5
    else:
        cells += [fmt_x0(fit.x0, fit.se_x0), fmt_alpha(fit.alpha, fit.se_alpha),
                  str(fit.n_tail), fmt_pct(row.pct_tail),
                  fmt_p(row.gof.p_value) if row.gof is not None else MISSING]
    by_alt = {c.alternative: c for c in row.comparisons}
    for alt in ALTERNATIVES:
        c = by_alt.get(alt)
        if c is None or c.failed:
            cells += [MISSING] * 4
        else:
            cells += [fmt_num(c.lr), fmt_num(c.nlr), fmt_p(c.p_value), c.verdict]
    return cells


def render_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header())
    for row in report.fields:
        w.writerow(csv_row(row))
    return buf.getvalue()


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _fit_dict(fit):
    return {
        "x0": int(fit.x0),
        "alpha": fit.alpha,
        "se_x0": _clean(fit.se_x0),
        "se_alpha": _clean(fit.se_alpha),
        "n_tail": fit.n_tail,
        "frac_tail": fit.frac_tail,
        "ks": fit.ks,
        "bootstrap_failed": fit.n_boot_failed,
    }


def _gof_dict(g):
    return {"k": g.k, "n_sims": g.n_sims, "n_exceed": g.n_exceed, "n_failed": g.n_failed,
            "p_value": g.p_value, "reject": g.reject, "threshold": g.threshold}


def _cmp_dict(c):
    return {
        "alternative": c.alternative,
        "nested": c.nested,
        "lr": c.lr,
        "stat": c.stat,
        "nlr": c.nlr,
        "sigma_lr": c.sigma_lr,
        "p_value": c.p_value,
        "verdict": c.verdict,
        "n": c.n,
        "params": None if c.params is None else [float(p) for p in c.params],
        "error": c.error,
    }


def report_to_dict(report):
    rows = []
    for r in report.fields:
        rows.append({
            "field": r.name,
            "status": r.status,
            "reason": r.reason,
            "descriptive": {"n": r.n, "mean": r.mean, "sd": r.sd, "max": r.max},
            "power_law": None if r.fit is None else _fit_dict(r.fit),
            "gof": None if r.gof is None else _gof_dict(r.gof),
            "comparisons": [_cmp_dict(c) for c in r.comparisons],
            "notes": list(r.notes),
            "seeds": dict(r.seeds),
        })
    return {
        "tool": "tailfit",
        "version": report.version,
        "master_seed": report.config.master_seed,
        "config": report.config.to_dict(),
        "fields": rows,
    }


def render_json(report):
    return json.dumps(report_to_dict(report), indent=2, allow_nan=False) + "\n"
