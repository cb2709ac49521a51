import csv
import io
import json
import math

from tailfit.gof import GofResult
from tailfit.models import PowerLaw
from tailfit.pipeline import AnalysisReport, FieldReport, RunConfig
from tailfit.plfit import PowerLawFit
from tailfit.report import (
    csv_header,
    csv_row,
    fmt_alpha,
    fmt_num,
    fmt_p,
    fmt_pct,
    fmt_x0,
    render_csv,
    render_json,
)
from tailfit.selection import ComparisonResult


def energy_row():
    fit = PowerLawFit(PowerLaw(3.91, 32), n_tail=356, n_total=71_234, ks=0.03,
                      se_alpha=0.22, se_x0=5.4)
    gof = GofResult(0.03, 1000, 825, 0.825, False)
    exp = ComparisonResult("exponential", 20.740, 3.1, 3.1, 0.4, 0.009, False, "power_law", 356)
    cut = ComparisonResult("cutoff", 0.0, 0.0, 0.0, 0.0, 1.0, True, "indeterminate", 356)
    weib = ComparisonResult.failure("weibull", False, 356, RuntimeError("did not converge"))
    return FieldReport("Energy", 71_234, 8.4, 12.0, 2100, fit=fit, gof=gof,
                       comparisons=[exp, weib, cut])


def test_formatters():
    assert fmt_x0(32, 5.4) == "32 (5.4)"
    assert fmt_alpha(3.91, 0.22) == "3.91 (0.22)"
    assert fmt_pct(100 * 356 / 71_234) == "0.5"
    assert fmt_p(0.825) == "0.825"
    assert fmt_p(1.0) == "1.000"
    assert fmt_num(20.74) == "20.740"
    assert fmt_num(0.0) == "0.000"
    assert fmt_x0(32, math.nan) == "32 (-)"
    assert fmt_p(None) == "-"


def test_csv_row_layout():
    row = dict(zip(csv_header(), csv_row(energy_row())))
    assert [row[k] for k in ("x0", "alpha", "n_tail", "pct_total", "gof_p")] == \
        ["32 (5.4)", "3.91 (0.22)", "356", "0.5", "0.825"]
    assert (row["exponential_lr"], row["exponential_p"]) == ("20.740", "0.009")
    assert row["exponential_verdict"] == "power_law"
    assert (row["cutoff_nlr"], row["cutoff_p"]) == ("0.000", "1.000")
    assert row["weibull_lr"] == row["weibull_p"] == "-"
    assert row["yule_lr"] == "-"


def test_render_csv_and_json():
    report = AnalysisReport(RunConfig(master_seed=1), [energy_row()], "0.1.0")
    table = list(csv.reader(io.StringIO(render_csv(report))))
    assert table[0] == csv_header() and table[1][0] == "Energy"
    doc = json.loads(render_json(report))
    assert doc["master_seed"] == 1
    f = doc["fields"][0]
    assert f["power_law"]["alpha"] == 3.91 and f["power_law"]["se_x0"] == 5.4
    assert f["gof"]["p_value"] == 0.825
    assert f["comparisons"][1]["error"].startswith("RuntimeError")
    assert render_json(report) == render_json(report)


def test_json_nan_becomes_null():
    row = energy_row()
    row.fit = PowerLawFit(PowerLaw(3.91, 32), 356, 71_234, 0.03)
    doc = json.loads(render_json(AnalysisReport(RunConfig(), [row])))
    assert doc["fields"][0]["power_law"]["se_alpha"] is None
