"""Command line interface: ``tailfit run`` and ``tailfit corpus``."""

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ConfigError, ParseError, TailfitError
from .pipeline import PROFILES, RunConfig, export_ccdf, ingest, run_analysis
from .report import render_csv, render_json

EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_INPUT = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fail(kind, message, code, **extra):
    payload = {"status": "error", "error": kind, "message": message, **extra}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def build_parser():
    p = _Parser(prog="tailfit", description="Power-law tail analysis of citation counts.")
    p.add_argument("--version", action="version", version=f"tailfit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="analyze one or more fields")
    r.add_argument("--input", nargs="+", required=True, metavar="FILE",
                   help="count files (.counts raw, .hist histogram)")
    r.add_argument("--format", choices=["raw", "histogram"],
                   help="input format; default inferred from the file suffix")
    r.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    r.add_argument("--profile", choices=sorted(PROFILES),
                   help="test: 200 bootstrap reps / 200 GoF sims; paper: 1000 / 1000")
    r.add_argument("--seed", type=int, help="master seed (default 0)")
    r.add_argument("--bootstrap-reps", type=int)
    r.add_argument("--gof-sims", type=int)
    r.add_argument("--gof-threshold", type=float)
    r.add_argument("--min-tail", type=int)
    r.add_argument("--pooled", action="store_true", help="add a row for all fields combined")
    r.add_argument("--out", default="report.json",
                   help="JSON report path; the CSV goes next to it with a .csv suffix")
    r.add_argument("--ccdf-dir", help="write <field>.ccdf.csv files here")
    r.add_argument("--workers", type=int, help="worker processes (capped by TAILFIT_THREADS)")
    r.add_argument("-v", "--verbose", action="store_true")

    c = sub.add_parser("corpus", help="regenerate the bundled synthetic corpus")
    c.add_argument("--out", required=True)
    c.add_argument("--n", type=int, default=50_000)
    c.add_argument("--seed", type=int, default=None)
    return p


def _config_from_args(args):
    base = RunConfig.load(args.config) if args.config else RunConfig()
    if args.profile:
        base = base.with_overrides(**PROFILES[args.profile])
    return base.with_overrides(
        master_seed=args.seed,
        bootstrap_reps=args.bootstrap_reps,
        gof_sims=args.gof_sims,
        gof_threshold=args.gof_threshold,
        min_tail=args.min_tail,
        workers=args.workers,
    )


def _run(args):
    # dataclasses.replace re-runs validation, so bad values surface here
    config = _config_from_args(args)
    samples = [ingest(path, args.format) for path in args.input]
    t0 = time.perf_counter()
    report = run_analysis(samples, config, pooled=args.pooled)
    elapsed = time.perf_counter() - t0

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in config.formats:
        out.write_text(render_json(report))
        written.append(str(out))
    if "csv" in config.formats:
        csv_path = out.with_suffix(".csv")
        csv_path.write_text(render_csv(report))
        written.append(str(csv_path))
    # wall time lives in a sidecar so the report itself stays reproducible
    timing = out.with_name(out.stem + ".timing.json")
    timing.write_text(json.dumps({"wall_time_s": elapsed, "fields": len(report.fields)}) + "\n")

    if args.ccdf_dir:
        ccdf_dir = Path(args.ccdf_dir)
        ccdf_dir.mkdir(parents=True, exist_ok=True)
        by_name = {s.name: s for s in samples}
        if args.pooled:
            from .pipeline import pool
            by_name["pooled"] = pool(samples)
        for row in report.fields:
            if row.fit is not None:
                path = export_ccdf(by_name[row.name], row.fit, ccdf_dir / f"{row.name}.ccdf.csv")
                written.append(str(path))
    skipped = [r.name for r in report.fields if r.status != "ok"]
    print(json.dumps({"status": "ok", "fields": len(report.fields), "skipped": skipped,
                      "outputs": written}))
    return 0


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        return _fail("UsageError", str(exc), EXIT_USAGE)
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "corpus":
            from .corpus import CORPUS_SEED, generate_corpus
            seed = CORPUS_SEED if args.seed is None else args.seed
            manifest = generate_corpus(args.out, args.n, seed)
            print(json.dumps({"status": "ok", "files": [f["file"] for f in manifest["fields"]]}))
            return 0
        return _run(args)
    except ConfigError as exc:
        return _fail("ConfigError", str(exc), EXIT_USAGE)
    except ParseError as exc:
        return _fail("ParseError", str(exc), EXIT_INPUT,
                     path=None if exc.path is None else str(exc.path), line=exc.line)
    except OSError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_INPUT,
                     path=getattr(exc, "filename", None))
    except TailfitError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_ERROR)


if __name__ == "__main__":
    sys.exit(main())
