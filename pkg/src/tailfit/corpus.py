"""The bundled synthetic corpus: five fields drawn from known tail models."""

import hashlib
import json
from pathlib import Path

from .models import Exponential, LogNormal, PowerLaw, PowerLawCutoff, Yule
from .pipeline import emit
from .plfit import CountSample
from .seeding import derive_seed

CORPUS_SEED = 20140601
CORPUS_SIZE = 50_000

FIELDS = {
    "power_law": PowerLaw(3.5, 1),
    "lognormal": LogNormal(1.0, 1.2, 1),
    "yule": Yule(3.0, 1),
    "cutoff": PowerLawCutoff(2.0, 0.02, 1),
    "exponential": Exponential(0.1, 1),
}


def field_sample(name, n=CORPUS_SIZE, master_seed=CORPUS_SEED):
    model = FIELDS[name]
    seed = derive_seed(master_seed, name, "corpus")
    return CountSample.from_counts(name, model.sample(n, seed)), seed


def generate_corpus(outdir, n=CORPUS_SIZE, master_seed=CORPUS_SEED):
    """Write ``<field>.counts`` files plus ``manifest.json`` into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, model in FIELDS.items():
        sample, seed = field_sample(name, n, master_seed)
        path = emit(sample, outdir / f"{name}.counts", "raw")
        entries.append({
            "field": name,
            "file": path.name,
            "family": model.family,
            "params": dict(zip(_param_names(model), map(float, model.params))),
            "x0": model.x0,
            "n": n,
            "seed": seed,
            "sha256": hashlib.sha256(path.read_bytes()).hexdigest(),
        })
    manifest = {
        "generator": f"tailfit corpus --out {outdir} --n {n} --seed {master_seed}",
        "master_seed": master_seed,
        "fields": entries,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def _param_names(model):
    return [f for f in model.__dataclass_fields__ if f not in ("x0", "discretization", "rate_")]
