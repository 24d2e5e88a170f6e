"""Seeded Monte Carlo comparison of psi estimators on the benchmark mixtures.

Every (density, n, replicate) triple owns one sample drawn from
SeedSequence([seed, density, n, replicate]); all estimators see that same
sample.  Replicates are computed in any order by any number of workers and
reduced in index order, so outputs do not depend on the worker count.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import csv
import hashlib
import json
import math
import os

import numpy as np

from .competitors import psi_js, psi_shd
from .cv_core import psi_hat
from .exceptions import InvalidArgumentError
from .mixtures import catalog, sample, true_psi

ESTIMATORS = ("ct", "shd", "js")


def _ct(s):
    return psi_hat(s).estimate, None


def _js(s):
    return psi_js(s)[0], None


def _shd(s):
    est, trace = psi_shd(s)
    return est, ("fallback: " + trace.notes.get("reason", "")) if trace.fallback else None


RUNNERS = {"ct": _ct, "js": _js, "shd": _shd}


def parse_int_list(text):
    """'1-3,7' -> (1, 2, 3, 7)."""
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(float(part)))
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    densities: tuple = tuple(range(1, 17))
    sizes: tuple = (100, 1000)
    replicates: int = 500
    estimators: tuple = ESTIMATORS
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise InvalidArgumentError(f"replicates must be >= 1, got {self.replicates}")
        if not self.densities or any(d not in range(1, 17) for d in self.densities):
            raise InvalidArgumentError(f"densities must be a non-empty subset of 1..16, got {self.densities}")
        if not self.sizes or any(n < 2 for n in self.sizes):
            raise InvalidArgumentError(f"sample sizes must be >= 2, got {self.sizes}")
        bad = [e for e in self.estimators if e not in RUNNERS]
        if bad or not self.estimators:
            raise InvalidArgumentError(f"unknown estimators {bad}; choose from {sorted(RUNNERS)}")
        if self.workers < 1:
            raise InvalidArgumentError(f"workers must be >= 1, got {self.workers}")

    @classmethod
    def from_mapping(cls, m):
        kw = {}
        for key, conv in (("densities", parse_int_list), ("sizes", parse_int_list),
                          ("n", parse_int_list), ("replicates", int), ("B", int),
                          ("seed", int), ("workers", int)):
            if key in m and m[key] not in (None, ""):
                name = {"n": "sizes", "B": "replicates"}.get(key, key)
                kw[name] = conv(m[key])
        if m.get("estimators"):
            est = m["estimators"]
            kw["estimators"] = tuple(e.strip().lower() for e in est.split(",")) if isinstance(est, str) else tuple(est)
        return cls(**kw)

    @classmethod
    def from_file(cls, path):
        return cls.from_mapping(read_config_file(path))


def read_config_file(path):
    """Flat key=value lines; '#' starts a comment."""
    m = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidArgumentError(f"{path}:{lineno}: expected key=value, got {line!r}")
            k, v = line.split("=", 1)
            m[k.strip()] = v.strip()
    return m


def replicate_seed(seed, density, n, replicate):
    return np.random.SeedSequence([seed, density, n, replicate])


def _replicate(args):
    seed, density, n, rep, estimators = args
    x = sample(catalog(density), n, replicate_seed(seed, density, n, rep),
               replicate=rep, density=density)
    checksum = hashlib.sha1(x.values.tobytes()).hexdigest()
    ests, fails = [], []
    for name in estimators:
        try:
            est, note = RUNNERS[name](x)
            if not math.isfinite(est):
                raise FloatingPointError(f"non-finite estimate {est}")
        except Exception as exc:  # recorded, never dropped
            ests.append(math.nan)
            fails.append((name, "missing", f"{type(exc).__name__}: {exc}"))
            continue
        ests.append(est)
        if note:
            fails.append((name, "flagged", note))
    return checksum, ests, fails


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    truth: dict                      # density -> psi
    estimates: dict                  # (density, n) -> array (B, n_estimators)
    checksums: dict                  # (density, n) -> list of sha1
    failures: list = field(default_factory=list)   # (density, n, rep, estimator, kind, message)

    def rrmse(self, density, n):
        est = self.estimates[(density, n)]
        psi = self.truth[density]
        out = []
        for j in range(est.shape[1]):
            e = est[:, j][np.isfinite(est[:, j])]
            out.append(math.sqrt(float(np.mean((e - psi) ** 2))) / psi if e.size else math.nan)
        return out

    def cells(self):
        """Rows (density, n, estimator, rrmse, ratio, used, missing)."""
        rows = []
        for d in self.config.densities:
            for n in self.config.sizes:
                r = self.rrmse(d, n)
                best = np.nanmin(r)
                est = self.estimates[(d, n)]
                for j, name in enumerate(self.config.estimators):
                    used = int(np.sum(np.isfinite(est[:, j])))
                    rows.append((d, n, name, r[j], r[j] / best, used, est.shape[0] - used))
        return rows

    def summary(self):
        return summarize(self.cells())


def summarize(cells):
    """Mean, median, min and max of ratio-to-best per (n, estimator)."""
    groups = {}
    for d, n, name, _, ratio, *_ in cells:
        groups.setdefault((n, name), []).append(ratio)
    rows = []
    for (n, name), v in groups.items():
        v = np.asarray(v, dtype=float)
        v = v[np.isfinite(v)]
        if v.size == 0:  # estimator failed on every cell
            rows.append((n, name) + (math.nan,) * 4)
            continue
        rows.append((n, name, float(np.mean(v)), float(np.median(v)), float(np.min(v)), float(np.max(v))))
    return rows


def run(config, progress=None):
    tasks = [(config.seed, d, n, rep, config.estimators)
             for d in config.densities for n in config.sizes for rep in range(config.replicates)]
    if config.workers == 1:
        results = map(_replicate, tasks)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=config.workers)
        results = pool.map(_replicate, tasks, chunksize=max(1, len(tasks) // (8 * config.workers)))
    estimates, checksums, failures = {}, {}, []
    try:
        for i, (task, (chk, ests, fails)) in enumerate(zip(tasks, results)):
            _, d, n, rep, _ = task
            if (d, n) not in estimates:
                estimates[(d, n)] = np.full((config.replicates, len(config.estimators)), np.nan)
                checksums[(d, n)] = [None] * config.replicates
            estimates[(d, n)][rep] = ests
            checksums[(d, n)][rep] = chk
            failures.extend((d, n, rep) + f for f in fails)
            if progress is not None:
                progress(i + 1, len(tasks))
    finally:
        if pool is not None:
            pool.shutdown()
    truth = {d: true_psi(catalog(d)) for d in config.densities}
    return ExperimentResult(config, truth, estimates, checksums, failures)


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def _write(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


SUMMARY_HEADER = ("n", "estimator", "mean", "median", "min", "max")
CELLS_HEADER = ("density", "n", "estimator", "rrmse", "ratio", "used", "missing")


def reldist_rows(result):
    cfg = result.config
    for d in cfg.densities:
        psi = result.truth[d]
        for n in cfg.sizes:
            est = result.estimates[(d, n)]
            for rep in range(cfg.replicates):
                for j, name in enumerate(cfg.estimators):
                    e = est[rep, j]
                    if np.isfinite(e):
                        yield (d, n, rep, name, e, (e - psi) / psi, result.checksums[(d, n)][rep])


def export(result, out_dir, json_mirror=False):
    """Write summary.csv, cells.csv, reldist.csv, failures.csv (and results.json)."""
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    cells = result.cells()
    summary = summarize(cells)
    paths = {
        "summary": os.path.join(out_dir, "summary.csv"),
        "cells": os.path.join(out_dir, "cells.csv"),
        "reldist": os.path.join(out_dir, "reldist.csv"),
        "failures": os.path.join(out_dir, "failures.csv"),
    }
    _write(paths["summary"], SUMMARY_HEADER, summary)
    _write(paths["cells"], CELLS_HEADER, cells)
    _write(paths["reldist"], ("density", "n", "replicate", "estimator", "estimate", "rel_error", "sample_sha1"),
           reldist_rows(result))
    _write(paths["failures"], ("density", "n", "replicate", "estimator", "kind", "message"), result.failures)
    if json_mirror:
        paths["json"] = os.path.join(out_dir, "results.json")
        cfg = asdict(result.config)
        cfg.pop("workers")  # execution detail; outputs must not depend on it
        doc = {
            "config": cfg,
            "truth": {str(k): v for k, v in result.truth.items()},
            "summary": [dict(zip(SUMMARY_HEADER, r)) for r in summary],
            "cells": [dict(zip(CELLS_HEADER, r)) for r in cells],
            "failures": [dict(zip(("density", "n", "replicate", "estimator", "kind", "message"), f))
                         for f in result.failures],
        }
        try:
            with open(paths["json"], "w") as fh:
                json.dump(doc, fh, indent=1, sort_keys=True)
        except OSError as exc:
            raise OSError(f"cannot write {paths['json']}: {exc}") from exc
    return paths


def read_cells(path):
    with open(path, newline="") as fh:
        return [(int(r["density"]), int(r["n"]), r["estimator"], float(r["rrmse"]), float(r["ratio"]),
                 int(r["used"]), int(r["missing"])) for r in csv.DictReader(fh)]


def read_summary(path):
    with open(path, newline="") as fh:
        return [(int(r["n"]), r["estimator"], float(r["mean"]), float(r["median"]),
                 float(r["min"]), float(r["max"])) for r in csv.DictReader(fh)]
