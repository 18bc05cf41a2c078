"""Pipeline stages over a run directory.

Every stage reads its inputs from disk, writes outputs to distinct paths and
can be re-run: a file whose new content matches what is already on disk is
left alone and counted as unchanged.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .. import __version__
from ..datasplit import (
    FoldAssignment,
    SplitConfig,
    assign_folds,
    fold_csv_text,
    fold_sidecar_text,
    read_folds,
)
from ..errors import QsarBenchError, SchemaError
from ..featurize import feature_columns, feature_tag, load_or_build
from ..metrics import (
    MetricRecord,
    classification_records,
    format_value,
    read_records,
    record_sort_key,
    regression_records,
    RECORD_COLUMNS,
)
from ..sar import SarRule, export_rule_table, rule_table_text
from .config import ModelSpec, RunConfig, TaskSpec, learner_spec
from .ingest import ingest_dataset, ingest_summary
from .learners import CellInput, CellOutput
from .seeds import derive_seed, seed_collisions, split_seed

log = logging.getLogger("qsarbench")

STAGES = ("split", "featurize", "train", "evaluate", "sar-induce", "report")
STATUSES = ("done", "failed", "skipped-degenerate")


class LeakageError(QsarBenchError):
    """A held-out molecule also appears in its cell's training data."""


@dataclass
class StageResult:
    stage: str
    written: list[str] = field(default_factory=list)
    unchanged: list[str] = field(default_factory=list)
    replaced: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def put(self, path: Path, text: str) -> None:
        """Write ``text`` unless identical bytes are already there."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.exists():
            if path.read_text() == text:
                self.unchanged.append(str(path))
                return
            self.replaced.append(str(path))
            log.warning("%s: content changed, replacing", path)
        else:
            self.written.append(str(path))
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text)
        tmp.replace(path)

    def summary(self) -> dict:
        return {
            "stage": self.stage,
            "written": len(self.written),
            "unchanged": len(self.unchanged),
            "replaced": len(self.replaced),
            "notes": self.notes,
        }


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def slug(text: str) -> str:
    """Filesystem-safe model directory name."""
    out = "".join(c if c.isalnum() or c in "._+-" else "_" for c in text)
    return out.strip("_") or "model"


# paths -------------------------------------------------------------------


def folds_path(cfg: RunConfig, task: str) -> Path:
    return cfg.out / "folds" / f"{task}.folds.csv"


def dataset_path(cfg: RunConfig, task: str) -> Path:
    return cfg.out / "folds" / f"{task}.dataset.csv"


def cell_dir(cfg: RunConfig, task: str, model: str) -> Path:
    return cfg.out / "predictions" / task / slug(model)


def _check_slugs(cfg: RunConfig) -> None:
    slugs = [slug(m.id) for m in cfg.models]
    if len(set(slugs)) != len(slugs):
        from ..errors import ConfigError

        raise ConfigError(f"model ids collide after path sanitizing: {slugs}")


# split -------------------------------------------------------------------


def split_config(cfg: RunConfig, task: str) -> SplitConfig:
    return SplitConfig(nbits=cfg.nbits, seed=split_seed(cfg.seed, task), **dict(cfg.split))


def stage_split(cfg: RunConfig) -> StageResult:
    """Ingest every task and freeze its fold assignment to disk."""
    res = StageResult("split")
    for t in cfg.tasks:
        ds = ingest_dataset(t)
        fa = assign_folds(ds, split_config(cfg, t.name))
        d = cfg.out / "folds"
        res.put(d / f"{t.name}.folds.csv", fold_csv_text(fa))
        res.put(d / f"{t.name}.folds.json", fold_sidecar_text(fa))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["canonical_smiles", "label"])
        for s, y in zip(ds.smiles, ds.labels):
            w.writerow([s, int(y) if t.kind == "classification" else repr(float(y))])
        res.put(dataset_path(cfg, t.name), buf.getvalue())
        summary = ingest_summary(ds)
        res.put(d / f"{t.name}.ingest.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
        flagged = {f"fold{k}": list(f) for k, f in enumerate(fa.flags) if f}
        res.notes.append(f"{t.name}: n={len(ds)} sizes={list(fa.sizes)}" + (f" flags={flagged}" if flagged else ""))
        if ds.counts.get("parse_dropped"):
            res.notes.append(f"{t.name}: {ds.counts['parse_dropped']} unparseable row(s) dropped")
    return res


def load_task(cfg: RunConfig, t: TaskSpec) -> tuple[FoldAssignment, np.ndarray]:
    """Fold assignment plus labels aligned to it, from the run directory."""
    fp = folds_path(cfg, t.name)
    if not fp.exists():
        stage_split(cfg)
    fa = read_folds(fp)
    smiles, labels = [], []
    with open(dataset_path(cfg, t.name), newline="") as fh:
        for row in csv.DictReader(fh):
            smiles.append(row["canonical_smiles"])
            labels.append(float(row["label"]))
    if tuple(smiles) != fa.smiles:
        raise SchemaError(f"task {t.name}: fold file and dataset file disagree; re-run split")
    return fa, np.asarray(labels)


# featurize ---------------------------------------------------------------


def _feature_kinds(cfg: RunConfig) -> list[str]:
    kinds = []
    for m in cfg.models:
        if m.features and m.features not in kinds:
            kinds.append(m.features)
    return kinds


def task_features(cfg: RunConfig, smiles, kind: str) -> np.ndarray:
    return load_or_build(cfg.out / "features" / "cache", smiles, kind, cfg.nbits)


def stage_featurize(cfg: RunConfig) -> StageResult:
    res = StageResult("featurize")
    for t in cfg.tasks:
        fa, _ = load_task(cfg, t)
        for kind in _feature_kinds(cfg):
            X = task_features(cfg, fa.smiles, kind)
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["canonical_smiles", *feature_columns(kind, cfg.nbits)])
            for s, row in zip(fa.smiles, X):
                w.writerow([s, *((int(v) for v in row) if X.dtype == np.uint8 else (repr(float(v)) for v in row))])
            res.put(cfg.out / "features" / f"{t.name}.{feature_tag(kind, cfg.nbits)}.csv", buf.getvalue())
    return res


# train -------------------------------------------------------------------


@dataclass
class CellPlan:
    task: TaskSpec
    model: ModelSpec
    fold: int
    seed: int
    key: str
    skip_reason: str | None
    inputs: CellInput
    y_test: np.ndarray


def _degenerate_reason(kind: str, y_train: np.ndarray, n_test: int) -> str | None:
    if n_test == 0:
        return "empty held-out fold"
    if len(y_train) < 2:
        return "fewer than 2 training rows"
    if kind == "classification" and len(np.unique(y_train)) < 2:
        return "single-class training fold"
    return None


def _cell_key(cfg: RunConfig, m: ModelSpec, fold: int, seed: int, fold_digest: str, data_digest: str) -> str:
    blob = json.dumps(
        {
            "model": asdict(m),
            "fold": fold,
            "seed": seed,
            "folds": fold_digest,
            "data": data_digest,
            "nbits": cfg.nbits,
            "version": __version__,
        },
        sort_keys=True,
        default=str,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def plan_cells(cfg: RunConfig) -> list[CellPlan]:
    """Every (task, model, fold) cell in a fixed order, with its inputs."""
    plans = []
    for t in cfg.tasks:
        fa, y = load_task(cfg, t)
        fold_digest = sha256_file(folds_path(cfg, t.name))
        data_digest = sha256_file(dataset_path(cfg, t.name))
        feats = {kind: task_features(cfg, fa.smiles, kind) for kind in _feature_kinds(cfg)}
        folds = np.asarray(fa.folds)
        for m in cfg.models:
            for k in range(fa.k):
                seed = derive_seed(cfg.seed, t.name, m.id, k)
                tr, te = np.flatnonzero(folds != k), np.flatnonzero(folds == k)
                reason = _degenerate_reason(t.kind, y[tr], len(te))
                X = feats.get(m.features) if m.features else None
                inputs = CellInput(
                    task=t.name,
                    kind=t.kind,
                    fold=k,
                    seed=seed,
                    model=m,
                    train_smiles=tuple(fa.smiles[i] for i in tr),
                    test_smiles=tuple(fa.smiles[i] for i in te),
                    y_train=y[tr],
                    X_train=None if X is None else X[tr],
                    X_test=None if X is None else X[te],
                    source=cfg.source,
                )
                key = _cell_key(cfg, m, k, seed, fold_digest, data_digest)
                plans.append(CellPlan(t, m, k, seed, key, reason, inputs, y[te]))
    return plans


def execute_cell(cell: CellInput) -> tuple[str, CellOutput | str]:
    """Run one cell, turning any exception into a failure record."""
    try:
        out = learner_spec(cell.model.learner).run(cell)
        scores = np.asarray(out.scores, dtype=np.float64)
        if scores.shape != (len(cell.test_smiles),):
            raise ValueError(f"learner returned {scores.shape} scores for {len(cell.test_smiles)} molecules")
        if not np.all(np.isfinite(scores)):
            raise ValueError("learner returned non-finite scores")
        out.scores = scores
        return "done", out
    except Exception as exc:  # isolate every failure at the cell
        return "failed", f"{type(exc).__name__}: {exc}"


def leakage_guard(train: tuple[str, ...], test: tuple[str, ...]) -> None:
    overlap = set(train) & set(test)
    if overlap:
        raise LeakageError(f"{len(overlap)} held-out molecule(s) present in training data, e.g. {sorted(overlap)[0]}")


def _prediction_text(smiles, labels, scores) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["canonical_smiles", "label", "score"])
    for s, y, p in zip(smiles, labels, scores):
        w.writerow([s, format_value(float(y)), format_value(float(p))])
    return buf.getvalue()


def _meta_path(cfg: RunConfig, p: CellPlan) -> Path:
    return cell_dir(cfg, p.task.name, p.model.id) / f"fold{p.fold}.json"


def _read_meta(path: Path) -> dict | None:
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None


def stage_train(cfg: RunConfig, jobs: int | None = None) -> StageResult:
    """Fit and predict every cell; failures and degenerate folds are recorded, never dropped."""
    _check_slugs(cfg)
    res = StageResult("train")
    plans = plan_cells(cfg)
    todo = []
    for p in plans:
        meta = _read_meta(_meta_path(cfg, p))
        if meta and meta.get("key") == p.key and meta.get("status") in ("done", "skipped-degenerate"):
            res.unchanged.append(str(_meta_path(cfg, p)))
            continue
        todo.append(p)
    runnable = [p for p in todo if p.skip_reason is None]
    jobs = jobs or cfg.jobs
    if jobs > 1 and len(runnable) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(execute_cell, [p.inputs for p in runnable]))
    else:
        outcomes = [execute_cell(p.inputs) for p in runnable]
    results = dict(zip((id(p) for p in runnable), outcomes))
    for p in todo:
        meta = {
            "task": p.task.name,
            "model": p.model.id,
            "fold": p.fold,
            "seed": p.seed,
            "key": p.key,
            "n_train": len(p.inputs.train_smiles),
            "n_test": len(p.inputs.test_smiles),
        }
        d = cell_dir(cfg, p.task.name, p.model.id)
        if p.skip_reason is not None:
            meta.update(status="skipped-degenerate", reason=p.skip_reason)
        else:
            status, out = results[id(p)]
            if status == "failed":
                meta.update(status="failed", reason=out)
                log.error("cell %s/%s/fold%d failed: %s", p.task.name, p.model.id, p.fold, out)
            else:
                leakage_guard(p.inputs.train_smiles, p.inputs.test_smiles)
                res.put(d / f"fold{p.fold}.csv", _prediction_text(p.inputs.test_smiles, p.y_test, out.scores))
                meta.update(status="done", warnings=out.warnings, rules=out.rules)
        res.put(d / f"fold{p.fold}.json", json.dumps(meta, indent=1, sort_keys=True) + "\n")
    counts = {s: 0 for s in STATUSES}
    for p in plans:
        counts[_read_meta(_meta_path(cfg, p))["status"]] += 1
    res.notes.append(f"cells: {len(plans)} " + " ".join(f"{k}={v}" for k, v in counts.items()))
    write_manifest(cfg)
    return res


# evaluate ----------------------------------------------------------------


def _read_predictions(path: Path) -> tuple[np.ndarray, np.ndarray]:
    labels, scores = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            labels.append(float(row["label"]))
            scores.append(float(row["score"]))
    return np.asarray(labels), np.asarray(scores)


def records_text(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in sorted(records, key=record_sort_key):
        w.writerow([r.task, r.model, r.family, r.fold, r.metric, format_value(r.value), r.flags])
    return buf.getvalue()


def stage_evaluate(cfg: RunConfig, threshold: float = 0.5) -> StageResult:
    """Per-fold metric records for every finished cell, plus fold prevalences."""
    res = StageResult("evaluate")
    records: list[MetricRecord] = []
    prev = io.StringIO()
    pw = csv.writer(prev, lineterminator="\n")
    pw.writerow(["task", "fold", "n", "positives", "positive_rate", "flags"])
    for t in cfg.tasks:
        fa, y = load_task(cfg, t)
        folds = np.asarray(fa.folds)
        if t.kind == "classification":
            for k in range(fa.k):
                yk = y[folds == k]
                rate = float(yk.mean()) if len(yk) else float("nan")
                pw.writerow([t.name, k, len(yk), int(yk.sum()), format_value(rate), ";".join(fa.flags[k])])
        for m in cfg.models:
            for k in range(fa.k):
                d = cell_dir(cfg, t.name, m.id)
                meta = _read_meta(d / f"fold{k}.json")
                if meta is None:
                    raise SchemaError(f"no training record for {t.name}/{m.id}/fold{k}; run train first")
                if meta["status"] != "done":
                    continue
                labels, scores = _read_predictions(d / f"fold{k}.csv")
                flags = ";".join(fa.flags[k])
                if t.kind == "classification":
                    records += classification_records(t.name, m.id, m.family, k, scores, labels, flags, threshold)
                else:
                    records += regression_records(t.name, m.id, m.family, k, scores, labels, flags)
    res.put(cfg.out / "metrics.csv", records_text(records))
    res.put(cfg.out / "prevalence.csv", prev.getvalue())
    undefined = sum(1 for r in records if "undefined" in r.flags)
    if undefined:
        res.notes.append(f"{undefined} undefined metric value(s) recorded; they are excluded from fold means")
    return res


# sar-induce --------------------------------------------------------------


def stage_sar_induce(cfg: RunConfig) -> StageResult:
    """Export the train-fold-induced rules of every knowledge-mode SAR model."""
    res = StageResult("sar-induce")
    knowledge = [m for m in cfg.models if m.learner == "sar" and m.mode == "with_knowledge"]
    per_endpoint: dict[str, list[list[SarRule]]] = {}
    for t in cfg.tasks:
        for m in knowledge:
            endpoint = t.name if len(knowledge) == 1 else f"{t.name} | {m.id}"
            folds = []
            k = 0
            while (path := cell_dir(cfg, t.name, m.id) / f"fold{k}.json").exists():
                meta = _read_meta(path) or {}
                folds.append([SarRule(**r) for r in meta.get("rules", [])])
                k += 1
            per_endpoint[endpoint] = folds
    rows = export_rule_table(per_endpoint)
    res.put(cfg.out / "report" / "sar_rules.csv", rule_table_text(rows))
    if not knowledge:
        res.notes.append("no knowledge-mode SAR model configured; rule table is empty")
    return res


# report ------------------------------------------------------------------


def report_header(cfg: RunConfig) -> tuple[str, ...]:
    k = dict(cfg.split).get("k", SplitConfig.k)
    return (
        "PR-AUC is average precision with tie-group averaging",
        f"ECFP features are {cfg.nbits}-bit binary vectors (bit length not given by the source benchmark)",
        f"structure-separated {k}-fold CV; values are fold means over defined folds",
        "ranked at full precision, rounded to 3 decimals for display",
    )


def stage_report(cfg: RunConfig, fmt: str = "csv", fixtures: list[Path] | None = None) -> StageResult:
    """Aggregate metrics.csv (plus optional fixture CSVs) into report tables and a figure."""
    from ..report import build_report

    res = StageResult("report")
    path = cfg.out / "metrics.csv"
    if not path.exists():
        raise SchemaError("metrics.csv not found; run evaluate first")
    records = read_records(path)
    groups = cfg.groups
    fams = cfg.family_map
    for fx in fixtures or []:
        extra = read_records(fx)
        records += extra
        for r in extra:
            fams.setdefault(r.model, r.family)
    sar_rows = None
    rules_csv = cfg.out / "report" / "sar_rules.csv"
    if rules_csv.exists():
        with open(rules_csv, newline="") as fh:
            sar_rows = list(csv.DictReader(fh))
    rep = build_report(records, cfg.out / "report", fmt, groups, fams, sar_rows, report_header(cfg))
    res.written += [str(p) for p in rep.written]
    res.put(cfg.out / "report" / "enrichment.csv", _enrichment_text(cfg, rep.cells))
    res.put(cfg.out / "report" / "operating_points.csv", _operating_points_text(rep.cells))
    res.notes += [t.message() for t in rep.ties]
    return res


def _enrichment_text(cfg: RunConfig, cells) -> str:
    """Best fold-mean PR-AUC per task against the mean held-out-fold positive rate."""
    rates: dict[str, list[float]] = {}
    prev = cfg.out / "prevalence.csv"
    if prev.exists():
        with open(prev, newline="") as fh:
            for row in csv.DictReader(fh):
                v = float(row["positive_rate"])
                if not math.isnan(v):
                    rates.setdefault(row["task"], []).append(v)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["task", "mean_fold_prevalence", "best_model", "best_pr_auc", "enrichment"])
    for t in cfg.tasks:
        best = [c for c in cells if c.task == t.name and c.metric == "pr_auc" and c.winner]
        if not best or t.name not in rates:
            continue
        pi = sum(rates[t.name]) / len(rates[t.name])
        c = best[0]
        w.writerow([t.name, f"{pi:.6f}", c.model, f"{c.value:.6f}", f"{c.value / pi:.6f}" if pi > 0 else "NA"])
    return buf.getvalue()


def _operating_points_text(cells) -> str:
    """Fold-mean class precision and recall at the 0.5 threshold."""
    by: dict[tuple[str, str, str], dict[str, float]] = {}
    for c in cells:
        if c.metric in ("p0", "r0", "p1", "r1"):
            by.setdefault((c.task, c.model, c.family), {})[c.metric] = c.value
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["task", "model", "family", "p0", "r0", "p1", "r1"])
    for (task, model, fam), v in sorted(by.items()):
        w.writerow([task, model, fam, *(f"{v.get(m, float('nan')):.6f}" for m in ("p0", "r0", "p1", "r1"))])
    return buf.getvalue()


# manifest ----------------------------------------------------------------


def manifest_dict(cfg: RunConfig) -> dict:
    cells = []
    counts = {s: 0 for s in (*STATUSES, "pending")}
    for t in cfg.tasks:
        k_total = dict(cfg.split).get("k", SplitConfig.k)
        for m in cfg.models:
            for k in range(k_total):
                meta = _read_meta(cell_dir(cfg, t.name, m.id) / f"fold{k}.json")
                status = meta["status"] if meta else "pending"
                counts[status] += 1
                entry = {"task": t.name, "model": m.id, "fold": k, "seed": derive_seed(cfg.seed, t.name, m.id, k)}
                entry["status"] = status
                if meta and meta.get("reason"):
                    entry["reason"] = meta["reason"]
                if meta and meta.get("warnings"):
                    entry["warnings"] = meta["warnings"]
                cells.append(entry)
    ingest = {}
    for t in cfg.tasks:
        p = cfg.out / "folds" / f"{t.name}.ingest.json"
        if p.exists():
            ingest[t.name] = json.loads(p.read_text())
    return {
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "versions": {
            "qsarbench": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "seed_collisions": [list(map(list, c)) for c in seed_collisions(cfg.seed, [t.name for t in cfg.tasks], [m.id for m in cfg.models])],
        "tasks": ingest,
        "cell_counts": {"total": len(cells), **counts},
        "cells": cells,
    }


def write_manifest(cfg: RunConfig) -> Path:
    """Rebuild the manifest from the run directory (single writer, updated after every stage)."""
    path = cfg.out / "manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(manifest_dict(cfg), indent=2, sort_keys=True) + "\n"
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)
    return path


# all ---------------------------------------------------------------------


def run_stage(cfg: RunConfig, stage: str, fmt: str = "csv", fixtures=None) -> StageResult:
    if stage == "split":
        res = stage_split(cfg)
    elif stage == "featurize":
        res = stage_featurize(cfg)
    elif stage == "train":
        return stage_train(cfg)
    elif stage == "evaluate":
        res = stage_evaluate(cfg)
    elif stage == "sar-induce":
        res = stage_sar_induce(cfg)
    elif stage == "report":
        res = stage_report(cfg, fmt, fixtures)
    else:
        raise ValueError(f"unknown stage {stage!r}; expected one of {STAGES}")
    write_manifest(cfg)
    return res


def run_benchmark(cfg: RunConfig, fmt: str = "csv", fixtures=None) -> list[StageResult]:
    """All stages in order; returns one result per stage."""
    return [run_stage(cfg, s, fmt, fixtures) for s in STAGES]
