"""The experiment tasks: cipher vs random, the rounds sweep, cipher variants and a null control."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import NSCError
from ..neural import (
    AdvantageEstimate,
    LabeledDataset,
    Metrics,
    MlpParameters,
    RocCurve,
    Standardizer,
    advantage,
    evaluate,
    forward,
    logistic_baseline,
    roc_auc,
    train,
)
from ..stringology import FeatureMatrix, extract_matrix, get_schema, read_nscf, write_csv, write_nscf
from .config import ExperimentConfig
from .corpus import CorpusManifest, generate_corpus, load_manifest, manifest_path, read_sequence
from .splits import SplitAssignment, split_dataset

log = logging.getLogger(__name__)

TABLE_COLUMNS = ("condition", "model", "accuracy", "precision", "recall", "f1", "auc",
                 "advantage", "ci_low", "ci_high", "n_test")


@dataclass
class ReportRow:
    condition: str
    model: str
    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None
    auc: float
    advantage: float
    ci_low: float
    ci_high: float
    n_test: int

    @classmethod
    def from_results(cls, condition, model, m: Metrics, roc: RocCurve, adv: AdvantageEstimate) -> "ReportRow":
        lo, hi = adv.confidence_interval
        return cls(condition, model, m.accuracy, m.precision, m.recall, m.f1, roc.auc, adv.adv, lo, hi,
                   m.confusion.total)


@dataclass
class ReportTable:
    task: str
    title: str
    rows: list[ReportRow] = field(default_factory=list)

    def row(self, condition: str, model: str = "neural") -> ReportRow:
        for r in self.rows:
            if r.condition == condition and r.model == model:
                return r
        raise KeyError((condition, model))


@dataclass
class ConditionOutcome:
    condition: str
    positive: str
    negative: str
    split: SplitAssignment
    ids: list[str]
    test_ids: list[str]
    models: dict[str, MlpParameters]
    standardizer: Standardizer
    histories: dict[str, list]
    rows: list[ReportRow]
    rocs: dict[str, RocCurve]
    advantages: dict[str, AdvantageEstimate]


@dataclass
class TaskResult:
    task: str
    config: ExperimentConfig
    table: ReportTable
    outcomes: list[ConditionOutcome]
    mgram: list[dict]
    features: FeatureMatrix | None = None

    def outcome(self, condition: str) -> ConditionOutcome:
        for o in self.outcomes:
            if o.condition == condition:
                return o
        raise KeyError(condition)


TITLES = {
    "distinguish": "Classification performance: EChaCha20 keystreams vs uniform random",
    "rounds": "Detection accuracy for reduced-round EChaCha20",
    "variants": "Classification accuracy for cipher variant comparison",
    "null": "Null control: two independent uniform corpora",
}


# --- features --------------------------------------------------------------

def group_of(source_id: str) -> str:
    return source_id.rsplit("-", 1)[0]


def corpus_features(out_dir, manifest: CorpusManifest, schema="v1", workers: int | None = None) -> FeatureMatrix:
    """Feature matrix for every manifest entry, in manifest order."""
    seqs = [read_sequence(out_dir, e) for e in manifest.entries]
    values = extract_matrix(seqs, schema, workers)
    return FeatureMatrix(values, [e.label for e in manifest.entries], [e.id for e in manifest.entries],
                         get_schema(schema))


def save_features(fm: FeatureMatrix, out_dir, task: str) -> Path:
    d = Path(out_dir) / "features"
    d.mkdir(parents=True, exist_ok=True)
    write_nscf(fm, d / f"{task}.nscf")
    write_csv(fm, d / f"{task}.csv")
    return d / f"{task}.nscf"


def load_features(out_dir, task: str) -> FeatureMatrix:
    return read_nscf(Path(out_dir) / "features" / f"{task}.nscf")


# --- one binary condition ----------------------------------------------------

def _dataset(X, y, idx) -> LabeledDataset:
    return LabeledDataset(X[idx], y[idx])


def fit_condition(fm: FeatureMatrix, positive: str, negative: str, cfg: ExperimentConfig,
                  condition: str | None = None, baseline: bool = True) -> ConditionOutcome:
    """Train on ``positive`` (class 1) vs ``negative`` (class 0) groups; score the test split only."""
    condition = condition or f"{positive} vs {negative}"
    groups = np.array([group_of(s) for s in fm.source_ids])
    pos = np.flatnonzero(groups == positive)
    neg = np.flatnonzero(groups == negative)
    if pos.size == 0 or neg.size == 0:
        raise NSCError(f"condition {condition!r}: missing rows for {positive!r} or {negative!r}")
    rows = np.r_[pos, neg]
    X = fm.values[rows]
    y = np.r_[np.ones(pos.size, dtype=np.int64), np.zeros(neg.size, dtype=np.int64)]
    ids = [fm.source_ids[i] for i in rows]
    split = split_dataset(y, seed=cfg.seeds["split"])
    tr, va, te = (split.indices(s) for s in ("train", "validation", "test"))
    std = Standardizer.fit(X[tr], passthrough=fm.schema.slices()["mgram8_frequency"])
    Z = std.transform(X)
    train_set, val_set, test_set = _dataset(Z, y, tr), _dataset(Z, y, va), _dataset(Z, y, te)

    trainers = {"neural": train}
    if baseline:
        trainers["logistic"] = logistic_baseline
    models, histories, out_rows, rocs, advs = {}, {}, [], {}, {}
    for name, fit in trainers.items():
        log.info("%s: training %s model", condition, name)
        params, hist = fit(train_set, val_set, cfg.train)
        m = evaluate(params, test_set)
        roc = roc_auc(forward(params, test_set.features), test_set.labels)
        adv = advantage(params, Z[te][y[te] == 1], Z[te][y[te] == 0])
        models[name], histories[name], rocs[name], advs[name] = params, hist, roc, adv
        out_rows.append(ReportRow.from_results(condition, name, m, roc, adv))
    return ConditionOutcome(condition, positive, negative, split, ids, [ids[i] for i in te], models, std,
                            histories, out_rows, rocs, advs)


# --- m-gram comparison -------------------------------------------------------

def mgram_summary(fm: FeatureMatrix, groups=None) -> list[dict]:
    """Per group and m: mean peak-to-expected m-gram count and mean entropy ratio."""
    from ..stringology import MGRAM_LENGTHS

    base = fm.schema.slices()["mgram_statistics"].start
    gids = np.array([group_of(s) for s in fm.source_ids])
    groups = groups or list(dict.fromkeys(gids.tolist()))
    out = []
    for g in groups:
        sel = fm.values[gids == g]
        for k, m in enumerate(MGRAM_LENGTHS):
            out.append({
                "group": g, "m": m,
                "peak_to_expected": float(sel[:, base + 4 * k + 3].mean()),
                "entropy_ratio": float(sel[:, base + 4 * k + 1].mean()),
            })
    return out


# --- tasks -------------------------------------------------------------------

def conditions_for(cfg: ExperimentConfig) -> list[tuple[str, str, str]]:
    """(condition label, positive group, negative group) triples for a task."""
    if cfg.task == "null":
        return [("uniform-a vs uniform-b", "urandom-a", "urandom-b")]
    if cfg.task == "variants":
        r = cfg.rounds_list[0]
        cc, ec = f"chacha20-r{r}", f"echacha20-r{r}"
        return [("ChaCha20 vs Random", cc, "urandom"),
                ("EChaCha20 vs Random", ec, "urandom"),
                ("ChaCha20 vs EChaCha20", cc, ec)]
    if cfg.task == "rounds":
        return [(f"r={r}", f"echacha20-r{r}", "urandom") for r in cfg.rounds_list]
    r = cfg.rounds_list[0]
    return [(f"EChaCha20 r={r} vs Random", f"echacha20-r{r}", "urandom")]


def run_on_features(fm: FeatureMatrix, cfg: ExperimentConfig) -> TaskResult:
    table = ReportTable(cfg.task, TITLES[cfg.task])
    outcomes = []
    baseline = cfg.task in ("distinguish", "null")
    for label, pos, neg in conditions_for(cfg):
        o = fit_condition(fm, pos, neg, cfg, label, baseline=baseline)
        outcomes.append(o)
        table.rows.extend(o.rows)
    if cfg.task == "distinguish":
        n_test = table.rows[0].n_test
        table.rows.append(ReportRow(outcomes[0].condition, "random_guessing", 0.5, 0.5, 0.5, 0.5, 0.5,
                                    0.0, 0.0, 0.0, n_test))
    return TaskResult(cfg.task, cfg, table, outcomes, mgram_summary(fm), fm)


def prepare_corpus(cfg: ExperimentConfig, out_dir, workers: int | None = None, reuse: bool = False) -> FeatureMatrix:
    """Generate the corpus and its feature files (or reuse existing ones)."""
    if reuse and manifest_path(out_dir).exists() and (Path(out_dir) / "features" / f"{cfg.task}.nscf").exists():
        return load_features(out_dir, cfg.task)
    log.info("generating %s corpus in %s", cfg.task, out_dir)
    generate_corpus(cfg, out_dir)
    manifest = load_manifest(out_dir)
    log.info("extracting features for %d sequences", len(manifest.entries))
    fm = corpus_features(out_dir, manifest, cfg.schema_version, workers)
    save_features(fm, out_dir, cfg.task)
    return fm


def run_task(cfg: ExperimentConfig, out_dir, workers: int | None = None, reuse: bool = False) -> TaskResult:
    """generate -> features -> train -> evaluate for ``cfg.task``."""
    fm = prepare_corpus(cfg, out_dir, workers, reuse)
    return run_on_features(fm, cfg)


def run_distinguish(cfg: ExperimentConfig, out_dir, **kw) -> TaskResult:
    return run_task(cfg.with_(task="distinguish"), out_dir, **kw)


def run_rounds_sweep(cfg: ExperimentConfig, out_dir, **kw) -> TaskResult:
    return run_task(cfg.with_(task="rounds"), out_dir, **kw)


def run_variants(cfg: ExperimentConfig, out_dir, **kw) -> TaskResult:
    return run_task(cfg.with_(task="variants"), out_dir, **kw)


def run_null(cfg: ExperimentConfig, out_dir, **kw) -> TaskResult:
    return run_task(cfg.with_(task="null", rounds_list=()), out_dir, **kw)
