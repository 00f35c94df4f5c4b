"""Report bundle: CSV tables, SVG charts, a JSON record per task and a run summary."""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import asdict
from pathlib import Path

from ..errors import NSCError
from ..neural import save_model
from ..stringology import MGRAM_LENGTHS
from . import svg
from .tasks import TABLE_COLUMNS, TaskResult

UNDEFINED = "undefined"


def slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")


def _cell(v) -> str:
    if v is None:
        return UNDEFINED
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def result_record(result: TaskResult) -> dict:
    """JSON-serializable record of everything the reports are drawn from."""
    roc, audit, training = {}, {}, {}
    for o in result.outcomes:
        curve = o.rocs["neural"]
        roc[o.condition] = {
            "model": "neural",
            "fpr": curve.fpr.tolist(),
            "tpr": curve.tpr.tolist(),
            "thresholds": [None if math.isinf(t) else t for t in curve.thresholds.tolist()],
            "auc": curve.auc,
        }
        audit[o.condition] = {
            "positive": o.positive,
            "negative": o.negative,
            "split_seed": o.split.seed,
            "counts": {s: int(sum(a == s for a in o.split.assignment)) for s in ("train", "validation", "test")},
            "evaluated_ids": sorted(o.test_ids),
            "test_ids": sorted(i for i, a in zip(o.ids, o.split.assignment) if a == "test"),
        }
        training[o.condition] = {
            name: {"epochs": len(h), "best_epoch": 1 + min(range(len(h)), key=lambda k: h[k].get("val_loss", h[k]["train_loss"])),
                   "final": h[-1]}
            for name, h in o.histories.items()
        }
    return {
        "task": result.task,
        "title": result.table.title,
        "config": result.config.to_dict(),
        "table": [asdict(r) for r in result.table.rows],
        "roc": roc,
        "mgram": result.mgram,
        "audit": audit,
        "training": training,
    }


def save_models(result: TaskResult, out_dir) -> list[Path]:
    d = Path(out_dir) / "models"
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    single = len(result.outcomes) == 1
    for o in result.outcomes:
        stem = result.task if single else f"{result.task}-{slug(o.condition)}"
        for name, params in o.models.items():
            p = d / (f"{stem}.nscmlp" if name == "neural" else f"{stem}-{name}.nscmlp")
            save_model(p, params, o.standardizer)
            paths.append(p)
        split = o.split.to_dict(o.ids)
        split.update(positive=o.positive, negative=o.negative)
        (d / f"{stem}.split.json").write_text(json.dumps(split, indent=1, sort_keys=True) + "\n")
    return paths


def render_task(record: dict, out_dir) -> list[Path]:
    """Write CSV and SVG files for one task record."""
    rep = Path(out_dir) / "reports"
    rep.mkdir(parents=True, exist_ok=True)
    task = record["task"]
    written = []

    def put(name, text):
        p = rep / name
        p.write_text(text)
        written.append(p)

    rows = record["table"]
    put(f"{task}.csv", _csv(TABLE_COLUMNS, [[r[c] for c in TABLE_COLUMNS] for r in rows]))

    if task == "rounds":
        neural = [r for r in rows if r["model"] == "neural"]
        rounds = [int(r["condition"].split("=")[1]) for r in neural]
        acc = [r["accuracy"] for r in neural]
        put("rounds_accuracy.csv", _csv(("rounds", "accuracy"), zip(rounds, acc)))
        put(f"{task}.svg", svg.line_chart(
            [("Neural stringology model", rounds, acc), ("Chance", [0, max(rounds) + 2], [0.5, 0.5])],
            "Classification accuracy vs number of rounds", "Number of rounds", "Accuracy",
            (0, max(rounds) + 2), (0.4, 1.0), dashed=("Chance",)))
    else:
        roc_rows = []
        for cond, c in record["roc"].items():
            roc_rows += [(cond, t, f, p) for t, f, p in zip(c["thresholds"], c["fpr"], c["tpr"])]
        put(f"{task}_roc.csv", _csv(("condition", "threshold", "fpr", "tpr"),
                                     [(c, "inf" if t is None else t, f, p) for c, t, f, p in roc_rows]))
        series = [(f"{cond} (AUC {c['auc']:.3f})", c["fpr"], c["tpr"]) for cond, c in record["roc"].items()]
        series.append(("Random classifier", [0.0, 1.0], [0.0, 1.0]))
        put(f"{task}.svg", svg.line_chart(series, "ROC curve", "False Positive Rate", "True Positive Rate",
                                          (0.0, 1.0), (0.0, 1.0), dashed=("Random classifier",)))

    mg = record["mgram"]
    put(f"{task}_mgram.csv", _csv(("group", "m", "peak_to_expected", "entropy_ratio"),
                                  [(r["group"], r["m"], r["peak_to_expected"], r["entropy_ratio"]) for r in mg]))
    groups = list(dict.fromkeys(r["group"] for r in mg))
    bars = [(g, [next(r["peak_to_expected"] for r in mg if r["group"] == g and r["m"] == m) for m in MGRAM_LENGTHS])
            for g in groups]
    put(f"{task}_mgram.svg", svg.bar_chart(list(MGRAM_LENGTHS), bars,
                                           "Normalized m-gram peak frequency (max count / expected)",
                                           "Pattern length (bits)", "Normalized frequency"))
    return written


def _fmt(v) -> str:
    return UNDEFINED if v is None else f"{v:.4f}" if isinstance(v, float) else str(v)


def render_summary(out_dir) -> Path:
    """Rebuild reports/summary.txt from every task record in the bundle."""
    rep = Path(out_dir) / "reports"
    records = sorted(rep.glob("*.json"))
    if not records:
        raise NSCError(f"no task records in {rep}")
    lines = ["Neural stringology run summary", "=" * 30, ""]
    for path in records:
        r = json.loads(path.read_text())
        lines += [f"[{r['task']}] {r['title']}", "config: " + json.dumps(r["config"], sort_keys=True),
                  "seeds: " + json.dumps(r["config"]["effective_seeds"], sort_keys=True), ""]
        lines.append("  ".join(f"{c:>12}" for c in TABLE_COLUMNS))
        undefined = False
        for row in r["table"]:
            undefined |= any(row[k] is None for k in ("precision", "recall", "f1"))
            lines.append("  ".join(f"{_fmt(row[c]):>12}" for c in TABLE_COLUMNS))
        lines.append("")
        lines.append("All metrics are computed on the held-out test split only; "
                     f"evaluated ids are listed per condition in reports/{path.name}.")
        if undefined:
            lines.append("'undefined' marks precision/recall/F1 with a zero denominator; "
                         "such cells are excluded from aggregates.")
        if r["task"] == "distinguish":
            lines.append("The random_guessing row is the analytic chance reference, not a trained model.")
        if r["task"] == "variants":
            lines.append("All comparisons use the same feature schema as the distinguish task; "
                         "the first-named variant is class 1.")
        lines.append("")
    out = rep / "summary.txt"
    out.write_text("\n".join(lines))
    return out


def emit_reports(result: TaskResult, out_dir) -> list[Path]:
    """Write models, the task record, its CSV/SVG files and the run summary."""
    rep = Path(out_dir) / "reports"
    try:
        rep.mkdir(parents=True, exist_ok=True)
        record = result_record(result)
        rec_path = rep / f"{result.task}.json"
        rec_path.write_text(json.dumps(record, indent=1, sort_keys=True) + "\n")
        paths = save_models(result, out_dir) + [rec_path] + render_task(record, out_dir)
        paths.append(render_summary(out_dir))
    except OSError as exc:
        raise NSCError(f"cannot write reports to {rep}: {exc}") from exc
    return paths


def rerender(out_dir) -> list[Path]:
    """Regenerate CSV/SVG/summary from the stored task records."""
    rep = Path(out_dir) / "reports"
    paths = []
    for path in sorted(rep.glob("*.json")):
        paths += render_task(json.loads(path.read_text()), out_dir)
    paths.append(render_summary(out_dir))
    return paths
