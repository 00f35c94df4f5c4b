"""Command-line entry point: ``nsc <subcommand> ...``.

Exit codes: 0 success, 1 runtime failure, 2 configuration / usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .cipher import dump_schedule
from .errors import ConfigError, NSCError
from .experiments import (
    TASKS,
    ExperimentConfig,
    conditions_for,
    corpus_features,
    emit_reports,
    fit_condition,
    generate_corpus,
    load_features,
    load_manifest,
    manifest_path,
    rerender,
    run_task,
    save_features,
)
from .experiments.reports import slug
from .experiments.splits import SPLITS
from .neural import LabeledDataset, advantage, evaluate, forward, load_model, roc_auc, save_model
from .stringology import SCHEMAS, read_csv, read_nscf

log = logging.getLogger("nsc")


class UsageError(ConfigError):
    pass


def _rounds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_run_flags(p: argparse.ArgumentParser, task: bool = True) -> None:
    p.add_argument("--out", default="runs/default", help="output directory; all artifact paths are relative to it")
    p.add_argument("--preset", choices=["desk", "paper"], default="desk", help="corpus scale preset")
    if task:
        p.add_argument("--task", choices=TASKS, default="distinguish", help="which corpus to build")
    p.add_argument("--sequences", type=int, default=None, help="sequences per class; unset means the preset value")
    p.add_argument("--n-bits", type=int, default=None, help="bits per sequence; unset means the preset value")
    p.add_argument("--rounds", type=_rounds, default=None, help="comma-separated round counts, e.g. 2,4,8,12,20; unset means the task default")
    p.add_argument("--rng", choices=["seeded", "os"], default="seeded", help="randomness source mode")
    p.add_argument("--seed", type=int, default=42, help="global seed")
    p.add_argument("--key-seed", type=int, default=None, help="seed for key/nonce sampling; unset means --seed")
    p.add_argument("--uniform-seed", type=int, default=None, help="seed for the uniform baseline; unset means --seed + 1")
    p.add_argument("--split-seed", type=int, default=None, help="seed for dataset splits; unset means --seed + 2")
    p.add_argument("--schema", default="v1", help=f"feature schema version, one of: {', '.join(SCHEMAS)}")
    _add_train_flags(p)
    p.add_argument("--workers", type=int, default=None, help="feature workers; unset means $NSC_THREADS or 1")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epochs", type=int, default=300, help="training epochs")
    p.add_argument("--lr", type=float, default=0.01, help="learning rate")
    p.add_argument("--batch-size", type=int, default=64, help="mini-batch size")
    p.add_argument("--l2", type=float, default=1e-4, help="L2 weight penalty")
    p.add_argument("--init-seed", type=int, default=0, help="seed for weight init and shuffling")


def _train_config(args):
    from .neural import TrainConfig
    return TrainConfig(args.lr, args.epochs, args.batch_size, args.init_seed, args.l2)


def config_from_args(args, task: str | None = None) -> ExperimentConfig:
    if args.schema not in SCHEMAS:
        raise ConfigError(f"unknown schema {args.schema!r}")
    return ExperimentConfig.preset(
        args.preset, task or args.task,
        sequences_per_class=args.sequences, n_bits=args.n_bits, rounds_list=args.rounds,
        schema_version=args.schema, train=_train_config(args), global_seed=args.seed,
        key_seed=args.key_seed, uniform_seed=args.uniform_seed, split_seed=args.split_seed,
        rng_mode=args.rng,
    )


def _manifest_config(manifest, args=None) -> ExperimentConfig:
    c = dict(manifest.config)
    c.pop("effective_seeds", None)
    from .neural import TrainConfig
    c["train"] = _train_config(args) if args is not None else TrainConfig(**c["train"])
    c["rounds_list"] = tuple(c["rounds_list"])
    return ExperimentConfig(**c)


# --- subcommands -------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = config_from_args(args)
    manifest = generate_corpus(cfg, args.out)
    print(f"{len(manifest.entries)} sequences -> {manifest_path(args.out)}")
    return 0


def cmd_features(args) -> int:
    if args.schema not in SCHEMAS:
        raise ConfigError(f"unknown schema {args.schema!r}")
    manifest = load_manifest(args.out)
    fm = corpus_features(args.out, manifest, args.schema, args.workers)
    path = save_features(fm, args.out, manifest.task)
    print(f"d={fm.schema.d} rows={len(fm)} -> {path}")
    return 0


def cmd_train(args) -> int:
    manifest = load_manifest(args.out, verify=False)
    cfg = _manifest_config(manifest, args)
    fm = load_features(args.out, manifest.task)
    models = Path(args.out) / "models"
    models.mkdir(parents=True, exist_ok=True)
    conds = conditions_for(cfg)
    for label, pos, neg in conds:
        o = fit_condition(fm, pos, neg, cfg, label, baseline=True)
        stem = manifest.task if len(conds) == 1 else f"{manifest.task}-{slug(label)}"
        for name, params in o.models.items():
            save_model(models / (f"{stem}.nscmlp" if name == "neural" else f"{stem}-{name}.nscmlp"),
                       params, o.standardizer)
        split = o.split.to_dict(o.ids)
        split.update(positive=pos, negative=neg)
        (models / f"{stem}.split.json").write_text(json.dumps(split, indent=1, sort_keys=True) + "\n")
        best = min(o.histories["neural"], key=lambda h: h["val_loss"])
        print(f"{label}: best validation accuracy {best['val_accuracy']:.4f} (epoch {best['epoch']}) "
              f"-> {models / (stem + '.nscmlp')}")
    return 0


def _split_file_for(model: Path) -> Path:
    stem = model.name[: -len(".nscmlp")] if model.name.endswith(".nscmlp") else model.stem
    if stem.endswith("-logistic"):
        stem = stem[: -len("-logistic")]
    return model.with_name(stem + ".split.json")


def cmd_eval(args) -> int:
    if args.split == "train" and not args.allow_train_eval:
        raise UsageError("refusing to evaluate on the training split without --allow-train-eval")
    model = Path(args.model)
    params, std = load_model(model)
    features = Path(args.features)
    fm = read_csv(features) if features.suffix == ".csv" else read_nscf(features)
    split_path = Path(args.split_file) if args.split_file else _split_file_for(model)
    if not split_path.exists():
        raise NSCError(f"split assignment {split_path} not found")
    split = json.loads(split_path.read_text())
    amap = split["assignment"]
    groups = {"1": split["positive"], "0": split["negative"]}
    rows, labels = [], []
    for i, sid in enumerate(fm.source_ids):
        if amap.get(sid) != args.split:
            continue
        g = sid.rsplit("-", 1)[0]
        if g not in groups.values():
            continue
        rows.append(i)
        labels.append(1 if g == groups["1"] else 0)
    if not rows:
        raise NSCError(f"no rows of {features} fall in the {args.split} split")
    X = fm.values[rows]
    if std is not None:
        X = std.transform(X)
    y = np.array(labels)
    data = LabeledDataset(X, y)
    m = evaluate(params, data)
    auc = roc_auc(forward(params, X), y).auc if 0 < y.sum() < y.size else float("nan")
    adv = advantage(params, X[y == 1], X[y == 0]) if 0 < y.sum() < y.size else None
    fmt = lambda v: "undefined" if v is None else f"{v:.4f}"
    raw = lambda v: "undefined" if v is None else repr(v)
    print(f"{args.split}: n={m.confusion.total} accuracy={m.accuracy:.4f} precision={fmt(m.precision)} "
          f"recall={fmt(m.recall)} f1={fmt(m.f1)} auc={auc:.4f} advantage={fmt(adv.adv if adv else None)}")
    if args.metrics_out:
        Path(args.metrics_out).write_text(
            "split,n,tp,tn,fp,fn,accuracy,precision,recall,f1,auc,advantage\n"
            f"{args.split},{m.confusion.total},{m.confusion.tp},{m.confusion.tn},{m.confusion.fp},{m.confusion.fn},"
            f"{m.accuracy!r},{raw(m.precision)},{raw(m.recall)},{raw(m.f1)},{auc!r},{raw(adv.adv if adv else None)}\n")
    return 0


def cmd_experiment(args) -> int:
    cfg = config_from_args(args, task=args.name)
    result = run_task(cfg, args.out, workers=args.workers, reuse=args.reuse)
    paths = emit_reports(result, args.out)
    rows = [r for r in result.table.rows if r.model == "neural"]
    key = ", ".join(f"{r.condition}: acc {r.accuracy:.3f}" for r in rows)
    csv_path = next(p for p in paths if p.name == f"{cfg.task}.csv")
    print(f"{cfg.task}: {key} -> {csv_path}")
    return 0


def cmd_report(args) -> int:
    paths = rerender(args.out)
    print(f"{len(paths)} report files -> {paths[-1]}")
    return 0


def cmd_dump_schedule(args) -> int:
    print(dump_schedule())
    return 0


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="nsc", description=__doc__.splitlines()[0], formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a keystream corpus and its manifest", formatter_class=fmt)
    _add_run_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("features", help="extract feature matrices for a corpus", formatter_class=fmt)
    p.add_argument("--out", default="runs/default", help="run directory containing corpus/manifest.json")
    p.add_argument("--schema", default="v1", help="feature schema version")
    p.add_argument("--workers", type=int, default=None, help="feature workers; unset means $NSC_THREADS or 1")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train the neural model and logistic baseline", formatter_class=fmt)
    p.add_argument("--out", default="runs/default", help="run directory")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on one split of a feature file", formatter_class=fmt)
    p.add_argument("--model", required=True, help="path to a .nscmlp checkpoint")
    p.add_argument("--features", required=True, help="path to a .nscf or .csv feature file")
    p.add_argument("--split", choices=SPLITS, default="test", help="which split to score")
    p.add_argument("--split-file", default=None, help="split assignment JSON; unset means the one next to the model")
    p.add_argument("--allow-train-eval", action="store_true", help="permit scoring the training split")
    p.add_argument("--metrics-out", default=None, help="optional CSV path for the metrics")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", help="run generate -> features -> train -> eval -> report", formatter_class=fmt)
    p.add_argument("name", choices=TASKS, help="experiment task")
    _add_run_flags(p, task=False)
    p.add_argument("--reuse", action="store_true", help="reuse an existing corpus and feature file")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="re-render CSV/SVG reports and the summary", formatter_class=fmt)
    p.add_argument("--out", default="runs/default", help="run directory")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("dump-schedule", help="print the EChaCha20 row/diagonal index table", formatter_class=fmt)
    p.set_defaults(func=cmd_dump_schedule)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"nsc: configuration error: {exc}", file=sys.stderr)
        return 2
    except (NSCError, OSError, ValueError) as exc:
        print(f"nsc: error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("nsc: interrupted", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
