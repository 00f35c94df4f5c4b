"""Corpus construction, splits, the experiment tasks and report emission."""
from .config import DEFAULT_ROUNDS, PRESETS, TASKS, ExperimentConfig
from .corpus import (
    CorpusGroup,
    CorpusManifest,
    ManifestEntry,
    corpus_groups,
    generate_corpus,
    load_manifest,
    manifest_path,
    read_sequence,
    uniform_source,
)
from .reports import emit_reports, render_summary, rerender
from .splits import SplitAssignment, largest_remainder, split_dataset
from .tasks import (
    ReportRow,
    ReportTable,
    TaskResult,
    conditions_for,
    corpus_features,
    fit_condition,
    load_features,
    prepare_corpus,
    run_distinguish,
    run_null,
    run_on_features,
    run_rounds_sweep,
    run_task,
    run_variants,
    save_features,
)
