import dataclasses
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from nsc.cipher import chacha20_keystream, echacha_keystream
from nsc.errors import ConfigError, NSCError
from nsc.experiments import (
    ExperimentConfig,
    corpus_groups,
    emit_reports,
    generate_corpus,
    largest_remainder,
    load_manifest,
    manifest_path,
    read_sequence,
    rerender,
    run_task,
    split_dataset,
    uniform_source,
)
from nsc.experiments import corpus as corpus_mod
from nsc.experiments.tasks import TABLE_COLUMNS
from nsc.neural import TrainConfig

SMALL = dict(sequences_per_class=24, n_bits=4096, train=TrainConfig(epochs=5))


# --- splits -------------------------------------------------------------------------

def test_largest_remainder_examples():
    assert largest_remainder(100) == [70, 15, 15]
    assert largest_remainder(101) == [71, 15, 15]
    for n in range(20, 400):
        q = largest_remainder(n)
        assert sum(q) == n
        assert all(abs(a - n * r) < 1 for a, r in zip(q, (0.7, 0.15, 0.15)))


def test_split_stratified_and_deterministic():
    y = np.r_[np.ones(101, int), np.zeros(101, int)]
    a = split_dataset(y, seed=5)
    assert a == split_dataset(y, seed=5)
    assert a != split_dataset(y, seed=6)
    for c in (0, 1):
        names = [s for s, lab in zip(a.assignment, y) if lab == c]
        assert [names.count(k) for k in ("train", "validation", "test")] == [71, 15, 15]
    tr, te = set(a.indices("train")), set(a.indices("test"))
    assert not tr & te
    assert len(tr | te | set(a.indices("validation"))) == y.size
    with pytest.raises(ConfigError):
        split_dataset(np.r_[np.ones(10), np.zeros(10)])


# --- configuration --------------------------------------------------------------------

def test_presets_and_validation():
    paper = ExperimentConfig.preset("paper", "distinguish")
    assert (paper.sequences_per_class, paper.n_bits) == (50_000, 2**16)
    desk = ExperimentConfig.preset("desk", "rounds")
    assert (desk.sequences_per_class, desk.n_bits, desk.rounds_list) == (1000, 2**13, (2, 4, 8, 12, 20))
    assert desk.seeds == {"global": 42, "keys": 42, "uniform": 43, "split": 44, "init": 0}
    for bad in (dict(n_bits=100), dict(sequences_per_class=5), dict(rounds_list=(3,)), dict(schema_version="v2"),
                dict(rng_mode="dev")):
        with pytest.raises(ConfigError):
            ExperimentConfig.preset("desk", "distinguish", **bad)
    with pytest.raises(ConfigError):
        ExperimentConfig.preset("laptop")


def test_corpus_groups():
    names = lambda task: [g.name for g in corpus_groups(ExperimentConfig.preset("desk", task))]
    assert names("rounds") == ["echacha20-r2", "echacha20-r4", "echacha20-r8", "echacha20-r12",
                               "echacha20-r20", "urandom"]
    assert names("variants") == ["chacha20-r20", "echacha20-r20", "urandom"]
    assert [g.label for g in corpus_groups(ExperimentConfig.preset("desk", "null"))] == [0, 0]


# --- uniform source -------------------------------------------------------------------

def test_uniform_source():
    a = uniform_source(1024, "seeded", np.random.default_rng(3))
    b = uniform_source(1024, "seeded", np.random.default_rng(3))
    assert a.data == b.data and a.generator == "urandom"
    assert uniform_source(1024, "os").nbits == 1024
    block = uniform_source(2**16, "seeded", np.random.default_rng(4), count=200)
    ones = np.unpackbits(block, axis=1).mean(axis=1)
    assert np.mean(np.abs(ones - 0.5) <= 0.01) >= 0.99
    with pytest.raises(NSCError):
        uniform_source(12)
    with pytest.raises(ConfigError):
        uniform_source(16, "dev")


# --- corpus ---------------------------------------------------------------------------

def test_generate_and_reload(tmp_path):
    cfg = ExperimentConfig.preset("desk", "variants", **SMALL)
    m = generate_corpus(cfg, tmp_path / "a")
    assert len(m.entries) == 72
    again = generate_corpus(cfg, tmp_path / "b")
    assert manifest_path(tmp_path / "a").read_bytes() == manifest_path(tmp_path / "b").read_bytes()
    loaded = load_manifest(tmp_path / "a")
    assert loaded == m == again
    assert len({e.id for e in loaded.entries}) == 72
    for e in loaded.entries[::7]:
        data = read_sequence(tmp_path / "a", e)
        assert len(data) == 512
        if e.generator == "echacha20":
            assert echacha_keystream(bytes.fromhex(e.key_hex), bytes.fromhex(e.nonce_hex), e.rounds, 4096).data == data
        elif e.generator == "chacha20":
            assert len(bytes.fromhex(e.nonce_hex)) == 12
            assert chacha20_keystream(bytes.fromhex(e.key_hex), bytes.fromhex(e.nonce_hex), e.rounds, 4096).data == data
        else:
            assert e.key_hex is None and e.label == 0
    raw = json.loads(manifest_path(tmp_path / "a").read_text())
    assert {"entries", "created_at", "tool_version", "global_seed"} <= set(raw)
    assert set(raw["entries"][0]) >= {"id", "path", "generator", "rounds", "key_hex", "nonce_hex", "n_bits", "label"}


def test_seeds_are_independent(tmp_path):
    base = ExperimentConfig.preset("desk", "distinguish", **SMALL)
    m0 = generate_corpus(base, tmp_path / "0")
    m1 = generate_corpus(base.with_(uniform_seed=999), tmp_path / "1")
    cipher = lambda m: [e.sha256 for e in m.select("echacha20-r20")]
    uniform = lambda m: [e.sha256 for e in m.select("urandom")]
    assert cipher(m0) == cipher(m1)
    assert uniform(m0) != uniform(m1)


def test_load_manifest_detects_tampering(tmp_path):
    cfg = ExperimentConfig.preset("desk", "distinguish", **SMALL)
    m = generate_corpus(cfg, tmp_path)
    f = tmp_path / m.entries[3].path
    f.write_bytes(bytes(512))
    with pytest.raises(NSCError):
        load_manifest(tmp_path)
    f.write_bytes(bytes(10))
    with pytest.raises(NSCError):
        load_manifest(tmp_path)
    with pytest.raises(NSCError):
        load_manifest(tmp_path / "missing")


def test_generation_failure_leaves_no_manifest(tmp_path, monkeypatch):
    cfg = ExperimentConfig.preset("desk", "distinguish", **SMALL)

    real = corpus_mod._generate_group
    calls = []

    def flaky(group, cfg):
        calls.append(group.name)
        if len(calls) == 2:
            raise OSError("disk full")
        yield from real(group, cfg)

    monkeypatch.setattr(corpus_mod, "_generate_group", flaky)
    with pytest.raises(OSError):
        generate_corpus(cfg, tmp_path)
    assert not manifest_path(tmp_path).exists()
    assert not list((tmp_path / "corpus").glob("*.ks"))


# --- tasks and reports ------------------------------------------------------------------

@pytest.fixture(scope="module")
def distinguish_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("dist")
    cfg = ExperimentConfig.preset("desk", "distinguish", **SMALL)
    result = run_task(cfg, out)
    return out, result, emit_reports(result, out)


def test_distinguish_table(distinguish_run):
    out, result, paths = distinguish_run
    models = [r.model for r in result.table.rows]
    assert models == ["neural", "logistic", "random_guessing"]
    guess = result.table.row(result.outcomes[0].condition, "random_guessing")
    assert (guess.accuracy, guess.precision, guess.recall, guess.f1) == (0.5, 0.5, 0.5, 0.5)
    n_test = result.table.rows[0].n_test
    assert n_test == 2 * largest_remainder(24)[2]


def test_no_test_leakage(distinguish_run):
    out, result, _ = distinguish_run
    record = json.loads((out / "reports" / "distinguish.json").read_text())
    for cond, audit in record["audit"].items():
        assert audit["evaluated_ids"] == audit["test_ids"]
        split = json.loads((out / "models" / "distinguish.split.json").read_text())
        assert all(split["assignment"][i] == "test" for i in audit["evaluated_ids"])


def test_report_bundle_files(distinguish_run):
    out, _, paths = distinguish_run
    rep = out / "reports"
    for name in ("distinguish.csv", "distinguish_roc.csv", "distinguish.svg", "distinguish_mgram.csv",
                 "distinguish_mgram.svg", "summary.txt", "distinguish.json"):
        assert (rep / name).exists()
    assert (out / "models" / "distinguish.nscmlp").read_text().startswith("NSCMLP v1")
    header = (rep / "distinguish.csv").read_text().splitlines()[0].split(",")
    assert tuple(header) == TABLE_COLUMNS
    for svg in rep.glob("*.svg"):
        root = ET.fromstring(svg.read_text())
        assert root.tag.endswith("svg")
        assert "href" not in svg.read_text()
    summary = (rep / "summary.txt").read_text()
    assert '"global": 42' in summary and "held-out test split" in summary


def test_reports_rerender_identically(distinguish_run):
    out, _, _ = distinguish_run
    before = {p.name: p.read_bytes() for p in (out / "reports").iterdir()}
    rerender(out)
    after = {p.name: p.read_bytes() for p in (out / "reports").iterdir()}
    assert before == after


def test_rerun_is_byte_identical(distinguish_run, tmp_path):
    out, _, _ = distinguish_run
    cfg = ExperimentConfig.preset("desk", "distinguish", **SMALL)
    emit_reports(run_task(cfg, tmp_path), tmp_path)
    for rel in ("reports/distinguish.csv", "features/distinguish.nscf", "features/distinguish.csv",
                "models/distinguish.nscmlp", "corpus/manifest.json"):
        assert (tmp_path / rel).read_bytes() == (out / rel).read_bytes()


def test_unwritable_report_dir(distinguish_run, tmp_path):
    _, result, _ = distinguish_run
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(NSCError):
        emit_reports(result, blocker)


def test_sweep_ordering_over_seeds(desk_rounds):
    """acc(r=2) >= acc(r=20) + 0.2 in at least 19 of 20 seeded split/init choices."""
    from nsc.experiments import fit_condition

    _, result, _ = desk_rounds
    fm, cfg = result.features, result.config
    ok = 0
    for seed in range(20):
        c = cfg.with_(split_seed=100 + seed, train=dataclasses.replace(cfg.train, seed=seed))
        hi = fit_condition(fm, "echacha20-r2", "urandom", c, baseline=False).rows[0].accuracy
        lo = fit_condition(fm, "echacha20-r20", "urandom", c, baseline=False).rows[0].accuracy
        ok += hi >= lo + 0.2
    assert ok >= 19
