"""Acceptance gate: ten checks, one printed verdict line per criterion.

Run with ``pytest -v tests/test_acceptance.py`` (add ``-s`` to watch the
verdict lines stream); every criterion prints ``ACCEPTANCE n (...): PASS``
or ``FAIL`` and the tolerances are pinned in the assertions themselves.
"""

from __future__ import annotations

import csv
import json
import random
import time
from contextlib import contextmanager
from itertools import product

import pytest

from adminscan.classify import (
    IMPLEMENTED_KINDS,
    EvaluationReport,
    KindEvaluation,
    Label,
    LabeledSample,
    ModelKind,
    evaluate,
    kfold_split,
    select_best,
    train,
)
from adminscan.cli import main
from adminscan.corpus import content_id, slovin, strip_comments
from adminscan.features import FeatureVector, extract_features
from adminscan.governance import (
    load_board_config,
    read_trace,
    replay_trace,
    run_scenario,
)
from adminscan.report import render_text, summarize
from oracles import oracle_strip, random_scenario, scenario_violations

SEED = 2026


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} ({name}): FAIL")
        raise
    print(f"ACCEPTANCE {number} ({name}): PASS")


def test_acceptance_01_slovin_reproduction():
    with criterion(1, "sample size formula reproduces 385"):
        assert slovin(84062, 0.94915) == 385
        timings = []
        for _ in range(5):
            start = time.perf_counter()
            slovin(84062, 0.94915)
            timings.append(time.perf_counter() - start)
        assert min(timings) < 0.001, f"slowest acceptable 1 ms, best {min(timings)}"


def test_acceptance_02_kfold_shape():
    with criterion(2, "385 samples split 77/308 five ways"):
        samples = [
            LabeledSample(
                f"s{i}",
                FeatureVector(tuple(int(b) for b in f"{i % 512:09b}")),
                Label.ADMINISTRATED if i % 3 == 0 else Label.OTHER,
            )
            for i in range(385)
        ]
        folds = kfold_split(samples, k=5, seed=SEED)
        assert [len(fold) for fold in folds] == [77, 77, 77, 77, 77]
        for fold in folds:
            assert len(samples) - len(fold) == 308


def test_acceptance_03_feature_extractor_golden_suite(data_dir, golden_corpus_dir):
    with criterion(3, "golden corpus matrix, zero mismatches"):
        plan: dict[str, tuple[int, ...]] = {}
        positives = [0] * 9
        with open(data_dir / "golden_matrix.csv", newline="") as handle:
            for row in csv.DictReader(handle):
                bits = tuple(int(row[f"f{i}"]) for i in range(1, 10))
                plan[row["id"]] = bits
                for i, bit in enumerate(bits):
                    positives[i] += bit
        total = len(plan)
        assert total >= 60
        assert min(positives) >= 5
        assert min(total - p for p in positives) >= 5

        start = time.perf_counter()
        mismatches = []
        seen = 0
        for path in sorted(golden_corpus_dir.glob("*.sol")):
            normalized = strip_comments(path.read_text(encoding="utf-8"))
            unit_id = content_id(normalized)
            got = tuple(extract_features(normalized))
            seen += 1
            if got != plan[unit_id]:
                mismatches.append((path.name, plan[unit_id], got))
        elapsed = time.perf_counter() - start
        assert seen == total
        assert mismatches == [], mismatches
        assert elapsed < 5.0, f"extraction took {elapsed:.2f}s"


@pytest.fixture(scope="module")
def learnable_lattice() -> list[LabeledSample]:
    rows = []
    for i, bits in enumerate(product((0, 1), repeat=9)):
        label = Label.ADMINISTRATED if (bits[1] or bits[4]) else Label.OTHER
        rows.append(LabeledSample(f"v{i:03d}", FeatureVector(bits), label))
    return rows


def test_acceptance_04_classifier_sanity(learnable_lattice):
    with criterion(4, "perfectly learnable set is perfectly learned"):
        report = evaluate(learnable_lattice, IMPLEMENTED_KINDS, k=5, seed=SEED)
        tree = report.results[ModelKind.DECISION_TREE_DEPTH9]
        svm = report.results[ModelKind.LINEAR_SVM]
        gnb = report.results[ModelKind.GAUSSIAN_NAIVE_BAYES]
        assert tree.error is None and tree.mean_accuracy == 1.0
        assert svm.error is None and svm.mean_accuracy == 1.0
        assert gnb.error is None and gnb.mean_accuracy >= 0.90

        nn1 = train(learnable_lattice, ModelKind.NEAREST_NEIGHBOR_1, seed=SEED)
        training_accuracy = sum(
            nn1.predict(s.vector) is s.label for s in learnable_lattice
        ) / len(learnable_lattice)
        assert training_accuracy == 1.0


def test_acceptance_05_selection_tie_rule():
    with criterion(5, "svm wins exact accuracy ties"):
        report = EvaluationReport(
            seed=SEED,
            k=5,
            results={
                ModelKind.LINEAR_SVM: KindEvaluation((0.966233,) * 5, (77,) * 5),
                ModelKind.DECISION_TREE_DEPTH9: KindEvaluation(
                    (0.966233,) * 5, (77,) * 5
                ),
                ModelKind.NEAREST_NEIGHBOR_1: KindEvaluation(
                    (0.955844,) * 5, (77,) * 5
                ),
            },
        )
        assert select_best(report) is ModelKind.LINEAR_SVM


def test_acceptance_06_prevalence_report():
    with criterion(6, "planted corpus fractions and reference echo"):
        rows = [
            (f"erc{i}", Label.ADMINISTRATED if i < 117 else Label.OTHER, 1)
            for i in range(130)
        ]
        rows += [(f"other{i}", Label.OTHER, 0) for i in range(70)]
        summary = summarize(rows)
        assert summary.frac_erc20 == 0.650
        assert summary.frac_admin_of_erc20 == 0.900
        text = render_text(summary)
        for constant in ("64.6%", "57.96%", "89.76%"):
            assert constant in text


def test_acceptance_07_governance_property_fuzz(data_dir):
    with criterion(7, "1000 fuzzed scenarios, eight invariants"):
        board, config = load_board_config(data_dir / "vote_board.json")
        trustees = sorted(board.trustees)
        start = time.perf_counter()
        violations: list[str] = []
        for seed in range(1000):
            rng = random.Random(seed)
            script = random_scenario(rng, trustees, steps=200)
            trace, live = run_scenario(script, board, config)
            violations.extend(
                f"seed {seed}: {problem}"
                for problem in scenario_violations(trace, board, config)
            )
            rebuilt = replay_trace(trace, board, config)
            if (
                rebuilt.actions != live.actions
                or rebuilt.pause != live.pause
                or rebuilt.log != live.log
            ):
                violations.append(f"seed {seed}: replay determinism")
        elapsed = time.perf_counter() - start
        assert violations == [], violations[:10]
        assert elapsed < 60.0, f"fuzzing took {elapsed:.1f}s"


def test_acceptance_08_governance_golden_trace(data_dir):
    with criterion(8, "bundled vote scenario trace"):
        board, config = load_board_config(data_dir / "vote_board.json")
        script = json.loads((data_dir / "vote_scenario.json").read_text())
        trace, state = run_scenario(script, board, config)
        assert trace == read_trace(data_dir / "golden_vote_trace.json")
        assert [row["kind"] for row in trace] == [
            "TrusteeVoted",
            "TrusteeVoted",
            "ActionCleared",
            "TrusteeVoted",
            "ActionActivated",
        ]
        action = state.actions[0]
        assert action.activated_at - action.cleared_at >= config.maintenance_delay


def test_acceptance_09_preprocessing_oracle_equivalence():
    with criterion(9, "10000 random strings strip identically"):
        alphabet = 'ab\n/"\'\\*xyz _;(){}=.'
        rng = random.Random(SEED)
        mismatches = 0
        for _ in range(10_000):
            source = "".join(
                rng.choice(alphabet) for _ in range(rng.randrange(0, 120))
            )
            if strip_comments(source) != oracle_strip(source):
                mismatches += 1
        assert mismatches == 0


def _pipeline_artifacts(workdir, corpus_dir, labels_path, tag: str) -> dict[str, bytes]:
    out = workdir / tag
    out.mkdir()
    steps = [
        ["ingest", "--root", str(corpus_dir), "--store", str(out / "store"),
         "--manifest", str(out / "manifest.json")],
        ["sample", "--manifest", str(out / "manifest.json"),
         "--seed", str(SEED), "--out", str(out / "sample.json")],
        ["extract", "--manifest", str(out / "manifest.json"),
         "--store", str(out / "store"), "--out", str(out / "features.csv")],
        ["evaluate", "--features", str(out / "features.csv"),
         "--labels", str(labels_path), "--k", "5", "--seed", str(SEED),
         "--out", str(out / "evaluation.json")],
        ["train", "--features", str(out / "features.csv"),
         "--labels", str(labels_path), "--kind", "linear_svm",
         "--seed", str(SEED), "--out", str(out / "model.json")],
        ["classify", "--features", str(out / "features.csv"),
         "--model", str(out / "model.json"), "--out", str(out / "classified.csv"),
         "--report", str(out / "report.json")],
    ]
    for argv in steps:
        assert main(argv) == 0, argv[0]
    artifacts: dict[str, bytes] = {}
    for name in ("sample.json", "features.csv", "evaluation.json",
                 "model.json", "classified.csv", "report.json"):
        artifacts[name] = (out / name).read_bytes()
    manifest = json.loads((out / "manifest.json").read_text())
    del manifest["created_at"]  # the only timestamp in any artifact
    artifacts["manifest.json"] = json.dumps(manifest, sort_keys=True).encode()
    return artifacts


def test_acceptance_10_end_to_end_determinism(tmp_path, golden_corpus_dir, data_dir):
    with criterion(10, "pipeline reruns byte-identically"):
        labels = data_dir / "golden_labels.csv"
        first = _pipeline_artifacts(tmp_path, golden_corpus_dir, labels, "run1")
        second = _pipeline_artifacts(tmp_path, golden_corpus_dir, labels, "run2")
        assert first.keys() == second.keys()
        for name in first:
            assert first[name] == second[name], f"{name} differs between runs"
