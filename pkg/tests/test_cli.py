from __future__ import annotations

import json
import shutil

import pytest

from adminscan.cli import main
from adminscan.corpus import read_manifest, read_sample, slovin
from adminscan.governance import read_trace


@pytest.fixture
def workdir(tmp_path, golden_corpus_dir, data_dir):
    shutil.copytree(golden_corpus_dir, tmp_path / "corpus")
    shutil.copy(data_dir / "golden_labels.csv", tmp_path / "labels.csv")
    return tmp_path


def run_ingest(workdir) -> None:
    code = main(
        [
            "ingest",
            "--root", str(workdir / "corpus"),
            "--store", str(workdir / "store"),
            "--manifest", str(workdir / "manifest.json"),
        ]
    )
    assert code == 0


def test_ingest_writes_manifest_and_store(workdir, capsys):
    run_ingest(workdir)
    manifest = read_manifest(workdir / "manifest.json")
    assert manifest.unique_count == 76
    assert "76 unique sources" in capsys.readouterr().out
    sample_entry = manifest.entries[0]
    stored = workdir / "store" / sample_entry.id[:2] / f"{sample_entry.id}.sol"
    assert stored.is_file()


def test_sample_defaults_to_survey_confidence(workdir):
    run_ingest(workdir)
    code = main(
        [
            "sample",
            "--manifest", str(workdir / "manifest.json"),
            "--seed", "42",
            "--out", str(workdir / "sample.json"),
        ]
    )
    assert code == 0
    sample = read_sample(workdir / "sample.json")
    assert sample.confidence == 0.94915
    assert sample.sample_n == slovin(76, 0.94915)
    assert sample.population_n == 76
    assert len(set(sample.ids)) == sample.sample_n


def test_sample_is_reproducible(workdir):
    run_ingest(workdir)
    for name in ("one.json", "two.json"):
        main(
            [
                "sample",
                "--manifest", str(workdir / "manifest.json"),
                "--n", "30",
                "--seed", "7",
                "--out", str(workdir / name),
            ]
        )
    assert (workdir / "one.json").read_bytes() == (workdir / "two.json").read_bytes()


def test_sample_too_large_is_invalid_input(workdir):
    run_ingest(workdir)
    code = main(
        [
            "sample",
            "--manifest", str(workdir / "manifest.json"),
            "--n", "500",
            "--seed", "1",
            "--out", str(workdir / "sample.json"),
        ]
    )
    assert code == 2


def test_ingest_missing_root_is_an_error(tmp_path):
    code = main(
        [
            "ingest",
            "--root", str(tmp_path / "absent"),
            "--store", str(tmp_path / "store"),
            "--manifest", str(tmp_path / "manifest.json"),
        ]
    )
    assert code == 1


def _full_pipeline(workdir, tag: str) -> dict[str, bytes]:
    """ingest -> sample -> extract -> evaluate -> train -> classify -> report."""
    out = workdir / tag
    out.mkdir()
    steps = [
        ["ingest", "--root", str(workdir / "corpus"), "--store", str(out / "store"),
         "--manifest", str(out / "manifest.json")],
        ["sample", "--manifest", str(out / "manifest.json"), "--seed", "2026",
         "--out", str(out / "sample.json")],
        ["extract", "--manifest", str(out / "manifest.json"),
         "--store", str(out / "store"), "--out", str(out / "features.csv")],
        ["evaluate", "--features", str(out / "features.csv"),
         "--labels", str(workdir / "labels.csv"), "--k", "5", "--seed", "2026",
         "--out", str(out / "evaluation.json")],
        ["train", "--features", str(out / "features.csv"),
         "--labels", str(workdir / "labels.csv"), "--kind", "decision_tree_depth9",
         "--seed", "2026", "--out", str(out / "model.json")],
        ["classify", "--features", str(out / "features.csv"),
         "--model", str(out / "model.json"), "--out", str(out / "classified.csv"),
         "--report", str(out / "report.json")],
        ["report", "--classified", str(out / "classified.csv"),
         "--out", str(out / "summary.json")],
    ]
    for argv in steps:
        assert main(argv) == 0, argv[0]
    artifacts = {}
    for name in ("sample.json", "features.csv", "evaluation.json", "model.json",
                 "classified.csv", "report.json", "summary.json"):
        artifacts[name] = (out / name).read_bytes()
    manifest = json.loads((out / "manifest.json").read_text())
    del manifest["created_at"]
    artifacts["manifest.json"] = json.dumps(manifest, sort_keys=True).encode()
    return artifacts


def test_pipeline_end_to_end_and_deterministic(workdir):
    first = _full_pipeline(workdir, "run1")
    second = _full_pipeline(workdir, "run2")
    assert first == second

    evaluation = json.loads(first["evaluation.json"])
    assert set(evaluation["kinds"]) == {
        "nearest_neighbor_1", "gaussian_naive_bayes",
        "decision_tree_depth9", "linear_svm",
    }
    assert evaluation["selected"] in evaluation["kinds"]
    assert evaluation["paper_reference"]["svc"] == 96.6233

    report = json.loads(first["report.json"])
    # the tree trained on the full golden matrix reproduces its labels
    assert report["total"] == 76
    assert report["erc20_count"] == 64
    assert report["administrated_count"] == 56
    assert json.loads(first["summary.json"]) == report


def test_extract_respects_sample_restriction(workdir):
    run_ingest(workdir)
    main(
        [
            "sample",
            "--manifest", str(workdir / "manifest.json"),
            "--n", "10",
            "--seed", "3",
            "--out", str(workdir / "sample.json"),
        ]
    )
    code = main(
        [
            "extract",
            "--manifest", str(workdir / "manifest.json"),
            "--store", str(workdir / "store"),
            "--sample", str(workdir / "sample.json"),
            "--out", str(workdir / "features.csv"),
        ]
    )
    assert code == 0
    lines = (workdir / "features.csv").read_text().splitlines()
    assert len(lines) == 11  # header + the ten sampled rows


def test_train_unsupported_kind_fails_cleanly(workdir):
    run_ingest(workdir)
    main(
        [
            "extract",
            "--manifest", str(workdir / "manifest.json"),
            "--store", str(workdir / "store"),
            "--out", str(workdir / "features.csv"),
        ]
    )
    code = main(
        [
            "train",
            "--features", str(workdir / "features.csv"),
            "--labels", str(workdir / "labels.csv"),
            "--kind", "random_forest",
            "--seed", "1",
            "--out", str(workdir / "model.json"),
        ]
    )
    assert code == 1
    assert not (workdir / "model.json").exists()


def test_report_prints_text_summary(workdir, capsys, data_dir):
    run_ingest(workdir)
    classified = workdir / "classified.csv"
    classified.write_text(
        "id,label,f1\na,administrated_erc20,1\nb,other,1\nc,other,0\n"
    )
    code = main(["report", "--classified", str(classified), "--text"])
    assert code == 0
    out = capsys.readouterr().out
    assert "Corpus classification summary" in out
    assert "Reference survey" in out
    assert "84,062" in out


def test_gov_run_reproduces_golden_trace(tmp_path, data_dir, capsys):
    out = tmp_path / "trace.json"
    code = main(
        [
            "gov-run",
            "--scenario", str(data_dir / "vote_scenario.json"),
            "--board", str(data_dir / "vote_board.json"),
            "--out", str(out),
        ]
    )
    assert code == 0
    assert read_trace(out) == read_trace(data_dir / "golden_vote_trace.json")
    assert "5 events" in capsys.readouterr().out


def test_gov_run_rejects_malformed_scenario(tmp_path, data_dir):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"at": 0, "op": "shout", "actor": "0xA11CE"}]))
    code = main(
        [
            "gov-run",
            "--scenario", str(bad),
            "--board", str(data_dir / "vote_board.json"),
            "--out", str(tmp_path / "trace.json"),
        ]
    )
    assert code == 2
    assert not (tmp_path / "trace.json").exists()
