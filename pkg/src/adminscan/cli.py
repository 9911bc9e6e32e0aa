"""Command line interface tying the pipeline together.

Exit codes: 0 on success, 2 when the input data is invalid, 1 for anything
else that goes wrong (I/O, bad configuration, internal failures).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import classify, corpus, features, governance, report
from .errors import AdminscanError, InvalidInput

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID_INPUT = 2


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.handler(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (AdminscanError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adminscan",
        description="Detect administrated ERC20 tokens and replay governance scenarios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize and deduplicate a source tree")
    p.add_argument("--root", required=True, help="directory of .sol/.json files")
    p.add_argument("--store", required=True, help="content-addressed output store")
    p.add_argument("--manifest", required=True, help="manifest JSON to write")
    p.set_defaults(handler=_cmd_ingest)

    p = sub.add_parser("sample", help="draw a reproducible sample from a manifest")
    p.add_argument("--manifest", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--n", type=int, help="explicit sample size")
    group.add_argument(
        "--confidence",
        type=float,
        default=None,
        help="confidence level for the sample-size formula (default 0.94915)",
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="sample JSON to write")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("extract", help="extract feature vectors from stored sources")
    p.add_argument("--manifest", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--sample", help="restrict to ids listed in a sample JSON")
    p.add_argument("--out", required=True, help="feature matrix CSV to write")
    p.set_defaults(handler=_cmd_extract)

    p = sub.add_parser("evaluate", help="k-fold evaluation of all model kinds")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="evaluation report JSON to write")
    p.set_defaults(handler=_cmd_evaluate)

    p = sub.add_parser("train", help="train one model kind")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument(
        "--kind",
        required=True,
        choices=[kind.value for kind in classify.ModelKind],
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="model JSON to write")
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("classify", help="label a feature matrix with a trained model")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="classified CSV to write")
    p.add_argument("--report", help="also write a prevalence report JSON here")
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("report", help="summarize a classified CSV")
    p.add_argument("--classified", required=True)
    p.add_argument("--out", help="report JSON to write")
    p.add_argument("--text", action="store_true", help="print the text summary")
    p.set_defaults(handler=_cmd_report)

    p = sub.add_parser("gov-run", help="run a governance scenario script")
    p.add_argument("--scenario", required=True, help="scenario JSON script")
    p.add_argument("--board", required=True, help="board and durations JSON")
    p.add_argument("--out", required=True, help="trace JSON to write")
    p.set_defaults(handler=_cmd_gov_run)

    return parser


def _cmd_ingest(args: argparse.Namespace) -> int:
    manifest = corpus.ingest(args.root, args.store)
    corpus.write_manifest(manifest, args.manifest)
    print(f"ingested {manifest.unique_count} unique sources into {args.store}")
    return EXIT_OK


def _cmd_sample(args: argparse.Namespace) -> int:
    manifest = corpus.read_manifest(args.manifest)
    confidence = args.confidence
    if args.n is not None:
        n = args.n
    else:
        if confidence is None:
            confidence = 0.94915
        n = corpus.slovin(manifest.unique_count, confidence)
    sample = corpus.select_sample(manifest, n, args.seed, confidence=confidence)
    corpus.write_sample(sample, args.out)
    print(f"sampled {sample.sample_n} of {sample.population_n} ids (seed {sample.seed})")
    return EXIT_OK


def _cmd_extract(args: argparse.Namespace) -> int:
    manifest = corpus.read_manifest(args.manifest)
    wanted = None
    if args.sample:
        wanted = set(corpus.read_sample(args.sample).ids)
    rows = []
    for entry in manifest.entries:
        if wanted is not None and entry.id not in wanted:
            continue
        source = corpus.load_normalized(args.store, entry.id)
        rows.append((entry.id, features.extract_features(source)))
    features.write_matrix(args.out, rows)
    print(f"extracted features for {len(rows)} sources")
    return EXIT_OK


def _load_labeled_samples(
    features_path: str, labels_path: str
) -> list[classify.LabeledSample]:
    rows, _ = features.read_matrix(features_path)
    labels = classify.read_labels(labels_path)
    samples = [
        classify.LabeledSample(unit_id, vector, labels[unit_id])
        for unit_id, vector in rows
        if unit_id in labels
    ]
    skipped = len(rows) - len(samples)
    if skipped:
        log.warning("%d feature rows have no label and are ignored", skipped)
    return samples


def _cmd_evaluate(args: argparse.Namespace) -> int:
    samples = _load_labeled_samples(args.features, args.labels)
    result = classify.evaluate(samples, classify.IMPLEMENTED_KINDS, args.k, args.seed)
    document = result.to_json_dict()
    Path(args.out).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    for kind_value, entry in document["kinds"].items():
        if "error" in entry:
            print(f"{kind_value}: failed ({entry['error']})")
        else:
            print(f"{kind_value}: mean accuracy {entry['mean_accuracy']:.4f}")
    print(f"selected: {document['selected']}")
    return EXIT_OK


def _cmd_train(args: argparse.Namespace) -> int:
    samples = _load_labeled_samples(args.features, args.labels)
    model = classify.train(samples, classify.ModelKind(args.kind), args.seed)
    classify.save_model(model, args.out)
    print(f"trained {model.kind.value} on {len(samples)} samples (seed {model.seed})")
    return EXIT_OK


def _cmd_classify(args: argparse.Namespace) -> int:
    rows, _ = features.read_matrix(args.features)
    model = classify.load_model(args.model)
    classified = classify.classify_corpus(model, rows)
    classify.write_classified(args.out, classified)
    summary = report.summarize(classified)
    if args.report:
        report.write_report(summary, args.report)
    administrated = summary.administrated_count
    print(f"classified {summary.total} sources; {administrated} administrated")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    rows = classify.read_classified(args.classified)
    summary = report.summarize(rows)
    if args.out:
        report.write_report(summary, args.out)
    if args.text or not args.out:
        print(report.render_text(summary), end="")
    return EXIT_OK


def _cmd_gov_run(args: argparse.Namespace) -> int:
    board, config = governance.load_board_config(args.board)
    try:
        script = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise governance.MalformedScript(f"scenario is not valid JSON: {exc}") from exc
    trace, state = governance.run_scenario(script, board, config)
    governance.write_trace(trace, args.out)
    events = sum(1 for row in trace if "rejected" not in row and "result" not in row)
    rejected = sum(1 for row in trace if "rejected" in row)
    print(f"executed {len(script)} steps: {events} events, {rejected} rejected")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
