"""Training, evaluation, and selection of binary token classifiers.

Four classifier kinds are implemented from scratch over the nine-bit feature
vectors; five further kinds from the reference survey are registered but have
no trainer and fail fast.  Everything is deterministic: randomness funnels
through one integer seed, floats are plain Python doubles, and prediction tie
rules are fixed (exact score ties fall back to the non-administrated class,
nearest-neighbor distance ties resolve to the lowest training index).
"""

from __future__ import annotations

import csv
import json
import logging
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    NoSuccessfulModels,
    SingleClassTraining,
    TooFewSamples,
    UnsupportedModelKind,
)
from .features import FEATURE_COUNT, FeatureVector

__all__ = [
    "Label",
    "ModelKind",
    "IMPLEMENTED_KINDS",
    "SELECTION_PREFERENCE",
    "REFERENCE_ACCURACY_PERCENT",
    "MODEL_FORMAT_VERSION",
    "LabeledSample",
    "TrainedModel",
    "KindEvaluation",
    "EvaluationReport",
    "train",
    "kfold_split",
    "evaluate",
    "select_best",
    "classify_corpus",
    "save_model",
    "load_model",
    "read_labels",
    "write_classified",
    "read_classified",
]

log = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1

# Gaussian likelihoods get this added to every per-feature variance so a
# constant feature never divides by zero.
VARIANCE_SMOOTHING = 1e-9

SVM_EPOCHS = 200
SVM_LAMBDA = 1e-4
TREE_MAX_DEPTH = 9


class Label(str, Enum):
    ADMINISTRATED = "administrated_erc20"
    OTHER = "other"


class ModelKind(str, Enum):
    NEAREST_NEIGHBOR_1 = "nearest_neighbor_1"
    GAUSSIAN_NAIVE_BAYES = "gaussian_naive_bayes"
    DECISION_TREE_DEPTH9 = "decision_tree_depth9"
    LINEAR_SVM = "linear_svm"
    RANDOM_FOREST = "random_forest"
    LINEAR_DISCRIMINANT = "linear_discriminant"
    GRADIENT_BOOSTING = "gradient_boosting"
    ADABOOST = "adaboost"
    MULTILAYER_PERCEPTRON = "multilayer_perceptron"


IMPLEMENTED_KINDS = (
    ModelKind.NEAREST_NEIGHBOR_1,
    ModelKind.GAUSSIAN_NAIVE_BAYES,
    ModelKind.DECISION_TREE_DEPTH9,
    ModelKind.LINEAR_SVM,
)

# Tie order when mean accuracies match exactly.
SELECTION_PREFERENCE = (
    ModelKind.LINEAR_SVM,
    ModelKind.DECISION_TREE_DEPTH9,
    ModelKind.NEAREST_NEIGHBOR_1,
    ModelKind.GAUSSIAN_NAIVE_BAYES,
)

# Published cross-validation accuracies (percent) from the reference survey
# of 385 verified contracts; echoed into evaluation reports for side-by-side
# reading, never asserted against local results.
REFERENCE_ACCURACY_PERCENT = {
    "svc": 96.6233,
    "decision_tree": 96.3636,
    "knn_1": 95.5844,
    "random_forest": 96.3636,
    "gaussian_nb": 61.0389,
    "lda": 96.3636,
    "gradient_boosting": 96.3636,
    "adaboost": 95.0649,
    "mlpc": 96.6233,
}


@dataclass(frozen=True)
class LabeledSample:
    id: str
    vector: FeatureVector
    label: Label


@dataclass(frozen=True)
class TrainedModel:
    kind: ModelKind
    seed: int
    class_prior: tuple[float, float]  # (administrated, other)
    parameters: dict

    def predict(self, vector: FeatureVector) -> Label:
        bits = tuple(vector)
        if self.kind is ModelKind.NEAREST_NEIGHBOR_1:
            return _predict_nn1(self.parameters, bits)
        if self.kind is ModelKind.GAUSSIAN_NAIVE_BAYES:
            return _predict_gnb(self.parameters, bits)
        if self.kind is ModelKind.DECISION_TREE_DEPTH9:
            return _predict_tree(self.parameters["root"], bits)
        if self.kind is ModelKind.LINEAR_SVM:
            return _predict_svm(self.parameters, bits)
        raise UnsupportedModelKind(f"no predictor for {self.kind.value}")


@dataclass(frozen=True)
class KindEvaluation:
    fold_accuracies: tuple[float, ...] = ()
    fold_sizes: tuple[int, ...] = ()
    error: str | None = None

    @property
    def mean_accuracy(self) -> float:
        if not self.fold_accuracies:
            return 0.0
        return sum(self.fold_accuracies) / len(self.fold_accuracies)


@dataclass(frozen=True)
class EvaluationReport:
    seed: int
    k: int
    results: dict[ModelKind, KindEvaluation] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        kinds = {}
        for kind, result in self.results.items():
            if result.error is not None:
                kinds[kind.value] = {"error": result.error}
            else:
                kinds[kind.value] = {
                    "fold_accuracies": list(result.fold_accuracies),
                    "fold_sizes": list(result.fold_sizes),
                    "mean_accuracy": result.mean_accuracy,
                }
        document = {
            "seed": self.seed,
            "k": self.k,
            "kinds": kinds,
            "paper_reference": dict(REFERENCE_ACCURACY_PERCENT),
        }
        try:
            document["selected"] = select_best(self).value
        except NoSuccessfulModels:
            document["selected"] = None
        return document


def train(samples: Sequence[LabeledSample], kind: ModelKind, seed: int) -> TrainedModel:
    """Fit one model kind on the given samples, in the given sample order."""
    if kind not in IMPLEMENTED_KINDS:
        raise UnsupportedModelKind(f"model kind {kind.value} has no trainer")
    if not samples:
        raise ValueError("cannot train on zero samples")
    admin = sum(1 for s in samples if s.label is Label.ADMINISTRATED)
    prior = (admin / len(samples), (len(samples) - admin) / len(samples))

    if kind is ModelKind.NEAREST_NEIGHBOR_1:
        parameters = _fit_nn1(samples)
    elif kind is ModelKind.GAUSSIAN_NAIVE_BAYES:
        parameters = _fit_gnb(samples)
    elif kind is ModelKind.DECISION_TREE_DEPTH9:
        parameters = _fit_tree(samples)
    else:
        parameters = _fit_svm(samples, seed)
    return TrainedModel(kind, seed, prior, parameters)


# -- 1-nearest-neighbor ------------------------------------------------------


def _fit_nn1(samples: Sequence[LabeledSample]) -> dict:
    return {
        "vectors": [list(s.vector) for s in samples],
        "labels": [s.label.value for s in samples],
    }


def _predict_nn1(parameters: dict, bits: tuple[int, ...]) -> Label:
    best_distance: int | None = None
    best_label = Label.OTHER.value
    for vector, label in zip(parameters["vectors"], parameters["labels"]):
        # Hamming distance; on binary vectors this equals squared Euclidean.
        distance = sum(a != b for a, b in zip(vector, bits))
        if best_distance is None or distance < best_distance:
            best_distance = distance
            best_label = label
    return Label(best_label)


# -- Gaussian naive Bayes ----------------------------------------------------


def _fit_gnb(samples: Sequence[LabeledSample]) -> dict:
    groups: dict[Label, list[tuple[int, ...]]] = {
        Label.ADMINISTRATED: [],
        Label.OTHER: [],
    }
    for sample in samples:
        groups[sample.label].append(tuple(sample.vector))
    if not groups[Label.ADMINISTRATED] or not groups[Label.OTHER]:
        raise SingleClassTraining("naive Bayes needs both classes present")
    parameters: dict = {"classes": {}}
    for label, vectors in groups.items():
        count = len(vectors)
        means = [sum(v[j] for v in vectors) / count for j in range(FEATURE_COUNT)]
        variances = [
            sum((v[j] - means[j]) ** 2 for v in vectors) / count + VARIANCE_SMOOTHING
            for j in range(FEATURE_COUNT)
        ]
        parameters["classes"][label.value] = {
            "prior": count / len(samples),
            "mean": means,
            "variance": variances,
        }
    return parameters


def _predict_gnb(parameters: dict, bits: tuple[int, ...]) -> Label:
    def log_posterior(stats: dict) -> float:
        score = math.log(stats["prior"])
        for x, mean, variance in zip(bits, stats["mean"], stats["variance"]):
            score -= 0.5 * math.log(2.0 * math.pi * variance)
            score -= (x - mean) ** 2 / (2.0 * variance)
        return score

    administrated = log_posterior(parameters["classes"][Label.ADMINISTRATED.value])
    other = log_posterior(parameters["classes"][Label.OTHER.value])
    # Exact ties predict the non-administrated class.
    return Label.ADMINISTRATED if administrated > other else Label.OTHER


# -- depth-limited decision tree ---------------------------------------------


def _gini(admin: int, other: int) -> float:
    total = admin + other
    if total == 0:
        return 0.0
    p_admin = admin / total
    p_other = other / total
    return 1.0 - p_admin * p_admin - p_other * p_other


def _fit_tree(samples: Sequence[LabeledSample]) -> dict:
    rows = [(tuple(s.vector), s.label) for s in samples]
    return {"root": _grow_tree(rows, depth=0)}


def _leaf(rows: list[tuple[tuple[int, ...], Label]]) -> dict:
    admin = sum(1 for _, label in rows if label is Label.ADMINISTRATED)
    other = len(rows) - admin
    # Majority label; an exact tie is an unresolved leaf and stays other.
    label = Label.ADMINISTRATED if admin > other else Label.OTHER
    return {"leaf": label.value}


def _grow_tree(rows: list[tuple[tuple[int, ...], Label]], depth: int) -> dict:
    labels = {label for _, label in rows}
    if len(labels) == 1 or depth >= TREE_MAX_DEPTH:
        return _leaf(rows)

    node_admin = sum(1 for _, label in rows if label is Label.ADMINISTRATED)
    node_gini = _gini(node_admin, len(rows) - node_admin)
    best_feature = -1
    best_gain = -1.0
    for feature in range(FEATURE_COUNT):
        zero = [(v, l) for v, l in rows if v[feature] == 0]
        one = [(v, l) for v, l in rows if v[feature] == 1]
        if not zero or not one:
            continue
        zero_admin = sum(1 for _, l in zero if l is Label.ADMINISTRATED)
        one_admin = sum(1 for _, l in one if l is Label.ADMINISTRATED)
        weighted = (
            len(zero) / len(rows) * _gini(zero_admin, len(zero) - zero_admin)
            + len(one) / len(rows) * _gini(one_admin, len(one) - one_admin)
        )
        gain = node_gini - weighted
        # Strictly-greater keeps the lowest feature index on exact ties.
        if gain > best_gain:
            best_gain = gain
            best_feature = feature
    if best_feature < 0:
        # No feature separates the rows; the node is as pure as it gets.
        return _leaf(rows)
    # A zero-gain split still partitions the rows and can become pure deeper
    # down, so an impure node keeps splitting while depth remains.
    zero = [(v, l) for v, l in rows if v[best_feature] == 0]
    one = [(v, l) for v, l in rows if v[best_feature] == 1]
    return {
        "feature": best_feature,
        "zero": _grow_tree(zero, depth + 1),
        "one": _grow_tree(one, depth + 1),
    }


def _predict_tree(node: dict, bits: tuple[int, ...]) -> Label:
    while "leaf" not in node:
        node = node["one"] if bits[node["feature"]] == 1 else node["zero"]
    return Label(node["leaf"])


# -- linear SVM via hinge-loss subgradient descent ----------------------------


def _fit_svm(samples: Sequence[LabeledSample], seed: int) -> dict:
    labels = {s.label for s in samples}
    if len(labels) < 2:
        raise SingleClassTraining("linear SVM needs both classes present")
    # Features and labels are mapped to {-1, +1}; administrated is +1.
    xs = [[2 * bit - 1 for bit in s.vector] for s in samples]
    ys = [1 if s.label is Label.ADMINISTRATED else -1 for s in samples]

    weights = [0.0] * FEATURE_COUNT
    bias = 0.0
    step = 0
    rng = random.Random(seed)
    order = list(range(len(samples)))
    for _ in range(SVM_EPOCHS):
        rng.shuffle(order)
        for i in order:
            step += 1
            eta = 1.0 / (SVM_LAMBDA * step)
            margin = ys[i] * (_dot(weights, xs[i]) + bias)
            shrink = 1.0 - 1.0 / step  # equals 1 - eta * lambda
            weights = [w * shrink for w in weights]
            if margin < 1.0:
                weights = [w + eta * ys[i] * x for w, x in zip(weights, xs[i])]
                bias += eta * ys[i]
    return {"weights": weights, "bias": bias}


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(a, b))


def _predict_svm(parameters: dict, bits: tuple[int, ...]) -> Label:
    score = _dot(parameters["weights"], [2 * bit - 1 for bit in bits])
    score += parameters["bias"]
    # Zero score is a tie and predicts the non-administrated class.
    return Label.ADMINISTRATED if score > 0.0 else Label.OTHER


# -- cross-validation and selection -------------------------------------------


def _fold_index_sets(n: int, k: int, seed: int) -> list[list[int]]:
    if k < 2:
        raise ValueError(f"fold count must be >= 2, got {k}")
    if n < k:
        raise TooFewSamples(f"{n} samples cannot fill {k} folds")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    folds: list[list[int]] = []
    base, remainder = divmod(n, k)
    start = 0
    for i in range(k):
        size = base + (1 if i < remainder else 0)
        folds.append(indices[start : start + size])
        start += size
    return folds


def kfold_split(
    samples: Sequence[LabeledSample], k: int, seed: int
) -> list[list[LabeledSample]]:
    """Seeded shuffle split into k folds whose sizes differ by at most one."""
    return [
        [samples[i] for i in fold]
        for fold in _fold_index_sets(len(samples), k, seed)
    ]


def evaluate(
    samples: Sequence[LabeledSample],
    kinds: Iterable[ModelKind],
    k: int,
    seed: int,
) -> EvaluationReport:
    """K-fold accuracy per kind; a failing kind is recorded, not fatal.

    Training sets keep the original sample order so that order-sensitive
    learners see a canonical sequence regardless of the shuffle.
    """
    folds = _fold_index_sets(len(samples), k, seed)
    results: dict[ModelKind, KindEvaluation] = {}
    for kind in kinds:
        try:
            accuracies = []
            for fold in folds:
                held_out = set(fold)
                training = [s for i, s in enumerate(samples) if i not in held_out]
                model = train(training, kind, seed)
                correct = sum(
                    1 for i in fold if model.predict(samples[i].vector) == samples[i].label
                )
                accuracies.append(correct / len(fold))
            results[kind] = KindEvaluation(
                fold_accuracies=tuple(accuracies),
                fold_sizes=tuple(len(fold) for fold in folds),
            )
        except (SingleClassTraining, UnsupportedModelKind) as exc:
            log.warning("evaluation of %s failed: %s", kind.value, exc)
            results[kind] = KindEvaluation(error=str(exc))
    return EvaluationReport(seed=seed, k=k, results=results)


def select_best(report: EvaluationReport) -> ModelKind:
    """Highest mean accuracy wins; exact ties follow SELECTION_PREFERENCE."""
    successful = {
        kind: result
        for kind, result in report.results.items()
        if result.error is None
    }
    if not successful:
        raise NoSuccessfulModels("every model kind failed evaluation")
    best_mean = max(result.mean_accuracy for result in successful.values())
    for kind in SELECTION_PREFERENCE:
        result = successful.get(kind)
        if result is not None and result.mean_accuracy == best_mean:
            return kind
    # Only unranked kinds remain; fall back to registry order.
    for kind in ModelKind:
        result = successful.get(kind)
        if result is not None and result.mean_accuracy == best_mean:
            return kind
    raise NoSuccessfulModels("no model kind attains the best accuracy")


def classify_corpus(
    model: TrainedModel, rows: Iterable[tuple[str, FeatureVector]]
) -> list[tuple[str, Label, int]]:
    """Predict every row, carrying the interface bit through for reporting."""
    return [
        (unit_id, model.predict(vector), vector.bit(1)) for unit_id, vector in rows
    ]


# -- serialization -------------------------------------------------------------


def save_model(model: TrainedModel, path: Path | str) -> None:
    document = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind.value,
        "seed": model.seed,
        "class_prior": list(model.class_prior),
        "parameters": model.parameters,
    }
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


def load_model(path: Path | str) -> TrainedModel:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    version = document.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version: {version}")
    try:
        kind = ModelKind(document["kind"])
    except ValueError as exc:
        raise ValueError(f"unknown model kind: {document.get('kind')!r}") from exc
    prior = document["class_prior"]
    return TrainedModel(kind, document["seed"], (prior[0], prior[1]),
                        document["parameters"])


# -- label and prediction files -------------------------------------------------


def read_labels(path: Path | str) -> dict[str, Label]:
    """Read an id,label CSV; unknown label strings fail loudly."""
    labels: dict[str, Label] = {}
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["id", "label"]:
            raise ValueError(f"unexpected labels header in {path}: {header}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) < 2:
                log.warning("%s:%d: short row skipped", path, line_no)
                continue
            labels[row[0]] = Label(row[1])
    return labels


def write_classified(
    path: Path | str, rows: Iterable[tuple[str, Label, int]]
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "label", "f1"])
        for unit_id, label, interface_bit in rows:
            writer.writerow([unit_id, label.value, str(interface_bit)])


def read_classified(path: Path | str) -> list[tuple[str, Label, int]]:
    rows: list[tuple[str, Label, int]] = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["id", "label", "f1"]:
            raise ValueError(f"unexpected classified header in {path}: {header}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != 3 or row[2] not in ("0", "1"):
                log.warning("%s:%d: malformed row skipped", path, line_no)
                continue
            rows.append((row[0], Label(row[1]), int(row[2])))
    return rows
