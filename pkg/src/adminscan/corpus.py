"""Corpus acquisition: flattening, comment stripping, dedup, and sampling.

Raw inputs are Solidity sources as published by contract explorers: either a
single flat file or a JSON bundle holding several named parts.  Everything is
normalized to comment-free text, content-addressed by a 256-bit digest of that
text, and deduplicated before sampling.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import random
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .errors import (
    CorpusIOError,
    EmptyCorpus,
    InvalidConfidence,
    SampleTooLarge,
)

__all__ = [
    "HASH_ALGO",
    "GENERATOR_NAME",
    "SourceUnit",
    "ManifestEntry",
    "CorpusManifest",
    "SampleSpec",
    "strip_comments",
    "flatten_multipart",
    "content_id",
    "dedupe",
    "ingest",
    "slovin",
    "select_sample",
    "store_path",
    "load_normalized",
    "write_manifest",
    "read_manifest",
    "write_sample",
    "read_sample",
]

log = logging.getLogger(__name__)

HASH_ALGO = "sha256"
# Sample selection draws through random.Random, i.e. the Mersenne Twister.
GENERATOR_NAME = "mt19937"

ELIGIBLE_SUFFIXES = (".sol", ".json")


@dataclass(frozen=True)
class SourceUnit:
    """One normalized source text plus its identity and provenance."""

    id: str
    origin: str
    normalized: str

    @property
    def byte_len(self) -> int:
        return len(self.normalized.encode("utf-8"))


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    origin: str
    byte_len: int


@dataclass(frozen=True)
class CorpusManifest:
    hash_algo: str
    created_at: str
    entries: tuple[ManifestEntry, ...]

    @property
    def unique_count(self) -> int:
        return len(self.entries)

    def ids(self) -> list[str]:
        return [entry.id for entry in self.entries]


@dataclass(frozen=True)
class SampleSpec:
    """A reproducible draw from a manifest: the seed is part of the record."""

    seed: int
    generator: str
    population_n: int
    sample_n: int
    ids: tuple[str, ...]
    confidence: float | None = None


# Strings are matched before comments so that comment markers inside string
# literals survive.  Unterminated strings and block comments are tolerated:
# the trailing \Z alternative lets them run to end of input.
_TOKEN_RE = re.compile(
    r'"(?:\\.|[^"\\])*(?:"|\Z)'
    r"|'(?:\\.|[^'\\])*(?:'|\Z)"
    r"|//[^\n]*"
    r"|/\*.*?(?:\*/|\Z)",
    re.DOTALL,
)


def strip_comments(source: str) -> str:
    """Remove Solidity comments while leaving string literals intact.

    Line comments are dropped up to (not including) the terminating newline;
    block comments collapse to a single space so adjacent tokens stay
    separated.  A block comment that never terminates is stripped to end of
    input and logged as a warning, never raised.
    """
    unterminated = False

    def replace(match: re.Match[str]) -> str:
        token = match.group(0)
        if token.startswith("//"):
            return ""
        if token.startswith("/*"):
            nonlocal unterminated
            if len(token) < 4 or not token.endswith("*/"):
                unterminated = True
            return " "
        return token

    result = _TOKEN_RE.sub(replace, source)
    if unterminated:
        log.warning("unterminated block comment; stripped to end of input")
    return result


def flatten_multipart(raw: bytes) -> str:
    """Decode raw bytes and join multi-part JSON bundles into one text.

    Two bundle shapes are recognized: a JSON array of ``{"name", "content"}``
    objects and a JSON object mapping part names to ``{"content": ...}``.
    Part contents are concatenated in order, joined by a newline.  Anything
    else, including non-JSON input, passes through verbatim.  Invalid UTF-8
    byte sequences are replaced with U+FFFD before any processing.
    """
    text = raw.decode("utf-8", errors="replace")
    try:
        document = json.loads(text)
    except ValueError:
        return text
    parts = _multipart_contents(document)
    if parts is None:
        return text
    return "\n".join(parts)


def _multipart_contents(document: object) -> list[str] | None:
    if isinstance(document, list):
        items = document
    elif isinstance(document, dict):
        items = list(document.values())
    else:
        return None
    parts: list[str] = []
    for item in items:
        if not isinstance(item, dict) or not isinstance(item.get("content"), str):
            return None
        parts.append(item["content"])
    return parts or None


def content_id(normalized: str) -> str:
    """256-bit content address of a normalized source text."""
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


def dedupe(units: Iterable[SourceUnit]) -> list[SourceUnit]:
    """Drop units whose id was seen before, keeping first occurrences."""
    seen: set[str] = set()
    unique: list[SourceUnit] = []
    for unit in units:
        if unit.id in seen:
            continue
        seen.add(unit.id)
        unique.append(unit)
    return unique


def ingest(root: Path | str, store: Path | str | None = None) -> CorpusManifest:
    """Walk ``root`` for ``.sol``/``.json`` files and build a manifest.

    Files are processed in sorted order of their root-relative path so that
    re-ingesting the same tree reproduces the same manifest (modulo the
    ``created_at`` stamp).  Unreadable or undecodable files are skipped with
    a warning; duplicates collapse silently to their first occurrence.
    When ``store`` is given, each unique normalized text is written to
    ``<store>/<id[:2]>/<id>.sol``.
    """
    root = Path(root)
    if not root.is_dir():
        raise CorpusIOError(f"corpus root is not a readable directory: {root}")

    paths = sorted(
        (p for p in root.rglob("*") if p.is_file() and p.suffix in ELIGIBLE_SUFFIXES),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    if not paths:
        raise EmptyCorpus(f"no .sol or .json files under {root}")

    units: list[SourceUnit] = []
    for path in paths:
        origin = path.relative_to(root).as_posix()
        try:
            raw = path.read_bytes()
        except OSError as exc:
            log.warning("skipping %s: %s", origin, exc)
            continue
        normalized = strip_comments(flatten_multipart(raw))
        units.append(SourceUnit(content_id(normalized), origin, normalized))

    unique = dedupe(units)
    if not unique:
        raise EmptyCorpus(f"no readable source files under {root}")

    if store is not None:
        store = Path(store)
        for unit in unique:
            target = store_path(store, unit.id)
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(unit.normalized, encoding="utf-8")

    entries = tuple(
        ManifestEntry(unit.id, unit.origin, unit.byte_len) for unit in unique
    )
    created_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return CorpusManifest(HASH_ALGO, created_at, entries)


def slovin(population: int, confidence: float) -> int:
    """Sample size n = N / (1 + N * (1 - c)^2), ceiled and clamped to [1, N].

    Computed in exact rational arithmetic over the given float so the ceiling
    never drifts across platforms.
    """
    if population < 1:
        raise ValueError(f"population must be >= 1, got {population}")
    if not 0.0 <= confidence < 1.0:
        raise InvalidConfidence(f"confidence must be in [0, 1), got {confidence}")
    margin = 1 - Fraction(confidence)
    n = math.ceil(Fraction(population) / (1 + population * margin * margin))
    return max(1, min(n, population))


def select_sample(
    manifest: CorpusManifest,
    n: int,
    seed: int,
    confidence: float | None = None,
) -> SampleSpec:
    """Draw ``n`` distinct ids uniformly at random, reproducibly by seed."""
    ids = manifest.ids()
    if n > len(ids):
        raise SampleTooLarge(f"sample size {n} exceeds population {len(ids)}")
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    rng = random.Random(seed)
    chosen = tuple(rng.sample(ids, n))
    return SampleSpec(
        seed=seed,
        generator=GENERATOR_NAME,
        population_n=len(ids),
        sample_n=n,
        ids=chosen,
        confidence=confidence,
    )


def store_path(store: Path | str, unit_id: str) -> Path:
    """Content-addressed location of a normalized source inside a store."""
    return Path(store) / unit_id[:2] / f"{unit_id}.sol"


def load_normalized(store: Path | str, unit_id: str) -> str:
    path = store_path(store, unit_id)
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusIOError(f"cannot read stored source {path}: {exc}") from exc


def write_manifest(manifest: CorpusManifest, path: Path | str) -> None:
    document = {
        "hash_algo": manifest.hash_algo,
        "created_at": manifest.created_at,
        "entries": [
            {"id": e.id, "origin": e.origin, "byte_len": e.byte_len}
            for e in manifest.entries
        ],
        "unique_count": manifest.unique_count,
    }
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


def read_manifest(path: Path | str) -> CorpusManifest:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = tuple(
        ManifestEntry(e["id"], e["origin"], e["byte_len"])
        for e in document["entries"]
    )
    return CorpusManifest(document["hash_algo"], document["created_at"], entries)


def write_sample(sample: SampleSpec, path: Path | str) -> None:
    document = {
        "seed": sample.seed,
        "generator": sample.generator,
        "confidence": sample.confidence,
        "population_n": sample.population_n,
        "sample_n": sample.sample_n,
        "ids": list(sample.ids),
    }
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


def read_sample(path: Path | str) -> SampleSpec:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    return SampleSpec(
        seed=document["seed"],
        generator=document["generator"],
        population_n=document["population_n"],
        sample_n=document["sample_n"],
        ids=tuple(document["ids"]),
        confidence=document.get("confidence"),
    )
