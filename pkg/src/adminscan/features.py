"""Syntactic feature extraction for administration patterns in Solidity.

Nine binary features are computed over comment-stripped source text:

  f1  full ERC20 interface surface (all eight declarations present)
  f2  self-destruction capability
  f3  pause vocabulary
  f4  deprecation / upgrade forwarding vocabulary
  f5  privileged supply change (mint/burn near a privileged marker)
  f6  privileged fund extraction (withdraw/transfer near a privileged marker)
  f7  function-disabling modifier gated on an admin-adjustable flag
  f8  caller identity check inside a function body
  f9  freeze / halt / kill function names

The rules are regex-driven by design: sources that reach this stage are
verified-but-untrusted text, and a tolerant scanner beats a full parser on
the long tail of compiler versions.  f5..f8 add structural qualifiers
(proximity windows and brace-depth body regions) on top of the raw patterns.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

__all__ = [
    "FEATURE_COUNT",
    "PROXIMITY_WINDOW",
    "FeatureVector",
    "SignatureRule",
    "Witness",
    "RULES",
    "extract_features",
    "explain_features",
    "registry_dump",
    "write_matrix",
    "read_matrix",
]

log = logging.getLogger(__name__)

FEATURE_COUNT = 9

# Byte distance between a mint/withdraw-style match and the nearest
# privileged marker for the proximity features f5 and f6.
PROXIMITY_WINDOW = 200

# Markers that signal a privileged call site: well-known access modifiers,
# or an inline caller identity comparison.
_PRIVILEGED_MODIFIERS = r"\bonlyOwner\b|\bonlyAdmin\b|\bonlyMinter\b"

# Caller identity comparisons.  msg.origin is matched alongside tx.origin:
# the spelling appears in the wild even though only tx.origin is valid.
_SENDER_CHECKS = (
    r"msg\.sender\s*==",
    r"==\s*msg\.sender",
    r"tx\.origin\s*==",
    r"==\s*tx\.origin",
    r"msg\.origin\s*==",
    r"==\s*msg\.origin",
)

# Left side of an assignment: identifier directly before `=` or a compound
# assignment operator, excluding `==`, comparison operators, and `=>`.
_ASSIGNMENT_RE = re.compile(r"\b([A-Za-z_]\w*)\s*(?:[-+*/%&|^]|<<|>>)?=(?![=>])")

_IDENTIFIER_RE = re.compile(r"\b[A-Za-z_]\w*\b")

# Identifiers that never name an admin-adjustable flag inside require().
_REQUIRE_STOPWORDS = frozenset(
    {
        "_",
        "require",
        "revert",
        "assert",
        "msg",
        "sender",
        "tx",
        "origin",
        "block",
        "timestamp",
        "number",
        "now",
        "this",
        "value",
        "true",
        "false",
        "address",
        "bool",
        "bytes",
        "bytes32",
        "string",
        "uint",
        "uint8",
        "uint256",
        "int",
        "int256",
        "keccak256",
        "sha3",
        "gasleft",
    }
)


@dataclass(frozen=True)
class SignatureRule:
    feature_index: int
    name: str
    patterns: tuple[str, ...]
    combinator: str  # "ALL" or "ANY"
    qualifier: str | None = None


RULES: dict[int, SignatureRule] = {
    1: SignatureRule(
        1,
        "erc20_interface",
        (
            r"\bfunction\s+totalSupply\b",
            r"\bfunction\s+balanceOf\b",
            r"\bfunction\s+transfer\b",
            r"\bfunction\s+transferFrom\b",
            r"\bfunction\s+approve\b",
            r"\bfunction\s+allowance\b",
            r"\bevent\s+Transfer\b",
            r"\bevent\s+Approval\b",
        ),
        "ALL",
    ),
    2: SignatureRule(
        2,
        "self_destruction",
        (r"selfdestruct\s*\(", r"suicide\s*\("),
        "ANY",
    ),
    3: SignatureRule(
        3,
        "pause_vocabulary",
        (
            r"whenNotPaused",
            r"whenPaused",
            r"function\s+pause\b",
            r"function\s+unpause\b",
            r"\bPausable\b",
        ),
        "ANY",
    ),
    4: SignatureRule(
        4,
        "deprecation",
        (r"\bdeprecate\s*\(", r"\bdeprecated\b", r"upgradedAddress"),
        "ANY",
    ),
    5: SignatureRule(
        5,
        "privileged_supply_change",
        (r"function\s+mint\b", r"function\s+burn(?:From)?\b"),
        "ANY",
        qualifier=f"within {PROXIMITY_WINDOW} bytes of a privileged marker",
    ),
    6: SignatureRule(
        6,
        "privileged_fund_extraction",
        (
            r"function\s+withdraw\w*",
            r"transferAnyERC20Token",
            r"function\s+\w*[Tt]ransfer\w*",
        ),
        "ANY",
        qualifier=f"within {PROXIMITY_WINDOW} bytes of a privileged marker",
    ),
    7: SignatureRule(
        7,
        "adjustable_disabling_modifier",
        (r"require\s*\(",),
        "ANY",
        qualifier=(
            "inside a modifier body, referencing an identifier assigned "
            "elsewhere; caller identity checks are excluded"
        ),
    ),
    8: SignatureRule(
        8,
        "caller_identity_check",
        _SENDER_CHECKS,
        "ANY",
        qualifier="inside a function body, not a modifier body",
    ),
    9: SignatureRule(
        9,
        "freeze_halt_kill",
        (r"function\s+(?:freeze|unfreeze|halt|unhalt|kill)\w*\b",),
        "ANY",
    ),
}


@dataclass(frozen=True)
class FeatureVector:
    """Nine binary features, indexed 1..9 to match the rule registry."""

    bits: tuple[int, int, int, int, int, int, int, int, int]

    def __post_init__(self) -> None:
        if len(self.bits) != FEATURE_COUNT:
            raise ValueError(f"expected {FEATURE_COUNT} bits, got {len(self.bits)}")
        if any(bit not in (0, 1) for bit in self.bits):
            raise ValueError(f"feature bits must be 0 or 1, got {self.bits}")

    def bit(self, feature_index: int) -> int:
        if not 1 <= feature_index <= FEATURE_COUNT:
            raise IndexError(f"feature index out of range: {feature_index}")
        return self.bits[feature_index - 1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __getitem__(self, position: int) -> int:
        return self.bits[position]


@dataclass(frozen=True)
class Witness:
    """A span of source text that justifies one set feature bit."""

    feature_index: int
    span: tuple[int, int]
    pattern: str


def extract_features(source: str) -> FeatureVector:
    """Compute the nine-bit feature vector for a comment-stripped source."""
    bits, _ = _analyze(source, collect_witnesses=False)
    return bits


def explain_features(source: str) -> list[Witness]:
    """Return one witness span per set bit and matching pattern."""
    _, witnesses = _analyze(source, collect_witnesses=True)
    return witnesses


def registry_dump() -> list[dict]:
    """JSON-ready view of the rule registry, for audit."""
    return [
        {
            "feature_index": rule.feature_index,
            "name": rule.name,
            "patterns": list(rule.patterns),
            "combinator": rule.combinator,
            "qualifier": rule.qualifier,
        }
        for _, rule in sorted(RULES.items())
    ]


def _analyze(source: str, collect_witnesses: bool) -> tuple[FeatureVector, list[Witness]]:
    bits = [0] * FEATURE_COUNT
    witnesses: list[Witness] = []

    def record(index: int, span: tuple[int, int], pattern: str) -> None:
        bits[index - 1] = 1
        if collect_witnesses:
            witnesses.append(Witness(index, span, pattern))

    # f1: every interface member must be present.
    interface_hits = []
    for pattern in RULES[1].patterns:
        match = re.search(pattern, source)
        if match is None:
            interface_hits = None
            break
        interface_hits.append((match.span(), pattern))
    if interface_hits is not None:
        for span, pattern in interface_hits:
            record(1, span, pattern)

    # f2, f3, f4, f9: plain pattern presence.
    for index in (2, 3, 4, 9):
        for pattern in RULES[index].patterns:
            match = re.search(pattern, source)
            if match is not None:
                record(index, match.span(), pattern)

    # f5, f6: pattern presence within the privileged proximity window.
    markers = _marker_positions(source)
    for index in (5, 6):
        for pattern in RULES[index].patterns:
            for match in re.finditer(pattern, source):
                if _near_marker(match.start(), markers):
                    record(index, match.span(), pattern)
                    break

    function_regions = _body_regions(source, "function")
    modifier_regions = _body_regions(source, "modifier")

    # f7: a modifier whose require() references an admin-adjustable flag.
    assigned = _assigned_identifiers(source, modifier_regions)
    for start, end in modifier_regions:
        body = source[start:end]
        witness = _adjustable_require(body, assigned)
        if witness is not None:
            require_span = (start + witness[0], start + witness[1])
            record(7, require_span, RULES[7].patterns[0])
            break

    # f8: caller identity comparison inside a function body.  A comparison
    # inside a modifier body is the conventional access check and the
    # innermost enclosing region decides.
    regions = [(s, e, "function") for s, e in function_regions]
    regions += [(s, e, "modifier") for s, e in modifier_regions]
    for pattern in RULES[8].patterns:
        for match in re.finditer(pattern, source):
            if _innermost_kind(match.start(), regions) == "function":
                record(8, match.span(), pattern)
                break

    return FeatureVector(tuple(bits)), witnesses


def _marker_positions(source: str) -> list[int]:
    positions = [m.start() for m in re.finditer(_PRIVILEGED_MODIFIERS, source)]
    for pattern in _SENDER_CHECKS:
        positions.extend(m.start() for m in re.finditer(pattern, source))
    return positions


def _near_marker(position: int, markers: list[int]) -> bool:
    return any(abs(marker - position) <= PROXIMITY_WINDOW for marker in markers)


def _body_regions(source: str, keyword: str) -> list[tuple[int, int]]:
    """Brace-delimited body spans introduced by ``keyword`` headers.

    Declarations that end in ``;`` before any ``{`` (interface members) have
    no body.  An unbalanced body extends to end of input; this is a scanner,
    not a parser, and tolerance wins over rejection here.
    """
    regions: list[tuple[int, int]] = []
    for match in re.finditer(rf"\b{keyword}\b", source):
        paren_depth = 0
        body_start = -1
        for i in range(match.end(), len(source)):
            ch = source[i]
            if ch == "(":
                paren_depth += 1
            elif ch == ")":
                paren_depth -= 1
            elif ch == ";" and paren_depth <= 0:
                break
            elif ch == "{" and paren_depth <= 0:
                body_start = i
                break
        if body_start < 0:
            continue
        depth = 0
        body_end = len(source)
        for i in range(body_start, len(source)):
            if source[i] == "{":
                depth += 1
            elif source[i] == "}":
                depth -= 1
                if depth == 0:
                    body_end = i + 1
                    break
        regions.append((body_start, body_end))
    return regions


def _innermost_kind(position: int, regions: list[tuple[int, int, str]]) -> str | None:
    containing = [r for r in regions if r[0] <= position < r[1]]
    if not containing:
        return None
    return max(containing, key=lambda r: r[0])[2]


def _assigned_identifiers(
    source: str, modifier_regions: list[tuple[int, int]]
) -> frozenset[str]:
    # Assignments inside modifier bodies do not count as "elsewhere":
    # blank those spans before scanning.
    if modifier_regions:
        chars = list(source)
        for start, end in modifier_regions:
            for i in range(start, min(end, len(chars))):
                chars[i] = " "
        source = "".join(chars)
    return frozenset(m.group(1) for m in _ASSIGNMENT_RE.finditer(source))


def _adjustable_require(
    body: str, assigned: frozenset[str]
) -> tuple[int, int] | None:
    """Span of the first require() in a modifier body that gates on an
    assigned identifier, or None.  Requires that compare the caller identity
    are access checks, not adjustable switches, and are skipped."""
    for match in re.finditer(r"require\s*\(", body):
        open_paren = match.end() - 1
        close = _matching_paren(body, open_paren)
        argument = body[open_paren + 1 : close] if close >= 0 else body[open_paren + 1 :]
        span_end = close + 1 if close >= 0 else len(body)
        if re.search(r"msg\.sender|tx\.origin|msg\.origin", argument):
            continue
        identifiers = set(_IDENTIFIER_RE.findall(argument)) - _REQUIRE_STOPWORDS
        if identifiers & assigned:
            return (match.start(), span_end)
    return None


def _matching_paren(text: str, open_index: int) -> int:
    depth = 0
    for i in range(open_index, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return i
    return -1


def write_matrix(
    path: Path | str,
    rows: Iterable[tuple[str, FeatureVector]],
    labels: dict[str, str] | None = None,
) -> None:
    """Write a feature matrix CSV: id, f1..f9, and optionally a label."""
    header = ["id"] + [f"f{i}" for i in range(1, FEATURE_COUNT + 1)]
    if labels is not None:
        header.append("label")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for unit_id, vector in rows:
            row = [unit_id] + [str(bit) for bit in vector]
            if labels is not None:
                row.append(labels[unit_id])
            writer.writerow(row)


def read_matrix(
    path: Path | str,
) -> tuple[list[tuple[str, FeatureVector]], dict[str, str] | None]:
    """Read a feature matrix CSV; malformed rows are skipped with a warning."""
    expected = ["id"] + [f"f{i}" for i in range(1, FEATURE_COUNT + 1)]
    rows: list[tuple[str, FeatureVector]] = []
    labels: dict[str, str] | None = None
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or header[: len(expected)] != expected:
            raise ValueError(f"unexpected feature matrix header in {path}: {header}")
        has_label = len(header) > len(expected) and header[len(expected)] == "label"
        if has_label:
            labels = {}
        for line_no, row in enumerate(reader, start=2):
            width = len(expected) + (1 if has_label else 0)
            if len(row) != width:
                log.warning("%s:%d: expected %d columns, got %d; row skipped",
                            path, line_no, width, len(row))
                continue
            try:
                vector = FeatureVector(tuple(int(v) for v in row[1:10]))
            except ValueError as exc:
                log.warning("%s:%d: %s; row skipped", path, line_no, exc)
                continue
            rows.append((row[0], vector))
            if has_label:
                labels[row[0]] = row[10]
    return rows, labels
