#!/usr/bin/env python3
"""Generate the golden fixture corpus under tests/data/.

Each fixture file is assembled from snippets whose feature-bit contributions
were audited by hand; the golden matrix is written from that construction
plan, NOT by running the extractor, so the committed matrix stays an
independent check on the extractor.

Snippets that need pattern/marker proximity carry it internally.  Snippets
are separated by filler blocks longer than the proximity window so that no
cross-snippet pair can fire a proximity rule by accident; a structural audit
re-checks the raw distances after assembly and refuses to write on violation.
"""

from __future__ import annotations

import csv
import re
import sys
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from adminscan.corpus import content_id, strip_comments  # noqa: E402
from adminscan.features import (  # noqa: E402
    PROXIMITY_WINDOW,
    _PRIVILEGED_MODIFIERS,
    _SENDER_CHECKS,
    RULES,
)

DATA_DIR = Path(__file__).resolve().parents[1] / "tests" / "data"
CORPUS_DIR = DATA_DIR / "golden_corpus"

MIN_SPACER = PROXIMITY_WINDOW + 10


@dataclass(frozen=True)
class Snippet:
    code: str
    text: str
    bits: frozenset[int]
    contract_level: bool = False  # rendered as its own contract, not a member


ERC20_ABSTRACT = Snippet(
    "E",
    """\
contract {iface_name} {{
    function totalSupply() public view returns (uint256);
    function balanceOf(address who) public view returns (uint256);
    function transfer(address to, uint256 value) public returns (bool);
    function transferFrom(address from, address to, uint256 value) public returns (bool);
    function approve(address spender, uint256 value) public returns (bool);
    function allowance(address owner, address spender) public view returns (uint256);
    event Transfer(address indexed from, address indexed to, uint256 value);
    event Approval(address indexed owner, address indexed spender, uint256 value);
}}""",
    frozenset({1}),
    contract_level=True,
)

ERC20_IMPLEMENTED = Snippet(
    "E2",
    """\
contract {iface_name} {{
    mapping(address => uint256) internal balances;
    uint256 internal supplyCap;

    event Transfer(address indexed from, address indexed to, uint256 value);
    event Approval(address indexed owner, address indexed spender, uint256 value);

    function totalSupply() public view returns (uint256) {{
        return supplyCap;
    }}

    function balanceOf(address who) public view returns (uint256) {{
        return balances[who];
    }}

    function transfer(address to, uint256 value) public returns (bool) {{
        balances[to] = balances[to] + value;
        emit Transfer(msg.sender, to, value);
        return true;
    }}

    function transferFrom(address from, address to, uint256 value) public returns (bool) {{
        balances[to] = balances[to] + value;
        emit Transfer(from, to, value);
        return true;
    }}

    function approve(address spender, uint256 value) public returns (bool) {{
        emit Approval(msg.sender, spender, value);
        return true;
    }}

    function allowance(address owner, address spender) public view returns (uint256) {{
        return balances[owner];
    }}
}}""",
    frozenset({1}),
    contract_level=True,
)

SELFDESTRUCT = Snippet(
    "D",
    """\
    address internal recipient;

    function retireContract() public {
        selfdestruct(recipient);
    }""",
    frozenset({2}),
)

SUICIDE = Snippet(
    "D2",
    """\
    address internal beneficiary;

    function shutdownLegacy() public {
        suicide(beneficiary);
    }""",
    frozenset({2}),
)

PAUSE_USAGE = Snippet(
    "P3",
    """\
    mapping(address => uint256) internal credits;

    function deposit() public payable whenNotPaused {
        credits[msg.sender] = credits[msg.sender] + msg.value;
    }""",
    frozenset({3}),
)

PAUSE_MEMBER = Snippet(
    "P3b",
    """\
    Pausable internal gateKeeper;

    function pointGate(Pausable next) public {
        gateKeeper = next;
    }""",
    frozenset({3}),
)

PAUSE_FULL = Snippet(
    "P37",
    """\
    bool public paused = false;

    modifier whenNotPaused() {
        require(!paused);
        _;
    }

    function pause() public onlyOwner {
        paused = true;
    }

    function unpause() public onlyOwner {
        paused = false;
    }""",
    frozenset({3, 7}),
)

DEPRECATE = Snippet(
    "U",
    """\
    bool public deprecated = false;
    address public upgradedAddress;

    function deprecate(address upgraded) public {
        deprecated = true;
        upgradedAddress = upgraded;
    }""",
    frozenset({4}),
)

MINT_PRIVILEGED = Snippet(
    "M",
    """\
    mapping(address => uint256) internal holdings;

    function mint(address to, uint256 amount) public onlyMinter {
        supplyTotal = supplyTotal + amount;
        holdings[to] = holdings[to] + amount;
    }""",
    frozenset({5}),
)

BURN_PRIVILEGED = Snippet(
    "Mb",
    """\
    function burnFrom(address holder, uint256 amount) public {
        require(msg.sender == minter);
        ledgerTotal = ledgerTotal - amount;
    }""",
    frozenset({5, 8}),
)

MINT_PUBLIC = Snippet(
    "M0",
    """\
    uint256 internal mintedSoFar;

    function mint(address to, uint256 amount) public {
        mintedSoFar = mintedSoFar + amount;
    }""",
    frozenset(),
)

WITHDRAW_PRIVILEGED = Snippet(
    "W",
    """\
    uint256 internal collectedFees;

    function withdrawFees(uint256 amount) public onlyOwner {
        collectedFees = collectedFees - amount;
    }""",
    frozenset({6}),
)

RESCUE_PRIVILEGED = Snippet(
    "T",
    """\
    address internal rescueTarget;

    function transferAnyERC20Token(address tokenAddress, uint256 tokens) public onlyAdmin {
        rescueTarget = tokenAddress;
    }""",
    frozenset({6}),
)

WITHDRAW_PUBLIC = Snippet(
    "W0",
    """\
    mapping(address => uint256) internal pendingDues;

    function withdraw() public {
        uint256 owed = pendingDues[msg.sender];
        pendingDues[msg.sender] = 0;
        duesTotal = duesTotal - owed;
    }""",
    frozenset(),
)

GATE_MODIFIER = Snippet(
    "G",
    """\
    bool internal stopped = false;

    modifier isRunning() {
        require(!stopped);
        _;
    }

    function stopTrading() public {
        stopped = true;
    }

    function resumeTrading() public {
        stopped = false;
    }""",
    frozenset({7}),
)

SENDER_CHECK_FN = Snippet(
    "S",
    """\
    address internal feeCollector;

    function setFeeCollector(address candidate) public {
        require(msg.sender == feeCollector);
        feeCollector = candidate;
    }""",
    frozenset({8}),
)

ORIGIN_CHECK_FN = Snippet(
    "S2",
    """\
    address internal deployer;
    address internal controller;

    function reclaimControl() public {
        if (tx.origin == deployer) {
            controller = tx.origin;
        }
    }""",
    frozenset({8}),
)

SENDER_CHECK_MODIFIER = Snippet(
    "SM",
    """\
    address internal overseer;

    modifier onlyOverseer() {
        require(msg.sender == overseer);
        _;
    }

    function rotateOverseer(address next) public onlyOverseer {
        overseer = next;
    }""",
    frozenset(),
)

FREEZE = Snippet(
    "F",
    """\
    mapping(address => bool) internal frozenLedger;

    function freezeAccount(address target) public {
        frozenLedger[target] = true;
    }

    function unfreezeAccount(address target) public {
        frozenLedger[target] = false;
    }""",
    frozenset({9}),
)

HALT = Snippet(
    "H",
    """\
    bool internal haltedFlag;

    function haltMarket() public {
        haltedFlag = true;
    }

    function unhaltMarket() public {
        haltedFlag = false;
    }""",
    frozenset({9}),
)

KILL = Snippet(
    "K",
    """\
    bool internal terminatedFlag;

    function killSwitch() public {
        terminatedFlag = true;
    }""",
    frozenset({9}),
)

PLAIN_RATES = Snippet(
    "PLAIN",
    """\
    uint256 public exchangeRate = 500;
    uint256 public windowStart;

    function quoteRate(uint256 amount) public view returns (uint256) {
        return amount * exchangeRate;
    }

    function scheduleWindow(uint256 startsAt) public {
        windowStart = startsAt;
    }""",
    frozenset(),
)

PLAIN_EVENTS = Snippet(
    "PLAIN2",
    """\
    event RateObserved(uint256 rate, uint256 at);

    function observeRate(uint256 rate) public {
        emit RateObserved(rate, block.timestamp);
    }""",
    frozenset(),
)

SNIPPETS = {
    s.code: s
    for s in (
        ERC20_ABSTRACT,
        ERC20_IMPLEMENTED,
        SELFDESTRUCT,
        SUICIDE,
        PAUSE_USAGE,
        PAUSE_MEMBER,
        PAUSE_FULL,
        DEPRECATE,
        MINT_PRIVILEGED,
        BURN_PRIVILEGED,
        MINT_PUBLIC,
        WITHDRAW_PRIVILEGED,
        RESCUE_PRIVILEGED,
        WITHDRAW_PUBLIC,
        GATE_MODIFIER,
        SENDER_CHECK_FN,
        ORIGIN_CHECK_FN,
        SENDER_CHECK_MODIFIER,
        FREEZE,
        HALT,
        KILL,
        PLAIN_RATES,
        PLAIN_EVENTS,
    )
}

# file index -> snippet codes; bits are the union of snippet contributions.
ROSTER = [
    ("E", "D"),
    ("E2", "D2"),
    ("E", "D", "M"),
    ("E2", "D"),
    ("E", "D2"),
    ("E2", "D2", "W"),
    ("E", "P37"),
    ("E2", "P37"),
    ("E", "P37", "M"),
    ("E2", "P37", "D"),
    ("E", "P37", "W"),
    ("E2", "P37", "S"),
    ("E", "P3"),
    ("E2", "P3"),
    ("E", "P3b"),
    ("E2", "P3", "F"),
    ("E", "P3b", "K"),
    ("E", "U"),
    ("E2", "U"),
    ("E", "U", "S"),
    ("E2", "U", "T"),
    ("E", "U", "H"),
    ("E2", "U", "D"),
    ("E", "M"),
    ("E2", "M"),
    ("E", "Mb"),
    ("E2", "Mb"),
    ("E", "M", "G"),
    ("E2", "M", "S2"),
    ("E", "W"),
    ("E2", "W"),
    ("E", "T"),
    ("E2", "T"),
    ("E", "W", "F"),
    ("E2", "T", "G"),
    ("E", "W", "T"),
    ("E", "G"),
    ("E2", "G"),
    ("E", "G", "S"),
    ("E2", "G", "H"),
    ("E", "G", "U"),
    ("E2", "G", "M0"),
    ("E", "S"),
    ("E2", "S"),
    ("E", "S2"),
    ("E2", "S2"),
    ("E", "S", "W0"),
    ("E2", "S", "K"),
    ("E", "F"),
    ("E2", "F"),
    ("E", "H"),
    ("E2", "K"),
    ("E", "H", "D"),
    ("E2", "F", "M"),
    ("E", "D", "P37", "U", "M", "W", "G", "S", "F"),
    ("E2", "Mb", "T", "H"),
    ("E",),
    ("E2",),
    ("E", "PLAIN"),
    ("E2", "PLAIN2"),
    ("E", "SM"),
    ("E2", "SM"),
    ("E", "M0"),
    ("E2", "W0"),
    ("D", "PLAIN"),
    ("P37", "PLAIN"),
    ("P3",),
    ("U", "PLAIN2"),
    ("M",),
    ("W", "PLAIN"),
    ("G",),
    ("S", "PLAIN2"),
    ("F",),
    ("PLAIN",),
    ("PLAIN", "PLAIN2"),
    ("SM", "M0", "W0"),
]

ADJECTIVES = [
    "Amber", "Basalt", "Cedar", "Dune", "Ember", "Fjord", "Garnet", "Harbor",
    "Iris", "Juniper", "Krypton", "Lumen", "Marble", "Nimbus", "Onyx",
    "Pebble", "Quartz", "Raven", "Sable", "Tundra", "Umber", "Velvet",
    "Willow", "Xenon", "Yarrow", "Zephyr",
]
NOUNS = [
    "Ledger", "Vault", "Registry", "Exchange", "Custody", "Treasury",
    "Market", "Reserve", "Depot", "Counter", "Bridge", "Index", "Router",
    "Archive", "Cache", "Chamber", "Circuit", "Relay", "Anchor", "Beacon",
]


def contract_name(index: int) -> str:
    return ADJECTIVES[index % len(ADJECTIVES)] + NOUNS[(index * 7) % len(NOUNS)]


def spacer(index: int) -> str:
    seed = index * 13 + 7
    lines = [
        f"    uint256 private ledgerSlot{index} = {seed};",
        "",
        f"    function auditSlot{index}() internal pure returns (uint256) {{",
        f"        uint256 acc{index} = {seed + 11};",
    ]
    body = "\n".join(lines)
    step = 0
    while len(body) < MIN_SPACER:
        body += f"\n        acc{index} = acc{index} * 3 + {step + 5};"
        step += 1
    body += f"\n        return acc{index};\n    }}"
    return body


def assemble(index: int, codes: tuple[str, ...]) -> tuple[str, frozenset[int]]:
    name = contract_name(index)
    parts: list[str] = []
    if index % 5 == 0:
        parts.append("// SPDX-License-Identifier: MIT")
    if index % 7 == 3:
        parts.append("/*\n * Generated fixture corpus.\n */")
    parts.append("pragma solidity ^0.4.24;")
    bits: set[int] = set()
    member_blocks: list[str] = []
    spacer_index = index * 100
    for code in codes:
        snippet = SNIPPETS[code]
        bits |= snippet.bits
        if snippet.contract_level:
            parts.append(snippet.text.format(iface_name=name + "Base"))
        else:
            member_blocks.append(spacer(spacer_index))
            member_blocks.append(snippet.text)
            spacer_index += 1
    if member_blocks:
        parts.append(f"contract {name} {{")
        parts.extend(member_blocks)
        parts.append("}")
    return "\n\n".join(parts) + "\n", frozenset(bits)


def audit_proximity(source: str, bits: frozenset[int]) -> None:
    """Re-check planned f5/f6 against raw pattern distances."""
    markers = [m.start() for m in re.finditer(_PRIVILEGED_MODIFIERS, source)]
    for pattern in _SENDER_CHECKS:
        markers.extend(m.start() for m in re.finditer(pattern, source))
    for feature in (5, 6):
        hits = []
        for pattern in RULES[feature].patterns:
            hits.extend(m.start() for m in re.finditer(pattern, source))
        near = any(
            abs(marker - hit) <= PROXIMITY_WINDOW
            for hit in hits
            for marker in markers
        )
        planned = feature in bits
        if near != planned:
            raise SystemExit(
                f"proximity audit failed for f{feature}: planned={planned}, "
                f"structural={near}\n{source}"
            )


def main() -> None:
    CORPUS_DIR.mkdir(parents=True, exist_ok=True)
    for stale in CORPUS_DIR.glob("*.sol"):
        stale.unlink()

    matrix_rows = []
    index_rows = []
    seen_ids: set[str] = set()
    for index, codes in enumerate(ROSTER, start=1):
        text, bits = assemble(index, codes)
        audit_proximity(strip_comments(text), bits)
        file_name = f"{index:03d}_{contract_name(index)}.sol"
        (CORPUS_DIR / file_name).write_text(text, encoding="utf-8")
        unit_id = content_id(strip_comments(text))
        if unit_id in seen_ids:
            raise SystemExit(f"duplicate fixture content: {file_name}")
        seen_ids.add(unit_id)
        vector = [1 if i in bits else 0 for i in range(1, 10)]
        label = (
            "administrated_erc20"
            if vector[0] == 1 and any(vector[1:])
            else "other"
        )
        matrix_rows.append([unit_id] + [str(v) for v in vector] + [label])
        index_rows.append([file_name, unit_id])

    with open(DATA_DIR / "golden_matrix.csv", "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id"] + [f"f{i}" for i in range(1, 10)] + ["label"])
        writer.writerows(matrix_rows)
    with open(DATA_DIR / "golden_labels.csv", "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "label"])
        writer.writerows([[row[0], row[10]] for row in matrix_rows])
    with open(DATA_DIR / "golden_index.csv", "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["file", "id"])
        writer.writerows(index_rows)

    positives = [sum(int(row[i]) for row in matrix_rows) for i in range(1, 10)]
    negatives = [len(matrix_rows) - p for p in positives]
    print(f"wrote {len(matrix_rows)} fixtures")
    print("positives per feature:", positives)
    print("negatives per feature:", negatives)
    if len(matrix_rows) < 60 or min(positives) < 5 or min(negatives) < 5:
        raise SystemExit("coverage requirements not met")


if __name__ == "__main__":
    main()
