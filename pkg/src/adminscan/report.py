"""Prevalence summary over classified corpora.

Counting rule: a contract only counts as an administrated token when it also
exposes the full ERC20 interface.  A predicted-administrated row without the
interface bit is inconsistent, gets logged, and is counted as other.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .classify import Label

__all__ = ["REFERENCE_SURVEY", "CorpusReport", "summarize", "render_text",
           "render_json", "parse_report", "write_report"]

log = logging.getLogger(__name__)

# Headline figures from the reference survey of 84,062 deduplicated verified
# contracts, echoed verbatim next to local results for comparison.
REFERENCE_SURVEY = {
    "total": 84062,
    "erc20_count": 54626,
    "erc20_percent": "64.6%",
    "administrated_count": 39034,
    "administrated_percent_of_all": "57.96%",
    "administrated_percent_of_erc20": "89.76%",
}


@dataclass(frozen=True)
class CorpusReport:
    total: int
    erc20_count: int
    administrated_count: int

    @property
    def frac_erc20(self) -> float:
        return self.erc20_count / self.total if self.total else 0.0

    @property
    def frac_admin_of_all(self) -> float:
        return self.administrated_count / self.total if self.total else 0.0

    @property
    def frac_admin_of_erc20(self) -> float:
        if self.erc20_count == 0:
            return 0.0
        return self.administrated_count / self.erc20_count


def summarize(rows: Iterable[tuple[str, Label, int]]) -> CorpusReport:
    """Count ERC20 and administrated rows out of (id, label, interface bit)."""
    total = 0
    erc20 = 0
    administrated = 0
    for unit_id, label, interface_bit in rows:
        total += 1
        if interface_bit == 1:
            erc20 += 1
        if label is Label.ADMINISTRATED:
            if interface_bit == 1:
                administrated += 1
            else:
                log.warning(
                    "%s predicted administrated without the ERC20 interface; "
                    "counted as other",
                    unit_id,
                )
    return CorpusReport(total, erc20, administrated)


def _percent(fraction: float, defined: bool) -> str:
    return f"{fraction * 100.0:.2f}%" if defined else "n/a"


def render_text(report: CorpusReport) -> str:
    """Human-readable summary next to the reference survey figures."""
    erc20_pct = _percent(report.frac_erc20, report.total > 0)
    admin_all_pct = _percent(report.frac_admin_of_all, report.total > 0)
    admin_erc20_pct = _percent(report.frac_admin_of_erc20, report.erc20_count > 0)
    ref = REFERENCE_SURVEY
    lines = [
        "Corpus classification summary",
        f"  contracts analyzed:  {report.total}",
        f"  ERC20 interface:     {report.erc20_count} ({erc20_pct})",
        f"  administrated ERC20: {report.administrated_count} "
        f"({admin_all_pct} of all, {admin_erc20_pct} of ERC20)",
        "",
        f"Reference survey ({ref['total']:,} verified contracts)",
        f"  ERC20 interface:     {ref['erc20_count']:,} ({ref['erc20_percent']})",
        f"  administrated ERC20: {ref['administrated_count']:,} "
        f"({ref['administrated_percent_of_all']} of all, "
        f"{ref['administrated_percent_of_erc20']} of ERC20)",
    ]
    return "\n".join(lines) + "\n"


def render_json(report: CorpusReport) -> dict:
    return {
        "total": report.total,
        "erc20_count": report.erc20_count,
        "administrated_count": report.administrated_count,
        "frac_erc20": report.frac_erc20,
        "frac_admin_of_all": report.frac_admin_of_all,
        "frac_admin_of_erc20": report.frac_admin_of_erc20,
        "paper_reference": dict(REFERENCE_SURVEY),
    }


def parse_report(document: dict) -> CorpusReport:
    return CorpusReport(
        total=document["total"],
        erc20_count=document["erc20_count"],
        administrated_count=document["administrated_count"],
    )


def write_report(report: CorpusReport, path: Path | str) -> None:
    Path(path).write_text(
        json.dumps(render_json(report), indent=2) + "\n", encoding="utf-8"
    )
