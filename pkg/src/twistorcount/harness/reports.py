"""Report assembly and rendering.

Reports carry no wall-clock data so that a fixed configuration always
renders to the same bytes; timings go to the log instead.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable

CSV_COLUMNS = (
    "family",
    "rank",
    "seed_index",
    "rank_zeta",
    "q1",
    "q2",
    "s_count",
    "t_count",
    "bounds_ok",
)

TYPE2_RULES = {
    "proper_pieces": True,
    "t_part_span_closed": True,
    "geometric_cover_cap": 2,
}


def sample_row(system, index: int, report, zeta=None) -> dict:
    row = {
        "family": system.family,
        "rank": system.rank,
        "seed_index": index,
        "rank_zeta": report.rank_zeta,
        "q1": report.q1,
        "q2": report.q2,
        "s_count": report.s_count,
        "t_count": report.t_count,
        "bounds_ok": report.bounds_ok,
        "bounds": dict(report.bounds),
    }
    if zeta is not None:
        row["zeta"] = zeta.to_json()["zeta"]
    return row


def tally(rows: Iterable[dict]) -> dict[str, dict[str, int]]:
    """Per-flag pass/fail counts summed over the sample rows."""
    out: dict[str, dict[str, int]] = {}
    for row in rows:
        for flag, ok in row["bounds"].items():
            entry = out.setdefault(flag, {"pass": 0, "fail": 0})
            entry["pass" if ok else "fail"] += 1
    return dict(sorted(out.items()))


def render_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def render_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row, "bounds_ok": str(row["bounds_ok"]).lower()})
    return buf.getvalue()
