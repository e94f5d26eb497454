"""Report bundles: a JSON document with the verbatim config and the
deterministic result rows, plus a CSV summary.

Identical config and seed reproduce the results section byte for byte;
wall-clock data lives in the separate meta section (the CSV repeats it per
row as a convenience)."""

from __future__ import annotations

import csv
import io
import json
import time


def strip_timings(rows):
    """Pull wall_ms out of result rows into a parallel list."""
    timings = []
    clean = []
    for row in rows:
        row = dict(row)
        timings.append(row.pop("wall_ms", None))
        clean.append(row)
    return clean, timings


def build_report(config_json: dict, rows: list) -> dict:
    clean, timings = strip_timings(rows)
    passed = all(r.get("pass", True) for r in clean)
    return {
        "config": config_json,
        "results": clean,
        "pass": passed,
        "meta": {
            "created_unix": time.time(),
            "wall_ms": timings,
        },
    }


def report_to_csv(report: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["orbit_id", "case", "lhs", "rhs", "pass", "wall_ms"])
    timings = report["meta"]["wall_ms"]
    for row, ms in zip(report["results"], timings):
        writer.writerow(
            [
                row.get("orbit_id", ""),
                row.get("case", row.get("check", "")),
                row.get("lhs_str", row.get("value_str", "")),
                row.get("rhs_str", ""),
                row.get("pass", ""),
                "" if ms is None else round(ms, 3),
            ]
        )
    return out.getvalue()


def write_report_files(report: dict, json_path: str, csv_path: str = None):
    with open(json_path, "w") as fh:
        json.dump(report, fh, indent=1, default=str)
        fh.write("\n")
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write(report_to_csv(report))
