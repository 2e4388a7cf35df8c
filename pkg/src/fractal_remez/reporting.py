"""Deterministic report writers: JSON records, CSV summaries, plot data.

Reports contain no timestamps or environment state, so reruns with the
same config and seed are byte-identical.  Plot data is two-column
whitespace-delimited text with a header comment naming the axes.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

SUMMARY_COLUMNS = ["experiment_id", "n", "k", "s", "lambda", "q", "r",
                   "bound_bg", "bound_simple", "empirical_ratio"]


def _coerce(obj):
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def write_json_report(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, default=_coerce)
        fh.write("\n")


def write_csv_summary(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS,
                                extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row.get(c, "") for c in SUMMARY_COLUMNS})


def write_plot_data(path: str, x_label: str, y_label: str, xs, ys) -> None:
    with open(path, "w") as fh:
        fh.write(f"# x: {x_label}    y: {y_label}\n")
        for x, y in zip(xs, ys):
            fh.write(f"{float(x)!r} {float(y)!r}\n")


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
