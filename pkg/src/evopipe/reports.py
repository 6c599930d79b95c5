"""Persistence and rendering of run/comparison reports.

All files carry a format_version so stale files are rejected loudly instead
of being misread.
"""

from __future__ import annotations

import csv
import json
import os

FORMAT_VERSION = 1


class ReportError(ValueError):
    pass


def _wrap(kind: str, payload: dict) -> dict:
    return {"format_version": FORMAT_VERSION, "kind": kind, **payload}


def write_json(path: str, kind: str, payload: dict):
    with open(path, "w") as fh:
        json.dump(_wrap(kind, payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path: str, kind: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ReportError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ReportError(f"{path}: corrupt JSON ({e})") from e
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ReportError(
            f"{path}: format version {version!r} does not match expected {FORMAT_VERSION}"
        )
    if doc.get("kind") != kind:
        raise ReportError(f"{path}: expected a {kind!r} report, found {doc.get('kind')!r}")
    return doc


def strip_timing(doc):
    """Copy of a report document with wall-clock fields removed (used for
    determinism checks; timing is the only run-to-run variation allowed)."""
    if isinstance(doc, dict):
        return {k: strip_timing(v) for k, v in doc.items() if k != "wall_seconds"}
    if isinstance(doc, list):
        return [strip_timing(v) for v in doc]
    return doc


# ------------------------------------------------------------------ renderers


def comparison_table(comparison: dict) -> str:
    """Aligned-column text table of the comparison document."""
    header = ["dataset", "dynamic", "static", "diff(dyn)", "diff(sta)",
              "age(dyn)", "age(sta)", "cplx(dyn)", "cplx(sta)", "dominance"]
    rows = [header]
    for name, entry in sorted(comparison["datasets"].items()):
        dyn = entry.get("dynamic", {})
        sta = entry.get("static", {})

        def cell(summary, mean_key, std_key=None):
            if summary.get("n_included", 0) == 0:
                return "-"
            if std_key:
                return f"{summary[mean_key]:.2f} +- {summary[std_key]:.2f}"
            return f"{summary[mean_key]:.2f}"

        rows.append([
            name,
            cell(dyn, "mean_external", "std_external"),
            cell(sta, "mean_external", "std_external"),
            cell(dyn, "mean_difference"),
            cell(sta, "mean_difference"),
            cell(dyn, "mean_age"),
            cell(sta, "mean_age"),
            cell(dyn, "mean_complexity"),
            cell(sta, "mean_complexity"),
            entry.get("dominance", "-"),
        ])
    wilcoxon = comparison["wilcoxon"]
    if "p_value" in wilcoxon:
        footer = (
            f"Wilcoxon W={wilcoxon['W']:.1f} p={wilcoxon['p_value']:.5f} "
            f"corrected_p={wilcoxon['corrected_p']:.5f} "
            f"({'significant' if wilcoxon['significant'] else 'not significant'} "
            f"at alpha={comparison['alpha']})"
        )
    else:
        footer = f"Wilcoxon: {wilcoxon['error']}"
    wins = comparison["wins"]
    footer += (
        f"\nwins(dynamic)={wins['dynamic']} wins(static)={wins['static']} "
        f"draws={wins['draws']}"
    )
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n" + footer + "\n"


def write_dominance_csv(path: str, comparison: dict):
    """(dataset, obj1_a, obj2_a, obj1_b, obj2_b, dominance); a=dynamic."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "obj1_a", "obj2_a", "obj1_b", "obj2_b", "dominance"])
        for name, entry in sorted(comparison["datasets"].items()):
            if "dominance" not in entry:
                continue
            dyn, sta = entry["dynamic"], entry["static"]
            writer.writerow([
                name,
                dyn["mean_external"], dyn["mean_complexity"],
                sta["mean_external"], sta["mean_complexity"],
                entry["dominance"],
            ])


def write_seed_sensitivity_csv(path: str, rows: list[dict]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "score_a", "score_b"])
        for row in rows:
            writer.writerow([row["seed"], row["score_a"], row["score_b"]])


def render_outputs(comparison: dict, out_dir: str):
    """Write the text table and plot-data CSVs next to a comparison report."""
    with open(os.path.join(out_dir, "comparison.txt"), "w") as fh:
        fh.write(comparison_table(comparison))
    write_dominance_csv(os.path.join(out_dir, "dominance_plot.csv"), comparison)
    if comparison.get("seed_sensitivity"):
        write_seed_sensitivity_csv(
            os.path.join(out_dir, "seed_sensitivity.csv"),
            comparison["seed_sensitivity"],
        )
