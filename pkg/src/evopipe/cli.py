"""Command line entry point.

Subcommands:
  run      one evolution run on one dataset, reports written to --out
  compare  paired 5x2-cv of both fitness regimes over one or more datasets
  report   re-render tables and plot CSVs from stored JSON, no recomputation

Every flag has a config-file equivalent (flat key=value, given via --config);
flags override file values. Exit codes: 0 ok, 2 bad config/usage, 3
insufficient budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .analysis import RunReport, build_report, run_5x2, run_once, seed_sensitivity
from .data import DataError, load_csv, train_test_split
from .evolution import EvolutionConfig, InsufficientBudgetError, evolve
from .pipeline import parse_pipeline
from . import reports as rep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3


class ConfigError(ValueError):
    pass


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--data", action="append", help="dataset CSV path (repeatable for compare)")
    p.add_argument("--label", help="label column name or index (default: last column)")
    p.add_argument("--generations", type=int, help="generation budget (default 20)")
    p.add_argument("--time-budget", type=float, dest="time_budget",
                   help="wall-clock budget in seconds (unbounded by default)")
    p.add_argument("--pop", type=int, help="population size (default 24)")
    p.add_argument("--offspring", type=int, help="offspring per generation (default: pop)")
    p.add_argument("--k", type=int, help="internal CV folds (default 5)")
    p.add_argument("--max-depth", type=int, dest="max_depth", help="max pipeline components (default 6)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--workers", type=int, help="max concurrent evaluations (default 1)")
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--config", help="flat key=value config file; flags override")


def _load_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                values[key.strip().replace("-", "_")] = value.strip()
        return values
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e


_INT_KEYS = {"generations", "pop", "offspring", "k", "max_depth", "seed", "workers"}
_FLOAT_KEYS = {"time_budget"}
_LIST_KEYS = {"data"}


def _merge_settings(args: argparse.Namespace) -> dict:
    """Config-file values with CLI flags layered on top."""
    settings: dict = {}
    if args.config:
        for key, raw in _load_config_file(args.config).items():
            if key in _INT_KEYS:
                settings[key] = int(raw)
            elif key in _FLOAT_KEYS:
                settings[key] = float(raw)
            elif key in _LIST_KEYS:
                settings[key] = [v.strip() for v in raw.split(",") if v.strip()]
            else:
                settings[key] = raw
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        settings[key] = value
    settings.setdefault("generations", 20)
    settings.setdefault("pop", 24)
    settings.setdefault("k", 5)
    settings.setdefault("max_depth", 6)
    settings.setdefault("seed", 0)
    settings.setdefault("workers", 1)
    settings.setdefault("out", ".")
    return settings


def _evolution_config(settings: dict, mode: str) -> EvolutionConfig:
    generations = settings.get("generations")
    time_budget = settings.get("time_budget")
    if generations == 0 and (time_budget is None or time_budget == 0):
        raise ConfigError("no work requested: zero generations and no usable time budget")
    try:
        return EvolutionConfig(
            population_size=settings["pop"],
            offspring_size=settings.get("offspring"),
            k=settings["k"],
            max_generations=generations,
            time_budget_seconds=time_budget,
            mode=mode,
            master_seed=settings["seed"],
            max_depth=settings["max_depth"],
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _label_column(settings: dict):
    label = settings.get("label")
    if label is None:
        return None
    if isinstance(label, str) and label.lstrip("-").isdigit():
        return int(label)
    return label


def _load_datasets(settings: dict):
    paths = settings.get("data")
    if not paths:
        raise ConfigError("no dataset given (--data)")
    return [load_csv(p, _label_column(settings)) for p in paths]


def _ensure_out(settings: dict) -> str:
    out = settings["out"]
    os.makedirs(out, exist_ok=True)
    return out


def cmd_run(args) -> int:
    settings = _merge_settings(args)
    mode = settings.get("mode", "dynamic")
    datasets = _load_datasets(settings)
    if len(datasets) != 1:
        raise ConfigError("run takes exactly one --data")
    cfg = _evolution_config(settings, mode)
    out = _ensure_out(settings)
    dataset = datasets[0]

    pair = train_test_split(dataset, 0.5, cfg.master_seed)
    try:
        with open(os.path.join(out, "generations.jsonl"), "w") as log_fh:
            # run_once would hide the generation log; drive evolve directly
            start = time.monotonic()
            result = evolve(cfg, pair.train, workers=settings["workers"], log_stream=log_fh)
    except InsufficientBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET

    from .fitness import weighted_f1
    from .pipeline import fit_pipeline

    fitted = fit_pipeline(result.final_tree, pair.train, component_seed=cfg.master_seed)
    mu = weighted_f1(pair.test.labels, fitted.predict(pair.test.features), pair.train.class_set)
    best = result.final_individual
    report = RunReport(
        dataset_name=dataset.name,
        mode=mode,
        repeat=1,
        half=1,
        final_pipeline=result.final_tree.to_text(),
        internal_score=best.ledger.mean,
        external_score=mu,
        age=result.generations_completed - best.birth_generation,
        birth_generation=best.birth_generation,
        generations_completed=result.generations_completed,
        complexity=best.complexity,
        evaluations=result.evaluations_total,
        wall_seconds=time.monotonic() - start,
    )
    rep.write_json(os.path.join(out, "run_report.json"), "run", {"run": report.to_dict()})
    with open(os.path.join(out, "final_pipeline.txt"), "w") as fh:
        fh.write(result.final_tree.to_text() + "\n")
    print(f"final pipeline: {result.final_tree.to_text()}")
    print(f"internal score: {best.ledger.mean:.3f}  external score: {mu:.3f}")
    return EXIT_OK


def cmd_compare(args) -> int:
    settings = _merge_settings(args)
    modes = [m.strip() for m in settings.get("modes", "dynamic,static").split(",") if m.strip()]
    if sorted(modes) != ["dynamic", "static"]:
        raise ConfigError("compare needs both modes: --modes dynamic,static")
    datasets = _load_datasets(settings)
    out = _ensure_out(settings)
    start = time.monotonic()

    all_reports = []
    for dataset in datasets:
        for mode in ("dynamic", "static"):
            cfg = _evolution_config(settings, mode)
            all_reports.extend(run_5x2(dataset, cfg, mode, workers=settings["workers"]))

    comparison = build_report(all_reports)
    comparison["wall_seconds"] = time.monotonic() - start

    # seed-sensitivity plot data from the first paired replicate's finals
    first = datasets[0]
    finals = {
        r.mode: r.final_pipeline
        for r in all_reports
        if r.dataset_name == first.name and (r.repeat, r.half) == (1, 1) and not r.failed
    }
    if {"dynamic", "static"} <= set(finals):
        split_seed = _evolution_config(settings, "dynamic").master_seed + 1_000_003
        half = train_test_split(first, 0.5, split_seed).train
        comparison["seed_sensitivity"] = seed_sensitivity(
            parse_pipeline(finals["dynamic"], settings["max_depth"]),
            parse_pipeline(finals["static"], settings["max_depth"]),
            half,
            k=settings["k"],
        )

    rep.write_json(os.path.join(out, "comparison.json"), "comparison", {"comparison": comparison})
    rep.render_outputs(comparison, out)
    print(rep.comparison_table(comparison))
    return EXIT_OK


def cmd_report(args) -> int:
    settings = _merge_settings(args)
    out = settings["out"]
    path = os.path.join(out, "comparison.json")
    run_path = os.path.join(out, "run_report.json")
    if os.path.exists(path):
        doc = rep.read_json(path, "comparison")
        comparison = doc["comparison"]
        rep.render_outputs(comparison, out)
        print(rep.comparison_table(comparison))
        return EXIT_OK
    if os.path.exists(run_path):
        doc = rep.read_json(run_path, "run")
        run = RunReport.from_dict(doc["run"])
        print(f"dataset: {run.dataset_name}  mode: {run.mode}")
        print(f"final pipeline: {run.final_pipeline}")
        print(f"internal: {run.internal_score:.3f}  external: {run.external_score:.3f}  "
              f"difference: {run.difference:.3f}")
        print(f"age: {run.age}  generations: {run.generations_completed}  "
              f"complexity: {run.complexity}  evaluations: {run.evaluations}")
        return EXIT_OK
    raise rep.ReportError(f"no comparison.json or run_report.json under {out!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evopipe", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single evolution run")
    _add_common_flags(p_run)
    p_run.add_argument("--mode", choices=["dynamic", "static"], help="fitness regime (default dynamic)")

    p_cmp = sub.add_parser("compare", help="paired 5x2-cv benchmark of both regimes")
    _add_common_flags(p_cmp)
    p_cmp.add_argument("--modes", help="must be 'dynamic,static' (both are required)")

    p_rep = sub.add_parser("report", help="render stored reports")
    _add_common_flags(p_rep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else 0
    handlers = {"run": cmd_run, "compare": cmd_compare, "report": cmd_report}
    try:
        return handlers[args.command](args)
    except (ConfigError, DataError, rep.ReportError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
