"""Command-line experiment driver.

Subcommands: run (a preset or a YAML config, with overrides), compare
(tabulate reports side by side), presets (list/show), fetch-datasets.
Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from .config import (
    apply_overrides,
    data_dir,
    from_dict,
    load_config,
    preset,
    preset_names,
    run_experiment,
)
from .datasets import SOURCES, fetch
from .errors import ComparisonError, ConfigError, CurieError, DataError
from .evaluation import read_summary


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curie",
        description="Online learning with streamified cellular automata on drifting streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a preset or config file")
    src = run_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="preset name (see `curie presets`)")
    src.add_argument("--config", help="YAML config file")
    run_p.add_argument("--output-dir", help="report directory (overrides config)")
    run_p.add_argument("--seeds", help="comma-separated seed list (overrides config)")
    run_p.add_argument("--dataset-path", help="CSV path (overrides config)")
    run_p.add_argument("--limit", type=int, help="max instances from a CSV dataset")
    run_p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override any config key (YAML-parsed value); repeatable",
    )

    cmp_p = sub.add_parser("compare", help="tabulate two or more report files")
    cmp_p.add_argument("reports", nargs="+", help="summary.json / aggregate.json paths")
    cmp_p.add_argument("--output", help="also write the table as JSON here")

    pre_p = sub.add_parser("presets", help="list presets or show one resolved")
    pre_p.add_argument("--show", help="print the named preset as YAML")

    fetch_p = sub.add_parser("fetch-datasets", help="download/verify the real datasets")
    fetch_p.add_argument("names", nargs="*", help=f"subset of {sorted(SOURCES)}")
    fetch_p.add_argument("--data-dir", help="target directory (default: $CURIE_DATA_DIR or ./datasets)")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    if args.preset:
        config = preset(args.preset)
    else:
        config = load_config(args.config)
    raw = config.to_dict()
    if args.seeds:
        raw["evaluation"]["seeds"] = [int(s) for s in args.seeds.split(",") if s.strip()]
    if args.dataset_path:
        if raw["dataset"].get("kind") != "csv":
            raise ConfigError("--dataset-path applies only to csv datasets")
        raw["dataset"]["path"] = args.dataset_path
    if args.limit is not None:
        if raw["dataset"].get("kind") != "csv":
            raise ConfigError("--limit applies only to csv datasets")
        raw["dataset"]["limit"] = args.limit
    if args.output_dir:
        raw["output"]["report_dir"] = args.output_dir
    apply_overrides(raw, args.overrides)
    config = from_dict(raw)
    exp_dir = run_experiment(config)
    aggregate = json.loads((exp_dir / "aggregate.json").read_text(encoding="utf-8"))
    print(f"{config.name}: mean preACC {aggregate['mean_preacc']:.4f} "
          f"over {aggregate['runs']} run(s), {aggregate['drift_events']} drift event(s)")
    print(f"reports: {exp_dir}")
    return 0


def compare_reports(paths: list[str | Path]) -> dict:
    """Side-by-side table of mean preACC and checkpoint values.

    All reports must carry the same checkpoint set; with exactly two, a
    delta row (first minus second) is included.
    """
    if len(paths) < 2:
        raise ComparisonError("compare needs at least two reports")
    rows = []
    for p in paths:
        data = read_summary(p)
        cfg = data.get("config", {})
        dataset = cfg.get("dataset", {})
        rows.append(
            {
                "report": str(p),
                "name": cfg.get("name", Path(p).stem),
                "dataset": dataset.get("family") or dataset.get("schema") or "?",
                "learner": cfg.get("learner", {}).get("kind", "?"),
                "mean_preacc": data["mean_preacc"],
                "checkpoints": {str(k): v for k, v in data.get("checkpoints", {}).items()},
                "drift_events": (
                    len(data["drift_events"])
                    if isinstance(data.get("drift_events"), list)
                    else data.get("drift_events", 0)
                ),
            }
        )
    keysets = {tuple(sorted(r["checkpoints"])) for r in rows}
    if len(keysets) != 1:
        raise ComparisonError(
            f"reports carry different checkpoint sets: {sorted(keysets)}"
        )
    table: dict = {"rows": rows}
    if len(rows) == 2:
        table["delta"] = {
            "mean_preacc": rows[0]["mean_preacc"] - rows[1]["mean_preacc"],
            "checkpoints": {
                k: rows[0]["checkpoints"][k] - rows[1]["checkpoints"][k]
                for k in rows[0]["checkpoints"]
            },
        }
    return table


def format_comparison(table: dict) -> str:
    cps = sorted(table["rows"][0]["checkpoints"], key=lambda s: int(s))
    header = ["name", "dataset", "learner", "mean_preacc", *[f"cp@{c}" for c in cps], "drifts"]
    lines = []
    grid = [header]
    for r in table["rows"]:
        grid.append(
            [
                r["name"],
                r["dataset"],
                r["learner"],
                f"{r['mean_preacc']:.4f}",
                *[f"{r['checkpoints'][c]:.4f}" for c in cps],
                str(r["drift_events"]),
            ]
        )
    if "delta" in table:
        grid.append(
            [
                "Δ",
                "",
                "",
                f"{table['delta']['mean_preacc']:+.4f}",
                *[f"{table['delta']['checkpoints'][c]:+.4f}" for c in cps],
                "",
            ]
        )
    widths = [max(len(row[i]) for row in grid) for i in range(len(header))]
    for row in grid:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _cmd_compare(args: argparse.Namespace) -> int:
    table = compare_reports(args.reports)
    print(format_comparison(table))
    if args.output:
        Path(args.output).write_text(
            json.dumps(table, indent=2) + "\n", encoding="utf-8"
        )
    return 0


def _cmd_presets(args: argparse.Namespace) -> int:
    if args.show:
        print(yaml.safe_dump(preset(args.show).to_dict(), sort_keys=False), end="")
        return 0
    for name in preset_names():
        print(name)
    return 0


def _cmd_fetch(args: argparse.Namespace) -> int:
    target = Path(args.data_dir) if args.data_dir else data_dir()
    names = args.names or sorted(SOURCES)
    missing = []
    for name in names:
        if fetch(name, target) is None:
            missing.append(name)
    if missing:
        print(f"manual downloads still needed: {missing}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "presets":
            return _cmd_presets(args)
        return _cmd_fetch(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (CurieError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
