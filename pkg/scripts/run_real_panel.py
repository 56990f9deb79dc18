#!/usr/bin/env python3
"""CURIE vs paired sliding-window KNN on the real datasets.

Runs whichever of elec2/gmsc/poker are present in the data directory
(CURIE_DATA_DIR or ./datasets; `curie fetch-datasets` downloads them) and
prints a comparison table. The 59049-cell configurations rebuild the
reactive grid every step, so gmsc/poker take a couple of minutes each.

Usage: python scripts/run_real_panel.py [--datasets elec2 gmsc poker] [--out-dir reports]
"""
from __future__ import annotations

import argparse
import sys

from curie.cli import compare_reports, format_comparison
from curie.config import data_dir, preset, run_experiment


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--datasets", nargs="*", default=["elec2", "gmsc", "poker"])
    parser.add_argument("--out-dir", default="reports")
    args = parser.parse_args()

    for dataset in args.datasets:
        path = data_dir() / f"{dataset}.csv"
        if not path.exists():
            print(f"[{dataset}] skipped: {path} not found (run `curie fetch-datasets`)")
            continue
        summaries = []
        for learner in ("curie", "knn"):
            cfg = preset(f"{dataset}-{learner}")
            exp_dir = run_experiment(cfg, report_dir=args.out_dir)
            summaries.append(exp_dir / "aggregate.json")
            print(f"[{dataset}] {learner} done -> {exp_dir}")
        print(format_comparison(compare_reports(summaries)))
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
