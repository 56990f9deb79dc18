"""Declarative experiment configuration, presets, and the run orchestrator.

A config has four blocks: dataset (synthetic scenario or CSV), learner,
evaluation and output. Presets cover every synthetic family/grid/variant
combination and the three real-data setups.
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import yaml

from .drift import CurieLearner, OracleAdaptiveSca, PairedLearner
from .errors import ConfigError, DataError
from .evaluation import RunReport, run_test_then_train, write_summary, write_trace
from .knn import KnnWindow
from .lattice import GridShape, Neighborhood, NeighborhoodSpec
from .sca import ScaConfig, ScaLearner
from .streams import (
    FAMILIES,
    StreamSchema,
    generate_stream,
    load_csv,
    preprocess_split,
    scenario,
)

LEARNER_KINDS = ("sca", "sca-adaptive", "curie", "knn-paired")


# ------------------------------------------------------------- dataset defs

def data_dir() -> Path:
    return Path(os.environ.get("CURIE_DATA_DIR", "datasets"))


DATASET_SCHEMAS: dict[str, StreamSchema] = {
    "elec2": StreamSchema(
        feature_columns=("day", "period", "nswdemand", "vicdemand", "transfer"),
        label_column="class",
        class_count=2,
        normalization="minmax_preparatory",
        label_map={"UP": 1, "DOWN": 0, "b'UP'": 1, "b'DOWN'": 0, "1": 1, "0": 0},
        missing_policy="drop_row",
    ),
    "gmsc": StreamSchema(
        feature_columns=(
            "RevolvingUtilizationOfUnsecuredLines",
            "age",
            "NumberOfTime30-59DaysPastDueNotWorse",
            "DebtRatio",
            "MonthlyIncome",
            "NumberOfOpenCreditLinesAndLoans",
            "NumberOfTimes90DaysLate",
            "NumberRealEstateLoansOrLines",
            "NumberOfTime60-89DaysPastDueNotWorse",
            "NumberOfDependents",
        ),
        label_column="SeriousDlqin2yrs",
        class_count=2,
        normalization="minmax_preparatory",
        missing_policy="nan",
    ),
    "poker": StreamSchema(
        feature_columns=("s1", "c1", "s2", "c2", "s3", "c3", "s4", "c4", "s5", "c5"),
        label_column="hand",
        class_count=10,
        normalization="minmax_preparatory",
    ),
}


@dataclass(frozen=True)
class SyntheticDatasetConfig:
    family: str
    length: int = 2000
    drift_at: int = 1000
    drift_width: int = 1
    kind: str = "synthetic"


@dataclass(frozen=True)
class CsvDatasetConfig:
    path: str
    schema: str  # a DATASET_SCHEMAS key
    limit: int = 20000
    kind: str = "csv"


@dataclass(frozen=True)
class LearnerConfig:
    kind: str = "curie"
    grid_bins: int = 10
    neighborhood: str = "von_neumann"
    radius: int = 1
    margin_fraction: float = 0.05
    max_generations: int | None = None
    window: int = 50
    threshold: float = 0.05
    rebuild_every: int = 1
    k: int = 5
    detection_delay: int = 25  # sca-adaptive only


@dataclass(frozen=True)
class EvaluationConfig:
    p_fraction: float = 0.05
    checkpoints: tuple[int, ...] = ()
    reset_at: tuple[int, ...] = ()
    smoothing_window: int | None = None
    seeds: tuple[int, ...] = (0,)
    repetitions: int = 1


@dataclass(frozen=True)
class OutputConfig:
    report_dir: str = "reports"


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    dataset: SyntheticDatasetConfig | CsvDatasetConfig
    learner: LearnerConfig = LearnerConfig()
    evaluation: EvaluationConfig = EvaluationConfig()
    output: OutputConfig = OutputConfig()

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key in ("checkpoints", "reset_at", "seeds"):
            out["evaluation"][key] = list(out["evaluation"][key])
        return out


def validate(config: ExperimentConfig) -> None:
    """Collect every violation before failing."""
    problems: list[str] = []
    ds, lr, ev = config.dataset, config.learner, config.evaluation
    if isinstance(ds, SyntheticDatasetConfig):
        if ds.family not in FAMILIES:
            problems.append(f"dataset.family must be one of {FAMILIES}, got {ds.family!r}")
        if ds.length < 2:
            problems.append("dataset.length must be >= 2")
        if ds.drift_width < 1:
            problems.append("dataset.drift_width must be >= 1")
        elif ds.drift_at + ds.drift_width > ds.length:
            problems.append("dataset.drift_at + drift_width must not exceed length")
    else:
        if not ds.path:
            problems.append("dataset.path is required for csv datasets")
        if ds.schema not in DATASET_SCHEMAS:
            problems.append(
                f"dataset.schema must be one of {sorted(DATASET_SCHEMAS)}, got {ds.schema!r}"
            )
        if ds.limit < 2:
            problems.append("dataset.limit must be >= 2")
    if lr.kind not in LEARNER_KINDS:
        problems.append(f"learner.kind must be one of {LEARNER_KINDS}, got {lr.kind!r}")
    if lr.grid_bins < 2:
        problems.append("learner.grid_bins must be >= 2")
    if lr.neighborhood not in ("von_neumann", "moore"):
        problems.append(f"learner.neighborhood must be von_neumann or moore")
    if lr.radius < 1:
        problems.append("learner.radius must be >= 1")
    if lr.window < 1:
        problems.append("learner.window must be >= 1")
    if not 0.0 < lr.threshold < 1.0:
        problems.append("learner.threshold must lie in (0, 1)")
    if lr.rebuild_every < 1:
        problems.append("learner.rebuild_every must be >= 1")
    if lr.k < 1:
        problems.append("learner.k must be >= 1")
    if lr.k > lr.window:
        problems.append("learner.k must not exceed learner.window")
    if not 0.0 < ev.p_fraction < 1.0:
        problems.append("evaluation.p_fraction must lie in (0, 1)")
    if ev.repetitions < 1:
        problems.append("evaluation.repetitions must be >= 1")
    if len(ev.seeds) == 0:
        problems.append("evaluation.seeds must not be empty")
    if problems:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))


# ------------------------------------------------------------ dict round-trip

def from_dict(raw: dict) -> ExperimentConfig:
    try:
        ds_raw = dict(raw["dataset"])
        kind = ds_raw.pop("kind", "synthetic")
        if kind == "synthetic":
            dataset: SyntheticDatasetConfig | CsvDatasetConfig = SyntheticDatasetConfig(**ds_raw)
        elif kind == "csv":
            dataset = CsvDatasetConfig(**ds_raw)
        else:
            raise ConfigError(f"dataset.kind must be synthetic or csv, got {kind!r}")
        ev_raw = dict(raw.get("evaluation", {}))
        for key in ("checkpoints", "reset_at", "seeds"):
            if key in ev_raw:
                ev_raw[key] = tuple(ev_raw[key])
        return ExperimentConfig(
            name=raw["name"],
            dataset=dataset,
            learner=LearnerConfig(**raw.get("learner", {})),
            evaluation=EvaluationConfig(**ev_raw),
            output=OutputConfig(**raw.get("output", {})),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc


def load_config(path: str | Path) -> ExperimentConfig:
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return from_dict(raw)


def apply_overrides(raw: dict, overrides: Sequence[str]) -> dict:
    """Apply dotted key=value pairs (values parsed as YAML) onto a config dict."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, value = item.split("=", 1)
        keys = dotted.strip().split(".")
        target = raw
        for k in keys[:-1]:
            if k not in target or not isinstance(target[k], dict):
                target[k] = {}
            target = target[k]
        target[keys[-1]] = yaml.safe_load(value)
    return raw


# ------------------------------------------------------------------ presets

def _synthetic_preset(family: str, drift_kind: str, bins: int, variant: str) -> ExperimentConfig:
    gradual = drift_kind == "gradual"
    width = 500 if gradual else 1
    window = 100 if gradual else 25
    delay = 600 if gradual else 25
    detect_at = 1000 + delay
    name = f"{family}-{drift_kind}-2x{bins}-{variant}"
    return ExperimentConfig(
        name=name,
        dataset=SyntheticDatasetConfig(family=family, drift_width=width),
        learner=LearnerConfig(
            kind="sca-adaptive" if variant == "adaptive" else "sca",
            grid_bins=bins,
            window=window,
            detection_delay=delay,
        ),
        evaluation=EvaluationConfig(
            p_fraction=0.05,
            checkpoints=(1000, detect_at + window, 2000),
        ),
    )


_REAL_PARAMS = {
    # dataset: (grid_bins, window, threshold)
    "elec2": (5, 50, 0.05),
    "gmsc": (3, 250, 0.01),
    "poker": (3, 250, 0.001),
}


def _real_preset(dataset: str, learner_kind: str) -> ExperimentConfig:
    bins, window, threshold = _REAL_PARAMS[dataset]
    suffix = "curie" if learner_kind == "curie" else "knn"
    return ExperimentConfig(
        name=f"{dataset}-{suffix}",
        dataset=CsvDatasetConfig(
            path=str(data_dir() / f"{dataset}.csv"), schema=dataset, limit=20000
        ),
        learner=LearnerConfig(
            kind=learner_kind,
            grid_bins=bins,
            window=window,
            threshold=threshold,
        ),
        evaluation=EvaluationConfig(p_fraction=0.5, smoothing_window=500),
    )


def preset_names() -> list[str]:
    names = []
    for family in FAMILIES:
        for drift_kind in ("abrupt", "gradual"):
            for bins in (5, 10, 20):
                for variant in ("adaptive", "plain"):
                    names.append(f"{family}-{drift_kind}-2x{bins}-{variant}")
    for dataset in _REAL_PARAMS:
        for suffix in ("curie", "knn"):
            names.append(f"{dataset}-{suffix}")
    return names


def preset(name: str) -> ExperimentConfig:
    parts = name.split("-")
    if len(parts) == 4 and parts[0] in FAMILIES:
        family, drift_kind, grid, variant = parts
        if (
            drift_kind in ("abrupt", "gradual")
            and grid.startswith("2x")
            and grid[2:].isdigit()
            and variant in ("adaptive", "plain")
        ):
            return _synthetic_preset(family, drift_kind, int(grid[2:]), variant)
    if len(parts) == 2 and parts[0] in _REAL_PARAMS and parts[1] in ("curie", "knn"):
        return _real_preset(parts[0], "curie" if parts[1] == "curie" else "knn-paired")
    raise ConfigError(
        f"unknown preset {name!r}; `curie presets` lists the available ones"
    )


# ---------------------------------------------------------------- execution

def build_learner(config: ExperimentConfig, dims: int, class_count: int,
                  known_drift_at: int | None):
    lr = config.learner
    if lr.kind == "knn-paired":
        return PairedLearner(
            stable=KnnWindow(capacity=lr.window, k=lr.k),
            reactive=KnnWindow(capacity=lr.window, k=lr.k),
            window=lr.window,
            threshold=lr.threshold,
            rebuild_every=lr.rebuild_every,
        )
    sca_cfg = ScaConfig(
        shape=GridShape(dims=dims, bins_per_dim=lr.grid_bins),
        class_count=class_count,
        neighborhood=NeighborhoodSpec(Neighborhood(lr.neighborhood), lr.radius),
        margin_fraction=lr.margin_fraction,
        max_generations=lr.max_generations,
    )
    if lr.kind == "sca":
        return ScaLearner(sca_cfg)
    if lr.kind == "sca-adaptive":
        return OracleAdaptiveSca(
            sca_cfg,
            window=lr.window,
            known_drift_at=known_drift_at,
            detection_delay=lr.detection_delay,
        )
    return CurieLearner(
        sca_cfg,
        window=lr.window,
        threshold=lr.threshold,
        rebuild_every=lr.rebuild_every,
    )


def materialize_dataset(config: ExperimentConfig, seed: int):
    """Returns (stream, dims, class_count, known_drift_at)."""
    ds = config.dataset
    if isinstance(ds, SyntheticDatasetConfig):
        sc = scenario(
            ds.family,
            drift_width=ds.drift_width,
            seed=seed,
            length=ds.length,
            drift_at=ds.drift_at,
        )
        return generate_stream(sc), 2, 2, ds.drift_at
    schema = DATASET_SCHEMAS[ds.schema]
    path = Path(ds.path)
    if not path.exists():
        raise DataError(
            f"dataset file {path} not found; run `curie fetch-datasets` or set "
            "CURIE_DATA_DIR / dataset.path"
        )
    instances = load_csv(path, schema, limit=ds.limit)
    if len(instances) < 2:
        raise DataError(f"{path}: not enough usable rows")
    p_count = round(config.evaluation.p_fraction * len(instances))
    instances = preprocess_split(instances, max(p_count, 1), schema)
    return instances, len(schema.feature_columns), schema.class_count, None


def run_single(config: ExperimentConfig, seed: int) -> RunReport:
    """One seeded run; the report's config echo pins every resolved value."""
    stream, dims, class_count, known_drift_at = materialize_dataset(config, seed)
    ev = config.evaluation
    p_count = round(ev.p_fraction * len(stream))
    learner = build_learner(config, dims, class_count, known_drift_at)
    echo = config.to_dict()
    echo["seed"] = seed
    return run_test_then_train(
        learner,
        stream,
        p_count=p_count,
        checkpoints=ev.checkpoints,
        reset_at=ev.reset_at,
        config_echo=echo,
    )


def run_experiment(config: ExperimentConfig, report_dir: str | Path | None = None) -> Path:
    """Run repetitions x seeds, write per-run reports plus an aggregate.

    Returns the experiment's report directory.
    """
    validate(config)
    base = Path(report_dir if report_dir is not None else config.output.report_dir)
    exp_dir = base / config.name
    exp_dir.mkdir(parents=True, exist_ok=True)
    run_summaries = []
    for seed in config.evaluation.seeds:
        for rep in range(config.evaluation.repetitions):
            report = run_single(config, seed)
            run_dir = exp_dir / f"seed{seed:04d}-rep{rep:02d}"
            run_dir.mkdir(parents=True, exist_ok=True)
            write_trace(report, run_dir / "trace.csv",
                        smoothing_window=config.evaluation.smoothing_window)
            write_summary(report, run_dir / "summary.json")
            run_summaries.append(report)
    aggregate = {
        "name": config.name,
        "runs": len(run_summaries),
        "mean_preacc": sum(r.mean_preacc for r in run_summaries) / len(run_summaries),
        "checkpoints": {
            str(t): sum(r.checkpoints[t] for r in run_summaries) / len(run_summaries)
            for t in config.evaluation.checkpoints
        },
        "drift_events": sum(len(r.drift_events) for r in run_summaries),
        "config": config.to_dict(),
        "wall_clock_s": sum(r.wall_clock_s for r in run_summaries),
    }
    (exp_dir / "aggregate.json").write_text(
        json.dumps(aggregate, indent=2) + "\n", encoding="utf-8"
    )
    return exp_dir
