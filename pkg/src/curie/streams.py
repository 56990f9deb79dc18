"""Synthetic drifting streams and CSV dataset ingestion.

Four two-dimensional binary concept families with fixed boundary functions;
a drift scenario interpolates between an old and a new concept at a given
step, either abruptly (width 1) or along a linear Bernoulli ramp. Real
datasets come in as header-full CSV files under a declared schema.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, RowError, SchemaError
from .types import LabeledInstance

logger = logging.getLogger(__name__)

FAMILIES = ("circle", "line", "sinev", "sineh")

# boundary-function parameters chosen so uniform sampling on [0,1]^2 gives a
# 35-65% positive rate for both concepts AND the drift flips a substantial
# region (the circle's center shift dominates its symmetric difference)
DEFAULT_CONCEPTS: dict[str, tuple[tuple[float, ...], tuple[float, ...]]] = {
    "circle": ((0.3, 0.5, 0.35), (0.7, 0.5, 0.4)),
    "line": ((0.9,), (1.1,)),
    "sinev": ((0.4,), (0.6,)),
    "sineh": ((0.0,), (math.pi,)),
}


@dataclass(frozen=True)
class ConceptSpec:
    """A deterministic binary labeling rule over [0,1]^2.

    circle(a, b, r): inside the circle centered (a, b) with radius r
    line(b):         below the line x2 = -x1 + b
    sinev(a):        below x2 = a + 0.1 sin(3 pi x1)
    sineh(phi):      below x2 = 0.5 + 0.3 sin(3 pi x1 + phi)
    """

    family: str
    params: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown concept family {self.family!r}")
        expected = {"circle": 3, "line": 1, "sinev": 1, "sineh": 1}[self.family]
        if len(self.params) != expected:
            raise ConfigError(
                f"{self.family} takes {expected} parameter(s), got {len(self.params)}"
            )


def old_concept(family: str) -> ConceptSpec:
    return ConceptSpec(family, DEFAULT_CONCEPTS[family][0])


def new_concept(family: str) -> ConceptSpec:
    return ConceptSpec(family, DEFAULT_CONCEPTS[family][1])


def concept_label(concept: ConceptSpec, features: np.ndarray) -> int:
    x1, x2 = float(features[0]), float(features[1])
    if not (0.0 <= x1 <= 1.0 and 0.0 <= x2 <= 1.0):
        raise ValueError(f"features must lie in [0,1]^2, got ({x1}, {x2})")
    p = concept.params
    if concept.family == "circle":
        return int((x1 - p[0]) ** 2 + (x2 - p[1]) ** 2 <= p[2] ** 2)
    if concept.family == "line":
        return int(x2 <= -x1 + p[0])
    if concept.family == "sinev":
        return int(x2 <= p[0] + 0.1 * math.sin(3 * math.pi * x1))
    return int(x2 <= 0.5 + 0.3 * math.sin(3 * math.pi * x1 + p[0]))


@dataclass(frozen=True)
class DriftScenario:
    """One stream: old concept, new concept, drift position and speed."""

    old: ConceptSpec
    new: ConceptSpec
    length: int = 2000
    drift_at: int = 1000
    drift_width: int = 1  # 1 = abrupt; 500 = the gradual default
    seed: int = 0

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ConfigError("length must be >= 1")
        if self.drift_width < 1:
            raise ConfigError("drift_width must be >= 1")
        if self.drift_at + self.drift_width > self.length:
            raise ConfigError("drift_at + drift_width must not exceed length")


def scenario(family: str, drift_width: int = 1, seed: int = 0, length: int = 2000,
             drift_at: int = 1000) -> DriftScenario:
    """Default old-to-new scenario for one family."""
    return DriftScenario(
        old=old_concept(family), new=new_concept(family),
        length=length, drift_at=drift_at, drift_width=drift_width, seed=seed,
    )


def generate_stream(sc: DriftScenario) -> list[LabeledInstance]:
    """Uniform features on [0,1]^2; labels from the old concept before
    drift_at, from the new one after drift_at + drift_width, and inside the
    window from the new concept with probability (t - drift_at + 1)/width.
    Deterministic given the scenario (including its seed)."""
    rng = np.random.default_rng(sc.seed)
    out = []
    for t in range(sc.length):
        x = rng.random(2)
        if t < sc.drift_at:
            concept = sc.old
        elif t >= sc.drift_at + sc.drift_width:
            concept = sc.new
        else:
            p_new = (t - sc.drift_at + 1) / sc.drift_width
            concept = sc.new if rng.random() < p_new else sc.old
        out.append(LabeledInstance(x, concept_label(concept, x)))
    return out


# ---------------------------------------------------------------- ingestion

@dataclass(frozen=True)
class StreamSchema:
    """Shape of a CSV dataset: ordered feature columns, the label column and
    how to read it, and the missing-value policy."""

    feature_columns: tuple[str, ...]
    label_column: str
    class_count: int
    normalization: str = "none"  # "none" | "minmax_preparatory"
    label_map: dict[str, int] | None = None
    missing_markers: frozenset[str] = frozenset({"", "?", "NA", "NaN", "nan"})
    missing_policy: str = "fail"  # "fail" | "drop_row" | "nan"

    def __post_init__(self) -> None:
        if self.class_count < 2:
            raise ConfigError("class_count must be >= 2")
        if self.normalization not in ("none", "minmax_preparatory"):
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        if self.missing_policy not in ("fail", "drop_row", "nan"):
            raise ConfigError(f"unknown missing_policy {self.missing_policy!r}")

    def parse_label(self, raw: str) -> int:
        if self.label_map is not None:
            if raw not in self.label_map:
                raise ValueError(f"label {raw!r} not in label_map")
            return self.label_map[raw]
        return int(float(raw))


def load_csv(
    path: str | Path, schema: StreamSchema, limit: int | None = None
) -> list[LabeledInstance]:
    """Parse the first `limit` usable rows, in file order.

    Missing markers follow schema.missing_policy: "fail" raises on the first
    marker, "drop_row" silently skips the row (before the limit cut),
    "nan" keeps the row with NaN features for later imputation.
    """
    path = Path(path)
    out: list[LabeledInstance] = []
    dropped = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in (*schema.feature_columns, schema.label_column)
                   if c not in header]
        if missing:
            raise SchemaError(f"{path.name}: columns missing from header: {missing}")
        for row_no, row in enumerate(reader, start=2):  # header is line 1
            raw_label = (row[schema.label_column] or "").strip()
            values = [(row[c] or "").strip() for c in schema.feature_columns]
            has_marker = raw_label in schema.missing_markers or any(
                v in schema.missing_markers for v in values
            )
            if has_marker:
                if schema.missing_policy == "fail":
                    raise RowError(f"{path.name}:{row_no}: missing value marker")
                if schema.missing_policy == "drop_row" or raw_label in schema.missing_markers:
                    dropped += 1
                    continue
            try:
                feats = np.array(
                    [math.nan if v in schema.missing_markers else float(v) for v in values],
                    dtype=np.float64,
                )
                label = schema.parse_label(raw_label)
            except ValueError as exc:
                raise RowError(f"{path.name}:{row_no}: {exc}") from exc
            if not 0 <= label < schema.class_count:
                raise RowError(
                    f"{path.name}:{row_no}: label {label} outside "
                    f"[0, {schema.class_count})"
                )
            out.append(LabeledInstance(feats, label))
            if limit is not None and len(out) >= limit:
                break
    if dropped:
        logger.info("%s: dropped %d row(s) with missing-value markers", path.name, dropped)
    return out


def preprocess_split(
    instances: Sequence[LabeledInstance], p_count: int, schema: StreamSchema
) -> list[LabeledInstance]:
    """Fit imputation and scaling on the first p_count instances only, then
    apply to the whole stream (no leakage from the test half).

    NaN features are imputed with the preparatory-half median; min-max
    scaling (if the schema asks for it) maps the preparatory range to [0,1],
    constant columns to 0.5.
    """
    if not 1 <= p_count <= len(instances):
        raise ConfigError("p_count must lie in [1, len(instances)]")
    x = np.stack([inst.features for inst in instances])
    prep = x[:p_count]
    nan_mask = np.isnan(x)
    if nan_mask.any():
        medians = np.nanmedian(prep, axis=0)
        medians = np.where(np.isnan(medians), 0.0, medians)
        x = np.where(nan_mask, medians, x)
        logger.info(
            "imputed %d missing value(s) with preparatory-half medians "
            "(columns affected: %s)",
            int(nan_mask.sum()),
            np.nonzero(nan_mask.any(axis=0))[0].tolist(),
        )
    if schema.normalization == "minmax_preparatory":
        lo = x[:p_count].min(axis=0)
        hi = x[:p_count].max(axis=0)
        span = hi - lo
        constant = span == 0
        span = np.where(constant, 1.0, span)
        x = (x - lo) / span
        if constant.any():
            x[:, constant] = 0.5
    return [
        LabeledInstance(x[i], instances[i].label) for i in range(len(instances))
    ]
