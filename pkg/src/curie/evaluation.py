"""Prequential accuracy tracking and the test-then-train runner.

Every test instance is predicted first, scored, then learned. The tracker
keeps a running mean of correctness since a reference time; resetting the
reference isolates the segments before and after a drift.
"""
from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import ConfigError, OrderingError
from .types import DriftEvent, LabeledInstance


class StreamLearner(Protocol):
    """What the runner needs from a learner."""

    def prepare(self, preparatory: Sequence[LabeledInstance]) -> object: ...

    def predict(self, features: np.ndarray) -> int: ...

    def learn_one(self, instance: LabeledInstance, t: int | None = None) -> bool: ...


class PrequentialTracker:
    """Running mean of per-instance correctness since t_ref."""

    def __init__(self, t_ref: int = 0) -> None:
        self.t_ref = t_ref
        self.current = 0.0
        self.count = 0
        self._last_t: int | None = None

    def update(self, correct: bool, t: int) -> float:
        if t < self.t_ref:
            raise OrderingError(f"t={t} precedes t_ref={self.t_ref}")
        value = 1.0 if correct else 0.0
        if t == self.t_ref:
            self.current = value
        else:
            self.current += (value - self.current) / (t - self.t_ref + 1)
        self.count += 1
        self._last_t = t
        return self.current

    def reset_segment(self, new_t_ref: int) -> "PrequentialTracker":
        if self._last_t is not None and new_t_ref <= self._last_t:
            raise OrderingError(
                f"new t_ref {new_t_ref} must exceed the last observed t {self._last_t}"
            )
        self.t_ref = new_t_ref
        self.current = 0.0
        self.count = 0
        return self


@dataclass
class StepRecord:
    t: int
    prediction: int
    truth: int
    correct: bool
    preacc: float


@dataclass
class RunReport:
    """Everything one run produced: the per-step trace, drift events, summary
    numbers and the configuration that generated them."""

    per_step: list[StepRecord]
    drift_events: list[DriftEvent]
    mean_preacc: float
    checkpoints: dict[int, float]
    config_echo: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    n_preparatory: int = 0


def run_test_then_train(
    learner: StreamLearner,
    stream: Sequence[LabeledInstance],
    p_count: int,
    checkpoints: Sequence[int] = (),
    reset_at: Sequence[int] = (),
    config_echo: dict | None = None,
) -> RunReport:
    """Prepare on the first p_count instances, then predict-score-learn.

    A checkpoint at time t records the tracker value immediately before
    instance t is processed (t == len(stream) means after the last one);
    reset_at timestamps reset the tracker's reference the same way, after
    any checkpoint at that t is captured.
    """
    n = len(stream)
    if p_count < 1:
        raise ConfigError("p_count must be >= 1")
    if p_count >= n:
        raise ConfigError(f"p_count={p_count} must be < stream length {n}")
    bad_cp = [c for c in checkpoints if not p_count <= c <= n]
    if bad_cp:
        raise ConfigError(f"checkpoints outside (p_count, len(stream)]: {bad_cp}")

    started = time.perf_counter()
    learner.prepare(stream[:p_count])
    tracker = PrequentialTracker(t_ref=p_count)
    checkpoint_at = set(checkpoints)
    reset_set = set(reset_at)
    checkpoint_values: dict[int, float] = {}
    per_step: list[StepRecord] = []
    drift_events: list[DriftEvent] = []
    total_correct = 0

    for t in range(p_count, n):
        if t in checkpoint_at:
            checkpoint_values[t] = tracker.current
        if t in reset_set:
            tracker.reset_segment(t)
        instance = stream[t]
        prediction = learner.predict(instance.features)
        correct = prediction == instance.label
        total_correct += correct
        preacc = tracker.update(correct, t)
        fired = learner.learn_one(instance, t)
        if fired and not hasattr(learner, "drift_events"):
            drift_events.append(DriftEvent(t, float("nan")))
        per_step.append(StepRecord(t, prediction, instance.label, correct, preacc))

    if n in checkpoint_at:
        checkpoint_values[n] = tracker.current
    events = list(getattr(learner, "drift_events", drift_events))
    return RunReport(
        per_step=per_step,
        drift_events=events,
        mean_preacc=total_correct / (n - p_count),
        checkpoints=checkpoint_values,
        config_echo=dict(config_echo or {}),
        wall_clock_s=time.perf_counter() - started,
        n_preparatory=p_count,
    )


# ------------------------------------------------------------------ export

TRACE_COLUMNS = ("t", "truth", "prediction", "correct", "preacc")


def write_trace(report: RunReport, path: str | Path, smoothing_window: int | None = None) -> None:
    """Per-step trace as CSV; optionally adds a moving-average column over the
    last `smoothing_window` correctness values (export-time only, the tracker
    itself is never smoothed)."""
    path = Path(path)
    columns = list(TRACE_COLUMNS)
    smooth: list[float] = []
    if smoothing_window is not None:
        columns.append("preacc_smoothed")
        window_sum = 0.0
        recent: list[bool] = []
        for rec in report.per_step:
            recent.append(rec.correct)
            window_sum += rec.correct
            if len(recent) > smoothing_window:
                window_sum -= recent.pop(0)
            smooth.append(window_sum / len(recent))
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for i, rec in enumerate(report.per_step):
            row = [rec.t, rec.truth, rec.prediction, int(rec.correct), f"{rec.preacc:.12f}"]
            if smoothing_window is not None:
                row.append(f"{smooth[i]:.12f}")
            writer.writerow(row)


def write_summary(report: RunReport, path: str | Path) -> None:
    path = Path(path)
    payload = {
        "mean_preacc": report.mean_preacc,
        "n_test": len(report.per_step),
        "n_preparatory": report.n_preparatory,
        "checkpoints": {str(k): v for k, v in sorted(report.checkpoints.items())},
        "drift_events": [
            {"t": e.t, "proportion": e.proportion} for e in report.drift_events
        ],
        "config": report.config_echo,
        "wall_clock_s": report.wall_clock_s,
    }
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_summary(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
