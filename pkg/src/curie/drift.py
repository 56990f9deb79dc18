"""Drift detection and adaptation via paired learners.

A stable learner makes the system's predictions; a reactive learner trained
only on the last W instances shadows it. A window of W bits records steps
where the reactive was right and the stable wrong; when the proportion of
set bits exceeds a threshold, a drift is declared, the reactive's knowledge
replaces the stable's, and the bits reset.
"""
from __future__ import annotations

from collections import deque
from typing import Callable, Protocol, Sequence

import numpy as np

from .errors import ConfigError, StateError
from .sca import ScaConfig, ScaLearner, knowledge_transfer
from .types import DriftEvent, LabeledInstance


class OnlineLearner(Protocol):
    """Capabilities a learner needs to participate in paired learning."""

    def predict(self, features: np.ndarray) -> int: ...

    def learn_one(self, instance: LabeledInstance, t: int | None = None) -> bool: ...

    def retrain_window(self, instances: Sequence[LabeledInstance]) -> object: ...

    def clone_knowledge_from(self, other: "OnlineLearner") -> None: ...


class DriftMonitor:
    """Circular window of W bits with a firing threshold.

    The newest bit is set when the stable learner was wrong and the reactive
    right; update() reports a firing when the proportion of set bits exceeds
    the threshold. The caller resets the window after acting on a firing.
    """

    def __init__(self, window: int, threshold: float) -> None:
        if window < 1:
            raise ConfigError(f"window must be >= 1, got {window}")
        if not 0.0 < threshold < 1.0:
            raise ConfigError(f"threshold must lie in (0, 1), got {threshold}")
        self.window = window
        self.threshold = threshold
        self.bits: deque[bool] = deque([False] * window, maxlen=window)
        self._set_count = 0

    def update(self, stable_correct: bool, reactive_correct: bool) -> bool:
        newest = (not stable_correct) and reactive_correct
        oldest = self.bits[0]
        self.bits.append(newest)  # maxlen evicts the oldest
        self._set_count += int(newest) - int(oldest)
        return self.proportion > self.threshold

    @property
    def proportion(self) -> float:
        return self._set_count / self.window

    def reset(self) -> None:
        self.bits = deque([False] * self.window, maxlen=self.window)
        self._set_count = 0


class PairedLearner:
    """Generic paired wrapper over any two online learners.

    The stable learner answers predictions and trains incrementally; the
    reactive learner is rebuilt from scratch over the last `window` instances
    (every `rebuild_every` steps; it trains incrementally in between). On a
    drift firing the stable learner takes over the reactive's knowledge and
    the monitor resets.
    """

    def __init__(
        self,
        stable: OnlineLearner,
        reactive: OnlineLearner,
        window: int,
        threshold: float,
        rebuild_every: int = 1,
    ) -> None:
        if rebuild_every < 1:
            raise ConfigError("rebuild_every must be >= 1")
        self.stable = stable
        self.reactive = reactive
        self.monitor = DriftMonitor(window, threshold)
        self.window_buffer: deque[LabeledInstance] = deque(maxlen=window)
        self.drift_events: list[DriftEvent] = []
        self.rebuild_every = rebuild_every
        self._steps = 0
        self._prepared = False

    def prepare(self, preparatory: Sequence[LabeledInstance]) -> "PairedLearner":
        """Train both learners on every preparatory instance."""
        if len(preparatory) == 0:
            raise ConfigError("at least one preparatory instance required")
        for instance in preparatory:
            self.stable.learn_one(instance)
            self.reactive.learn_one(instance)
        self.window_buffer.extend(preparatory[-self.window_buffer.maxlen:])
        self._prepared = True
        return self

    def predict(self, features: np.ndarray) -> int:
        """The stable learner is the system's output."""
        return self.stable.predict(features)

    def learn_one(self, instance: LabeledInstance, t: int | None = None) -> bool:
        """One post-prediction step: monitor, adapt on drift, train both."""
        if not self._prepared:
            raise StateError("paired learner must be prepared before stepping")
        y_s = self.stable.predict(instance.features)
        y_r = self.reactive.predict(instance.features)
        fired = self.monitor.update(y_s == instance.label, y_r == instance.label)
        self.window_buffer.append(instance)
        if fired:
            self.drift_events.append(
                DriftEvent(t if t is not None else self._steps, self.monitor.proportion)
            )
            self._on_drift()
            self.monitor.reset()
        self.stable.learn_one(instance)
        self._train_reactive(fired)
        self._steps += 1
        return fired

    def step(self, instance: LabeledInstance, t: int | None = None) -> tuple[int, bool]:
        """Predict, then learn; returns (prediction, drift_fired)."""
        prediction = self.predict(instance.features)
        fired = self.learn_one(instance, t)
        return prediction, fired

    def _on_drift(self) -> None:
        self.stable.clone_knowledge_from(self.reactive)

    def _train_reactive(self, drift_fired: bool) -> None:
        if self._steps % self.rebuild_every == 0:
            self.reactive.retrain_window(list(self.window_buffer))
        else:
            self.reactive.learn_one(self.window_buffer[-1])


class CurieLearner(PairedLearner):
    """Paired streamified cellular automata with knowledge transfer.

    On drift the reactive's grid states and bounds are copied into the
    stable, then the reactive is cleared, reseeded from the last-W window
    and re-prepared. `on_drift` (if given) is called right after the copy,
    before the reseed, with (stable, reactive).
    """

    def __init__(
        self,
        config: ScaConfig,
        window: int,
        threshold: float,
        rebuild_every: int = 1,
        on_drift: Callable[[ScaLearner, ScaLearner], None] | None = None,
    ) -> None:
        super().__init__(
            stable=ScaLearner(config),
            reactive=ScaLearner(config),
            window=window,
            threshold=threshold,
            rebuild_every=rebuild_every,
        )
        self.config = config
        self.on_drift = on_drift
        self._reseeded_this_step = False

    def prepare(self, preparatory: Sequence[LabeledInstance]) -> "CurieLearner":
        """Full grid preparation (seed, resolve, generations) for both automata."""
        if len(preparatory) == 0:
            raise ConfigError("at least one preparatory instance required")
        self.stable.prepare(preparatory)
        self.reactive.prepare(preparatory)
        self.window_buffer.extend(preparatory[-self.window_buffer.maxlen:])
        self._prepared = True
        return self

    def _on_drift(self) -> None:
        knowledge_transfer(self.reactive, self.stable)
        if self.on_drift is not None:
            self.on_drift(self.stable, self.reactive)
        if len(self.window_buffer) == 0:
            raise StateError("cannot reseed the reactive learner from an empty window")
        self.reactive.retrain_window(list(self.window_buffer))
        self._reseeded_this_step = True

    def _train_reactive(self, drift_fired: bool) -> None:
        # the drift branch already rebuilt the reactive over the same window
        if drift_fired and self._reseeded_this_step:
            self._reseeded_this_step = False
            return
        super()._train_reactive(drift_fired)


class OracleAdaptiveSca:
    """Plain streaming automaton with adaptation at a known drift time.

    At t == known_drift_at + detection_delay the grid is cleared, reseeded
    from the last `window` instances (inclusive of the current one) and
    re-prepared; every other step is ordinary test-then-train. With
    known_drift_at=None the trajectory is identical to the bare learner's.
    """

    def __init__(
        self,
        config: ScaConfig,
        window: int,
        known_drift_at: int | None = None,
        detection_delay: int = 0,
    ) -> None:
        self.learner = ScaLearner(config)
        self.window_buffer: deque[LabeledInstance] = deque(maxlen=window)
        self.known_drift_at = known_drift_at
        self.detection_delay = detection_delay
        self.drift_events: list[DriftEvent] = []

    @property
    def adapt_at(self) -> int | None:
        if self.known_drift_at is None:
            return None
        return self.known_drift_at + self.detection_delay

    def prepare(self, preparatory: Sequence[LabeledInstance]) -> "OracleAdaptiveSca":
        self.learner.prepare(preparatory)
        self.window_buffer.extend(preparatory[-self.window_buffer.maxlen:])
        return self

    def predict(self, features: np.ndarray) -> int:
        return self.learner.predict(features)

    def learn_one(self, instance: LabeledInstance, t: int | None = None) -> bool:
        if not self.learner.prepared:
            raise StateError("learner must be prepared before stepping")
        self.window_buffer.append(instance)
        if self.adapt_at is not None and t == self.adapt_at:
            self.learner.retrain_window(list(self.window_buffer))
            self.drift_events.append(DriftEvent(t, 1.0))
            return True
        self.learner.learn_one(instance)
        return False

    def step(self, instance: LabeledInstance, t: int | None = None) -> tuple[int, bool]:
        prediction = self.predict(instance.features)
        fired = self.learn_one(instance, t)
        return prediction, fired
