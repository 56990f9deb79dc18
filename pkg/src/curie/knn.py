"""Sliding-window k-nearest-neighbors online classifier.

The comparison baseline: keeps the last `capacity` instances in a FIFO
buffer and predicts the majority label among the k nearest by Euclidean
distance. A linear scan is plenty at the window sizes used here.
"""
from __future__ import annotations

from collections import deque
from typing import Sequence

import numpy as np

from .errors import ConfigError, StateError
from .types import LabeledInstance


class KnnWindow:
    """FIFO window of past instances with majority voting over the k nearest.

    Distance ties prefer the older instance; label ties the lowest class
    index.
    """

    def __init__(self, capacity: int, k: int = 5) -> None:
        if capacity < 1:
            raise ConfigError(f"capacity must be >= 1, got {capacity}")
        if not 1 <= k <= capacity:
            raise ConfigError(f"k must lie in [1, capacity], got k={k}")
        self.capacity = capacity
        self.k = k
        self.buffer: deque[LabeledInstance] = deque(maxlen=capacity)
        self._matrix: np.ndarray | None = None
        self._labels: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.buffer)

    def _materialize(self) -> tuple[np.ndarray, np.ndarray]:
        if self._matrix is None:
            self._matrix = np.stack([inst.features for inst in self.buffer])
            self._labels = np.fromiter(
                (inst.label for inst in self.buffer), dtype=np.int64, count=len(self.buffer)
            )
        return self._matrix, self._labels

    def predict(self, features: np.ndarray) -> int:
        if not self.buffer:
            raise StateError("cannot predict from an empty window")
        x = np.asarray(features, dtype=np.float64)
        matrix, labels = self._materialize()
        d2 = ((matrix - x) ** 2).sum(axis=1)
        k = min(self.k, len(self.buffer))
        # stable sort on the FIFO-ordered buffer: equal distances keep the
        # older instance first
        order = np.argsort(d2, kind="stable")[:k]
        votes = np.bincount(labels[order])
        return int(votes.argmax())

    def learn_one(self, instance: LabeledInstance, t: int | None = None) -> bool:
        self.buffer.append(instance)
        self._matrix = None
        self._labels = None
        return False

    def retrain_window(self, instances: Sequence[LabeledInstance]) -> "KnnWindow":
        self.buffer = deque(instances[-self.capacity:], maxlen=self.capacity)
        self._matrix = None
        self._labels = None
        return self

    def clone_knowledge_from(self, other: "KnnWindow") -> None:
        if other.capacity != self.capacity:
            raise ConfigError("cannot clone between windows of different capacity")
        self.buffer = deque(other.buffer, maxlen=self.capacity)
        self._matrix = None
        self._labels = None
