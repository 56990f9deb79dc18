"""Small shared value types."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LabeledInstance:
    """One stream element: a feature vector and its class label."""

    features: np.ndarray
    label: int

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)


@dataclass(frozen=True)
class DriftEvent:
    """A detector firing: the step index and the bit proportion that fired."""

    t: int
    proportion: float
