"""Streamified cellular automaton classifier.

Preparation seeds the grid with labeled instances, resolves each seeded
cell to its majority label, then runs synchronous generations of the local
majority rule until no cell is empty. Streaming afterwards is test-then-train:
predict from the enclosing cell, widen the feature limits, overwrite that
cell with the true label. One instance is seen exactly once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ConfigError, PropagationError, StateError
from .lattice import (
    EMPTY,
    STATE_DTYPE,
    CellLattice,
    FeatureBounds,
    GridShape,
    Neighborhood,
    NeighborhoodSpec,
    bin_positions,
    grid_coords,
    grid_strides,
    locate_flat,
    majority_state,
    neighbor_offsets,
)
from .types import LabeledInstance

# cap on (cells x neighbors) for the dense neighbor table used by the
# non-von-Neumann fill path
_TABLE_ENTRY_CAP = 50_000_000


@dataclass(frozen=True)
class ScaConfig:
    """Grid size, neighborhood, class alphabet and fill budget for one learner."""

    shape: GridShape
    class_count: int
    neighborhood: NeighborhoodSpec = NeighborhoodSpec()
    margin_fraction: float = 0.05
    max_generations: int | None = None  # None: dims*(bins-1)+1, the grid diameter

    def __post_init__(self) -> None:
        if self.class_count < 2:
            raise ConfigError(f"class_count must be >= 2, got {self.class_count}")
        if self.class_count > np.iinfo(STATE_DTYPE).max:
            raise ConfigError(f"class_count {self.class_count} too large for cell states")
        if self.margin_fraction < 0:
            raise ConfigError("margin_fraction must be >= 0")
        if self.max_generations is not None and self.max_generations < 1:
            raise ConfigError("max_generations must be >= 1")

    @property
    def generation_budget(self) -> int:
        if self.max_generations is not None:
            return self.max_generations
        return self.shape.dims * (self.shape.bins_per_dim - 1) + 1


def resolve_hits(lattice: CellLattice, class_count: int) -> CellLattice:
    """Assign each cell with hits its majority label; clear the hit lists."""
    for flat, labels in lattice.hits.items():
        state = majority_state(labels, class_count)
        if state is not None:
            lattice.states[flat] = state
    lattice.hits.clear()
    return lattice


@lru_cache(maxsize=8)
def _neighbor_table(shape: GridShape, spec: NeighborhoodSpec) -> np.ndarray:
    """Dense (cells x neighbors) flat-index table, -1 where clipped."""
    offsets = neighbor_offsets(spec.kind, spec.radius, shape.dims)
    if shape.total_cells * len(offsets) > _TABLE_ENTRY_CAP:
        raise ConfigError(
            f"neighborhood too large for dense fill: {shape.total_cells} cells x "
            f"{len(offsets)} neighbors; use a von Neumann radius-1 neighborhood "
            "or a smaller grid"
        )
    coords = grid_coords(shape.dims, shape.bins_per_dim)
    strides = grid_strides(shape.dims, shape.bins_per_dim)
    nb = coords[:, None, :].astype(np.int64) + offsets[None, :, :]
    valid = ((nb >= 0) & (nb < shape.bins_per_dim)).all(axis=2)
    flat = (nb * strides).sum(axis=2)
    return np.where(valid, flat, -1).astype(np.int64)


def _fill_with_table(
    states: np.ndarray, table: np.ndarray, class_count: int, max_generations: int
) -> int:
    """Synchronous fill via full-grid scans; used for non-hot neighborhoods."""
    gens = 0
    while True:
        unassigned = np.nonzero(states == EMPTY)[0]
        if unassigned.size == 0:
            return gens
        neigh = table[unassigned]
        ns = states[np.where(neigh >= 0, neigh, 0)]
        ok = (neigh >= 0) & (ns >= 0)
        rows = np.nonzero(ok.any(axis=1))[0]
        if rows.size == 0:
            return gens  # remaining empties unreachable
        if gens >= max_generations:
            return -1
        sel_ok = ok[rows]
        sel_ns = ns[rows]
        flat_votes = (
            np.repeat(np.arange(rows.size), sel_ok.sum(axis=1)) * class_count
            + sel_ns[sel_ok]
        )
        counts = np.bincount(flat_votes, minlength=rows.size * class_count)
        new_states = counts.reshape(rows.size, class_count).argmax(axis=1)
        states[unassigned[rows]] = new_states.astype(states.dtype)
        gens += 1


def fill_generations(lattice: CellLattice, config: ScaConfig) -> int:
    """Run synchronous generations until every cell is assigned.

    Already-assigned cells are frozen; an empty cell whose neighbors are all
    empty stays empty for that generation. Returns the generation count.
    """
    states = lattice.states
    assigned = np.nonzero(states != EMPTY)[0]
    if assigned.size == 0:
        raise StateError("cannot fill a lattice with no assigned cells")
    budget = config.generation_budget
    spec = config.neighborhood
    if spec.kind is Neighborhood.VON_NEUMANN and spec.radius == 1:
        shape = lattice.shape
        gens = _kernels.fill_von_neumann_r1(
            states,
            grid_coords(shape.dims, shape.bins_per_dim),
            grid_strides(shape.dims, shape.bins_per_dim),
            shape.bins_per_dim,
            config.class_count,
            assigned.astype(np.int64),
            budget,
        )
    else:
        table = _neighbor_table(lattice.shape, spec)
        gens = _fill_with_table(states, table, config.class_count, budget)
    if gens < 0:
        raise PropagationError(
            f"fill did not complete within {budget} generations"
        )
    return gens


class ScaLearner:
    """Incremental grid classifier over a single cell lattice."""

    def __init__(self, config: ScaConfig) -> None:
        self.config = config
        self.lattice = CellLattice(config.shape)
        self.bounds = FeatureBounds.empty(config.shape.dims, config.margin_fraction)
        self.prepared = False
        self.generations = 0  # generation count of the last fill

    # -- preparation ------------------------------------------------------

    def seed(self, preparatory: Sequence[LabeledInstance]) -> "ScaLearner":
        """Widen bounds instance by instance and append each label to the hit
        list of its enclosing cell (located under the bounds seen so far)."""
        if len(preparatory) == 0:
            raise ConfigError("at least one preparatory instance required")
        shape = self.config.shape
        hits = self.lattice.hits
        for inst in preparatory:
            self._check_label(inst.label)
            self.bounds.update(inst.features)
            flat = locate_flat(inst.features, self.bounds, shape)
            hits.setdefault(flat, []).append(inst.label)
        return self

    def prepare(self, preparatory: Sequence[LabeledInstance]) -> "ScaLearner":
        """seed -> resolve -> fill -> resolve; afterwards every cell has a state."""
        self.seed(preparatory)
        resolve_hits(self.lattice, self.config.class_count)
        self.generations = fill_generations(self.lattice, self.config)
        resolve_hits(self.lattice, self.config.class_count)
        self.prepared = True
        return self

    def retrain_window(self, instances: Sequence[LabeledInstance]) -> "ScaLearner":
        """Rebuild from scratch over `instances` (vectorized preparation).

        Produces exactly the lattice and bounds that a fresh prepare() over
        the same instances would.
        """
        if len(instances) == 0:
            raise StateError("cannot retrain from an empty window")
        config = self.config
        shape = config.shape
        x = np.stack([inst.features for inst in instances]).astype(np.float64)
        labels = np.fromiter(
            (inst.label for inst in instances), dtype=np.int64, count=len(instances)
        )
        if not np.all(np.isfinite(x)):
            raise ValueError("features must be finite")
        if labels.min() < 0 or labels.max() >= config.class_count:
            raise ValueError(f"labels must lie in [0, {config.class_count})")

        # running bounds as each instance arrives, then the bin geometry each
        # instance was located under (same order of operations as seed())
        lows = np.minimum.accumulate(x, axis=0)
        highs = np.maximum.accumulate(x, axis=0)
        span = highs - lows
        m = config.margin_fraction * span
        eff_low = lows - m
        width = span + 2.0 * m
        degenerate = span == 0.0
        eff_low = np.where(degenerate, lows - 0.5, eff_low)
        width = np.where(degenerate, 1.0, width)
        g = shape.bins_per_dim
        bins = bin_positions(x, eff_low, width, g)
        flat = bins @ grid_strides(shape.dims, g)

        # majority label per seeded cell, ties to the lowest class index
        cells, ranks = np.unique(flat, return_inverse=True)
        counts = np.bincount(
            ranks * config.class_count + labels, minlength=cells.size * config.class_count
        )
        seed_states = counts.reshape(cells.size, config.class_count).argmax(axis=1)

        self.lattice = CellLattice(shape)
        self.lattice.states[cells] = seed_states.astype(STATE_DTYPE)
        self.bounds = FeatureBounds(lows[-1], highs[-1], config.margin_fraction)
        self.generations = fill_generations(self.lattice, config)
        self.prepared = True
        return self

    # -- streaming --------------------------------------------------------

    def predict(self, features: np.ndarray) -> int:
        """State of the cell enclosing `features` under the current bounds."""
        if not self.prepared:
            raise StateError("learner must be prepared before predicting")
        flat = locate_flat(features, self.bounds, self.config.shape)
        return int(self.lattice.states[flat])

    def learn_one(self, instance: LabeledInstance, t: int | None = None) -> bool:
        """Widen bounds with the instance, then overwrite its (re-located)
        cell with the true label. Touches exactly one cell."""
        if not self.prepared:
            raise StateError("learner must be prepared before learning")
        self._check_label(instance.label)
        self.bounds.update(instance.features)
        flat = locate_flat(instance.features, self.bounds, self.config.shape)
        self.lattice.states[flat] = instance.label
        return False

    def clone_knowledge_from(self, other: "ScaLearner") -> None:
        knowledge_transfer(other, self)

    def _check_label(self, label: int) -> None:
        if not 0 <= label < self.config.class_count:
            raise ValueError(
                f"label {label} outside [0, {self.config.class_count})"
            )


def knowledge_transfer(source: ScaLearner, target: ScaLearner) -> ScaLearner:
    """Copy the source's cell states and bounds into the target.

    States are meaningless under a different bin geometry, so the bounds
    travel with them.
    """
    if source.config.shape != target.config.shape:
        raise ConfigError(
            f"shape mismatch: {source.config.shape} vs {target.config.shape}"
        )
    if source.config.class_count != target.config.class_count:
        raise ConfigError("class_count mismatch between learners")
    target.lattice.states[:] = source.lattice.states
    target.lattice.hits = {k: list(v) for k, v in source.lattice.hits.items()}
    target.bounds = source.bounds.copy()
    target.prepared = source.prepared
    return target
