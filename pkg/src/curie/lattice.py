"""Dense d-dimensional cell grid: addressing, neighborhoods, binning, majority rule.

A grid assigns one dimension per feature and splits each dimension into an
equal number of bins between running per-feature limits (plus a margin), so a
cell covers a rectangular region of feature space. Cell states are class
labels; -1 marks an empty (unassigned) cell.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, StateError

EMPTY = -1
STATE_DTYPE = np.int16

DEFAULT_CELL_CAP = 10_000_000
DEFAULT_MARGIN = 0.05


@dataclass(frozen=True)
class GridShape:
    """Square grid geometry: `dims` dimensions with `bins_per_dim` bins each."""

    dims: int
    bins_per_dim: int
    cell_cap: int = DEFAULT_CELL_CAP

    def __post_init__(self) -> None:
        if self.dims < 1:
            raise ConfigError(f"dims must be >= 1, got {self.dims}")
        if self.bins_per_dim < 2:
            raise ConfigError(f"bins_per_dim must be >= 2, got {self.bins_per_dim}")
        if self.total_cells > self.cell_cap:
            raise ConfigError(
                f"grid of {self.bins_per_dim}^{self.dims} = {self.total_cells} cells "
                f"exceeds the cap of {self.cell_cap}; raise cell_cap explicitly if intended"
            )

    @property
    def total_cells(self) -> int:
        return self.bins_per_dim**self.dims


class Neighborhood(enum.Enum):
    VON_NEUMANN = "von_neumann"
    MOORE = "moore"


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Neighborhood kind plus radius. Von Neumann uses Manhattan distance,
    Moore uses Chebyshev; an interior cell has 2*dims (resp. 3^dims - 1)
    neighbors at radius 1."""

    kind: Neighborhood = Neighborhood.VON_NEUMANN
    radius: int = 1

    def __post_init__(self) -> None:
        if self.radius < 1:
            raise ConfigError(f"radius must be >= 1, got {self.radius}")


@lru_cache(maxsize=32)
def grid_strides(dims: int, bins_per_dim: int) -> np.ndarray:
    """Mixed-radix strides: dimension 0 varies fastest."""
    return bins_per_dim ** np.arange(dims, dtype=np.int64)


@lru_cache(maxsize=8)
def grid_coords(dims: int, bins_per_dim: int) -> np.ndarray:
    """Coordinates of every flat index, shape (total, dims), int16."""
    if bins_per_dim > np.iinfo(np.int16).max:
        raise ConfigError(
            f"bins_per_dim {bins_per_dim} exceeds the coordinate-table limit "
            f"of {np.iinfo(np.int16).max}"
        )
    strides = grid_strides(dims, bins_per_dim)
    idx = np.arange(bins_per_dim**dims, dtype=np.int64)
    return np.stack(
        [(idx // strides[n]) % bins_per_dim for n in range(dims)], axis=1
    ).astype(np.int16)


@lru_cache(maxsize=32)
def neighbor_offsets(kind: Neighborhood, radius: int, dims: int) -> np.ndarray:
    """All nonzero offsets within the neighborhood, shape (m, dims), int16."""
    offs = []
    for delta in itertools.product(range(-radius, radius + 1), repeat=dims):
        if all(d == 0 for d in delta):
            continue
        if kind is Neighborhood.VON_NEUMANN and sum(abs(d) for d in delta) > radius:
            continue
        offs.append(delta)
    return np.array(offs, dtype=np.int16)


def _check_coord(coord: Sequence[int], shape: GridShape) -> None:
    if len(coord) != shape.dims:
        raise ValueError(f"coordinate has {len(coord)} indices, grid has {shape.dims} dims")
    for c in coord:
        if not 0 <= c < shape.bins_per_dim:
            raise ValueError(f"coordinate {tuple(coord)} out of range for {shape}")


def flat_index(coord: Sequence[int], shape: GridShape) -> int:
    """Flat position of a coordinate; dimension 0 varies fastest."""
    _check_coord(coord, shape)
    g = shape.bins_per_dim
    out = 0
    for n in reversed(range(shape.dims)):
        out = out * g + coord[n]
    return out


def unflatten_index(flat: int, shape: GridShape) -> tuple[int, ...]:
    """Inverse of flat_index."""
    if not 0 <= flat < shape.total_cells:
        raise ValueError(f"flat index {flat} out of range for {shape}")
    g = shape.bins_per_dim
    coord = []
    for _ in range(shape.dims):
        coord.append(flat % g)
        flat //= g
    return tuple(coord)


def neighbors(
    coord: Sequence[int], spec: NeighborhoodSpec, shape: GridShape
) -> list[tuple[int, ...]]:
    """Neighboring coordinates, clipped at the grid boundary (non-toroidal)."""
    _check_coord(coord, shape)
    out = []
    g = shape.bins_per_dim
    for off in neighbor_offsets(spec.kind, spec.radius, shape.dims):
        nb = tuple(int(c + d) for c, d in zip(coord, off))
        if all(0 <= v < g for v in nb):
            out.append(nb)
    return out


def majority_state(labels: Iterable[int], class_count: int) -> int | None:
    """Most frequent label; ties go to the lowest class index; None if empty."""
    arr = np.asarray(list(labels), dtype=np.int64)
    if arr.size == 0:
        return None
    if arr.min() < 0 or arr.max() >= class_count:
        raise ValueError(f"labels must lie in [0, {class_count})")
    return int(np.bincount(arr, minlength=class_count).argmax())


class FeatureBounds:
    """Running per-dimension min/max plus a margin fraction.

    The effective bin range of a dimension is [low - m, high + m] with
    m = margin_fraction * (high - low); a dimension that has seen a single
    value is widened to width 1.0 centered on it, so binning never divides
    by zero.
    """

    __slots__ = ("low", "high", "margin_fraction")

    def __init__(
        self,
        low: Sequence[float],
        high: Sequence[float],
        margin_fraction: float = DEFAULT_MARGIN,
    ) -> None:
        if margin_fraction < 0:
            raise ConfigError(f"margin_fraction must be >= 0, got {margin_fraction}")
        self.low = np.asarray(low, dtype=np.float64).copy()
        self.high = np.asarray(high, dtype=np.float64).copy()
        if self.low.shape != self.high.shape or self.low.ndim != 1:
            raise ConfigError("low and high must be 1-d vectors of equal length")
        if np.any(self.low > self.high):
            raise ConfigError("low must not exceed high in any dimension")
        self.margin_fraction = float(margin_fraction)

    @classmethod
    def empty(cls, dims: int, margin_fraction: float = DEFAULT_MARGIN) -> "FeatureBounds":
        """Bounds that have seen no data yet; update() before locating."""
        b = cls.__new__(cls)
        b.low = np.full(dims, np.inf)
        b.high = np.full(dims, -np.inf)
        b.margin_fraction = float(margin_fraction)
        if margin_fraction < 0:
            raise ConfigError(f"margin_fraction must be >= 0, got {margin_fraction}")
        return b

    @property
    def dims(self) -> int:
        return self.low.shape[0]

    @property
    def initialized(self) -> bool:
        return bool(np.all(self.low <= self.high))

    def update(self, features: np.ndarray) -> "FeatureBounds":
        """Extend bounds to cover `features` (element-wise min/max), in place."""
        x = np.asarray(features, dtype=np.float64)
        if x.shape != self.low.shape:
            raise ValueError(f"expected {self.dims} features, got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("features must be finite")
        np.minimum(self.low, x, out=self.low)
        np.maximum(self.high, x, out=self.high)
        return self

    def effective_range(self) -> tuple[np.ndarray, np.ndarray]:
        """(effective_low, effective_width) per dimension, margin applied."""
        if not self.initialized:
            raise StateError("bounds have seen no data")
        span = self.high - self.low
        m = self.margin_fraction * span
        eff_low = self.low - m
        width = span + 2.0 * m
        degenerate = span == 0.0
        if degenerate.any():
            eff_low = np.where(degenerate, self.low - 0.5, eff_low)
            width = np.where(degenerate, 1.0, width)
        return eff_low, width

    def copy(self) -> "FeatureBounds":
        b = FeatureBounds.__new__(FeatureBounds)
        b.low = self.low.copy()
        b.high = self.high.copy()
        b.margin_fraction = self.margin_fraction
        return b

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureBounds):
            return NotImplemented
        return (
            self.margin_fraction == other.margin_fraction
            and np.array_equal(self.low, other.low)
            and np.array_equal(self.high, other.high)
        )

    def __repr__(self) -> str:
        return (
            f"FeatureBounds(low={self.low.tolist()}, high={self.high.tolist()}, "
            f"margin_fraction={self.margin_fraction})"
        )


def update_bounds(bounds: FeatureBounds, features: np.ndarray) -> FeatureBounds:
    """Functional alias for FeatureBounds.update."""
    return bounds.update(features)


def bin_positions(x: np.ndarray, eff_low: np.ndarray, width: np.ndarray, g: int) -> np.ndarray:
    """floor((x - eff_low) / width * g) clamped into [0, g-1].

    Dividing before multiplying keeps the expression finite for subnormal
    widths; clamping happens in the float domain so an overflowed position
    still lands in an edge bin instead of a garbage integer.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        raw = np.floor((x - eff_low) / width * g)
    raw = np.clip(raw, 0, g - 1)
    return np.where(np.isnan(raw), 0, raw).astype(np.int64)


def locate_bins(
    features: np.ndarray, bounds: FeatureBounds, shape: GridShape
) -> np.ndarray:
    """Bin index per dimension, clamped into [0, bins_per_dim - 1]."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape[-1] != shape.dims:
        raise ValueError(f"expected {shape.dims} features, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("features must be finite")
    eff_low, width = bounds.effective_range()
    return bin_positions(x, eff_low, width, shape.bins_per_dim)


def locate_cell(
    features: np.ndarray, bounds: FeatureBounds, shape: GridShape
) -> tuple[int, ...]:
    """Coordinate of the cell enclosing `features`; out-of-range values land
    in edge bins."""
    return tuple(int(b) for b in locate_bins(features, bounds, shape))


def locate_flat(features: np.ndarray, bounds: FeatureBounds, shape: GridShape) -> int:
    """Flat index of the enclosing cell (hot-path form of locate_cell)."""
    bins = locate_bins(features, bounds, shape)
    return int(bins @ grid_strides(shape.dims, shape.bins_per_dim))


@dataclass
class CellLattice:
    """Flat array of per-cell class states plus sparse per-cell hit lists.

    `states[i] == EMPTY` marks an unassigned cell. `hits` maps flat index to
    the list of labels that landed in the cell during seeding; it is cleared
    once the cell's state is resolved.
    """

    shape: GridShape
    states: np.ndarray = field(default=None)  # type: ignore[assignment]
    hits: dict[int, list[int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.states is None:
            self.states = np.full(self.shape.total_cells, EMPTY, dtype=STATE_DTYPE)
        else:
            self.states = np.asarray(self.states, dtype=STATE_DTYPE)
            if self.states.shape != (self.shape.total_cells,):
                raise ConfigError(
                    f"states length {self.states.shape} does not match {self.shape}"
                )

    @property
    def unassigned_count(self) -> int:
        return int(np.count_nonzero(self.states == EMPTY))

    @property
    def fully_assigned(self) -> bool:
        return self.unassigned_count == 0

    def copy(self) -> "CellLattice":
        return CellLattice(
            shape=self.shape,
            states=self.states.copy(),
            hits={k: list(v) for k, v in self.hits.items()},
        )
