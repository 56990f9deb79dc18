import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curie.errors import ConfigError, StateError
from curie.lattice import (
    CellLattice,
    FeatureBounds,
    GridShape,
    Neighborhood,
    NeighborhoodSpec,
    flat_index,
    locate_cell,
    majority_state,
    neighbors,
    unflatten_index,
)

VN1 = NeighborhoodSpec(Neighborhood.VON_NEUMANN, 1)
MOORE1 = NeighborhoodSpec(Neighborhood.MOORE, 1)


# ---------------------------------------------------------------- GridShape

def test_shape_validation():
    with pytest.raises(ConfigError):
        GridShape(dims=0, bins_per_dim=5)
    with pytest.raises(ConfigError):
        GridShape(dims=2, bins_per_dim=1)
    with pytest.raises(ConfigError):
        GridShape(dims=10, bins_per_dim=10)  # 10^10 cells > default cap
    assert GridShape(dims=10, bins_per_dim=3).total_cells == 59049


# ---------------------------------------------------------------- flat_index

def test_flat_index_examples():
    shape = GridShape(dims=2, bins_per_dim=5)
    assert flat_index([0, 0], shape) == 0
    assert flat_index([2, 3], shape) == 2 + 3 * 5


def test_flat_index_round_trip_exhaustive():
    shape = GridShape(dims=2, bins_per_dim=5)
    seen = set()
    for coord in itertools.product(range(5), repeat=2):
        f = flat_index(coord, shape)
        assert unflatten_index(f, shape) == coord
        seen.add(f)
    assert seen == set(range(25))


def test_flat_index_out_of_range():
    shape = GridShape(dims=2, bins_per_dim=5)
    with pytest.raises(ValueError):
        flat_index([5, 0], shape)
    with pytest.raises(ValueError):
        flat_index([0, 0, 0], shape)


@given(
    dims=st.integers(1, 3),
    bins=st.integers(2, 12),
)
@settings(max_examples=30, deadline=None)
def test_flat_index_bijection(dims, bins):
    if bins**dims > 100_000:
        return
    shape = GridShape(dims=dims, bins_per_dim=bins)
    seen = set()
    for coord in itertools.product(range(bins), repeat=dims):
        f = flat_index(coord, shape)
        assert unflatten_index(f, shape) == coord
        seen.add(f)
    assert len(seen) == shape.total_cells


# ---------------------------------------------------------------- neighbors

def test_von_neumann_interior():
    shape = GridShape(dims=2, bins_per_dim=5)
    got = set(neighbors((2, 2), VN1, shape))
    assert got == {(2, 3), (1, 2), (2, 1), (3, 2)}


def test_von_neumann_corner_clipped():
    shape = GridShape(dims=2, bins_per_dim=5)
    assert set(neighbors((0, 0), VN1, shape)) == {(0, 1), (1, 0)}


def test_moore_3d_interior_count():
    shape = GridShape(dims=3, bins_per_dim=5)
    assert len(neighbors((2, 2, 2), MOORE1, shape)) == 3**3 - 1


def test_neighbor_counts_interior_vs_boundary():
    shape = GridShape(dims=3, bins_per_dim=4)
    for coord in itertools.product(range(4), repeat=3):
        n = len(neighbors(coord, VN1, shape))
        interior = all(0 < c < 3 for c in coord)
        if interior:
            assert n == 2 * 3
        else:
            assert n < 2 * 3


def test_neighbors_symmetric_exhaustive_4x4x4():
    shape = GridShape(dims=3, bins_per_dim=4)
    for spec in (VN1, MOORE1, NeighborhoodSpec(Neighborhood.VON_NEUMANN, 2)):
        table = {
            c: set(neighbors(c, spec, shape))
            for c in itertools.product(range(4), repeat=3)
        }
        for a, nbs in table.items():
            assert a not in nbs
            for b in nbs:
                assert a in table[b]


def test_von_neumann_radius_2_is_manhattan_ball():
    shape = GridShape(dims=2, bins_per_dim=9)
    got = set(neighbors((4, 4), NeighborhoodSpec(Neighborhood.VON_NEUMANN, 2), shape))
    expected = {
        (4 + dx, 4 + dy)
        for dx in range(-2, 3)
        for dy in range(-2, 3)
        if 0 < abs(dx) + abs(dy) <= 2
    }
    assert got == expected


# ------------------------------------------------------------ majority vote

def test_majority_examples():
    assert majority_state([1, 1, 0, 1], 2) == 1
    assert majority_state([0, 0, 1, 1], 2) == 0  # tie -> lowest class index
    assert majority_state([], 2) is None


def test_majority_rejects_bad_labels():
    with pytest.raises(ValueError):
        majority_state([0, 3], 2)


def test_majority_matches_bruteforce_all_multisets():
    def oracle(labels, class_count):
        if not labels:
            return None
        counts = [labels.count(s) for s in range(class_count)]
        return max(range(class_count), key=lambda s: (counts[s], -s))

    for size in range(7):
        for labels in itertools.combinations_with_replacement(range(3), size):
            assert majority_state(list(labels), 3) == oracle(list(labels), 3)


# ------------------------------------------------------------------ binning

def test_locate_examples():
    shape = GridShape(dims=1, bins_per_dim=5)
    bounds = FeatureBounds([0.0], [1.0], margin_fraction=0.0)
    assert locate_cell(np.array([0.42]), bounds, shape) == (2,)
    assert locate_cell(np.array([1.0]), bounds, shape) == (4,)
    assert locate_cell(np.array([1.7]), bounds, shape) == (4,)


def test_locate_rejects_non_finite():
    shape = GridShape(dims=1, bins_per_dim=5)
    bounds = FeatureBounds([0.0], [1.0])
    with pytest.raises(ValueError):
        locate_cell(np.array([np.nan]), bounds, shape)
    with pytest.raises(ValueError):
        locate_cell(np.array([np.inf]), bounds, shape)


def test_update_bounds():
    b = FeatureBounds([0.0], [1.0])
    b.update(np.array([1.7]))
    assert b.high[0] == 1.7 and b.low[0] == 0.0
    b.update(np.array([0.5]))
    assert b.high[0] == 1.7 and b.low[0] == 0.0


def test_degenerate_range_widened():
    b = FeatureBounds([0.3], [0.3])
    eff_low, width = b.effective_range()
    assert eff_low[0] == pytest.approx(0.3 - 0.5)
    assert width[0] == pytest.approx(1.0)
    shape = GridShape(dims=1, bins_per_dim=4)
    assert locate_cell(np.array([0.3]), b, shape) == (2,)


def test_uninitialized_bounds_refuse_to_locate():
    b = FeatureBounds.empty(2)
    with pytest.raises(StateError):
        locate_cell(np.array([0.0, 0.0]), b, GridShape(dims=2, bins_per_dim=3))


def test_bounds_update_rejects_non_finite():
    b = FeatureBounds.empty(1)
    with pytest.raises(ValueError):
        b.update(np.array([np.nan]))


@given(
    xs=st.lists(
        st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=2),
        min_size=1,
        max_size=30,
    ),
    bins=st.integers(2, 17),
)
@settings(max_examples=100, deadline=None)
def test_locate_after_update_never_clamps(xs, bins):
    # with the default margin, a value inside the bounds lands strictly
    # inside the bin range (no clamping needed)
    shape = GridShape(dims=2, bins_per_dim=bins)
    b = FeatureBounds.empty(2)
    for x in xs:
        x = np.asarray(x)
        b.update(x)
        eff_low, width = b.effective_range()
        raw = np.floor((x - eff_low) / width * bins)
        assert np.all(raw >= 0) and np.all(raw <= bins - 1)


def test_locate_subnormal_span_stays_in_range():
    # a tiny nonzero span must not overflow the bin arithmetic
    b = FeatureBounds.empty(2)
    b.update(np.array([0.0, 0.0]))
    b.update(np.array([0.0, 2.225073858507e-311]))
    shape = GridShape(dims=2, bins_per_dim=2)
    for x in ([0.0, 0.0], [0.0, 2.225073858507e-311], [1.0, 1.0], [-1.0, -1.0]):
        cell = locate_cell(np.array(x), b, shape)
        assert all(0 <= c <= 1 for c in cell), (x, cell)


# ---------------------------------------------------------------- lattice

def test_lattice_starts_empty():
    lat = CellLattice(GridShape(dims=2, bins_per_dim=5))
    assert lat.unassigned_count == 25
    assert not lat.fully_assigned


def test_lattice_copy_is_deep():
    lat = CellLattice(GridShape(dims=2, bins_per_dim=3))
    lat.states[0] = 1
    lat.hits[4] = [0, 1]
    other = lat.copy()
    other.states[0] = 0
    other.hits[4].append(1)
    assert lat.states[0] == 1
    assert lat.hits[4] == [0, 1]
