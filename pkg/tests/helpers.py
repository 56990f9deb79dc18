"""Independent reference implementations used as test oracles."""
from __future__ import annotations

import itertools

import numpy as np


def naive_fill(states: np.ndarray, dims: int, bins: int, class_count: int,
               offsets: list[tuple[int, ...]] | None = None) -> tuple[np.ndarray, int]:
    """Brute-force synchronous fill: each generation recomputed from a full
    copy of the lattice, scanning every cell. Assigned cells are frozen.

    Returns (final states, generation count).
    """
    if offsets is None:
        offsets = []
        for ax in range(dims):
            for d in (-1, 1):
                off = [0] * dims
                off[ax] = d
                offsets.append(tuple(off))
    strides = [bins**i for i in range(dims)]

    def flat(c):
        return sum(ci * strides[i] for i, ci in enumerate(c))

    cur = np.array(states, dtype=np.int64)
    gens = 0
    while True:
        snapshot = cur.copy()
        changed = False
        for coord in itertools.product(range(bins), repeat=dims):
            f = flat(coord)
            if snapshot[f] >= 0:
                continue
            votes = []
            for off in offsets:
                nb = tuple(c + o for c, o in zip(coord, off))
                if all(0 <= v < bins for v in nb):
                    s = snapshot[flat(nb)]
                    if s >= 0:
                        votes.append(s)
            if votes:
                counts = [votes.count(s) for s in range(class_count)]
                cur[f] = max(range(class_count), key=lambda s: (counts[s], -s))
                changed = True
        if not changed:
            return cur, gens
        gens += 1


def sequential_inplace_fill(states: np.ndarray, dims: int, bins: int,
                            class_count: int) -> np.ndarray:
    """Deliberately wrong variant: applies assignments immediately while
    scanning, so later cells in the same pass see earlier updates."""
    strides = [bins**i for i in range(dims)]

    def flat(c):
        return sum(ci * strides[i] for i, ci in enumerate(c))

    cur = np.array(states, dtype=np.int64)
    while True:
        changed = False
        for coord in itertools.product(range(bins), repeat=dims):
            f = flat(coord)
            if cur[f] >= 0:
                continue
            votes = []
            for ax in range(dims):
                for d in (-1, 1):
                    nb = list(coord)
                    nb[ax] += d
                    if 0 <= nb[ax] < bins:
                        s = cur[flat(tuple(nb))]
                        if s >= 0:
                            votes.append(s)
            if votes:
                counts = [votes.count(s) for s in range(class_count)]
                cur[f] = max(range(class_count), key=lambda s: (counts[s], -s))
                changed = True
        if not changed:
            return cur
