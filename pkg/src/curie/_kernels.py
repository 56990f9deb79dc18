"""Compiled hot path for the generation fill.

Only the von Neumann radius-1 case gets a dedicated kernel; it is the
configuration every preset uses and the only one whose cost matters (the
reactive learner rebuilds its grid every stream step). Other neighborhoods
go through the dense-table path in `sca`.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def fill_von_neumann_r1(
    states: np.ndarray,  # int16[n], EMPTY (-1) for unassigned; mutated
    coords: np.ndarray,  # int16[n, dims]
    strides: np.ndarray,  # int64[dims]
    bins: int,
    n_classes: int,
    seed_idx: np.ndarray,  # int64[k] indices of initially assigned cells
    max_generations: int,
) -> int:
    """Synchronous fill-only majority propagation.

    A cell filled at generation g can only have assigned neighbors from
    generation g-1 (any earlier neighbor would have filled it sooner), so
    scattering votes from the previous frontier is exactly the synchronous
    gather over all assigned neighbors.

    Returns the generation count, or -1 if max_generations would be exceeded
    with empty cells remaining.
    """
    n = states.shape[0]
    ndim = strides.shape[0]
    counts = np.zeros((n, n_classes), np.int16)
    stamp = np.zeros(n, np.int32)
    cand = np.empty(n, np.int32)
    frontier = np.empty(n, np.int32)

    fsize = seed_idx.shape[0]
    for i in range(fsize):
        frontier[i] = np.int32(seed_idx[i])
    empties = n - fsize
    gens = 0
    while empties > 0 and fsize > 0:
        gen_mark = gens + 1
        csize = 0
        for fi in range(fsize):
            c = frontier[fi]
            s = states[c]
            for ax in range(ndim):
                d = coords[c, ax]
                st = strides[ax]
                if d > 0:
                    nb = c - st
                    if states[nb] < 0:
                        if stamp[nb] != gen_mark:
                            stamp[nb] = gen_mark
                            for k in range(n_classes):
                                counts[nb, k] = 0
                            cand[csize] = np.int32(nb)
                            csize += 1
                        counts[nb, s] += 1
                if d < bins - 1:
                    nb = c + st
                    if states[nb] < 0:
                        if stamp[nb] != gen_mark:
                            stamp[nb] = gen_mark
                            for k in range(n_classes):
                                counts[nb, k] = 0
                            cand[csize] = np.int32(nb)
                            csize += 1
                        counts[nb, s] += 1
        if csize == 0:
            break  # remaining empties unreachable
        if gens >= max_generations:
            return -1
        # apply all assignments after voting: candidates are unassigned in the
        # snapshot, so no vote above ever read a value written here
        for ci in range(csize):
            c = cand[ci]
            best = 0
            bestc = counts[c, 0]
            for k in range(1, n_classes):
                if counts[c, k] > bestc:
                    best = k
                    bestc = counts[c, k]
            states[c] = np.int16(best)
            frontier[ci] = c
        fsize = csize
        empties -= csize
        gens += 1
    return gens
