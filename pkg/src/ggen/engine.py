"""Compiled inner loop of the guided generator.

The graph lives in flat arc arrays (each edge twice) plus a degree vector
while the loop runs. One call performs the iterations for a block of
pre-drawn pivots and hands control back, so seeding, progress reporting and
count verification stay in Python.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .deltas import _pivot_products, _scan

RUNNING, WINDOW, CAP, OVERFLOW = 0, 1, 2, 3

# istate slots
I, SINCE, BEST_I, WINDOW_LEN, EVERY, MAX_ITER, STOP_AT, STATUS, ARCS, N_REC = range(10)


@njit(cache=True)
def _remove_arc(src, dst, arcs, x, y):
    for k in range(arcs):
        if src[k] == x and dst[k] == y:
            last = arcs - 1
            src[k] = src[last]
            dst[k] = dst[last]
            return last
    return arcs


@njit(cache=True)
def _toggle(src, dst, arcs, degrees, u, w, present):
    if present:
        arcs = _remove_arc(src, dst, arcs, u, w)
        arcs = _remove_arc(src, dst, arcs, w, u)
        degrees[u] -= 1
        degrees[w] -= 1
    else:
        src[arcs] = u
        dst[arcs] = w
        src[arcs + 1] = w
        dst[arcs + 1] = u
        arcs += 2
        degrees[u] += 1
        degrees[w] += 1
    return arcs


@njit(cache=True)
def _has_arc(src, dst, arcs, x, y):
    for k in range(arcs):
        if src[k] == x and dst[k] == y:
            return True
    return False


@njit(cache=True)
def undo(src, dst, arcs, degrees, log_u, log_v, start, stop):
    """Revert the logged toggles ``start..stop-1`` in reverse order; return the arc count."""
    for j in range(stop - 1, start - 1, -1):
        u, w = log_u[j], log_v[j]
        arcs = _toggle(src, dst, arcs, degrees, u, w, _has_arc(src, dst, arcs, u, w))
    return arcs


@njit(cache=True)
def run_block(src, dst, degrees, counts, targets, rows, scale, weights, limit,
              pivots, istate, best, best_counts, log_u, log_v, rec_iter, rec_counts):
    n = degrees.shape[0]
    nrows = rows.shape[0]
    offsets = np.empty(nrows, dtype=np.int64)
    p = 0
    nrec = 0
    while True:
        i = istate[I]
        if p == pivots.shape[0] or i == istate[STOP_AT]:
            break
        if istate[MAX_ITER] >= 0 and i >= istate[MAX_ITER]:
            istate[STATUS] = CAP
            break
        if istate[SINCE] >= istate[WINDOW_LEN]:
            istate[STATUS] = WINDOW
            break
        for r in range(nrows):
            offsets[r] = counts[rows[r]] - targets[r]
            if offsets[r] >= limit or offsets[r] <= -limit:
                istate[STATUS] = OVERFLOW
        if istate[STATUS] == OVERFLOW:
            break

        u = pivots[p]
        p += 1
        arcs = istate[ARCS]
        a, common, walks3 = _pivot_products(src[:arcs], dst[:arcs], n, u)
        w, d6, score = _scan(a, common, walks3, degrees, u, rows, offsets, scale, weights)
        istate[ARCS] = _toggle(src, dst, arcs, degrees, u, w, a[w])
        for s in range(6):
            counts[s] += d6[s]
        log_u[i] = u
        log_v[i] = w
        i += 1
        istate[I] = i

        if score < best[0]:
            best[0] = score
            istate[BEST_I] = i
            istate[SINCE] = 0
            best_counts[:] = counts
        else:
            istate[SINCE] += 1
        if i % istate[EVERY] == 0 or istate[SINCE] >= istate[WINDOW_LEN] or istate[BEST_I] == i:
            rec_iter[nrec] = i
            rec_counts[nrec, :] = counts
            nrec += 1
    istate[N_REC] = nrec


def grow(arr: np.ndarray, size: int) -> np.ndarray:
    if len(arr) >= size:
        return arr
    out = np.zeros(max(size, 2 * len(arr)), dtype=arr.dtype)
    out[: len(arr)] = arr
    return out
