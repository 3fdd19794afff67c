"""Vectorised exhaustive enumeration over all 2**n coalitions.

Coalition bitmasks are split into a low part (the first ``k`` members) and a
high part. Criterion sums over the low part are tabulated once; each high
mask then contributes a scalar offset, so a chunk of ``2**k`` coalitions is
evaluated with a handful of array comparisons.

Every rule handled here is monotone, so a member's swing count follows from
the winning coalitions alone::

    TB_i = #{winning S containing i} - #{winning S not containing i}

which is what both passes below accumulate.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

LOW_BITS = 20

ProgressFn = Callable[[int, int], None]


def subset_sums(weights: Sequence[int]) -> np.ndarray:
    """Sum of ``weights`` over every subset, indexed by subset bitmask."""
    out = np.zeros(1 << len(weights), dtype=np.int64)
    for j, w in enumerate(weights):
        half = 1 << j
        np.add(out[:half], int(w), out=out[half : 2 * half])
    return out


def split_bits(n: int, low_bits: int = LOW_BITS) -> tuple[int, int]:
    k = min(n, low_bits)
    return k, n - k


def default_workers() -> int:
    env = os.environ.get("VOTINGPOWER_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _partition(count: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, count))
    step, extra = divmod(count, parts)
    out, lo = [], 0
    for p in range(parts):
        hi = lo + step + (p < extra)
        out.append((lo, hi))
        lo = hi
    return out


def _run(task, payloads: list, workers: int) -> list:
    if workers <= 1 or len(payloads) <= 1:
        return [task(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, payloads))


# -- single rule ----------------------------------------------------------


def _fold_bit_counts(win: np.ndarray, k: int) -> np.ndarray:
    """Number of True entries with bit j set, for each of the k low bits."""
    counts = np.zeros(k, dtype=np.int64)
    if k == 0:
        return counts
    half = 1 << (k - 1)
    counts[k - 1] = np.count_nonzero(win[half:])
    acc = win[:half].astype(np.int32)
    acc += win[half:]
    for j in range(k - 2, -1, -1):
        half = 1 << j
        counts[j] = int(acc[half : 2 * half].sum())
        acc[:half] += acc[half : 2 * half]
        acc = acc[:half]
    return counts


def _winner_task(payload) -> tuple[np.ndarray, int]:
    weights, thresholds, blocking, n, k, h_lo, h_hi = payload
    low = [subset_sums(w[:k]) for w in weights]
    high = [subset_sums(w[k:]) for w in weights]
    if blocking is not None:
        low_cnt = subset_sums([1] * k)
        high_cnt = subset_sums([1] * (n - k))
    containing = np.zeros(n, dtype=np.int64)
    total = 0
    win = np.empty(1 << k, dtype=bool)
    tmp = np.empty(1 << k, dtype=bool)
    for h in range(h_lo, h_hi):
        np.greater_equal(low[0], thresholds[0] - high[0][h], out=win)
        for c in range(1, len(weights)):
            np.greater_equal(low[c], thresholds[c] - high[c][h], out=tmp)
            win &= tmp
        if blocking is not None:
            # complement has fewer than `blocking` members
            np.greater(low_cnt, n - blocking - high_cnt[h], out=tmp)
            win |= tmp
        w = int(np.count_nonzero(win))
        if not w:
            continue
        total += w
        containing[:k] += _fold_bit_counts(win, k)
        for t in range(n - k):
            if h >> t & 1:
                containing[k + t] += w
    return containing, total


def winning_counts(
    weights: Sequence[Sequence[int]],
    thresholds: Sequence[int],
    n: int,
    blocking: int | None = None,
    workers: int = 1,
) -> tuple[np.ndarray, int]:
    """Count winning coalitions overall and per containing member.

    ``weights[c]`` and ``thresholds[c]`` describe criterion ``c``; a
    coalition wins when every criterion sum reaches its threshold, or, with
    ``blocking`` set, when fewer than ``blocking`` members oppose it.
    """
    k, hbits = split_bits(n)
    weights = [tuple(int(x) for x in w) for w in weights]
    thresholds = [int(t) for t in thresholds]
    payloads = [
        (weights, thresholds, blocking, n, k, lo, hi)
        for lo, hi in _partition(1 << hbits, workers * 4 if workers > 1 else 1)
    ]
    containing = np.zeros(n, dtype=np.int64)
    total = 0
    for c, t in _run(_winner_task, payloads, workers):
        containing += c
        total += t
    return containing, total


# -- many thresholds at once ------------------------------------------------


class _Binner:
    """Maps criterion sums to the number of grid thresholds they reach."""

    LUT_LIMIT = 1 << 16

    def __init__(self, thresholds: np.ndarray, grand_total: int):
        self.thresholds = thresholds
        self.lut = None
        if grand_total < self.LUT_LIMIT:
            self.lut = np.searchsorted(thresholds, np.arange(grand_total + 1), side="right").astype(np.int64)

    def __call__(self, sums: np.ndarray) -> np.ndarray:
        if self.lut is not None:
            return self.lut[sums]
        return np.searchsorted(self.thresholds, sums, side="right").astype(np.int64)


def _histogram_task(payload) -> tuple[np.ndarray, np.ndarray]:
    weights, thresholds, n, k, h_lo, h_hi = payload
    shape = tuple(len(t) + 1 for t in thresholds)
    cells = int(np.prod(shape))
    low = [subset_sums(w[:k]) for w in weights]
    high = [subset_sums(w[k:]) for w in weights]
    binners = [_Binner(np.asarray(t, dtype=np.int64), sum(w)) for w, t in zip(weights, thresholds)]
    total = np.zeros(cells, dtype=np.int64)
    per_member = np.zeros((n, cells), dtype=np.int64)
    key = np.empty(1 << k, dtype=np.int64)
    for h in range(h_lo, h_hi):
        key[:] = 0
        for d in range(len(weights)):
            bins = binners[d](low[d] + high[d][h])
            key *= shape[d]
            key += bins
        chunk = np.bincount(key, minlength=cells)
        total += chunk
        for j in range(k):
            half = 1 << j
            sel = key.reshape(-1, 2, half)[:, 1, :].ravel()
            per_member[j] += np.bincount(sel, minlength=cells)
        for t in range(n - k):
            if h >> t & 1:
                per_member[k + t] += chunk
    return total, per_member


def _suffix_sums(hist: np.ndarray, first_axis: int = 0) -> np.ndarray:
    out = hist
    for axis in range(first_axis, hist.ndim):
        out = np.flip(np.cumsum(np.flip(out, axis=axis), axis=axis), axis=axis)
    return out


def grid_winning_counts(
    weights: Sequence[Sequence[int]],
    thresholds: Sequence[Sequence[int]],
    n: int,
    workers: int = 1,
    progress: ProgressFn | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Winning-coalition counts for every combination of per-criterion thresholds.

    ``thresholds[d]`` must be ascending. Returns ``(total, containing)`` with
    shapes ``(T_1, ..., T_d)`` and ``(n, T_1, ..., T_d)``: the number of
    winning coalitions, and of winning coalitions containing each member,
    when criterion ``d`` uses threshold ``thresholds[d][a_d]``.

    One pass over all coalitions: each is binned by how many thresholds of
    each criterion it reaches, then suffix sums over the bins give the counts.
    """
    k, hbits = split_bits(n)
    weights = [tuple(int(x) for x in w) for w in weights]
    thresholds = [tuple(int(x) for x in t) for t in thresholds]
    for t in thresholds:
        if list(t) != sorted(t) or not t:
            raise ValueError("grid thresholds must be non-empty and ascending")
    shape = tuple(len(t) + 1 for t in thresholds)
    parts = _partition(1 << hbits, max(workers * 4, min(1 << hbits, 16)))
    payloads = [(weights, thresholds, n, k, lo, hi) for lo, hi in parts]
    total = np.zeros(int(np.prod(shape)), dtype=np.int64)
    per_member = np.zeros((n, total.size), dtype=np.int64)
    done = 0
    if workers <= 1:
        results = map(_histogram_task, payloads)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_histogram_task, payloads)
    try:
        for (lo, hi), (t, m) in zip(parts, results):
            total += t
            per_member += m
            done += hi - lo
            if progress is not None:
                progress(done, 1 << hbits)
    finally:
        if pool is not None:
            pool.shutdown()
    total = _suffix_sums(total.reshape(shape))
    per_member = _suffix_sums(per_member.reshape((n,) + shape), first_axis=1)
    inner = tuple(slice(1, None) for _ in shape)
    return total[inner], per_member[(slice(None),) + inner]
