"""Generating-function backend for rules with one weight criterion and an optional member count.

Subsets of the other members are counted by (cardinality, weight sum), the
coefficients of ``prod_j (1 + y x**w_j)``. For a rule ``count >= k and
weight >= t`` member i swings exactly on the subsets S of the others with::

    (|S| >= k-1 and w(S) >= t - w_i)  minus  (|S| >= k and w(S) >= t)

When the dense coefficient table fits in the memory budget it is built
directly and member i is removed by polynomial division. Otherwise (large
weights such as raw populations) the product is split into two halves whose
coefficients are kept as sorted sum lists, and the dominance counts above are
read off with binary search.
"""

from __future__ import annotations

import numpy as np

from .enumeration import subset_sums
from .game import CriterionKind, Council, VotingPowerError, VotingRule
from .power import Backend, PowerReport, _check_capacity

#: Maximum number of cells of the dense (cardinality x weight) table.
DENSE_BUDGET = 1 << 23


class DispatchError(VotingPowerError):
    """The rule cannot be handled by the DP backend."""


def _reduce(council: Council, rule: VotingRule) -> tuple[int, tuple[int, ...], int]:
    """Collapse the rule to (count threshold, weights, weight threshold)."""
    if rule.blocking_minority_min is not None:
        raise DispatchError("the blocking-minority clause is not supported by the DP backend")
    compiled = rule.compile(council)
    count_thr = 0
    weighted = []
    for c in compiled:
        if c.kind is CriterionKind.MEMBER_COUNT:
            count_thr = max(count_thr, c.threshold)
        else:
            weighted.append(c)
    if len(weighted) > 1:
        raise DispatchError(
            f"the DP backend handles one weight criterion plus a member count; rule has {len(weighted)} weight criteria"
        )
    if not weighted:
        return count_thr, (1,) * council.n, 0
    return count_thr, weighted[0].weights, weighted[0].threshold


def dp_eligible(council: Council, rule: VotingRule) -> bool:
    try:
        _reduce(council, rule)
    except DispatchError:
        return False
    return True


def banzhaf_dp(council: Council, rule: VotingRule, budget: int = DENSE_BUDGET) -> PowerReport:
    _check_capacity(council)
    count_thr, weights, thr = _reduce(council, rule)
    n = council.n
    if (n + 1) * (sum(weights) + 1) <= budget:
        swings, winning = _dense(weights, count_thr, thr)
    else:
        swings, winning = _split(weights, count_thr, thr)
    return PowerReport(council, rule, Backend.DP, tuple(swings), winning)


def _dominance(table: np.ndarray, min_card: int, min_weight: int) -> int:
    """Sum of table[c, s] over c >= min_card, s >= min_weight."""
    min_card, min_weight = max(min_card, 0), max(min_weight, 0)
    if min_card >= table.shape[0] or min_weight >= table.shape[1]:
        return 0
    return int(table[min_card:, min_weight:].sum())


def _dense(weights: tuple[int, ...], count_thr: int, thr: int) -> tuple[list[int], int]:
    n, total = len(weights), sum(weights)
    f = np.zeros((n + 1, total + 1), dtype=np.int64)
    f[0, 0] = 1
    for w in weights:
        f[1:, w:] = f[1:, w:] + f[:-1, : total + 1 - w]
    winning = _dominance(f, count_thr, thr)
    swings = []
    g = np.empty_like(f)
    for w in weights:
        # divide out (1 + y x**w)
        g[0] = f[0]
        for c in range(1, n + 1):
            g[c] = f[c]
            g[c, w:] -= g[c - 1, : total + 1 - w]
        swings.append(_dominance(g, count_thr - 1, thr - w) - _dominance(g, count_thr, thr))
    return swings, winning


class _Half:
    """Subset sums of a group of members, bucketed by cardinality."""

    def __init__(self, weights: list[int]):
        self.size = len(weights)
        sums = subset_sums(weights)
        cards = subset_sums([1] * len(weights))
        self.by_card = [np.sort(sums[cards == c]) for c in range(self.size + 1)]
        # at_least[c]: sorted sums of subsets with cardinality >= c
        self.at_least = [np.sort(np.concatenate(self.by_card[c:])) for c in range(self.size + 1)]


def _pair_count(a: _Half, b: _Half, min_card: int, min_weight: int) -> int:
    """Number of subset pairs (x from a, y from b) with |x|+|y| >= min_card and w(x)+w(y) >= min_weight."""
    count = 0
    for ca in range(a.size + 1):
        xs = a.by_card[ca]
        need = max(min_card - ca, 0)
        if need > b.size or xs.size == 0:
            continue
        ys = b.at_least[need]
        below = np.searchsorted(ys, min_weight - xs, side="left")
        count += int(ys.size * xs.size - below.sum())
    return count


def _split(weights: tuple[int, ...], count_thr: int, thr: int) -> tuple[list[int], int]:
    n = len(weights)
    mid = n // 2
    winning = _pair_count(_Half(list(weights[:mid])), _Half(list(weights[mid:])), count_thr, thr)
    swings = []
    for i, w in enumerate(weights):
        others = list(weights[:i] + weights[i + 1 :])
        a, b = _Half(others[: (n - 1) // 2]), _Half(others[(n - 1) // 2 :])
        swings.append(_pair_count(a, b, count_thr - 1, thr - w) - _pair_count(a, b, count_thr, thr))
    return swings, winning

