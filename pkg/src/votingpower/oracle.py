"""Naive reference implementation used to cross-check the fast backends.

Deliberately shares nothing with the enumeration, DP or Monte Carlo code: it
walks every subset, sums weights member by member and applies each
criterion's exact fractional comparison.
"""

from __future__ import annotations

from .game import CapacityError, Council, VotingRule
from .power import Backend, PowerReport

ORACLE_MAX_MEMBERS = 15


def brute_force_oracle(council: Council, rule: VotingRule) -> PowerReport:
    n = council.n
    if n > ORACLE_MAX_MEMBERS:
        raise CapacityError(f"the brute-force oracle supports at most {ORACLE_MAX_MEMBERS} members, got {n}")
    tables = [(c, c.weights(council)) for c in rule.criteria]
    grand = [sum(w) for _, w in tables]

    def wins(mask: int) -> bool:
        members = [j for j in range(n) if mask & (1 << j)]
        for (criterion, w), total in zip(tables, grand):
            if not criterion.satisfied(sum(w[j] for j in members), total):
                break
        else:
            return True
        if rule.blocking_minority_min is not None:
            return n - len(members) < rule.blocking_minority_min
        return False

    outcome = [wins(mask) for mask in range(1 << n)]
    swings = []
    for i in range(n):
        bit = 1 << i
        tb = 0
        for mask in range(1 << n):
            if mask & bit:
                continue
            if outcome[mask | bit] and not outcome[mask]:
                tb += 1
        swings.append(tb)
    return PowerReport(council, rule, Backend.ORACLE, tuple(swings), sum(outcome))
