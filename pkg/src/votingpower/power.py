"""Banzhaf power and decision efficiency of a voting rule.

All exact backends produce integer swing counts; indices and efficiency are
kept as :class:`~fractions.Fraction` and only rendered as decimals on output.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .enumeration import default_workers, winning_counts
from .game import MAX_EXACT_MEMBERS, CapacityError, ConfigurationError, Council, VotingRule


class Backend(str, enum.Enum):
    ENUMERATION = "enumeration"
    DP = "dp"
    MONTE_CARLO = "monte_carlo"
    ORACLE = "oracle"


@dataclass(frozen=True)
class PowerReport:
    """Per-member swing counts plus the count of winning coalitions.

    For exact backends ``swings`` are the total Banzhaf counts TB_i over all
    ``2**(n-1)`` coalitions of the other members. For Monte Carlo they count
    sampled coalitions in which the member was decisive, out of ``samples``.
    """

    council: Council
    rule: VotingRule
    backend: Backend
    swings: tuple[int, ...]
    winning: int
    samples: int | None = None
    mc_stderr: tuple[float, ...] | None = None
    beta_stderr: tuple[float, ...] | None = None
    efficiency_stderr: float | None = None

    @property
    def exact(self) -> bool:
        return self.backend is not Backend.MONTE_CARLO

    @property
    def total_banzhaf(self) -> tuple[int, ...] | None:
        return self.swings if self.exact else None

    @property
    def normalized_banzhaf(self) -> tuple[Fraction, ...]:
        trials = 1 << (self.council.n - 1) if self.exact else self.samples
        return tuple(Fraction(s, trials) for s in self.swings)

    @property
    def banzhaf_index(self) -> tuple[Fraction, ...]:
        total = sum(self.swings)
        if total == 0:
            return tuple(Fraction(0) for _ in self.swings)
        return tuple(Fraction(s, total) for s in self.swings)

    @property
    def efficiency(self) -> Fraction:
        space = 1 << self.council.n if self.exact else self.samples
        return Fraction(self.winning, space)

    def beta_of(self, member_id: str) -> Fraction:
        return self.banzhaf_index[self.council.index(member_id)]


def _check_capacity(council: Council, limit: int = MAX_EXACT_MEMBERS, hint: str = "monte_carlo") -> None:
    if council.n > limit:
        raise CapacityError(
            f"exact computation supports at most {limit} members, council has {council.n}; use the {hint} backend"
        )


def banzhaf_enumeration(council: Council, rule: VotingRule, workers: int | None = None) -> PowerReport:
    """Exhaustive evaluation of every coalition."""
    _check_capacity(council)
    compiled = rule.compile(council)
    containing, total = winning_counts(
        [c.weights for c in compiled],
        [c.threshold for c in compiled],
        council.n,
        blocking=rule.blocking_minority_min,
        workers=workers or default_workers(),
    )
    swings = tuple(int(2 * w - total) for w in containing)
    return PowerReport(council, rule, Backend.ENUMERATION, swings, int(total))


def banzhaf_exact(
    council: Council, rule: VotingRule, backend: str = "auto", workers: int | None = None
) -> PowerReport:
    """Exact TB, NB, beta and efficiency.

    ``backend="auto"`` uses the subset-sum DP when the rule is eligible and
    full enumeration otherwise; ``"enumeration"`` or ``"dp"`` force one.
    """
    from .dp import banzhaf_dp, dp_eligible

    _check_capacity(council)
    if backend == "auto":
        backend = "dp" if dp_eligible(council, rule) else "enumeration"
    if backend in ("dp", Backend.DP):
        return banzhaf_dp(council, rule)
    if backend in ("enumeration", "enum", Backend.ENUMERATION):
        return banzhaf_enumeration(council, rule, workers=workers)
    raise ConfigurationError(f"unknown exact backend {backend!r}")


def compute_power(
    council: Council,
    rule: VotingRule,
    backend: str = "auto",
    *,
    samples: int = 1_000_000,
    seed: int = 0,
    workers: int | None = None,
) -> PowerReport:
    """Dispatch to a backend: dp when eligible, else enumeration up to 30 members, else Monte Carlo."""
    from .dp import banzhaf_dp, dp_eligible
    from .montecarlo import banzhaf_monte_carlo

    if backend == "auto":
        if council.n <= MAX_EXACT_MEMBERS and dp_eligible(council, rule):
            return banzhaf_dp(council, rule)
        if council.n <= MAX_EXACT_MEMBERS:
            return banzhaf_enumeration(council, rule, workers=workers)
        return banzhaf_monte_carlo(council, rule, samples, seed, workers=workers)
    if backend in ("enum", "enumeration"):
        return banzhaf_enumeration(council, rule, workers=workers)
    if backend == "dp":
        return banzhaf_dp(council, rule)
    if backend in ("mc", "monte_carlo"):
        return banzhaf_monte_carlo(council, rule, samples, seed, workers=workers)
    raise ConfigurationError(f"unknown backend {backend!r}")
