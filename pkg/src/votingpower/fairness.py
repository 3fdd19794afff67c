"""Deviation of a power distribution from the square-root ideal."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .game import ConfigurationError, Council, sqrt_weight_units
from .power import PowerReport


@dataclass(frozen=True)
class FairnessAssessment:
    member_ids: tuple[str, ...]
    ideal: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]
    error_rate_sigma2: Fraction
    max_relative_deviation: Fraction
    max_deviation_member: str

    @property
    def relative_deviations(self) -> tuple[Fraction, ...]:
        """Signed (ideal - beta) / ideal per member."""
        return tuple((b0 - b) / b0 for b0, b in zip(self.ideal, self.beta))

    @property
    def error_rate_permille(self) -> float:
        return float(self.error_rate_sigma2 * 1000)

    @property
    def max_deviation_percent(self) -> float:
        return float(self.max_relative_deviation * 100)


def ideal_distribution(council: Council) -> tuple[Fraction, ...]:
    """Square-root shares from 4-digit rounded square roots, summing to exactly 1."""
    roots = [sqrt_weight_units(m.population) for m in council.members]
    total = sum(roots)
    return tuple(Fraction(r, total) for r in roots)


def _beta(report_or_beta: PowerReport | Sequence[Fraction]) -> tuple[Fraction, ...]:
    if isinstance(report_or_beta, PowerReport):
        return report_or_beta.banzhaf_index
    return tuple(Fraction(b) for b in report_or_beta)


def _check_sizes(beta: Sequence, ideal: Sequence) -> None:
    if len(beta) != len(ideal):
        raise ConfigurationError(f"member sets differ: {len(beta)} power values vs {len(ideal)} ideal values")


def error_rate(report: PowerReport | Sequence[Fraction], ideal: Sequence[Fraction]) -> Fraction:
    """Sum of squared differences between ideal and actual Banzhaf indices (as fractions, not percent)."""
    beta = _beta(report)
    _check_sizes(beta, ideal)
    return sum(((b0 - b) ** 2 for b0, b in zip(ideal, beta)), Fraction(0))


def max_relative_deviation(
    report: PowerReport | Sequence[Fraction], ideal: Sequence[Fraction], member_ids: Sequence[str] | None = None
) -> tuple[Fraction, str | int]:
    """Largest ``|ideal_i - beta_i| / ideal_i`` and the member attaining it (first on ties)."""
    beta = _beta(report)
    _check_sizes(beta, ideal)
    if member_ids is None:
        member_ids = report.council.ids if isinstance(report, PowerReport) else list(range(len(beta)))
    best, arg = Fraction(-1), member_ids[0]
    for mid, b0, b in zip(member_ids, ideal, beta):
        if b0 <= 0:
            raise ConfigurationError(f"ideal share of {mid} must be positive")
        dev = abs(b0 - b) / b0
        if dev > best:
            best, arg = dev, mid
    return best, arg


def assess(report: PowerReport, ideal: Sequence[Fraction] | None = None) -> FairnessAssessment:
    if ideal is None:
        ideal = ideal_distribution(report.council)
    ideal = tuple(ideal)
    beta = report.banzhaf_index
    dev, who = max_relative_deviation(beta, ideal, report.council.ids)
    return FairnessAssessment(report.council.ids, ideal, beta, error_rate(beta, ideal), dev, str(who))


def sz_quota(council: Council) -> float:
    """Closed-form approximation of the optimal single-criterion quota for square-root weights.

    ``(1 + sqrt(sum N) / sum sqrt(N)) / 2``, from the raw populations.
    """
    pops = [m.population for m in council.members]
    return 0.5 * (1 + math.sqrt(math.fsum(pops)) / math.fsum(math.sqrt(p) for p in pops))
