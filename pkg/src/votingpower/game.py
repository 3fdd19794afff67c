"""Councils, criteria and composite voting rules.

A voting rule is a conjunction of weighted criteria. Every criterion reduces
to an integer weight per member and an integer threshold, so the win test is
exact integer arithmetic throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

MAX_EXACT_MEMBERS = 30

#: Square-root weights are fixed-point decimals with this many fractional digits.
SQRT_DIGITS = 4
SQRT_SCALE = 10**SQRT_DIGITS


class VotingPowerError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(VotingPowerError, ValueError):
    """Invalid council, rule or parameter combination."""


class CapacityError(VotingPowerError, RuntimeError):
    """The requested computation exceeds what a backend can handle."""


def sqrt_weight_units(population: int) -> int:
    """Return sqrt(population) rounded to 4 decimals, scaled to an integer.

    >>> sqrt_weight_units(82221808)
    90676242
    """
    scaled = population * SQRT_SCALE * SQRT_SCALE
    root = math.isqrt(scaled)
    # round half up; an exact tie would need a perfect square plus 1/4
    if 4 * scaled >= (2 * root + 1) ** 2:
        root += 1
    return root


@dataclass(frozen=True)
class MemberState:
    id: str
    name: str
    population: int
    nice_weight: int | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ConfigurationError("member id must be non-empty")
        if isinstance(self.population, bool) or not isinstance(self.population, int):
            raise ConfigurationError(f"member {self.id}: population must be an integer")
        if self.population < 1:
            raise ConfigurationError(f"member {self.id}: population must be >= 1, got {self.population}")
        if self.nice_weight is not None and self.nice_weight < 0:
            raise ConfigurationError(f"member {self.id}: nice_weight must be >= 0, got {self.nice_weight}")


@dataclass(frozen=True)
class Council:
    """An ordered, immutable list of members. Member order defines bit positions."""

    members: tuple[MemberState, ...]
    total_population: int = field(init=False)
    total_nice_weight: int | None = field(init=False)

    def __post_init__(self) -> None:
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ConfigurationError("a council needs at least one member")
        seen: set[str] = set()
        for m in members:
            if m.id in seen:
                raise ConfigurationError(f"duplicate member id {m.id!r}")
            seen.add(m.id)
        object.__setattr__(self, "total_population", sum(m.population for m in members))
        if all(m.nice_weight is not None for m in members):
            total_w: int | None = sum(m.nice_weight for m in members)  # type: ignore[misc]
        else:
            total_w = None
        object.__setattr__(self, "total_nice_weight", total_w)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return len(self.members)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.members)

    def index(self, member_id: str) -> int:
        for i, m in enumerate(self.members):
            if m.id == member_id:
                return i
        raise KeyError(member_id)

    def coalition(self, members: Iterable[str | int]) -> int:
        """Bitmask for a collection of member ids or indices."""
        mask = 0
        for m in members:
            i = self.index(m) if isinstance(m, str) else int(m)
            if not 0 <= i < self.n:
                raise IndexError(f"member index {i} out of range")
            mask |= 1 << i
        return mask

    @property
    def grand_coalition(self) -> int:
        return (1 << self.n) - 1


class CriterionKind(str, enum.Enum):
    MEMBER_COUNT = "member_count"
    NEGOTIATED_WEIGHT = "negotiated_weight"
    POPULATION = "population"
    SQRT_WEIGHT = "sqrt_weight"


def member_weights(council: Council, kind: CriterionKind) -> tuple[int, ...]:
    """Integer per-member weights that a criterion of ``kind`` sums over."""
    if kind is CriterionKind.MEMBER_COUNT:
        return (1,) * council.n
    if kind is CriterionKind.POPULATION:
        return tuple(m.population for m in council.members)
    if kind is CriterionKind.SQRT_WEIGHT:
        return tuple(sqrt_weight_units(m.population) for m in council.members)
    missing = [m.id for m in council.members if m.nice_weight is None]
    if missing:
        raise ConfigurationError(f"member {missing[0]} has no negotiated weight")
    return tuple(m.nice_weight for m in council.members)  # type: ignore[misc]


@dataclass(frozen=True)
class Criterion:
    """One weighted condition, either ``sum >= threshold`` or ``sum >= quota * total``."""

    kind: CriterionKind
    quota: Fraction | None = None
    threshold: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", CriterionKind(self.kind))
        if (self.quota is None) == (self.threshold is None):
            raise ConfigurationError("a criterion takes exactly one of quota or threshold")
        if self.quota is not None:
            q = Fraction(self.quota)
            if not 0 < q <= 1:
                raise ConfigurationError(f"relative quota must lie in (0, 1], got {q}")
            object.__setattr__(self, "quota", q)
        elif self.threshold < 0:  # type: ignore[operator]
            raise ConfigurationError(f"absolute threshold must be >= 0, got {self.threshold}")

    def weights(self, council: Council) -> tuple[int, ...]:
        return member_weights(council, self.kind)

    def absolute_threshold(self, council: Council) -> int:
        """Smallest integer sum that satisfies the criterion.

        For the relative form ``s * den >= num * total`` this is
        ``ceil(num * total / den)``, which is equivalent for integer ``s``.
        """
        if self.threshold is not None:
            return self.threshold
        total = sum(self.weights(council))
        q = self.quota
        return -((-q.numerator * total) // q.denominator)  # type: ignore[union-attr]

    def satisfied(self, total_sum: int, grand_total: int) -> bool:
        if self.threshold is not None:
            return total_sum >= self.threshold
        q = self.quota
        return total_sum * q.denominator >= q.numerator * grand_total  # type: ignore[union-attr]

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.quota is not None:
            d["quota"] = {"num": self.quota.numerator, "den": self.quota.denominator}
        else:
            d["threshold"] = self.threshold
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Criterion":
        try:
            kind = CriterionKind(d["kind"])
        except (KeyError, ValueError) as exc:
            raise ConfigurationError(f"bad criterion kind in {d!r}") from exc
        try:
            if "quota" in d and d["quota"] is not None:
                q = d["quota"]
                # {"num": .., "den": ..} as written by to_dict, or a string such as "0.65" or "13/20"
                quota = Fraction(int(q["num"]), int(q["den"])) if isinstance(q, dict) else parse_quota(q)
                return cls(kind, quota=quota)
            if "threshold" in d:
                return cls(kind, threshold=int(d["threshold"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad criterion {d!r}") from exc
        raise ConfigurationError(f"criterion {d!r} has neither quota nor threshold")


@dataclass(frozen=True)
class CompiledCriterion:
    """A criterion resolved against a council: integer weights and threshold."""

    kind: CriterionKind
    weights: tuple[int, ...]
    threshold: int


@dataclass(frozen=True)
class VotingRule:
    criteria: tuple[Criterion, ...]
    blocking_minority_min: int | None = None
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "criteria", tuple(self.criteria))
        if not self.criteria:
            raise ConfigurationError("a voting rule needs at least one criterion")
        if self.blocking_minority_min is not None and self.blocking_minority_min < 1:
            raise ConfigurationError("blocking_minority_min must be >= 1")

    def compile(self, council: Council) -> tuple[CompiledCriterion, ...]:
        return tuple(
            CompiledCriterion(c.kind, c.weights(council), c.absolute_threshold(council))
            for c in self.criteria
        )

    def wins(self, council: Council, coalition: int) -> bool:
        """Exact win test for a coalition bitmask over ``council``."""
        if coalition < 0 or coalition >> council.n:
            raise ValueError("coalition is not a subset of the council")
        members = [i for i in range(council.n) if coalition >> i & 1]
        ok = True
        for c in self.criteria:
            w = c.weights(council)
            if not c.satisfied(sum(w[i] for i in members), sum(w)):
                ok = False
                break
        if not ok and self.blocking_minority_min is not None:
            ok = council.n - len(members) < self.blocking_minority_min
        return ok

    def to_dict(self) -> dict:
        return {
            "criteria": [c.to_dict() for c in self.criteria],
            "blocking_minority_min": self.blocking_minority_min,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VotingRule":
        if not isinstance(d, dict) or not isinstance(d.get("criteria"), list):
            raise ConfigurationError("rule definition needs a 'criteria' list")
        return cls(
            tuple(Criterion.from_dict(c) for c in d["criteria"]),
            d.get("blocking_minority_min"),
            d.get("label", ""),
        )


def wins(council: Council, rule: VotingRule, coalition: int) -> bool:
    return rule.wins(council, coalition)


def _check_pop_quota(pop_quota: Fraction) -> Fraction:
    q = Fraction(pop_quota)
    if not 0 < q <= 1:
        raise ConfigurationError(f"population quota must lie in (0, 1], got {q}")
    return q


def _check_count_quota(count_quota: int) -> None:
    if count_quota < 1:
        raise ConfigurationError(f"count quota must be >= 1, got {count_quota}")


def make_nice_rule(council: Council, weight_quota: int, count_quota: int, pop_quota: Fraction) -> VotingRule:
    """Triple majority: negotiated weights, member count and population."""
    missing = [m.id for m in council.members if m.nice_weight is None]
    if missing:
        raise ConfigurationError(f"member {missing[0]} has no negotiated weight; the Nice rule needs one for every member")
    _check_count_quota(count_quota)
    q = _check_pop_quota(pop_quota)
    return VotingRule(
        (
            Criterion(CriterionKind.NEGOTIATED_WEIGHT, threshold=weight_quota),
            Criterion(CriterionKind.MEMBER_COUNT, threshold=count_quota),
            Criterion(CriterionKind.POPULATION, quota=q),
        ),
        label=f"nice {count_quota}/{weight_quota}/{format_quota(q)}",
    )


def make_lisbon_rule(
    council: Council, count_quota: int, pop_quota: Fraction, with_blocking_clause: bool = False
) -> VotingRule:
    """Double majority of member states and population."""
    _check_count_quota(count_quota)
    q = _check_pop_quota(pop_quota)
    return VotingRule(
        (
            Criterion(CriterionKind.MEMBER_COUNT, threshold=count_quota),
            Criterion(CriterionKind.POPULATION, quota=q),
        ),
        blocking_minority_min=4 if with_blocking_clause else None,
        label=f"lisbon {count_quota}/{format_quota(q)}" + (" +blocking" if with_blocking_clause else ""),
    )


def make_jc_rule(council: Council, pop_quota: Fraction, with_count_majority: bool = False) -> VotingRule:
    """Square-root weights at a single quota; optionally plus a simple majority of members."""
    q = _check_pop_quota(pop_quota)
    criteria = [Criterion(CriterionKind.SQRT_WEIGHT, quota=q)]
    if with_count_majority:
        criteria.append(Criterion(CriterionKind.MEMBER_COUNT, threshold=council.n // 2 + 1))
    name = "jc+" if with_count_majority else "jc"
    return VotingRule(tuple(criteria), label=f"{name} {format_quota(q)}")


def format_quota(q: Fraction) -> str:
    """Render a fractional quota as a short decimal, e.g. 31/40 -> '0.775'."""
    if 10**12 % q.denominator:
        return f"{float(q):.6g}"
    digits = 0
    while (q * 10**digits).denominator != 1:
        digits += 1
    return f"{float(q):.{max(digits, 2)}f}"


def parse_quota(text: str | float | Fraction) -> Fraction:
    """Parse a decimal fraction exactly: '0.775' -> Fraction(31, 40)."""
    if isinstance(text, Fraction):
        return text
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"cannot parse quota {text!r}") from exc


def coalition_members(mask: int, n: int) -> Sequence[int]:
    return [i for i in range(n) if mask >> i & 1]
