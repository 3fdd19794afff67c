"""Quota grids for the nice, lisbon and jc rule families.

A sweep evaluates error rate, maximal relative deviation and efficiency at
every tuple of a grid. The default ``shared`` mode makes one pass over all
coalitions for the whole grid (see :func:`~votingpower.enumeration.grid_winning_counts`);
``per_tuple`` recomputes each rule independently and exists mainly as a
cross-check.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .enumeration import ProgressFn, default_workers, grid_winning_counts
from .fairness import error_rate, ideal_distribution, max_relative_deviation
from .game import (
    ConfigurationError,
    Council,
    Criterion,
    CriterionKind,
    VotingPowerError,
    VotingRule,
    format_quota,
    make_lisbon_rule,
    make_nice_rule,
    member_weights,
    parse_quota,
)
from .power import banzhaf_exact

FAMILIES = ("nice", "lisbon", "jc")
DIMENSIONS = ("count", "weight", "pop")

#: (count quota or None, weight quota or None, population quota)
QuotaTuple = tuple


class NoFeasibleTupleError(VotingPowerError):
    """No grid row satisfies the requested efficiency floor."""


def fraction_range(lo: Fraction | str, hi: Fraction | str, step: Fraction | str) -> tuple[Fraction, ...]:
    """Inclusive exact range ``lo, lo+step, ..., <= hi``."""
    lo, hi, step = parse_quota(lo), parse_quota(hi), parse_quota(step)
    if step <= 0:
        raise ConfigurationError("range step must be positive")
    if hi < lo:
        raise ConfigurationError(f"empty range {lo}:{hi}")
    count = int((hi - lo) / step) + 1
    return tuple(lo + i * step for i in range(count))


@dataclass(frozen=True)
class SweepGrid:
    family: str
    count_quotas: tuple[int, ...] = ()
    weight_quotas: tuple[int, ...] | None = None
    pop_quotas: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown rule family {self.family!r}; expected one of {FAMILIES}")
        counts = tuple(sorted(set(int(c) for c in self.count_quotas)))
        pops = tuple(sorted(set(parse_quota(p) for p in self.pop_quotas)))
        weights = None if self.weight_quotas is None else tuple(sorted(set(int(w) for w in self.weight_quotas)))
        if not pops:
            raise ConfigurationError("population quota range is empty")
        if any(not 0 < p <= 1 for p in pops):
            raise ConfigurationError("population quotas must lie in (0, 1]")
        if any(c < 1 for c in counts):
            raise ConfigurationError("count quotas must be >= 1")
        if self.family == "nice":
            if not weights:
                raise ConfigurationError("a nice grid needs weight quotas")
            if not counts:
                raise ConfigurationError("a nice grid needs count quotas")
        elif weights is not None:
            raise ConfigurationError(f"weight quotas only apply to the nice family, not {self.family}")
        if self.family == "lisbon" and not counts:
            raise ConfigurationError("a lisbon grid needs count quotas")
        object.__setattr__(self, "count_quotas", counts)
        object.__setattr__(self, "weight_quotas", weights)
        object.__setattr__(self, "pop_quotas", pops)

    @property
    def counts_or_none(self) -> tuple[int | None, ...]:
        return self.count_quotas or (None,)

    @property
    def weights_or_none(self) -> tuple[int | None, ...]:
        return self.weight_quotas or (None,)

    def tuples(self) -> list[QuotaTuple]:
        return list(itertools.product(self.counts_or_none, self.weights_or_none, self.pop_quotas))

    def __len__(self) -> int:
        return len(self.counts_or_none) * len(self.weights_or_none) * len(self.pop_quotas)

    def rule(self, council: Council, quota: QuotaTuple) -> VotingRule:
        return family_rule(council, self.family, quota)

    @classmethod
    def nice_default(cls) -> "SweepGrid":
        return cls("nice", (14,), tuple(range(190, 276)), fraction_range("0.51", "0.85", "0.01"))

    @classmethod
    def lisbon_default(cls) -> "SweepGrid":
        return cls("lisbon", tuple(range(14, 19)), None, fraction_range("0.51", "0.85", "0.001"))

    @classmethod
    def jc_default(cls) -> "SweepGrid":
        return cls("jc", (), None, fraction_range("0.51", "0.85", "0.001"))


def family_rule(council: Council, family: str, quota: QuotaTuple) -> VotingRule:
    count, weight, pop = quota
    if family == "nice":
        return make_nice_rule(council, weight, count, pop)
    if family == "lisbon":
        return make_lisbon_rule(council, count, pop)
    if family == "jc":
        criteria = [Criterion(CriterionKind.SQRT_WEIGHT, quota=pop)]
        if count is not None:
            criteria.append(Criterion(CriterionKind.MEMBER_COUNT, threshold=count))
        return VotingRule(tuple(criteria), label=f"jc {format_quota(pop)}" + (f" count {count}" if count else ""))
    raise ConfigurationError(f"unknown rule family {family!r}")


@dataclass(frozen=True)
class SweepRow:
    quota: QuotaTuple
    swings: tuple[int, ...]
    winning: int
    n: int
    error_rate: Fraction
    max_deviation: Fraction
    max_deviation_member: str

    @property
    def count(self) -> int | None:
        return self.quota[0]

    @property
    def weight(self) -> int | None:
        return self.quota[1]

    @property
    def pop(self) -> Fraction:
        return self.quota[2]

    @property
    def efficiency(self) -> Fraction:
        return Fraction(self.winning, 1 << self.n)

    @property
    def sigma2_permille(self) -> float:
        return float(self.error_rate * 1000)

    @property
    def max_deviation_percent(self) -> float:
        return float(self.max_deviation * 100)

    @property
    def efficiency_percent(self) -> float:
        return float(self.efficiency * 100)

    @property
    def banzhaf_index(self) -> tuple[Fraction, ...]:
        total = sum(self.swings)
        return tuple(Fraction(s, total) if total else Fraction(0) for s in self.swings)


def _tuple_key(quota: QuotaTuple) -> tuple:
    return tuple(-1 if q is None else q for q in quota)


def _selection_key(row: SweepRow) -> tuple:
    # least error, then higher efficiency, then smaller tuple
    return (row.error_rate, -row.winning, _tuple_key(row.quota))


@dataclass(frozen=True)
class SweepResult:
    family: str
    member_ids: tuple[str, ...]
    rows: tuple[SweepRow, ...]
    _index: dict = field(default=None, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {r.quota: r for r in self.rows})

    def row(self, count: int | None = None, weight: int | None = None, pop: Fraction | str | None = None) -> SweepRow:
        key = (count, weight, parse_quota(pop) if pop is not None else None)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"tuple {key} is not part of the sweep") from None

    @property
    def argmin_error(self) -> SweepRow:
        return optimize_error(self)


def _make_row(quota: QuotaTuple, swings: Sequence[int], winning: int, ideal, ids) -> SweepRow:
    swings = tuple(int(s) for s in swings)
    total = sum(swings)
    beta = [Fraction(s, total) if total else Fraction(0) for s in swings]
    dev, who = max_relative_deviation(beta, ideal, ids)
    return SweepRow(quota, swings, int(winning), len(ids), error_rate(beta, ideal), dev, str(who))


def _grid_dimensions(council: Council, grid: SweepGrid):
    """Criterion weights and ascending absolute thresholds for each grid axis."""
    dims = []
    if grid.count_quotas:
        dims.append(("count", (1,) * council.n, grid.count_quotas))
    if grid.family == "nice":
        dims.append(("weight", member_weights(council, CriterionKind.NEGOTIATED_WEIGHT), grid.weight_quotas))
    kind = CriterionKind.SQRT_WEIGHT if grid.family == "jc" else CriterionKind.POPULATION
    pop_weights = member_weights(council, kind)
    total = sum(pop_weights)
    pop_thresholds = tuple(-((-p.numerator * total) // p.denominator) for p in grid.pop_quotas)
    dims.append(("pop", pop_weights, pop_thresholds))
    return dims


def run_sweep(
    council: Council,
    grid: SweepGrid,
    mode: str = "shared",
    workers: int | None = None,
    progress: ProgressFn | None = None,
) -> SweepResult:
    """Evaluate every tuple of ``grid``; rows come back in ascending tuple order."""
    if grid.family == "nice":
        member_weights(council, CriterionKind.NEGOTIATED_WEIGHT)  # fail early on missing weights
    workers = workers or default_workers()
    ideal = ideal_distribution(council)
    ids = council.ids
    rows = []
    if mode == "per_tuple":
        quotas = grid.tuples()
        for done, quota in enumerate(quotas, 1):
            report = banzhaf_exact(council, grid.rule(council, quota), workers=workers)
            rows.append(_make_row(quota, report.swings, report.winning, ideal, ids))
            if progress is not None:
                progress(done, len(quotas))
    elif mode == "shared":
        dims = _grid_dimensions(council, grid)
        total, containing = grid_winning_counts(
            [d[1] for d in dims], [d[2] for d in dims], council.n, workers=workers, progress=progress
        )
        axes = {name: i for i, (name, _, _) in enumerate(dims)}
        positions = {
            "count": {c: i for i, c in enumerate(grid.count_quotas)},
            "weight": {w: i for i, w in enumerate(grid.weight_quotas or ())},
            "pop": {p: i for i, p in enumerate(grid.pop_quotas)},
        }
        for quota in grid.tuples():
            index = [0] * len(dims)
            for name, value in zip(DIMENSIONS, quota):
                if name in axes:
                    index[axes[name]] = positions[name][value]
            w = int(total[tuple(index)])
            swings = 2 * containing[(slice(None),) + tuple(index)] - w
            rows.append(_make_row(quota, swings, w, ideal, ids))
    else:
        raise ConfigurationError(f"unknown sweep mode {mode!r}")
    rows.sort(key=lambda r: _tuple_key(r.quota))
    return SweepResult(grid.family, ids, tuple(rows))


def optimize_error(result: SweepResult | Iterable[SweepRow]) -> SweepRow:
    """Row with the least error rate; ties go to higher efficiency, then the smaller tuple."""
    rows = list(result.rows if isinstance(result, SweepResult) else result)
    if not rows:
        raise ConfigurationError("cannot optimise an empty sweep")
    return min(rows, key=_selection_key)


def optimize_with_efficiency_floor(result: SweepResult, min_efficiency: Fraction | float | str) -> SweepRow:
    """Least-error row among those whose efficiency is at least ``min_efficiency`` (a fraction, not percent)."""
    floor = parse_quota(min_efficiency)
    if not 0 <= floor <= 1:
        raise ConfigurationError(f"efficiency floor must lie in [0, 1], got {floor}")
    if not result.rows:
        raise ConfigurationError("cannot optimise an empty sweep")
    feasible = [r for r in result.rows if r.efficiency >= floor]
    if not feasible:
        best = max(r.efficiency for r in result.rows)
        raise NoFeasibleTupleError(
            f"no tuple reaches efficiency {float(floor) * 100:.2f}%; the sweep's maximum is {float(best) * 100:.2f}%"
        )
    return optimize_error(feasible)


def slice_optima(result: SweepResult, fixed: Mapping[str, object]) -> list[SweepRow]:
    """Least-error row within each slice of the grid.

    ``fixed`` names the slice dimensions (``count``, ``weight``, ``pop``). A
    concrete value restricts the slice to it; ``None`` gives one slice per
    value of that dimension. The remaining dimensions are optimised over.
    ``slice_optima(r, {"count": None, "weight": None})`` yields one row per
    (count, weight) pair, the layout of the appendix tables.
    """
    unknown = set(fixed) - set(DIMENSIONS)
    if unknown:
        raise ConfigurationError(f"unknown slice dimension(s) {sorted(unknown)}")
    wanted = {k: (parse_quota(v) if k == "pop" and v is not None else v) for k, v in fixed.items()}
    groups: dict[tuple, list[SweepRow]] = defaultdict(list)
    for row in result.rows:
        values = dict(zip(DIMENSIONS, row.quota))
        if any(v is not None and values[k] != v for k, v in wanted.items()):
            continue
        groups[tuple(values[k] for k in DIMENSIONS if k in wanted)].append(row)
    return [optimize_error(groups[k]) for k in sorted(groups, key=_tuple_key)]


def plot_series(result: SweepResult, metric: Callable[[SweepRow], float]) -> dict[str, list[tuple[Fraction, float]]]:
    """``metric`` against population quota, one series per (count, weight) slice."""
    series: dict[str, list[tuple[Fraction, float]]] = defaultdict(list)
    for row in result.rows:
        label = "/".join(str(v) for v in row.quota[:2] if v is not None) or result.family
        series[label].append((row.pop, metric(row)))
    return dict(series)
