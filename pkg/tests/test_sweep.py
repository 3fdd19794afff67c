from __future__ import annotations

import random
from fractions import Fraction

import pytest

from votingpower import SweepGrid, assess, banzhaf_exact, optimize_error, optimize_with_efficiency_floor, run_sweep, slice_optima
from votingpower.game import ConfigurationError, Council
from votingpower.sweep import NoFeasibleTupleError, family_rule, fraction_range, plot_series

from .conftest import council_of


def random_council(seed: int, n: int = 9) -> Council:
    rng = random.Random(seed)
    return council_of([rng.randint(1, 10**6) for _ in range(n)], [rng.randint(1, 30) for _ in range(n)])


def test_fraction_range_is_exact_and_inclusive():
    r = fraction_range("0.51", "0.53", "0.001")
    assert len(r) == 21 and r[0] == Fraction(51, 100) and r[-1] == Fraction(53, 100)
    with pytest.raises(ConfigurationError):
        fraction_range("0.6", "0.5", "0.01")


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        SweepGrid("nice", (3,), None, ("0.6",))
    with pytest.raises(ConfigurationError):
        SweepGrid("jc", (), (10,), ("0.6",))
    with pytest.raises(ConfigurationError):
        SweepGrid("lisbon", (), None, ("0.6",))
    with pytest.raises(ConfigurationError):
        SweepGrid("jc", (), None, ())
    with pytest.raises(ConfigurationError):
        SweepGrid("jc", (), None, ("1.2",))
    with pytest.raises(ConfigurationError):
        SweepGrid("council", (), None, ("0.6",))
    assert len(SweepGrid.nice_default()) == 86 * 35
    assert len(SweepGrid.lisbon_default()) == 5 * 341
    assert len(SweepGrid.jc_default()) == 341


@pytest.mark.parametrize("family", ["nice", "lisbon", "jc"])
def test_single_tuple_grid_matches_direct_analysis(family):
    c = random_council(1)
    count = None if family == "jc" else 5
    weight = 60 if family == "nice" else None
    grid = SweepGrid(family, () if count is None else (count,), None if weight is None else (weight,), ("0.62",))
    (row,) = run_sweep(c, grid, workers=1).rows
    report = banzhaf_exact(c, family_rule(c, family, (count, weight, Fraction(62, 100))))
    a = assess(report)
    assert row.swings == report.swings and row.winning == report.winning
    assert row.error_rate == a.error_rate_sigma2
    assert row.max_deviation == a.max_relative_deviation


@pytest.mark.parametrize("seed", [2, 3])
def test_shared_equals_per_tuple(seed):
    c = random_council(seed, n=10)
    grid = SweepGrid("nice", (3, 5, 7), (40, 55, 55, 70), fraction_range("0.5", "0.8", "0.05"))
    shared = run_sweep(c, grid, mode="shared", workers=1)
    per = run_sweep(c, grid, mode="per_tuple", workers=1)
    assert shared == per
    assert [r.quota for r in shared.rows] == grid.tuples()


def test_jc_with_count_dimension():
    c = random_council(4)
    grid = SweepGrid("jc", (1, 5), None, ("0.55", "0.7"))
    assert run_sweep(c, grid, workers=1) == run_sweep(c, grid, mode="per_tuple", workers=1)


def test_decomposes_into_single_tuple_runs():
    c = random_council(5, n=8)
    grid = SweepGrid("lisbon", (3, 4), None, fraction_range("0.55", "0.75", "0.05"))
    whole = run_sweep(c, grid, workers=1)
    for row in whole.rows:
        alone = run_sweep(c, SweepGrid("lisbon", (row.count,), None, (row.pop,)), workers=1)
        assert alone.rows == (row,)


def test_efficiency_is_monotone_along_each_dimension():
    c = random_council(6)
    grid = SweepGrid("nice", (2, 4, 6), (30, 50, 70), fraction_range("0.5", "0.9", "0.1"))
    res = run_sweep(c, grid, workers=1)
    for row in res.rows:
        for other in res.rows:
            if all(a <= b for a, b in zip(other.quota, row.quota)):
                assert other.efficiency >= row.efficiency


def test_rows_are_invariant_under_member_reordering():
    c = random_council(7)
    grid = SweepGrid("lisbon", (4,), None, ("0.6", "0.7"))
    a = run_sweep(c, grid, workers=1)
    b = run_sweep(Council(tuple(reversed(c.members))), grid, workers=1)
    for ra, rb in zip(a.rows, b.rows):
        assert rb.swings == tuple(reversed(ra.swings))
        assert (ra.error_rate, ra.winning, ra.max_deviation) == (rb.error_rate, rb.winning, rb.max_deviation)


def test_optimisers():
    c = random_council(8)
    res = run_sweep(c, SweepGrid("lisbon", (3, 4, 5), None, fraction_range("0.5", "0.8", "0.02")), workers=1)
    best = optimize_error(res)
    assert best == res.argmin_error
    assert all(best.error_rate <= r.error_rate for r in res.rows)
    assert optimize_with_efficiency_floor(res, 0) == best
    floor = Fraction(1, 5)
    chosen = optimize_with_efficiency_floor(res, floor)
    assert chosen.efficiency >= floor
    assert all(chosen.error_rate <= r.error_rate for r in res.rows if r.efficiency >= floor)
    with pytest.raises(NoFeasibleTupleError):
        optimize_with_efficiency_floor(res, "0.99")
    with pytest.raises(ConfigurationError):
        optimize_with_efficiency_floor(res, "1.5")
    with pytest.raises(ConfigurationError):
        optimize_error([])


def test_slice_optima():
    c = random_council(9)
    res = run_sweep(c, SweepGrid("lisbon", (3, 4, 5), None, fraction_range("0.5", "0.8", "0.05")), workers=1)
    per_count = slice_optima(res, {"count": None})
    assert [r.count for r in per_count] == [3, 4, 5]
    for r in per_count:
        assert all(r.error_rate <= o.error_rate for o in res.rows if o.count == r.count)
    (only,) = slice_optima(res, {"count": 4})
    assert only == per_count[1]
    per_pop = slice_optima(res, {"pop": "0.6"})
    assert len(per_pop) == 1 and per_pop[0].pop == Fraction(3, 5)
    with pytest.raises(ConfigurationError):
        slice_optima(res, {"colour": None})


def test_plot_series_groups_by_slice():
    c = random_council(10)
    res = run_sweep(c, SweepGrid("lisbon", (3, 4), None, ("0.6", "0.7")), workers=1)
    series = plot_series(res, lambda r: r.efficiency_percent)
    assert sorted(series) == ["3", "4"] and len(series["3"]) == 2


def test_nice_grid_needs_negotiated_weights():
    c = council_of([1, 2, 3])
    with pytest.raises(ConfigurationError):
        run_sweep(c, SweepGrid("nice", (2,), (3,), ("0.6",)), workers=1)


def test_unknown_mode():
    with pytest.raises(ConfigurationError):
        run_sweep(random_council(1), SweepGrid("jc", (), None, ("0.6",)), mode="fast", workers=1)


@pytest.mark.slow
def test_nice_slice_at_weight_200(nice_sweep):
    # the least-error population quota for weight quota 200 is 0.57
    (row,) = slice_optima(nice_sweep, {"count": 14, "weight": 200})
    assert row.pop == Fraction(57, 100)
    assert round(row.sigma2_permille, 4) == 0.3388
