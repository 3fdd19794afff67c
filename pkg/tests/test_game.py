from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from votingpower.game import (
    ConfigurationError,
    Council,
    Criterion,
    CriterionKind,
    MemberState,
    VotingRule,
    make_jc_rule,
    make_lisbon_rule,
    make_nice_rule,
    parse_quota,
    sqrt_weight_units,
    wins,
)

from .conftest import council_of


def test_member_validation():
    with pytest.raises(ConfigurationError):
        MemberState("X", "x", 0)
    with pytest.raises(ConfigurationError):
        MemberState("X", "x", 10, -1)
    with pytest.raises(ConfigurationError, match="duplicate"):
        Council((MemberState("A", "a", 1), MemberState("A", "b", 2)))
    with pytest.raises(ConfigurationError):
        Council(())


def test_council_totals(eu27):
    assert eu27.n == 27
    assert eu27.total_population == 497_481_657
    assert eu27.total_nice_weight == 345
    assert council_of([3, 4]).total_nice_weight is None


@pytest.mark.parametrize(
    "population, printed",
    [
        (82_221_808, "9067.6242"),
        (63_753_140, "7984.5563"),
        (410_584, "640.7683"),
        (4, "2.0000"),
        (1, "1.0000"),
    ],
)
def test_sqrt_weight_units(population, printed):
    assert sqrt_weight_units(population) == int(printed.replace(".", ""))


@given(st.integers(min_value=1, max_value=10**12))
def test_sqrt_weight_units_is_nearest(population):
    units = sqrt_weight_units(population)
    exact = math.sqrt(population) * 10**4
    assert abs(units - exact) <= 0.5 + 1e-6 * exact


def test_criterion_needs_exactly_one_form():
    with pytest.raises(ConfigurationError):
        Criterion(CriterionKind.POPULATION)
    with pytest.raises(ConfigurationError):
        Criterion(CriterionKind.POPULATION, quota=Fraction(1, 2), threshold=3)
    with pytest.raises(ConfigurationError):
        Criterion(CriterionKind.POPULATION, quota=Fraction(0))
    with pytest.raises(ConfigurationError):
        Criterion(CriterionKind.POPULATION, quota=Fraction(11, 10))


def test_relative_threshold_is_ceiling():
    c = council_of([1, 1, 1])
    crit = Criterion(CriterionKind.POPULATION, quota=Fraction(1, 2))
    # 3 * 1/2 = 1.5 -> need 2
    assert crit.absolute_threshold(c) == 2
    crit = Criterion(CriterionKind.POPULATION, quota=Fraction(2, 3))
    assert crit.absolute_threshold(c) == 2  # inclusive


def test_nice_rule_shape(eu27):
    rule = make_nice_rule(eu27, 255, 14, Fraction(62, 100))
    kinds = [c.kind for c in rule.criteria]
    assert kinds == [CriterionKind.NEGOTIATED_WEIGHT, CriterionKind.MEMBER_COUNT, CriterionKind.POPULATION]
    assert rule.criteria[0].threshold == 255
    assert rule.criteria[2].quota == Fraction(31, 50)


def test_nice_rule_needs_weights():
    c = Council((MemberState("A", "a", 5, 3), MemberState("B", "b", 5)))
    with pytest.raises(ConfigurationError, match="B"):
        make_nice_rule(c, 3, 1, Fraction(1, 2))


@pytest.mark.parametrize("bad", [Fraction(0), Fraction(3, 2)])
def test_rule_builders_reject_bad_quota(eu27, bad):
    with pytest.raises(ConfigurationError):
        make_lisbon_rule(eu27, 15, bad)
    with pytest.raises(ConfigurationError):
        make_jc_rule(eu27, bad)
    with pytest.raises(ConfigurationError):
        make_lisbon_rule(eu27, 0, Fraction(1, 2))


def test_jc_plus_adds_simple_majority(eu27):
    rule = make_jc_rule(eu27, Fraction(647, 1000), with_count_majority=True)
    assert rule.criteria[1] == Criterion(CriterionKind.MEMBER_COUNT, threshold=14)
    assert len(make_jc_rule(eu27, Fraction(647, 1000)).criteria) == 1


@pytest.mark.parametrize(
    "builder",
    [
        lambda c: make_nice_rule(c, 255, 14, Fraction(62, 100)),
        lambda c: make_lisbon_rule(c, 15, Fraction(65, 100)),
        lambda c: make_jc_rule(c, Fraction(615, 1000)),
    ],
)
def test_grand_and_empty_coalitions(eu27, builder):
    rule = builder(eu27)
    assert wins(eu27, rule, eu27.grand_coalition)
    assert not wins(eu27, rule, 0)


@pytest.mark.parametrize(
    "builder",
    [
        lambda c: make_nice_rule(c, 345, 27, Fraction(1)),
        lambda c: make_lisbon_rule(c, 27, Fraction(1)),
        lambda c: make_jc_rule(c, Fraction(1)),
    ],
)
def test_unanimity_rules(eu27, builder):
    rule = builder(eu27)
    full = eu27.grand_coalition
    assert wins(eu27, rule, full)
    for i in range(eu27.n):
        assert not wins(eu27, rule, full & ~(1 << i))


def test_lisbon_fourteen_largest_lose(eu27):
    # populations copied from the published table, largest first
    largest = [
        82221808, 63753140, 61185981, 59618114, 45283259, 38115641, 21528627,
        16404282, 11214992, 10666866, 10617575, 10381130, 10045000, 9182927,
    ]
    assert sum(largest) * 100 >= 65 * 497481657  # population criterion holds
    assert len(largest) < 15  # but the count criterion fails
    ranked = sorted(range(eu27.n), key=lambda i: -eu27.members[i].population)[:14]
    assert sorted(eu27.members[i].population for i in ranked) == sorted(largest)
    rule = make_lisbon_rule(eu27, 15, Fraction(65, 100))
    assert not wins(eu27, rule, eu27.coalition(ranked))


def test_blocking_clause_overrides(eu27):
    plain = make_lisbon_rule(eu27, 15, Fraction(65, 100))
    blocking = make_lisbon_rule(eu27, 15, Fraction(65, 100), with_blocking_clause=True)
    # the three largest states oppose: population test fails but only 3 members block
    coalition = eu27.grand_coalition & ~eu27.coalition(["DE", "FR", "UK"])
    assert not wins(eu27, plain, coalition)
    assert wins(eu27, blocking, coalition)
    coalition &= ~eu27.coalition(["IT"])
    assert not wins(eu27, blocking, coalition)


def test_rule_dict_round_trip(eu27):
    rule = make_lisbon_rule(eu27, 15, Fraction(65, 100), with_blocking_clause=True)
    d = rule.to_dict()
    assert d["criteria"][1] == {"kind": "population", "quota": {"num": 13, "den": 20}}
    again = VotingRule.from_dict(d)
    assert again.criteria == rule.criteria and again.blocking_minority_min == 4
    with pytest.raises(ConfigurationError):
        VotingRule.from_dict({"criteria": [{"kind": "bogus", "threshold": 1}]})


def test_parse_quota_is_exact():
    assert parse_quota("0.775") == Fraction(31, 40)
    assert parse_quota("0.1") == Fraction(1, 10)
    with pytest.raises(ConfigurationError):
        parse_quota("abc")


# -- properties ---------------------------------------------------------------

KINDS = list(CriterionKind)


@st.composite
def small_games(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    pops = draw(st.lists(st.integers(1, 50), min_size=n, max_size=n))
    weights = draw(st.lists(st.integers(0, 50), min_size=n, max_size=n))
    council = council_of(pops, weights)
    criteria = []
    for _ in range(draw(st.integers(1, 3))):
        kind = draw(st.sampled_from(KINDS))
        if draw(st.booleans()):
            criteria.append(Criterion(kind, quota=Fraction(draw(st.integers(1, 100)), 100)))
        else:
            criteria.append(Criterion(kind, threshold=draw(st.integers(0, 60))))
    return council, VotingRule(tuple(criteria))


@settings(max_examples=150, deadline=None)
@given(small_games(), st.data())
def test_wins_monotone(game, data):
    council, rule = game
    full = council.grand_coalition
    s = data.draw(st.integers(0, full))
    t = s | data.draw(st.integers(0, full))
    if wins(council, rule, s):
        assert wins(council, rule, t)


@settings(max_examples=150, deadline=None)
@given(small_games(), st.data())
def test_wins_is_conjunction(game, data):
    council, rule = game
    s = data.draw(st.integers(0, council.grand_coalition))
    parts = [wins(council, VotingRule((c,)), s) for c in rule.criteria]
    assert wins(council, rule, s) == all(parts)


@settings(max_examples=150, deadline=None)
@given(small_games(), st.data())
def test_wins_matches_arbitrary_precision(game, data):
    """Integer cross-multiplication agrees with rational arithmetic and with the compiled thresholds."""
    council, rule = game
    s = data.draw(st.integers(0, council.grand_coalition))
    members = [i for i in range(council.n) if s >> i & 1]
    expected = True
    for c, compiled in zip(rule.criteria, rule.compile(council)):
        w = c.weights(council)
        total = sum(w[i] for i in members)
        if c.quota is not None:
            # an all-zero weight vector makes the relative criterion vacuous
            ok = Fraction(total, sum(w)) >= c.quota if sum(w) else True
        else:
            ok = total >= c.threshold
        assert ok == (total >= compiled.threshold)
        expected &= ok
    assert wins(council, rule, s) == expected


def test_coalition_helpers(eu27):
    assert eu27.coalition(["DE", 1]) == 0b11
    with pytest.raises(KeyError):
        eu27.coalition(["XX"])
    with pytest.raises(ValueError):
        wins(eu27, make_jc_rule(eu27, Fraction(1, 2)), 1 << 27)


def test_all_coalitions_small_by_hand():
    c = council_of([1, 1, 1], [1, 1, 1])
    rule = VotingRule((Criterion(CriterionKind.NEGOTIATED_WEIGHT, threshold=2),))
    winners = [m for m in range(8) if wins(c, rule, m)]
    assert winners == [m for m in range(8) if bin(m).count("1") >= 2]
    assert list(itertools.islice(winners, 1)) == [3]
