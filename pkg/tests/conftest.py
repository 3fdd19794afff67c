from __future__ import annotations

import time
from fractions import Fraction

import pytest

from votingpower import load_dataset, run_sweep
from votingpower.game import Council, MemberState
from votingpower.sweep import SweepGrid


@pytest.fixture(scope="session")
def eu27() -> Council:
    return load_dataset("eu27-2008")


# wall-clock seconds of each session sweep, single worker
SWEEP_SECONDS: dict[str, float] = {}


def _timed_sweep(council, grid):
    start = time.perf_counter()
    result = run_sweep(council, grid, workers=1)
    SWEEP_SECONDS[grid.family] = time.perf_counter() - start
    return result


@pytest.fixture(scope="session")
def nice_sweep(eu27):
    return _timed_sweep(eu27, SweepGrid.nice_default())


@pytest.fixture(scope="session")
def lisbon_sweep(eu27):
    return _timed_sweep(eu27, SweepGrid.lisbon_default())


@pytest.fixture(scope="session")
def jc_sweep(eu27):
    return _timed_sweep(eu27, SweepGrid.jc_default())


def council_of(populations, nice_weights=None) -> Council:
    nice_weights = nice_weights or [None] * len(populations)
    return Council(
        tuple(MemberState(f"M{i}", f"member {i}", p, w) for i, (p, w) in enumerate(zip(populations, nice_weights)))
    )


def pct(x: Fraction | float) -> float:
    return float(x) * 100


# criterion id -> (passed, summary line); filled by the acceptance suite
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        terminalreporter.write_line(ACCEPTANCE[key][1])
