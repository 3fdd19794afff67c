"""Monte Carlo estimate of Banzhaf power under uniformly random coalitions.

Samples are drawn in fixed-size chunks and chunk ``c`` uses the substream
``SeedSequence(seed, spawn_key=(c,))``, so results depend only on
``(samples, seed)`` and not on how chunks are spread over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .enumeration import default_workers
from .game import ConfigurationError, Council, VotingRule
from .power import Backend, PowerReport

CHUNK = 1 << 14


def _wins(sums: np.ndarray, thresholds: np.ndarray, count: np.ndarray | None, n: int, blocking: int | None):
    win = np.all(sums >= thresholds, axis=-1)
    if blocking is not None:
        win |= (n - count) < blocking
    return win


def _chunk(payload):
    weights, thresholds, blocking, n, seed, index, size = payload
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    votes = rng.integers(0, 2, size=(size, n), dtype=np.int8).astype(bool)
    yes = votes.astype(np.int64)
    sums = yes @ weights  # (size, criteria)
    count = yes.sum(axis=1)
    winners = int(_wins(sums, thresholds, count, n, blocking).sum())

    # sums with member i forced in / forced out, shape (size, n, criteria)
    absent = (~votes)[:, :, None] * weights[None, :, :]
    present = votes[:, :, None] * weights[None, :, :]
    with_i = sums[:, None, :] + absent
    without_i = sums[:, None, :] - present
    count_with = count[:, None] + (~votes)
    count_without = count[:, None] - votes
    decisive = _wins(with_i, thresholds, count_with, n, blocking) & ~_wins(
        without_i, thresholds, count_without, n, blocking
    )
    d = decisive.sum(axis=0).astype(np.int64)
    per_sample = decisive.sum(axis=1).astype(np.int64)
    cross = decisive.T.astype(np.int64) @ per_sample
    return d, winners, cross, int((per_sample * per_sample).sum())


def banzhaf_monte_carlo(
    council: Council, rule: VotingRule, samples: int, seed: int, workers: int | None = None
) -> PowerReport:
    """Estimate NB_i, beta_i and efficiency from ``samples`` random coalitions.

    ``mc_stderr`` holds the standard error of each NB_i estimate;
    ``beta_stderr`` is the delta-method standard error of the ratio beta_i.
    """
    if samples < 1:
        raise ConfigurationError("samples must be >= 1")
    compiled = rule.compile(council)
    n = council.n
    weights = np.array([c.weights for c in compiled], dtype=np.int64).T  # (n, criteria)
    thresholds = np.array([c.threshold for c in compiled], dtype=np.int64)
    payloads = []
    for index, lo in enumerate(range(0, samples, CHUNK)):
        payloads.append((weights, thresholds, rule.blocking_minority_min, n, seed, index, min(CHUNK, samples - lo)))

    workers = workers or default_workers()
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk, payloads, chunksize=8))
    else:
        results = [_chunk(p) for p in payloads]

    decisive = np.zeros(n, dtype=np.int64)
    cross = np.zeros(n, dtype=np.int64)
    winning = sq = 0
    for d, w, c, s in results:
        decisive += d
        winning += w
        cross += c
        sq += s

    m = samples
    nb = decisive / m
    nb_se = tuple(float(x) for x in np.sqrt(nb * (1 - nb) / m))
    eff = winning / m
    eff_se = math.sqrt(eff * (1 - eff) / m)
    mean_total = decisive.sum() / m
    if mean_total > 0:
        beta = decisive / decisive.sum()
        # Var(D_i - beta_i T) / (m E[T]^2)
        var = nb - 2 * beta * cross / m + beta**2 * sq / m
        beta_se = tuple(float(x) for x in np.sqrt(np.maximum(var, 0) / m) / mean_total)
    else:
        beta_se = tuple(0.0 for _ in range(n))
    return PowerReport(
        council,
        rule,
        Backend.MONTE_CARLO,
        tuple(int(x) for x in decisive),
        winning,
        samples=m,
        mc_stderr=nb_se,
        beta_stderr=beta_se,
        efficiency_stderr=eff_se,
    )
