"""Direct path simulation with deterministic seeding and censoring brackets.

Paths are absorbed at the first visit to the vertical axis (origin
included) or to the horizontal axis minus the origin, or censored after
``max_steps`` steps.  Censored paths are never discarded: counting them
first as vertical hits and then as horizontal ones gives a deterministic
bracket around the estimate, whose width is exactly the censored
fraction.  Absorption times have heavy tails in the zero-drift regime,
so this bias channel is real and must stay visible.

Reproducibility contract: the estimate is a pure function of
``(seed, n_paths, max_steps, n_workers)``.  Worker substreams are spawned
from the master seed by the counter-based seed-sequence mechanism, and
path blocks are sized by fixed constants, so the draws consumed never
depend on timing or scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .walk import StepDistribution

_CHUNK = 1 << 14         # paths simulated together
_BLOCK = 128             # steps drawn per batch
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class SimulationEstimate:
    """Outcome counts and derived intervals of one simulation run.

    ``point`` and ``ci95`` (Wilson score interval) are computed on the
    uncensored paths; ``bracket`` resolves the censored paths both ways.
    """

    n_paths: int
    hits_v: int
    hits_h: int
    censored: int
    point: float
    ci95: tuple[float, float]
    bracket: tuple[float, float]
    seed: int
    max_steps: int
    n_workers: int


def _worker_counts(n_paths: int, n_workers: int) -> list[int]:
    base, extra = divmod(n_paths, n_workers)
    return [base + (1 if w < extra else 0) for w in range(n_workers)]


def _simulate_block(rng, cum, dx, dy, x, y, blk):
    """Advance all paths by up to ``blk`` steps; split off absorbed ones."""
    n = len(x)
    u = rng.random((n, blk))
    idx = np.searchsorted(cum, u)
    cx = x[:, None] + np.cumsum(dx[idx], axis=1, dtype=np.int64)
    cy = y[:, None] + np.cumsum(dy[idx], axis=1, dtype=np.int64)
    hit = (cx == 0) | ((cy == 0) & (cx >= 1))
    absorbed = hit.any(axis=1)
    first = np.argmax(hit, axis=1)
    rows = np.nonzero(absorbed)[0]
    v_hits = int(np.count_nonzero(cx[rows, first[rows]] == 0))
    h_hits = int(len(rows) - v_hits)
    alive = ~absorbed
    return v_hits, h_hits, cx[alive, -1], cy[alive, -1]


def simulate(p: StepDistribution, i0: int, j0: int, n_paths: int, seed: int,
             max_steps: int, n_workers: int = 1) -> SimulationEstimate:
    """Estimate the hitting probability by simulating ``n_paths`` walks.

    Returns counts, the Wilson 95% interval of the uncensored binomial,
    and the censoring bracket.  Identical arguments always produce an
    identical estimate.
    """
    if i0 < 1 or j0 < 1:
        raise DomainError("start must be interior: i0, j0 >= 1")
    if n_paths < 1 or max_steps < 1 or n_workers < 1:
        raise DomainError("n_paths, max_steps and n_workers must be positive")

    pairs = [s for s, prob in p.steps if prob > 0.0]
    probs = np.array([p.prob(*s) for s in pairs])
    cum = np.cumsum(probs)
    cum[-1] = 1.0 + 1e-12    # guard the top edge against roundoff
    dx = np.array([s[0] for s in pairs], dtype=np.int64)
    dy = np.array([s[1] for s in pairs], dtype=np.int64)

    hits_v = hits_h = censored = 0
    for worker, quota in enumerate(_worker_counts(n_paths, n_workers)):
        rng = np.random.Generator(np.random.Philox(
            np.random.SeedSequence(entropy=seed, spawn_key=(worker,))))
        remaining = quota
        while remaining > 0:
            m = min(_CHUNK, remaining)
            remaining -= m
            x = np.full(m, i0, dtype=np.int64)
            y = np.full(m, j0, dtype=np.int64)
            steps_left = max_steps
            while len(x) and steps_left > 0:
                blk = min(_BLOCK, steps_left)
                steps_left -= blk
                v, h, x, y = _simulate_block(rng, cum, dx, dy, x, y, blk)
                hits_v += v
                hits_h += h
            censored += len(x)

    uncensored = hits_v + hits_h
    if uncensored > 0:
        point = hits_v / uncensored
        ci95 = _wilson(hits_v, uncensored)
    else:
        point, ci95 = 0.5, (0.0, 1.0)
    bracket = (hits_v / n_paths, (hits_v + censored) / n_paths)
    return SimulationEstimate(
        n_paths=n_paths, hits_v=hits_v, hits_h=hits_h, censored=censored,
        point=point, ci95=ci95, bracket=bracket, seed=seed,
        max_steps=max_steps, n_workers=n_workers)


def _wilson(successes: int, n: int) -> tuple[float, float]:
    phat = successes / n
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2 * n)) / denom
    half = _Z95 * math.sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))
