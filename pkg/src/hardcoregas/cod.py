"""Clan-of-descendants branching process on the infinite plane.

Starting from a single ancestor, the clan gains a point whenever a
birth is proposed within the hard-core radius of a living clan member
(every such proposal joins, whether or not the forward chain would
accept it) and loses a point whenever a member dies.  Births therefore
occur at rate intensity * A(clan), where A is the area within the
radius of the clan, and deaths at unit rate per member.  The clan keeps
the exact sampler honest: its extinction behaviour locates the
intensity beyond which coupling from the past stops terminating.

Simulation uses thinning.  Candidate births are proposed uniformly in
the disk of a uniformly chosen member (total candidate rate
n * intensity * pi * R^2) and kept with probability 1/k where k is the
candidate's cover count, which makes kept births land uniformly over
the union region at exactly the right rate.  Rejected candidates are
bookkeeping of this scheme, not events of the underlying process, so
they are not counted.

``step_clan`` is the reference implementation.  Bulk estimation
(``estimate_extinction``, ``sweep``) runs the same dynamics in a
compiled kernel with its own splitmix64 stream per trial, so results
are bit-reproducible for a given base seed regardless of thread count
or scheduling; the two engines are validated against each other in the
test suite.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit, uint64

from .geometry import Configuration, Point, sample_point_near
from .poisson import ModelParams
from .rng import mix64

SWEEP_CSV_HEADER = [
    "lambda", "R", "trials", "ceiling",
    "n_extinct", "p_extinct", "ci_low", "ci_high", "mean_events_extinct",
]

_Z95 = 1.959963984540054


class StepOnFinished(RuntimeError):
    """step_clan was called on a clan that is already extinct or capped."""


class ClanStatus(Enum):
    RUNNING = "Running"
    EXTINCT = "Extinct"
    CEILING_HIT = "CeilingHit"


@dataclass
class ClanState:
    live: Configuration
    event_count: int = 0
    status: ClanStatus = ClanStatus.RUNNING


@dataclass(frozen=True)
class TrialOutcome:
    extinct: bool
    events: int
    max_size: int
    seed: int


@dataclass(frozen=True)
class SweepRow:
    intensity: float
    radius: float
    trials: int
    ceiling: int
    n_extinct: int
    p_extinct: float
    ci_low: float
    ci_high: float
    mean_events_extinct: float


def new_clan(origin: Point = Point(0.0, 0.0)) -> ClanState:
    """A fresh clan consisting of the single ancestor point."""
    return ClanState(Configuration([origin]))


def step_clan(state: ClanState, params: ModelParams, rng: np.random.Generator) -> ClanState:
    """Advance the clan to its next counted event (a birth or a death)."""
    if state.status is not ClanStatus.RUNNING:
        raise StepOnFinished(f"clan already finished with status {state.status.value}")
    live = state.live.copy()
    _advance_clan(live, params, rng)
    status = ClanStatus.EXTINCT if len(live) == 0 else ClanStatus.RUNNING
    return ClanState(live, state.event_count + 1, status)


def _advance_clan(live: Configuration, params: ModelParams,
                  rng: np.random.Generator) -> tuple[str, int, Point]:
    """Mutate ``live`` by one counted event; returns (kind, id, location).

    Loops over thinning candidates internally, so exactly one clan
    event happens per call.  Requires a nonempty ``live``.
    """
    disk_rate = params.intensity * math.pi * params.radius * params.radius
    p_candidate_birth = disk_rate / (1.0 + disk_rate)
    while True:
        if rng.random() < p_candidate_birth:
            draw, cover = sample_point_near(live, params.radius, rng)
            if cover == 1 or rng.random() * cover < 1.0:
                point_id = live.add(draw)
                return "birth", point_id, draw
        else:
            dying_id = live.id_at_slot(int(rng.integers(len(live))))
            location = live.remove(dying_id)
            return "death", dying_id, location


def run_extinction_trial(params: ModelParams, ceiling: int, rng: np.random.Generator,
                         seed: int = 0) -> TrialOutcome:
    """One clan from a single origin point until extinction or the ceiling.

    ``seed`` is only recorded in the outcome for bookkeeping; the
    randomness comes from ``rng``.
    """
    if ceiling < 2:
        raise ValueError(f"ceiling must be >= 2, got {ceiling}")
    state = new_clan()
    max_size = 1
    while state.status is ClanStatus.RUNNING:
        state = step_clan(state, params, rng)
        size = len(state.live)
        if size > max_size:
            max_size = size
        if size >= ceiling:
            state.status = ClanStatus.CEILING_HIT
    return TrialOutcome(
        extinct=state.status is ClanStatus.EXTINCT,
        events=state.event_count,
        max_size=max_size,
        seed=seed,
    )


_U64 = np.uint64
_SM_GOLDEN = _U64(0x9E3779B97F4A7C15)
_SM_MIX1 = _U64(0xBF58476D1CE4E5B9)
_SM_MIX2 = _U64(0x94D049BB133111EB)
_INV_2_53 = 1.1102230246251565e-16  # 2**-53


@njit(cache=True, nogil=True, inline="always")
def _next_unit(state):
    """Advance a splitmix64 state; returns (state, uniform in [0, 1))."""
    state = state + _SM_GOLDEN
    z = state
    z = (z ^ (z >> _U64(30))) * _SM_MIX1
    z = (z ^ (z >> _U64(27))) * _SM_MIX2
    z = z ^ (z >> _U64(31))
    return state, (z >> _U64(11)) * _INV_2_53


@njit(cache=True, nogil=True)
def _trial_kernel(intensity, radius, ceiling, seed):
    """One extinction trial; returns (extinct, events, max_size)."""
    xs = np.empty(ceiling, dtype=np.float64)
    ys = np.empty(ceiling, dtype=np.float64)
    xs[0] = 0.0
    ys[0] = 0.0
    n = 1
    events = 0
    max_size = 1
    r2 = radius * radius
    disk_rate = intensity * math.pi * r2
    p_candidate_birth = disk_rate / (1.0 + disk_rate)
    state = seed
    while True:
        state, u = _next_unit(state)
        if u < p_candidate_birth:
            state, u = _next_unit(state)
            i = int(u * n)
            if i >= n:
                i = n - 1
            state, u = _next_unit(state)
            a = radius * math.sqrt(u)
            state, u = _next_unit(state)
            theta = 2.0 * math.pi * u
            wx = xs[i] + a * math.cos(theta)
            wy = ys[i] + a * math.sin(theta)
            cover = 0
            for j in range(n):
                dx = xs[j] - wx
                dy = ys[j] - wy
                if dx * dx + dy * dy <= r2:
                    cover += 1
            if cover == 1:
                accept = True
            else:
                state, u = _next_unit(state)
                accept = u * cover < 1.0
            if accept:
                xs[n] = wx
                ys[n] = wy
                n += 1
                events += 1
                if n > max_size:
                    max_size = n
                if n >= ceiling:
                    return False, events, max_size
        else:
            state, u = _next_unit(state)
            i = int(u * n)
            if i >= n:
                i = n - 1
            n -= 1
            if i != n:
                xs[i] = xs[n]
                ys[i] = ys[n]
            events += 1
            if n == 0:
                return True, events, max_size


def run_trial_fast(params: ModelParams, ceiling: int, seed: int) -> TrialOutcome:
    """Compiled counterpart of ``run_extinction_trial`` driven by a 64-bit seed."""
    if ceiling < 2:
        raise ValueError(f"ceiling must be >= 2, got {ceiling}")
    extinct, events, max_size = _trial_kernel(
        params.intensity, params.radius, ceiling, _U64(seed))
    return TrialOutcome(bool(extinct), int(events), int(max_size), seed)


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval: stays inside [0, 1] and behaves at p = 0 or 1."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_hat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p_hat + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def estimate_extinction(params: ModelParams, trials: int, ceiling: int, base_seed: int,
                        lambda_index: int = 0, n_jobs: int = 1) -> SweepRow:
    """Extinction probability from independent trials with derived seeds.

    Trial ``t`` runs on seed ``mix64(base_seed, lambda_index, t)`` and
    outcomes are folded in trial order, so the result is identical for
    any ``n_jobs`` and any scheduling.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if ceiling < 2:
        raise ValueError(f"ceiling must be >= 2, got {ceiling}")
    seeds = [mix64(base_seed, lambda_index, t) for t in range(trials)]

    extinct = np.zeros(trials, dtype=bool)
    events = np.zeros(trials, dtype=np.int64)

    def run_range(lo: int, hi: int) -> None:
        for t in range(lo, hi):
            ext, ev, _ = _trial_kernel(
                params.intensity, params.radius, ceiling, _U64(seeds[t]))
            extinct[t] = ext
            events[t] = ev

    if n_jobs <= 1 or trials < 2:
        run_range(0, trials)
    else:
        n_jobs = min(n_jobs, trials)
        bounds = np.linspace(0, trials, n_jobs + 1).astype(int)
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(lambda k: run_range(bounds[k], bounds[k + 1]), range(n_jobs)))

    n_extinct = int(extinct.sum())
    p_extinct = n_extinct / trials
    ci_low, ci_high = wilson_interval(n_extinct, trials)
    mean_events = float(events[extinct].mean()) if n_extinct > 0 else math.nan
    return SweepRow(
        intensity=params.intensity,
        radius=params.radius,
        trials=trials,
        ceiling=ceiling,
        n_extinct=n_extinct,
        p_extinct=p_extinct,
        ci_low=ci_low,
        ci_high=ci_high,
        mean_events_extinct=mean_events,
    )


def sweep(lambda_grid, radius: float, trials: int, ceiling: int, base_seed: int,
          n_jobs: int = 1) -> list[SweepRow]:
    """One extinction estimate per intensity, in grid order."""
    grid = list(lambda_grid)
    if not grid:
        raise ValueError("intensity grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"intensity grid must be strictly increasing, got {grid}")
    return [
        estimate_extinction(ModelParams(lam, radius), trials, ceiling, base_seed,
                            lambda_index=i, n_jobs=n_jobs)
        for i, lam in enumerate(grid)
    ]


def write_sweep_csv(rows, path) -> None:
    """Write sweep rows as CSV with the canonical header."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SWEEP_CSV_HEADER)
        for row in rows:
            writer.writerow([
                repr(row.intensity),
                repr(row.radius),
                row.trials,
                row.ceiling,
                row.n_extinct,
                repr(row.p_extinct),
                repr(row.ci_low),
                repr(row.ci_high),
                repr(row.mean_events_extinct),
            ])
