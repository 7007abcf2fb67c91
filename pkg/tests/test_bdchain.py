import csv
import math

import numpy as np
import pytest

from hardcoregas.bdchain import (
    ChainState,
    DeadChain,
    EventKind,
    run,
    step,
    write_event_csv,
)
from hardcoregas.geometry import Configuration, Point
from hardcoregas.poisson import ModelParams, Window, is_hardcore, sample_hardcore_rejection
from hardcoregas.rng import generator

from helpers import merge_count_bins

WINDOW = Window(0, 3, 0, 3)
PARAMS = ModelParams(0.3, 1.0)


def test_first_event_from_empty_is_accepted_birth():
    rng = generator(40)
    for _ in range(100):
        state, record = step(ChainState(Configuration()), WINDOW, PARAMS, rng)
        assert record.kind is EventKind.BIRTH_ACCEPTED
        assert len(state.config) == 1
        assert record.point_id in state.config


def test_births_blocked_when_every_location_is_covered():
    # window of diameter < R around an existing point: every proposal is
    # within the hard-core radius, so no birth is ever accepted
    window = Window(0, 0.5, 0, 0.5)
    params = ModelParams(1000.0, 1.0)
    state = ChainState(Configuration([Point(0.25, 0.25)]))
    rng = generator(41)
    saw_blocked = False
    for _ in range(300):
        nxt, record = step(state, window, params, rng)
        if record.kind is EventKind.BIRTH_BLOCKED:
            saw_blocked = True
            assert nxt.config == state.config
            assert record.point_id is None
        elif record.kind is EventKind.DEATH:
            break
        state = nxt
    assert saw_blocked


def test_zero_intensity_single_point_dies():
    params = ModelParams(0.0, 1.0)
    rng = generator(42)
    holds = []
    for _ in range(3000):
        state = ChainState(Configuration([Point(1, 1)]))
        nxt, record = step(state, WINDOW, params, rng)
        assert record.kind is EventKind.DEATH
        assert len(nxt.config) == 0
        holds.append(nxt.time)
    holds = np.array(holds)
    # single unit-rate clock: holding time is Exp(1)
    se = holds.std(ddof=1) / math.sqrt(len(holds))
    assert abs(holds.mean() - 1.0) <= 3.0 * se


def test_step_dead_chain_raises():
    with pytest.raises(DeadChain):
        step(ChainState(Configuration()), WINDOW, ModelParams(0.0, 1.0), generator(1))


def test_run_to_current_time_is_noop():
    state = ChainState(Configuration([Point(1, 1)]), time=2.0)
    out, events = run(state, 2.0, WINDOW, PARAMS, generator(2))
    assert events == []
    assert out.time == 2.0
    assert out.config == state.config


def test_run_rejects_past_t_end():
    state = ChainState(Configuration(), time=2.0)
    with pytest.raises(ValueError):
        run(state, 1.0, WINDOW, PARAMS, generator(3))


def test_run_pure_death_binomial_decay():
    # zero intensity: each point survives to time t independently with
    # probability exp(-t), so the final count is Binomial(n, exp(-t))
    params = ModelParams(0.0, 1.0)
    n, t = 200, 0.7
    rng = generator(43)
    survivors = []
    for _ in range(200):
        pts = [Point(float(i % 20), float(i // 20)) for i in range(n)]
        state, events = run(ChainState(Configuration(pts)), t, WINDOW, params, rng)
        assert all(e.kind is EventKind.DEATH for e in events)
        survivors.append(len(state.config))
    survivors = np.array(survivors)
    p = math.exp(-t)
    se = math.sqrt(n * p * (1 - p) / len(survivors))
    assert abs(survivors.mean() - n * p) <= 3.0 * se


def test_run_reaches_dead_state_and_coasts():
    params = ModelParams(0.0, 1.0)
    state, events = run(ChainState(Configuration([Point(1, 1)])), 50.0, WINDOW,
                        params, generator(44))
    assert len(state.config) == 0
    assert state.time == 50.0
    assert len(events) == 1


def test_event_times_strictly_increasing_and_hardcore_invariant():
    rng = generator(45)
    state = ChainState(Configuration())
    last = 0.0
    for _ in range(400):
        state, record = step(state, WINDOW, PARAMS, rng)
        assert record.time > last
        last = record.time
        assert is_hardcore(state.config, PARAMS.radius)


def test_long_run_count_matches_rejection_oracle():
    # stationarity: counts sampled along one long trajectory after
    # burn-in against independent rejection-sampler draws
    rng = generator(2024)
    state, _ = run(ChainState(Configuration()), 50.0, WINDOW, PARAMS, rng)
    chain_counts = []
    for _ in range(150):
        state, _ = run(state, state.time + 1.0, WINDOW, PARAMS, rng)
        chain_counts.append(len(state.config))
    oracle_counts = [
        len(sample_hardcore_rejection(WINDOW, PARAMS, generator(2025, i)))
        for i in range(1000)
    ]
    top = max(max(chain_counts), max(oracle_counts))
    table = merge_count_bins(
        np.bincount(chain_counts, minlength=top + 1),
        np.bincount(oracle_counts, minlength=top + 1),
    )
    from scipy import stats
    _, p, _, _ = stats.chi2_contingency(table)
    assert p > 0.001


def test_run_determinism():
    a_state, a_events = run(ChainState(Configuration()), 20.0, WINDOW, PARAMS,
                            generator(46))
    b_state, b_events = run(ChainState(Configuration()), 20.0, WINDOW, PARAMS,
                            generator(46))
    assert a_state.config == b_state.config
    assert a_events == b_events


def test_event_csv_roundtrip(tmp_path):
    _, events = run(ChainState(Configuration()), 10.0, WINDOW, PARAMS, generator(47))
    path = tmp_path / "events.csv"
    write_event_csv(events, path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["time", "kind", "x", "y", "point_id"]
    assert len(rows) == len(events) + 1
    for row, event in zip(rows[1:], events):
        assert float(row[0]) == event.time
        assert row[1] == event.kind.value
        assert float(row[2]) == event.location.x
        assert float(row[3]) == event.location.y
        if event.point_id is None:
            assert row[4] == ""
        else:
            assert int(row[4]) == event.point_id
    kinds = {row[1] for row in rows[1:]}
    assert kinds <= {"BirthAccepted", "BirthBlocked", "Death"}
