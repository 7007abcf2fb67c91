"""Continuous-time spatial birth-death chain for the hard-core model.

Births are proposed at rate intensity * area at uniform window
locations and accepted only when no existing point lies within the
hard-core radius (the proposer is "blocked" otherwise); each living
point dies at unit rate.  The stationary distribution of the accepted
process is the hard-core model on the window.

Implemented with competing clocks: one exponential holding time at the
total event rate followed by a categorical choice of event, which is
distributionally identical to per-point alarm clocks.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import Configuration, Point, count_within
from .poisson import ModelParams, Window

EVENT_CSV_HEADER = ["time", "kind", "x", "y", "point_id"]


class DeadChain(RuntimeError):
    """No event can ever occur: zero birth rate and no points alive."""


class EventKind(str, Enum):
    BIRTH_ACCEPTED = "BirthAccepted"
    BIRTH_BLOCKED = "BirthBlocked"
    DEATH = "Death"


@dataclass
class ChainState:
    config: Configuration
    time: float = 0.0


@dataclass(frozen=True)
class EventRecord:
    time: float
    kind: EventKind
    location: Point
    point_id: int | None


def step(state: ChainState, window: Window, params: ModelParams,
         rng: np.random.Generator) -> tuple[ChainState, EventRecord]:
    """Advance the chain by one event (accepted or blocked birth, or death)."""
    n = len(state.config)
    birth_rate = params.intensity * window.area
    total_rate = birth_rate + n
    if total_rate <= 0:
        raise DeadChain("zero intensity and empty configuration: no next event exists")

    holding = rng.exponential(1.0 / total_rate)
    config = state.config.copy()
    time = state.time + holding

    if rng.random() * total_rate < birth_rate:
        u = rng.random(2)
        proposal = Point(
            window.x0 + (window.x1 - window.x0) * float(u[0]),
            window.y0 + (window.y1 - window.y0) * float(u[1]),
        )
        if count_within(config, proposal, params.radius) == 0:
            point_id = config.add(proposal)
            record = EventRecord(time, EventKind.BIRTH_ACCEPTED, proposal, point_id)
        else:
            record = EventRecord(time, EventKind.BIRTH_BLOCKED, proposal, None)
    else:
        dying_id = config.id_at_slot(int(rng.integers(n)))
        location = config.remove(dying_id)
        record = EventRecord(time, EventKind.DEATH, location, dying_id)

    return ChainState(config, time), record


def run(state: ChainState, t_end: float, window: Window, params: ModelParams,
        rng: np.random.Generator) -> tuple[ChainState, list[EventRecord]]:
    """Run the chain forward until ``t_end``; final time is exactly ``t_end``.

    The holding time past ``t_end`` is discarded, which is exact by
    memorylessness.  A dead chain (zero intensity, no points) simply
    coasts to ``t_end`` with no events.
    """
    if t_end < state.time:
        raise ValueError(f"t_end={t_end} is before current time {state.time}")
    events: list[EventRecord] = []
    current = state
    while True:
        if params.intensity * window.area + len(current.config) <= 0:
            return ChainState(current.config.copy(), t_end), events
        nxt, record = step(current, window, params, rng)
        if nxt.time > t_end:
            return ChainState(current.config.copy(), t_end), events
        current = nxt
        events.append(record)


def write_event_csv(events, path) -> None:
    """Export a trajectory as CSV with columns time,kind,x,y,point_id."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(EVENT_CSV_HEADER)
        for e in events:
            writer.writerow([
                repr(e.time),
                e.kind.value,
                repr(e.location.x),
                repr(e.location.y),
                "" if e.point_id is None else e.point_id,
            ])
