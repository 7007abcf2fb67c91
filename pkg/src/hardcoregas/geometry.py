"""Planar primitives shared by every sampler in the package.

Holds point configurations with stable integer ids, distance and
coverage queries, uniform sampling in disks, and a Monte Carlo
estimator for the area covered by a union of equal disks (split by
coverage multiplicity).  Interaction tests use the closed ball: a point
at distance exactly ``r`` counts as covered.

All randomness comes in through an explicit ``numpy.random.Generator``,
so every routine is pure given its generator and safe to call from
multiple threads as long as each thread owns its generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_INITIAL_CAPACITY = 8


@dataclass(frozen=True, slots=True)
class Point:
    """A location in the plane. Coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


class Configuration:
    """A finite set of distinct points with stable integer ids.

    Iteration yields ``(id, Point)`` pairs in insertion order.  Ids are
    never reused within one configuration.  A contiguous coordinate
    array is maintained alongside the id map so that distance queries
    stay vectorized; the array is kept compact with swap-removal, which
    does not affect the public iteration order.
    """

    __slots__ = ("_by_id", "_slot_ids", "_slot_of", "_xy", "_n", "_next_id")

    def __init__(self, points=()):
        self._by_id: dict[int, Point] = {}
        self._slot_ids: list[int] = []
        self._slot_of: dict[int, int] = {}
        self._xy = np.empty((_INITIAL_CAPACITY, 2), dtype=np.float64)
        self._n = 0
        self._next_id = 0
        for p in points:
            self.add(p)

    @classmethod
    def from_pairs(cls, pairs) -> "Configuration":
        """Build from explicit ``(id, Point)`` pairs (ids must be unique)."""
        config = cls()
        for point_id, point in pairs:
            config.add_with_id(point_id, point)
        return config

    def __len__(self) -> int:
        return self._n

    def __iter__(self):
        return iter(self._by_id.items())

    def __contains__(self, point_id: int) -> bool:
        return point_id in self._by_id

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self._by_id == other._by_id

    def __repr__(self) -> str:
        return f"Configuration({self._n} points)"

    def get(self, point_id: int) -> Point:
        return self._by_id[point_id]

    def ids(self) -> list[int]:
        """Ids in insertion order."""
        return list(self._by_id.keys())

    def locations(self) -> list[Point]:
        """Points in insertion order."""
        return list(self._by_id.values())

    def id_at_slot(self, slot: int) -> int:
        """Id stored at internal slot ``slot`` (0 <= slot < len); O(1).

        Slot order is an implementation detail, but the map from slots
        to ids is deterministic, so uniform slot choice is a uniform,
        reproducible point choice.
        """
        return self._slot_ids[slot]

    def coords(self) -> np.ndarray:
        """Read-only (n, 2) float64 view of the coordinates, slot order."""
        view = self._xy[: self._n]
        view.flags.writeable = False
        return view

    def add(self, point: Point) -> int:
        """Insert ``point`` under a fresh id and return the id."""
        point_id = self._next_id
        self.add_with_id(point_id, point)
        return point_id

    def add_with_id(self, point_id: int, point: Point) -> None:
        """Insert ``point`` under a caller-chosen id (must be unused)."""
        if point_id in self._by_id:
            raise ValueError(f"duplicate point id {point_id}")
        if self._n == self._xy.shape[0]:
            grown = np.empty((max(2 * self._xy.shape[0], _INITIAL_CAPACITY), 2),
                             dtype=np.float64)
            grown[: self._n] = self._xy[: self._n]
            self._xy = grown
        self._by_id[point_id] = point
        self._slot_of[point_id] = self._n
        self._slot_ids.append(point_id)
        self._xy[self._n, 0] = point.x
        self._xy[self._n, 1] = point.y
        self._n += 1
        if point_id >= self._next_id:
            self._next_id = point_id + 1

    def remove(self, point_id: int) -> Point:
        """Remove and return the point stored under ``point_id``."""
        point = self._by_id.pop(point_id)
        slot = self._slot_of.pop(point_id)
        last = self._n - 1
        if slot != last:
            moved_id = self._slot_ids[last]
            self._slot_ids[slot] = moved_id
            self._slot_of[moved_id] = slot
            self._xy[slot] = self._xy[last]
        self._slot_ids.pop()
        self._n -= 1
        return point

    def copy(self) -> "Configuration":
        dup = Configuration.__new__(Configuration)
        dup._by_id = dict(self._by_id)
        dup._slot_ids = list(self._slot_ids)
        dup._slot_of = dict(self._slot_of)
        capacity = max(self._n, _INITIAL_CAPACITY)
        dup._xy = np.empty((capacity, 2), dtype=np.float64)
        dup._xy[: self._n] = self._xy[: self._n]
        dup._n = self._n
        dup._next_id = self._next_id
        return dup


@dataclass
class CoverageProfile:
    """Monte Carlo estimate of the area covered by equal disks.

    ``layer_areas[k-1]`` estimates the area covered by exactly ``k``
    disks, for k = 1 .. number of points; ``total_area`` estimates the
    union area and equals the sum of the layers by construction.
    ``layer_counts`` keeps the raw hit counts (index 0 is the uncovered
    count) so callers can derive exact standard errors.
    """

    total_area: float
    layer_areas: list[float]
    samples_used: int
    box_area: float = 0.0
    layer_counts: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))


def distance(p: Point, q: Point) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p.x - q.x, p.y - q.y)


def count_within(config: Configuration, p: Point, r: float) -> int:
    """Number of configuration points at distance <= r from ``p``."""
    if len(config) == 0:
        return 0
    xy = config.coords()
    dx = xy[:, 0] - p.x
    dy = xy[:, 1] - p.y
    return int(np.count_nonzero(dx * dx + dy * dy <= r * r))


def sample_uniform_in_disk(center: Point, r: float, rng: np.random.Generator) -> Point:
    """Uniform draw from the closed disk of radius ``r`` about ``center``.

    Uses the inverse-CDF radius ``r * sqrt(U)``, so the distance to the
    center has density 2a/r**2 on [0, r].
    """
    u = rng.random()
    theta = 2.0 * math.pi * rng.random()
    a = r * math.sqrt(u)
    return Point(center.x + a * math.cos(theta), center.y + a * math.sin(theta))


def sample_point_near(config: Configuration, r: float,
                      rng: np.random.Generator) -> tuple[Point, int]:
    """Propose a point uniform in the r-disk of a random config point.

    Returns the draw together with its cover count (the number of
    configuration disks containing it, always >= 1).  Keeping each draw
    with probability 1/cover_count makes the kept draws uniform over
    the union of the disks: the proposal density at a location covered
    k times is k/(n*pi*r^2), so the 1/k thinning flattens it.
    """
    n = len(config)
    if n == 0:
        raise ValueError("cannot propose near an empty configuration")
    center_id = config.id_at_slot(int(rng.integers(n)))
    draw = sample_uniform_in_disk(config.get(center_id), r, rng)
    return draw, count_within(config, draw, r)


def inflated_bounds(config: Configuration, r: float) -> tuple[float, float, float, float]:
    """Bounding box of the points, inflated by ``r`` on every side."""
    xy = config.coords()
    return (
        float(xy[:, 0].min() - r),
        float(xy[:, 0].max() + r),
        float(xy[:, 1].min() - r),
        float(xy[:, 1].max() + r),
    )


def coverage_profile(config: Configuration, r: float, n_samples: int,
                     rng: np.random.Generator,
                     chunk: int = 1 << 15) -> CoverageProfile:
    """Estimate union area and per-multiplicity layers by Monte Carlo.

    Samples ``n_samples`` points uniformly over the bounding box of the
    configuration inflated by ``r`` and tallies how many disks cover
    each sample.  Unbiased for the union area and for every layer.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if r <= 0:
        raise ValueError("r must be positive")
    n_points = len(config)
    if n_points == 0:
        return CoverageProfile(0.0, [], 0, 0.0, np.zeros(1, dtype=np.int64))

    x0, x1, y0, y1 = inflated_bounds(config, r)
    box_area = (x1 - x0) * (y1 - y0)
    xy = config.coords()
    r2 = r * r

    counts = np.zeros(n_points + 1, dtype=np.int64)
    remaining = n_samples
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        samples = rng.random((m, 2))
        sx = x0 + (x1 - x0) * samples[:, 0]
        sy = y0 + (y1 - y0) * samples[:, 1]
        d2 = (sx[:, None] - xy[None, :, 0]) ** 2 + (sy[:, None] - xy[None, :, 1]) ** 2
        multiplicity = np.count_nonzero(d2 <= r2, axis=1)
        counts += np.bincount(multiplicity, minlength=n_points + 1)

    per_sample = box_area / n_samples
    layer_areas = [float(counts[k] * per_sample) for k in range(1, n_points + 1)]
    total_area = float(counts[1:].sum() * per_sample)
    return CoverageProfile(total_area, layer_areas, n_samples, box_area, counts)
