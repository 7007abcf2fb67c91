"""Poisson point process sampling and the acceptance/rejection sampler.

The rejection sampler draws whole Poisson configurations until one has
all pairwise distances >= R.  It is exact but slows down exponentially
as intensity or window size grow, which is why the coupling-based
sampler exists; here it doubles as the ground-truth oracle that other
samplers are validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Configuration, Point

DEFAULT_MAX_ATTEMPTS = 10**6


class AttemptsExhausted(RuntimeError):
    """Rejection sampling hit the attempt cap without an acceptance."""


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangular sampling window."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        values = (self.x0, self.x1, self.y0, self.y1)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"window bounds must be finite, got {values}")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"window must satisfy x0 < x1 and y0 < y1, got {values}")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


@dataclass(frozen=True)
class ModelParams:
    """Model parameters: intensity (points per unit area) and hard-core radius."""

    intensity: float
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.intensity) and self.intensity >= 0):
            raise ValueError(f"intensity must be finite and >= 0, got {self.intensity}")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be finite and > 0, got {self.radius}")


def sample_poisson_count(mean: float, rng: np.random.Generator) -> int:
    """Exact draw from a Poisson distribution with the given mean."""
    if not (math.isfinite(mean) and mean >= 0):
        raise ValueError(f"Poisson mean must be finite and >= 0, got {mean}")
    return int(rng.poisson(mean))


def sample_ppp(window: Window, intensity: float, rng: np.random.Generator) -> Configuration:
    """Homogeneous Poisson point process on ``window``.

    Draws N ~ Poisson(intensity * area), then N locations i.i.d.
    uniform over the window.
    """
    if intensity < 0:
        raise ValueError(f"intensity must be >= 0, got {intensity}")
    n = sample_poisson_count(intensity * window.area, rng)
    u = rng.random((n, 2))
    xs = window.x0 + (window.x1 - window.x0) * u[:, 0]
    ys = window.y0 + (window.y1 - window.y0) * u[:, 1]
    return Configuration(Point(float(x), float(y)) for x, y in zip(xs, ys))


def is_hardcore(config: Configuration, radius: float) -> bool:
    """True iff every pair of points is at distance >= radius.

    A pair at distance exactly ``radius`` is allowed.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    n = len(config)
    if n < 2:
        return True
    xy = config.coords()
    d2 = (xy[:, None, 0] - xy[None, :, 0]) ** 2 + (xy[:, None, 1] - xy[None, :, 1]) ** 2
    iu = np.triu_indices(n, k=1)
    return bool((d2[iu] >= radius * radius).all())


def rejection_sample_with_attempts(
    window: Window,
    params: ModelParams,
    rng: np.random.Generator,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> tuple[Configuration, int]:
    """Rejection sampler returning (configuration, attempts used)."""
    if max_attempts < 1:
        raise ValueError(f"max_attempts must be >= 1, got {max_attempts}")
    for attempt in range(1, max_attempts + 1):
        config = sample_ppp(window, params.intensity, rng)
        if is_hardcore(config, params.radius):
            return config, attempt
    raise AttemptsExhausted(
        f"no hard-core configuration accepted in {max_attempts} attempts "
        f"(intensity={params.intensity}, radius={params.radius}, area={window.area}); "
        "the acceptance probability is likely too small for rejection sampling"
    )


def sample_hardcore_rejection(
    window: Window,
    params: ModelParams,
    rng: np.random.Generator,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> Configuration:
    """Exact hard-core draw: first Poisson configuration with no close pair."""
    config, _ = rejection_sample_with_attempts(window, params, rng, max_attempts)
    return config
