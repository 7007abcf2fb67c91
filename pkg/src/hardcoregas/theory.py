"""Closed-form constants and numeric verification of the drift analysis.

The quantities checked here control when the clan of descendants dies
out fast enough for the coupling sampler to be practical:

* ``critical_intensity(R) = 8 / (3*sqrt(3) + 4*pi) / R^2``, the
  intensity below which the expected number of clan events is finite,
  with ``expected_event_bound = 1 / (critical_intensity - intensity)``.
* ``prior_critical_intensity(R) = 1 / (pi R^2)``, the weaker threshold
  obtained when only the point count (not the covered area) enters the
  potential.
* The mean area a birth adds to the clan's covered region, at most
  ``(3*sqrt(3)/4) R^2`` with equality for a single-point clan.  Checked
  two independent ways: nested adaptive quadrature of the defining
  double integral, and Monte Carlo over the radial density 2a/R^2.
* The single-cover inequality ``A_1 >= 2A - pi R^2 n`` (area covered by
  exactly one disk versus union area), which lower-bounds the mean area
  a death removes.
* The supermartingale drift of the potential phi(x) = A(x) + c * #x.

A caution on the drift target: the classical per-event drift constant
``delta = (2 - lam R^2 (3 sqrt 3 / 4)) / (1 + lam)`` is NOT attained by
the simulated clan dynamics once the intensity is large enough
(empirically lam >= 0.25 at R = 1).  For a single-point clan every
ingredient is exact: births win an event with probability
lam*pi/(lam*pi + 1), a birth adds 3*sqrt(3)/4 + c to phi on average and
a death removes pi + c, so at lam = 0.3, R = 1 the one-step mean is
exactly -1.09527, strictly above -delta = -1.23868.  Weighting the
event probabilities correctly yields the bound

    delta_adjusted = (2 - lam R^2 (3*sqrt(3)/4 + pi)) / (1 + lam),

which is positive exactly when lam < critical_intensity(R) and which
the dynamics do satisfy (tightly, at single-point clans).  The report
emitted by ``verification_suite`` therefore carries the drift check
against both constants; the rows against plain ``delta`` fail for
lam in {0.3, 0.4, 0.44} and that is the honest outcome, not a bug in
the simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import cod
from .geometry import Configuration, Point, coverage_profile, inflated_bounds
from .poisson import ModelParams
from .rng import generator, mix64

ADDED_AREA_COEFF = 3.0 * math.sqrt(3.0) / 4.0


class SupercriticalLambda(ValueError):
    """The intensity is at or above the critical value for the bound."""


@dataclass(frozen=True)
class DriftConstants:
    """Constants of the potential phi(x) = A(x) + count_coefficient * #x."""

    count_coefficient: float
    drift_per_event: float
    intensity: float
    radius: float


@dataclass(frozen=True)
class CoverSlack:
    """Monte Carlo check of the single-cover inequality for one configuration."""

    area: float
    single_cover_area: float
    slack: float
    slack_se: float


@dataclass(frozen=True)
class DriftCheck:
    """Empirical one-step mean change of phi along clan dynamics."""

    mean_dphi: float
    delta: float
    se: float
    evaluations: int


@dataclass(frozen=True)
class VerifyCheck:
    """One row of the verification report; ``passed`` is authoritative."""

    name: str
    expected: float
    observed: float
    tolerance: float
    passed: bool


def critical_intensity(radius: float) -> float:
    """Intensity threshold 8/(3*sqrt(3) + 4*pi)/R^2 for finite clan events."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    return 8.0 / (3.0 * math.sqrt(3.0) + 4.0 * math.pi) / (radius * radius)


def prior_critical_intensity(radius: float) -> float:
    """Count-only threshold 1/(pi R^2), superseded by critical_intensity."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    return 1.0 / (math.pi * radius * radius)


def expected_event_bound(params: ModelParams) -> float:
    """Upper bound 1/(critical_intensity - intensity) on mean clan events."""
    bound = critical_intensity(params.radius)
    if params.intensity >= bound:
        raise SupercriticalLambda(
            f"intensity {params.intensity} is not below critical intensity {bound} "
            f"for radius {params.radius}")
    return 1.0 / (bound - params.intensity)


def lens_area(dist: float, radius: float) -> float:
    """Intersection area of two disks of equal ``radius`` at center distance ``dist``."""
    if dist >= 2.0 * radius:
        return 0.0
    if dist <= 0.0:
        return math.pi * radius * radius
    half = dist / (2.0 * radius)
    return 2.0 * radius * radius * math.acos(half) - 0.5 * dist * math.sqrt(
        4.0 * radius * radius - dist * dist)


def mean_added_area_quad(radius: float, quad_tolerance: float = 1e-9) -> float:
    """Mean area a disk adds when its center lands uniformly in another disk.

    Evaluates the double integral
        int_0^R (2a/R^2) [pi R^2 - 4 int_{a/2}^R sqrt(R^2 - x^2) dx] da
    by nested adaptive quadrature (no closed forms on this path).  The
    exact value is (3*sqrt(3)/4) R^2.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    def inner(a: float) -> float:
        val, _ = integrate.quad(
            lambda x: math.sqrt(max(radius * radius - x * x, 0.0)),
            a / 2.0, radius, epsabs=quad_tolerance * 1e-3, epsrel=1e-12)
        return val

    value, err = integrate.quad(
        lambda a: (2.0 * a / (radius * radius)) * (math.pi * radius * radius - 4.0 * inner(a)),
        0.0, radius, epsabs=quad_tolerance, epsrel=1e-12)
    if err > quad_tolerance * max(1.0, abs(value)):
        raise RuntimeError(
            f"quadrature error estimate {err} exceeds tolerance {quad_tolerance}")
    return value


def mean_added_area_mc(radius: float, n: int, rng: np.random.Generator) -> float:
    """Monte Carlo mean of the area added by a birth into a single-point clan.

    Draws the center distance from its density 2a/R^2 and evaluates the
    per-draw added area pi R^2 - lens(a) in closed form; independent of
    the quadrature route.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a = radius * np.sqrt(rng.random(n))
    half = a / (2.0 * radius)
    lens = (2.0 * radius * radius * np.arccos(half)
            - 0.5 * a * np.sqrt(4.0 * radius * radius - a * a))
    added = math.pi * radius * radius - lens
    return float(added.mean())


def added_area_std(radius: float) -> float:
    """Per-draw standard deviation of the added area (by quadrature)."""
    mean = ADDED_AREA_COEFF * radius * radius

    def added(a: float) -> float:
        return math.pi * radius * radius - lens_area(a, radius)

    second, _ = integrate.quad(
        lambda a: (2.0 * a / (radius * radius)) * added(a) ** 2, 0.0, radius,
        epsabs=1e-10, epsrel=1e-12)
    return math.sqrt(max(second - mean * mean, 0.0))


def single_cover_slack(config: Configuration, radius: float, n_samples: int,
                       rng: np.random.Generator) -> CoverSlack:
    """Check A_1 >= 2A - pi R^2 n on one configuration by Monte Carlo.

    Returns the estimated union area A, single-cover layer A_1, the
    slack A_1 - (2A - pi R^2 n) (nonnegative up to Monte Carlo noise;
    zero exactly when no location is covered three times), and the
    standard error of the slack estimate.  A and A_1 share the sample
    stream, so the error of their difference is computed jointly.
    """
    if len(config) == 0:
        raise ValueError("configuration must be nonempty")
    profile = coverage_profile(config, radius, n_samples, rng)
    counts = profile.layer_counts
    m = profile.samples_used
    box = profile.box_area

    area = profile.total_area
    single = profile.layer_areas[0]
    exact_term = math.pi * radius * radius * len(config)
    slack = single - 2.0 * area + exact_term

    # Per-sample variable z = 1{k=1} - 2*1{k>=1}; slack_hat = box*mean(z) + exact_term.
    n_once = counts[1]
    n_multi = int(counts[2:].sum())
    mean_z = (-n_once - 2.0 * n_multi) / m
    mean_z2 = (n_once + 4.0 * n_multi) / m
    var_z = max(mean_z2 - mean_z * mean_z, 0.0)
    slack_se = box * math.sqrt(var_z / m)
    return CoverSlack(area, single, slack, slack_se)


def drift_constants(params: ModelParams) -> DriftConstants:
    """The classical potential constants c and delta."""
    lam, r = params.intensity, params.radius
    beta = ADDED_AREA_COEFF * r * r
    c = (math.pi * r * r + 2.0 - lam * beta) / (1.0 + lam)
    delta = (2.0 - lam * beta) / (1.0 + lam)
    return DriftConstants(c, delta, lam, r)


def consistent_drift_rate(params: ModelParams) -> float:
    """Per-event drift bound consistent with the actual event weights.

    With births winning an event with probability lam*A/(lam*A + n),
    the one-step mean change of phi is at most
    -delta_adjusted * (A + n)/(lam*A + n) <= -delta_adjusted for
    lam <= 1, where
        delta_adjusted = (2 - lam R^2 (3*sqrt(3)/4 + pi)) / (1 + lam).
    Positive exactly when lam < critical_intensity(R).
    """
    lam, r = params.intensity, params.radius
    return (2.0 - lam * r * r * (ADDED_AREA_COEFF + math.pi)) / (1.0 + lam)


def drift_check(params: ModelParams, trials: int, n_area_samples: int,
                rng: np.random.Generator, branch_factor: int = 64) -> DriftCheck:
    """Estimate the one-step mean change of phi along clan trajectories.

    States are sampled by running clans forward from a single ancestor;
    at every visited state, ``branch_factor`` independent one-event
    continuations are simulated and the change of phi is measured for
    each.  The area part of each change is localized to the disk of the
    point that appeared or vanished and estimated with
    ``n_area_samples`` uniform draws in that disk, which is unbiased
    for A(after) - A(before).  ``trials`` counts branched evaluations
    in total.  The standard error treats per-state means as the units.
    """
    if params.intensity >= critical_intensity(params.radius):
        raise SupercriticalLambda(
            f"intensity {params.intensity} is not below critical intensity "
            f"{critical_intensity(params.radius)}")
    if trials < 1 or n_area_samples < 1 or branch_factor < 1:
        raise ValueError("trials, n_area_samples and branch_factor must be >= 1")

    constants = drift_constants(params)
    c = constants.count_coefficient
    r = params.radius
    disk_area = math.pi * r * r
    n_states = max(1, math.ceil(trials / branch_factor))

    state_means = np.empty(n_states, dtype=np.float64)
    trajectory = Configuration([Point(0.0, 0.0)])

    for s in range(n_states):
        snapshot = trajectory.copy()
        total = 0.0
        for _ in range(branch_factor):
            branch = snapshot.copy()
            kind, _, location = cod._advance_clan(branch, params, rng)
            if kind == "birth":
                # Area gained: part of the new disk not covered before.
                frac = _uncovered_fraction(snapshot, location, r, n_area_samples, rng)
                total += disk_area * frac + c
            else:
                # Area lost: part of the dead disk nothing else covers.
                frac = _uncovered_fraction(branch, location, r, n_area_samples, rng)
                total += -disk_area * frac - c
        state_means[s] = total / branch_factor

        # Advance the trajectory itself; restart at the origin on extinction.
        cod._advance_clan(trajectory, params, rng)
        if len(trajectory) == 0:
            trajectory = Configuration([Point(0.0, 0.0)])

    mean_dphi = float(state_means.mean())
    se = float(state_means.std(ddof=1) / math.sqrt(n_states)) if n_states > 1 else 0.0
    return DriftCheck(mean_dphi, constants.drift_per_event, se, n_states * branch_factor)


def _uncovered_fraction(config: Configuration, center: Point, radius: float,
                        n_samples: int, rng: np.random.Generator) -> float:
    """Fraction of the disk at ``center`` covered by no point of ``config``."""
    u = rng.random((n_samples, 2))
    a = radius * np.sqrt(u[:, 0])
    theta = 2.0 * math.pi * u[:, 1]
    sx = center.x + a * np.cos(theta)
    sy = center.y + a * np.sin(theta)
    if len(config) == 0:
        return 1.0
    xy = config.coords()
    d2 = (sx[:, None] - xy[None, :, 0]) ** 2 + (sy[:, None] - xy[None, :, 1]) ** 2
    covered = (d2 <= radius * radius).any(axis=1)
    return float(1.0 - covered.mean())


DRIFT_INTENSITIES = (0.0, 0.1, 0.2, 0.3, 0.4, 0.44)


def verification_suite(seed: int, drift_evals: int = 100_000, mc_samples: int = 1_000_000,
                       cover_samples: int = 100_000, event_trials: int = 10_000,
                       n_jobs: int = 1) -> list[VerifyCheck]:
    """Run every numeric check and return one report row per check.

    All randomness derives from ``seed``; the report is deterministic.
    The drift rows are evaluated against both the classical constant
    (``drift_delta_*``, known not to hold for intensity >= 0.25 or so)
    and the adjusted constant (``drift_adjusted_*``); see the module
    docstring.
    """
    rows: list[VerifyCheck] = []

    def check(name, expected, observed, tolerance, passed=None):
        if passed is None:
            passed = abs(observed - expected) <= tolerance
        rows.append(VerifyCheck(name, float(expected), float(observed),
                                float(tolerance), bool(passed)))

    check("critical_intensity_R1", 0.4503865, critical_intensity(1.0), 1e-6)
    check("prior_critical_intensity_R1", 0.3183099, prior_critical_intensity(1.0), 1e-6)
    check("bound_ratio_R1", 1.4149,
          critical_intensity(1.0) / prior_critical_intensity(1.0), 1e-3)
    check("event_bound_intensity0.3_R1", 6.649534,
          expected_event_bound(ModelParams(0.3, 1.0)), 1e-5)

    for r in (0.5, 1.0, 2.0, 5.0):
        expected = ADDED_AREA_COEFF * r * r
        observed = mean_added_area_quad(r)
        check(f"added_area_quad_R{r:g}", expected, observed, 1e-6 * expected)

    for r in (0.5, 1.0):
        expected = ADDED_AREA_COEFF * r * r
        observed = mean_added_area_mc(r, mc_samples, generator(seed, 1, int(r * 2)))
        tol = 3.0 * added_area_std(r) / math.sqrt(mc_samples)
        check(f"added_area_mc_R{r:g}", expected, observed, tol)

    # Single-cover inequality: closed-form cases, then random configurations.
    lens1 = lens_area(1.0, 1.0)
    cases = [
        ("single_cover_one_point", Configuration([Point(0.0, 0.0)]), math.pi),
        ("single_cover_disjoint_pair",
         Configuration([Point(0.0, 0.0), Point(3.0, 0.0)]), 2.0 * math.pi),
        ("single_cover_lens_pair",
         Configuration([Point(0.0, 0.0), Point(1.0, 0.0)]), 2.0 * (math.pi - lens1)),
    ]
    for i, (name, config, expected_single) in enumerate(cases):
        result = single_cover_slack(config, 1.0, cover_samples, generator(seed, 2, i))
        check(name, expected_single, result.single_cover_area,
              3.0 * _layer_se(config, 1.0, expected_single, cover_samples))

    worst = math.inf
    rng_cfg = generator(seed, 3)
    for i in range(100):
        n_pts = int(rng_cfg.integers(1, 21))
        pts = [Point(float(x), float(y)) for x, y in rng_cfg.random((n_pts, 2)) * 6.0]
        result = single_cover_slack(Configuration(pts), 1.0, cover_samples, rng_cfg)
        standardized = result.slack / result.slack_se if result.slack_se > 0 else 0.0
        worst = min(worst, standardized)
    check("single_cover_random_configs_min_z", 0.0, worst, 4.0, passed=worst >= -4.0)

    for i, lam in enumerate(DRIFT_INTENSITIES):
        params = ModelParams(lam, 1.0)
        result = drift_check(params, drift_evals, 256, generator(seed, 4, i))
        target = -result.delta
        check(f"drift_delta_intensity{lam:g}", target, result.mean_dphi,
              4.0 * result.se, passed=result.mean_dphi <= target + 4.0 * result.se)
        adjusted = -consistent_drift_rate(params)
        check(f"drift_adjusted_intensity{lam:g}", adjusted, result.mean_dphi,
              4.0 * result.se, passed=result.mean_dphi <= adjusted + 4.0 * result.se)

    row0 = cod.estimate_extinction(ModelParams(0.0, 1.0), event_trials, 750,
                                   mix64(seed, 5, 0), n_jobs=n_jobs)
    check("mean_events_intensity0", 1.0, row0.mean_events_extinct, 0.0)
    row3 = cod.estimate_extinction(ModelParams(0.3, 1.0), event_trials, 750,
                                   mix64(seed, 5, 1), n_jobs=n_jobs)
    bound = expected_event_bound(ModelParams(0.3, 1.0))
    check("mean_events_intensity0.3_below_bound", bound, row3.mean_events_extinct,
          0.0, passed=row3.mean_events_extinct <= bound)

    return rows


def _layer_se(config: Configuration, radius: float, layer_area: float,
              n_samples: int) -> float:
    """Binomial standard error of one layer-area estimate."""
    box = _cover_box_area(config, radius)
    p = min(max(layer_area / box, 0.0), 1.0)
    return box * math.sqrt(p * (1.0 - p) / n_samples)


def _cover_box_area(config: Configuration, radius: float) -> float:
    x0, x1, y0, y1 = inflated_bounds(config, radius)
    return (x1 - x0) * (y1 - y0)
