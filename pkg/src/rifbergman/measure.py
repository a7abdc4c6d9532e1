"""Weighted Bergman volumes on the bidisc.

V_beta(E) is the integral over E of (1-|z1|^2)^beta (1-|z2|^2)^beta against
4-D Lebesgue measure, so V_beta(D^2) = (pi / (beta + 1))^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import UnsupportedWeight
from .rif import BoundaryPoint
from .sampling import FULL_DISC, DiscRegion, Moments, Proposal, as_proposal, map_chunks, parse_seed, reduce_moments, region_around

Indicator = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WeightParams:
    beta: float

    def require_integrable(self):
        if not self.beta > -1.0:
            raise UnsupportedWeight(f"beta = {self.beta} <= -1 gives an infinite weighted volume")

    def total_volume(self) -> float:
        self.require_integrable()
        return (math.pi / (self.beta + 1.0)) ** 2


@dataclass(frozen=True)
class CarlesonBox:
    """S(zeta, delta) = {z in D^2 : |z1 - zeta1| < delta1, |z2 - zeta2| < delta2}."""

    center: BoundaryPoint
    radii: tuple[float, float]

    def __post_init__(self):
        d1, d2 = self.radii
        if not (0 < d1 <= 2 and 0 < d2 <= 2):
            raise ValueError(f"box radii must lie in (0, 2], got {self.radii}")
        object.__setattr__(self, "radii", (float(d1), float(d2)))

    @classmethod
    def square(cls, center: BoundaryPoint, delta: float) -> CarlesonBox:
        return cls(center, (delta, delta))

    def contains(self, w1, w2):
        c1, c2 = self.center.point
        d1, d2 = self.radii
        return (np.abs(w1 - c1) < d1) & (np.abs(w2 - c2) < d2) & (np.abs(w1) < 1) & (np.abs(w2) < 1)

    def regions(self, levels: int = 0) -> tuple[DiscRegion, DiscRegion]:
        t1, t2 = self.center.angles
        return region_around(t1, self.radii[0], levels), region_around(t2, self.radii[1], levels)


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    std_error: float
    samples: int
    seed: int

    def within(self, other: float | VolumeEstimate, n_sigma: float = 3.0) -> bool:
        # a relative 1e-12 slack absorbs rounding when the estimator is exact (std_error 0)
        if isinstance(other, VolumeEstimate):
            se = math.hypot(self.std_error, other.std_error)
            return abs(self.value - other.value) <= n_sigma * se + 1e-12 * abs(other.value)
        return abs(self.value - other) <= n_sigma * self.std_error + 1e-12 * abs(other)


def integrate(integrand: Callable, w: WeightParams, samples: int, seed, *,
              regions: tuple[DiscRegion | Proposal, DiscRegion | Proposal] = (FULL_DISC, FULL_DISC),
              workers: int = 1) -> VolumeEstimate:
    """Importance-sampled estimate of the weighted integral of ``integrand(z1, z2, u1, u2)``.

    The integrand must vanish outside ``regions``.
    """
    w.require_integrable()
    seed = parse_seed(seed)
    beta = float(w.beta)
    r1, r2 = (as_proposal(r) for r in regions)

    def chunk(gen, n):
        z1, u1, w1 = r1.draw(gen, n, beta)
        z2, u2, w2 = r2.draw(gen, n, beta)
        f = np.asarray(integrand(z1, z2, u1, u2), dtype=float)
        return Moments.of(f * (w1 * w2))

    total = reduce_moments(map_chunks(chunk, samples, seed, workers))
    return VolumeEstimate(total.mean, total.std_error, samples, seed)


def weighted_volume_mc(indicator: Indicator, w: WeightParams, samples: int, seed, *,
                       levels: int = 0, workers: int = 1) -> VolumeEstimate:
    """V_beta of {indicator(z1, z2)} over the full bidisc.

    ``levels = 0`` draws 1 - |z_i|^2 from the weight itself, so the estimate is
    (pi/(beta+1))^2 times the hit fraction. ``levels > 0`` switches to dyadic
    depth shells, needed when the set hugs the boundary and beta is large.
    """
    if samples < 10_000:
        raise ValueError("weighted_volume_mc needs at least 10^4 samples")
    region = DiscRegion(levels=levels)
    return integrate(lambda z1, z2, u1, u2: indicator(z1, z2), w, samples, seed,
                     regions=(region, region), workers=workers)


def sublevel_indicator(delta: float) -> Indicator:
    def indicator(z1, z2):
        return (1.0 - np.abs(z1) ** 2) * (1.0 - np.abs(z2) ** 2) <= delta
    return indicator


def sublevel_volume_exact(w: WeightParams, delta: float) -> float:
    """V_beta{(1-|z1|^2)(1-|z2|^2) <= delta} in closed form."""
    w.require_integrable()
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    b = w.beta + 1.0
    return math.pi**2 * (delta**b / b**2 + delta**b * math.log(1.0 / delta) / b)


def carleson_box_volume(w: WeightParams, box: CarlesonBox, samples: int, seed, *,
                        workers: int = 1) -> VolumeEstimate:
    """V_a(S(zeta, delta)), sampled only inside the sectors that bound the box."""
    if samples < 10_000:
        raise ValueError("carleson_box_volume needs at least 10^4 samples")
    return integrate(lambda z1, z2, u1, u2: box.contains(z1, z2), w, samples, seed,
                     regions=box.regions(), workers=workers)

