"""Seeded, partition-independent Monte Carlo sampling on the bidisc.

Samples are produced in fixed-size chunks. Chunk ``k`` of a run with seed ``s``
draws from a Philox generator keyed by ``(s, k)``, so a chunk's content never
depends on which worker evaluates it, and per-chunk partial sums are merged in
chunk order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

CHUNK_SIZE = 1 << 16
_MASK64 = (1 << 64) - 1


def parse_seed(seed) -> int:
    """Accept an int or a decimal / 0x-hex string."""
    if isinstance(seed, (int, np.integer)):
        value = int(seed)
    else:
        text = str(seed).strip().lower()
        value = int(text, 16) if text.startswith("0x") else int(text, 10)
    if not 0 <= value <= _MASK64:
        raise ValueError(f"seed {seed!r} is not a 64-bit unsigned integer")
    return value


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based generator for stream ``index`` of ``seed``."""
    return np.random.Generator(np.random.Philox(key=(seed & _MASK64) | (index << 64)))


def chunk_sizes(samples: int, chunk: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(samples, chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(fn: Callable[[np.random.Generator, int], object], samples: int, seed: int,
               workers: int = 1) -> list:
    """Run ``fn(generator, n)`` for every chunk; results come back in chunk order."""
    sizes = chunk_sizes(samples)
    seed = parse_seed(seed)

    def job(k):
        return fn(substream(seed, k), sizes[k])

    if workers <= 1 or len(sizes) == 1:
        return [job(k) for k in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(len(sizes))))


@dataclass(frozen=True)
class Moments:
    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, values: np.ndarray) -> Moments:
        n = values.size
        if n == 0:
            return cls(0, 0.0, 0.0)
        mean = float(np.mean(values))
        return cls(n, mean, float(np.sum((values - mean) ** 2)))

    def merge(self, other: Moments) -> Moments:
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return Moments(n, mean, m2)

    @property
    def std_error(self) -> float:
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.count - 1) / self.count)


def reduce_moments(parts: list[Moments]) -> Moments:
    total = Moments(0, 0.0, 0.0)
    for part in parts:
        total = total.merge(part)
    return total


@dataclass(frozen=True)
class DiscRegion:
    """Sector {|arg z - center| <= half_width, 1 - |z|^2 <= u_max} of the unit disc.

    With ``levels = L > 0`` the depth u = 1 - |z|^2 is drawn from L + 1 dyadic
    shells (u_max 2^-(k+1), u_max 2^-k] and (0, u_max 2^-L]. A shell is picked
    with probability ``(1 - mass_share) / (L + 1) + mass_share * (its weighted
    share of the sector)``, then u follows the weight-proportional law inside
    the shell. ``levels = 0`` is the plain weight-proportional law.
    """

    center: float = 0.0
    half_width: float = math.pi
    u_max: float = 1.0
    levels: int = 0
    mass_share: float = 0.5

    def __post_init__(self):
        if not 0 < self.half_width <= math.pi:
            raise ValueError("half_width must lie in (0, pi]")
        if not 0 < self.u_max <= 1:
            raise ValueError("u_max must lie in (0, 1]")
        if self.levels < 0:
            raise ValueError("levels must be non-negative")

    def mass(self, beta: float) -> float:
        """Weighted area: integral of (1-|z|^2)^beta dA over the region."""
        b = beta + 1.0
        return self.half_width * self.u_max**b / b

    def _shells(self, beta: float):
        b = beta + 1.0
        k = np.arange(self.levels + 1, dtype=float)
        hi = self.u_max * 2.0 ** -k
        lo = np.append(hi[1:], 0.0)
        lo_b, hi_b = lo**b, hi**b
        share = (hi_b - lo_b) / hi_b[0]
        probs = (1.0 - self.mass_share) / (self.levels + 1) + self.mass_share * share
        return lo, hi, lo_b, hi_b, probs / probs.sum()

    def sample(self, gen: np.random.Generator, n: int, beta: float):
        """Draw (u, theta)."""
        b = beta + 1.0
        lo, hi, lo_b, hi_b, probs = self._shells(beta)
        if self.levels:
            shell = np.minimum(np.searchsorted(np.cumsum(probs), gen.random(n), side="right"), self.levels)
        else:
            shell = np.zeros(n, dtype=np.intp)
        t = gen.random(n)
        s = gen.random(n)
        u = (lo_b[shell] + t * (hi_b[shell] - lo_b[shell])) ** (1.0 / b)
        u = np.clip(u, np.finfo(float).tiny, self.u_max)
        theta = self.center + self.half_width * (2.0 * s - 1.0)
        return u, theta

    def density(self, u: np.ndarray, theta: np.ndarray, beta: float) -> np.ndarray:
        """Density of ``sample`` with respect to du dtheta."""
        b = beta + 1.0
        lo, hi, lo_b, hi_b, probs = self._shells(beta)
        offset = np.angle(np.exp(1j * (theta - self.center)))
        inside = (np.abs(offset) <= self.half_width) & (u <= self.u_max)
        k = np.clip(np.floor(-np.log2(np.maximum(u, 1e-300) / self.u_max)), 0, self.levels).astype(np.intp)
        radial = probs[k] * b * u**beta / (hi_b[k] - lo_b[k])
        return np.where(inside, radial / (2.0 * self.half_width), 0.0)


@dataclass(frozen=True)
class Proposal:
    """Mixture of sector samplers for one coordinate disc."""

    components: tuple[DiscRegion, ...]
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.components:
            raise ValueError("empty proposal")
        w = self.weights or (1.0,) * len(self.components)
        total = float(sum(w))
        object.__setattr__(self, "weights", tuple(x / total for x in w))

    def draw(self, gen: np.random.Generator, n: int, beta: float):
        """Return (z, u, weight); E[weight * f(z)] is the weighted integral of f over the support."""
        if len(self.components) == 1:
            region = self.components[0]
            u, theta = region.sample(gen, n, beta)
        else:
            pick = np.searchsorted(np.cumsum(self.weights), gen.random(n), side="right")
            pick = np.minimum(pick, len(self.components) - 1)
            u = np.empty(n)
            theta = np.empty(n)
            for c, region in enumerate(self.components):
                sel = pick == c
                u[sel], theta[sel] = region.sample(gen, int(sel.sum()), beta)
        q = sum(w * r.density(u, theta, beta) for w, r in zip(self.weights, self.components))
        weight = 0.5 * u**beta / q
        z = np.sqrt(1.0 - u) * np.exp(1j * theta)
        return z, u, weight


def as_proposal(region) -> Proposal:
    return region if isinstance(region, Proposal) else Proposal((region,))


FULL_DISC = DiscRegion()


def region_around(angle: float, radius: float, levels: int = 0) -> DiscRegion:
    """Smallest sector containing {|z - e^{i angle}| < radius} within the unit disc."""
    if radius >= 1.0:
        return DiscRegion(angle, math.pi, 1.0, levels)
    return DiscRegion(angle, math.asin(radius), radius * (2.0 - radius), levels)
