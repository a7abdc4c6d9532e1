"""Pull-back measures of Carleson boxes and boundedness evidence for C_Phi.

The composition operator C_Phi : A^2_a -> A^2_beta is bounded exactly when
V_beta(Phi^{-1}(S)) <= C V_a(S) over all Carleson boxes S. Everything here
produces numerical evidence for (or against) such a constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BetaTooSmall, DegenerateFit, EnvelopeTooSparse, NoConvergence, SingularityMismatch
from .fitting import ExponentFit, fit_scaling_exponent
from .measure import CarlesonBox, VolumeEstimate, WeightParams, carleson_box_volume, integrate
from .rif import (
    BoundaryPoint,
    Neighborhood,
    RationalInnerFunction,
    SymbolPair,
    _rotated,
    eval_rif_masked,
    find_singularities,
    is_singular,
    nt_limit,
    rotate_symbol,
)
from .sampling import DiscRegion, Proposal, map_chunks, parse_seed, region_around

ORIGIN = BoundaryPoint((0.0, 0.0))
DEFAULT_SCALES = tuple(2.0**-k for k in range(2, 10))
DEFAULT_LEVELS = 16


def _proposals(box: CarlesonBox, restrict: Neighborhood | None, levels: int, focus: bool):
    if restrict is None:
        base = (DiscRegion(levels=levels),) * 2
    else:
        t1, t2 = restrict.center.angles
        base = (region_around(t1, restrict.radius, levels), region_around(t2, restrict.radius, levels))
    if not focus:
        return base
    near = box.regions(levels)
    return tuple(Proposal((b, n)) for b, n in zip(base, near))


def pullback_volume(symbol: SymbolPair, box: CarlesonBox, w: WeightParams, samples: int, seed, *,
                    restrict: Neighborhood | None = None, levels: int = DEFAULT_LEVELS,
                    focus: bool = True, workers: int = 1) -> VolumeEstimate:
    """V_beta({z in D^2 (and in ``restrict``) : Phi(z) in box}).

    Depths 1 - |z_i|^2 are drawn from ``levels`` dyadic shells so thin boundary
    preimages are resolved. With ``focus`` half of the draws land in the sectors
    around the box itself; the importance weights keep the estimate unbiased
    either way. Points where a denominator falls below the guard are counted as
    outside the set.
    """
    if samples < 100_000:
        raise ValueError("pullback_volume needs at least 10^5 samples")

    def integrand(z1, z2, u1, u2):
        w1, w2, ok = symbol.eval_masked(z1, z2)
        hit = ok & box.contains(np.where(ok, w1, 0), np.where(ok, w2, 0))
        if restrict is not None:
            hit &= restrict.contains(z1, z2)
        return hit

    return integrate(integrand, w, samples, seed, regions=_proposals(box, restrict, levels, focus),
                     workers=workers)


# ---------------------------------------------------------------- Lojasiewicz exponents

@dataclass(frozen=True)
class LojasiewiczEstimate:
    exponent_hat: float
    constant_hat: float
    neighborhood: Neighborhood
    envelope_points: list[tuple[float, float]]
    target_value: complex
    residual_rms: float = 0.0


def _log_uniform_sampler(nbhd: Neighborhood, decades: float):
    r = nbhd.radius
    u_max = r * (2.0 - r)
    half = math.asin(r)
    c1, c2 = nbhd.center.angles
    span = decades * math.log(10.0)

    def draw(gen, n):
        u = u_max * np.exp(-span * gen.random((2, n)))
        off = half * np.exp(-span * gen.random((2, n))) * np.where(gen.random((2, n)) < 0.5, -1.0, 1.0)
        z1 = np.sqrt(1.0 - u[0]) * np.exp(1j * (c1 + off[0]))
        z2 = np.sqrt(1.0 - u[1]) * np.exp(1j * (c2 + off[1]))
        return z1, z2, u[0], u[1]

    return draw, math.log(u_max) - span, math.log(u_max)


def envelope_fit(gap: Callable[[np.ndarray, np.ndarray], np.ndarray], nbhd: Neighborhood, samples: int,
                 bins: int, seed, *, decades: float = 6.0, workers: int = 1):
    """Fit ln(min gap) against ln(min(1-|z1|^2, 1-|z2|^2)) over log-spaced bins.

    Depths and angular offsets are drawn log-uniformly so every bin sees points
    near the extremal configurations. Returns (slope, intercept, rms, envelope).
    """
    draw, lo, hi = _log_uniform_sampler(nbhd, decades)
    edges = np.linspace(lo, hi, bins + 1)

    def chunk(gen, n):
        z1, z2, u1, u2 = draw(gen, n)
        inside = nbhd.contains(z1, z2)
        m = np.minimum(u1, u2)[inside]
        g = np.asarray(gap(z1[inside], z2[inside]), dtype=float)
        good = np.isfinite(g) & (g > 0)
        m, g = m[good], g[good]
        k = np.clip(np.searchsorted(edges, np.log(m), side="right") - 1, 0, bins - 1)
        best_g = np.full(bins, np.inf)
        best_m = np.zeros(bins)
        order = np.lexsort((m, g, k))
        k, g, m = k[order], g[order], m[order]
        first = np.ones(k.size, dtype=bool)
        first[1:] = k[1:] != k[:-1]
        best_g[k[first]] = g[first]
        best_m[k[first]] = m[first]
        return best_g, best_m

    best_g = np.full(bins, np.inf)
    best_m = np.zeros(bins)
    for g, m in map_chunks(chunk, samples, seed, workers):
        better = g < best_g
        best_g[better] = g[better]
        best_m[better] = m[better]
    filled = np.isfinite(best_g)
    if filled.sum() < 6:
        raise EnvelopeTooSparse(f"only {int(filled.sum())} non-empty bins")
    x = np.log(best_m[filled])
    y = np.log(best_g[filled])
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - slope * x - intercept) ** 2)))
    envelope = [(float(a), float(b)) for a, b in zip(best_m[filled], best_g[filled])]
    return float(slope), float(intercept), rms, envelope


def lojasiewicz_fit(phi: RationalInnerFunction, eta: BoundaryPoint, nbhd: Neighborhood | None = None,
                    samples: int = 400_000, bins: int = 32, seed=0xB1D15C, *,
                    require_singular: bool = True, workers: int = 1) -> LojasiewiczEstimate:
    """Empirical exponent q and constant C in |phi(z) - phi*(eta)| >= C min(1-|z_i|^2)^q near eta.

    phi is first multiplied by conj(phi*(eta)) so the boundary value becomes 1.
    """
    nbhd = nbhd or Neighborhood(eta, 0.3)
    if require_singular and not is_singular(phi, eta):
        raise SingularityMismatch(f"{eta.angles} is not a zero of the denominator")
    try:
        target = nt_limit(phi, eta).value
    except NoConvergence as exc:
        raise SingularityMismatch(f"no radial boundary value at {eta.angles}: {exc}") from exc
    normalised = _rotated(phi, 1.0, 1.0, target.conjugate() / abs(target))

    def gap(z1, z2):
        val, ok = eval_rif_masked(normalised, z1, z2)
        return np.where(ok, np.abs(val - 1.0), np.nan)

    slope, intercept, rms, env = envelope_fit(gap, nbhd, samples, bins, seed, workers=workers)
    if slope <= 0:
        raise EnvelopeTooSparse(f"non-positive envelope slope {slope:.3g}")
    return LojasiewiczEstimate(slope, math.exp(intercept), nbhd, env, complex(target), rms)


def stabilized_fit(phi: RationalInnerFunction, eta: BoundaryPoint, radius: float = 0.3, *,
                   samples: int = 400_000, bins: int = 32, seed=0xB1D15C, tol: float = 0.1,
                   max_halvings: int = 4, workers: int = 1) -> LojasiewiczEstimate:
    """Halve the neighbourhood radius until the fitted exponent moves by less than ``tol``."""
    est = lojasiewicz_fit(phi, eta, Neighborhood(eta, radius), samples, bins, seed, workers=workers)
    for _ in range(max_halvings):
        radius /= 2.0
        nxt = lojasiewicz_fit(phi, eta, Neighborhood(eta, radius), samples, bins, seed, workers=workers)
        if abs(nxt.exponent_hat - est.exponent_hat) < tol:
            return nxt
        est = nxt
    return est


# ---------------------------------------------------------------- reports

@dataclass(frozen=True)
class RatioRow:
    box: CarlesonBox
    pullback: VolumeEstimate
    box_volume: VolumeEstimate
    ratio: float
    ratio_se: float


def _row(box, pull: VolumeEstimate, vol: VolumeEstimate) -> RatioRow:
    if vol.value <= 0:
        return RatioRow(box, pull, vol, math.inf, math.inf)
    ratio = pull.value / vol.value
    rel = math.hypot(pull.std_error / vol.value, ratio * vol.std_error / vol.value)
    return RatioRow(box, pull, vol, ratio, rel)


@dataclass
class BoundednessReport:
    symbol: SymbolPair
    beta: float
    a: float
    q_used: float
    ratio_table: list[RatioRow]
    sup_ratio: float
    growth_flag: bool
    q_fits: list[LojasiewiczEstimate] = field(default_factory=list)
    pullback_fit: ExponentFit | None = None
    theorem_exponent: float | None = None
    bound_holds_below: float | None = None


def _growth(rows: Sequence[RatioRow]) -> bool:
    rows = sorted(rows, key=lambda r: -max(r.box.radii))
    return rows[-1].ratio > 2.0 * rows[0].ratio


def _bound_holds_below(rows: Sequence[RatioRow]) -> float | None:
    """Largest scale from which the ratio never exceeds its value there (within 3 se)."""
    rows = sorted(rows, key=lambda r: -max(r.box.radii))
    for i, row in enumerate(rows):
        if all(r.ratio <= row.ratio + 3.0 * math.hypot(r.ratio_se, row.ratio_se) for r in rows[i:]):
            return max(row.box.radii)
    return None


def normalise_coordinate(phi: RationalInnerFunction, eta: BoundaryPoint | None = None):
    """Rotate phi so a designated singularity sits at (1, 1) with boundary value 1.

    Returns (rotated, eta, boundary value before rotation).
    """
    if eta is None:
        sings = find_singularities(phi)
        if not sings:
            raise SingularityMismatch("symbol coordinate has no singularity on the torus")
        eta = sings[0]
    try:
        value = nt_limit(phi, eta).value
    except NoConvergence as exc:
        raise SingularityMismatch(str(exc)) from exc
    return rotate_symbol(phi, eta, ORIGIN, value.conjugate() / abs(value)), eta, value


def theorem_certificate(symbol: SymbolPair, beta: float, q_override: float | None = None,
                        scales: Sequence[float] = DEFAULT_SCALES, samples: int = 1_000_000, seed=0xB1D15C, *,
                        singularities: tuple[BoundaryPoint, BoundaryPoint] | None = None,
                        radius: float = 0.3, levels: int = DEFAULT_LEVELS, fit_samples: int = 400_000,
                        workers: int = 1) -> BoundednessReport:
    """Check V_beta(Phi^{-1}(S) cap U) against V_a(S) with a = beta/(2q) - 2 on boxes at (1, 1)."""
    seed = parse_seed(seed)
    if q_override is not None and beta <= 2.0 * q_override:
        raise BetaTooSmall(f"beta = {beta} <= 2q = {2.0 * q_override}")
    etas = singularities or (None, None)
    rotated, fits = [], []
    for phi, eta in zip(symbol, etas):
        rot, _, _ = normalise_coordinate(phi, eta)
        rotated.append(rot)
    if q_override is None:
        for rot in rotated:
            fits.append(stabilized_fit(rot, ORIGIN, radius, samples=fit_samples, seed=seed, workers=workers))
        q = max(f.exponent_hat for f in fits)
        radius = min(f.neighborhood.radius for f in fits)
    else:
        q = float(q_override)
    if beta <= 2.0 * q:
        raise BetaTooSmall(f"beta = {beta} <= 2q = {2.0 * q}")
    a = beta / (2.0 * q) - 2.0
    pair = SymbolPair(*rotated)
    nbhd = Neighborhood(ORIGIN, radius)
    rows = []
    for delta in sorted(scales, reverse=True):
        box = CarlesonBox.square(ORIGIN, delta)
        pull = pullback_volume(pair, box, WeightParams(beta), samples, seed,
                               restrict=nbhd, levels=levels, workers=workers)
        vol = carleson_box_volume(WeightParams(a), box, samples, seed, workers=workers)
        rows.append(_row(box, pull, vol))
    fit = None
    positive = [(r.box.radii[0], r.pullback.value) for r in rows if r.pullback.value > 0]
    try:
        fit = fit_scaling_exponent(positive, min_decades=1.0)
    except DegenerateFit:
        pass
    return BoundednessReport(pair, beta, a, q, rows, max(r.ratio for r in rows), _growth(rows),
                             fits, fit, beta / q, _bound_holds_below(rows))


def default_centers(symbol: SymbolPair, seed, count: int = 8) -> list[BoundaryPoint]:
    centers: list[BoundaryPoint] = []
    for phi in symbol:
        for s in find_singularities(phi):
            if all(s.distance(c) > 1e-6 for c in centers):
                centers.append(s)
    rng = np.random.default_rng(parse_seed(seed))
    for t1, t2 in rng.uniform(0.0, 2.0 * math.pi, size=(count, 2)):
        centers.append(BoundaryPoint((t1, t2)))
    return centers


def carleson_sweep(symbol: SymbolPair, beta: float, a: float, centers: Sequence[BoundaryPoint] | None = None,
                   scales: Sequence[float] = DEFAULT_SCALES, samples: int = 1_000_000, seed=0xB1D15C, *,
                   levels: int = DEFAULT_LEVELS, rectangular: Sequence[tuple[float, float]] | None = None,
                   workers: int = 1) -> BoundednessReport:
    """Unrestricted ratio table V_beta(Phi^{-1}(S)) / V_a(S) over centers x scales."""
    seed = parse_seed(seed)
    if centers is None:
        centers = default_centers(symbol, seed)
    if not centers:
        raise ValueError("no box centers given")
    radii = list(rectangular) if rectangular else [(d, d) for d in sorted(scales, reverse=True)]
    rows, growth = [], False
    for center in centers:
        per_center = []
        for d1, d2 in radii:
            box = CarlesonBox(center, (d1, d2))
            pull = pullback_volume(symbol, box, WeightParams(beta), samples, seed, levels=levels, workers=workers)
            vol = carleson_box_volume(WeightParams(a), box, samples, seed, workers=workers)
            per_center.append(_row(box, pull, vol))
        growth |= _growth(per_center)
        rows.extend(per_center)
    q = beta / (2.0 * (a + 2.0)) if a > -2 else math.nan
    return BoundednessReport(symbol, beta, a, q, rows, max(r.ratio for r in rows), growth)

