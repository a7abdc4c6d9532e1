"""Rational inner functions on the bidisc and their boundary behaviour."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DenominatorTooSmall,
    InstabilityDetected,
    NoConvergence,
    NonUnimodularTarget,
    NotARationalInnerFunction,
    SourceNotSingular,
)
from .poly import BiPolynomial, eval_poly, grad_poly, reflect

TWO_PI = 2.0 * math.pi
DEFAULT_GUARD = 1e-13


def _wrap(theta: float) -> float:
    t = math.fmod(float(theta), TWO_PI)
    if t < 0:
        t += TWO_PI
    if t >= TWO_PI - 1e-15:
        t = 0.0
    return t


def angle_distance(a: float, b: float) -> float:
    d = abs(_wrap(a) - _wrap(b))
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class BoundaryPoint:
    """A point (e^{i t1}, e^{i t2}) of the torus, stored by its angles in [0, 2pi)."""

    angles: tuple[float, float]

    def __post_init__(self):
        t1, t2 = self.angles
        object.__setattr__(self, "angles", (_wrap(t1), _wrap(t2)))

    @classmethod
    def from_complex(cls, w1: complex, w2: complex) -> BoundaryPoint:
        return cls((cmath.phase(w1), cmath.phase(w2)))

    @property
    def point(self) -> tuple[complex, complex]:
        t1, t2 = self.angles
        return cmath.exp(1j * t1), cmath.exp(1j * t2)

    def distance(self, other: BoundaryPoint) -> float:
        return max(angle_distance(a, b) for a, b in zip(self.angles, other.angles))


@dataclass(frozen=True)
class Neighborhood:
    """Bi-disc neighbourhood {|z1 - c1| < r, |z2 - c2| < r} of a torus point."""

    center: BoundaryPoint
    radius: float

    def __post_init__(self):
        if not 0.0 < self.radius < 1.0:
            raise ValueError(f"neighborhood radius must lie in (0, 1), got {self.radius}")

    def contains(self, z1, z2):
        c1, c2 = self.center.point
        z1 = np.asarray(z1)
        z2 = np.asarray(z2)
        return ((np.abs(z1 - c1) < self.radius) & (np.abs(z2 - c2) < self.radius)
                & (np.abs(z1) < 1) & (np.abs(z2) < 1))


@dataclass(frozen=True, eq=False)
class RationalInnerFunction:
    """z1^N z2^M * reflect(p) / p for a polynomial p with no zeros in the open bidisc."""

    denominator: BiPolynomial
    monomial_powers: tuple[int, int] = (0, 0)
    numerator: BiPolynomial | None = None
    check_stability: bool = field(default=True, repr=False)

    def __post_init__(self):
        N, M = (int(k) for k in self.monomial_powers)
        if N < 0 or M < 0:
            raise NotARationalInnerFunction("monomial powers must be non-negative")
        object.__setattr__(self, "monomial_powers", (N, M))
        expected = reflect(self.denominator)
        if self.numerator is None:
            object.__setattr__(self, "numerator", expected)
        elif not self.numerator.allclose(expected, atol=1e-12):
            raise NotARationalInnerFunction("numerator is not the reflection of the denominator")
        if self.check_stability:
            stability_check(self.denominator, grid_per_dim=16, margin=0.05)

    def full_numerator(self) -> BiPolynomial:
        """Numerator including the monomial factor z1^N z2^M."""
        N, M = self.monomial_powers
        if N == 0 and M == 0:
            return self.numerator
        n, m = self.numerator.bidegree
        c = np.zeros((n + N + 1, m + M + 1), dtype=complex)
        c[N:, M:] = self.numerator.coeffs
        return BiPolynomial(c)

    def __call__(self, z1, z2, guard: float = DEFAULT_GUARD):
        return eval_rif(self, z1, z2, guard)


@dataclass(frozen=True, eq=False)
class SymbolPair:
    """A self-map (phi, psi) of the bidisc built from two RIFs."""

    first: RationalInnerFunction
    second: RationalInnerFunction

    def __iter__(self):
        return iter((self.first, self.second))

    def eval_masked(self, z1, z2, guard: float = DEFAULT_GUARD):
        w1, ok1 = eval_rif_masked(self.first, z1, z2, guard)
        if self.second is self.first:
            return w1, w1, ok1
        w2, ok2 = eval_rif_masked(self.second, z1, z2, guard)
        return w1, w2, ok1 & ok2


def eval_rif_masked(phi: RationalInnerFunction, z1, z2, guard: float = DEFAULT_GUARD):
    """Vectorised evaluation; returns (values, ok) with values set to nan where |p| < guard."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    den = eval_poly(phi.denominator, z1, z2)
    num = eval_poly(phi.numerator, z1, z2)
    N, M = phi.monomial_powers
    if N:
        num = num * z1**N
    if M:
        num = num * z2**M
    den = np.asarray(den)
    ok = np.abs(den) >= guard
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(ok, num / np.where(ok, den, 1.0), np.nan + 0j)
    return val, ok


def eval_rif(phi: RationalInnerFunction, z1, z2, guard: float = DEFAULT_GUARD):
    """z1^N z2^M p~(z)/p(z); raises DenominatorTooSmall if |p(z)| < guard anywhere."""
    val, ok = eval_rif_masked(phi, z1, z2, guard)
    if not np.all(ok):
        raise DenominatorTooSmall(f"|p(z)| < {guard:g} near a boundary singularity")
    if val.ndim == 0:
        return complex(val)
    return val


# ---------------------------------------------------------------- boundary limits

@dataclass(frozen=True)
class LimitReport:
    value: complex
    modulus: float
    change: float
    rate: float | None
    radii: tuple[float, ...]


def default_radii(count: int = 12) -> list[float]:
    return [1.0 - 2.0 ** -(k + 4) for k in range(count)]


def _neville_at_zero(h: Sequence[float], y: Sequence[complex]) -> complex:
    h = list(h)
    p = list(y)
    k = len(h)
    for level in range(1, k):
        for i in range(k - level):
            j = i + level
            p[i] = (h[j] * p[i] - h[i] * p[i + 1]) / (h[j] - h[i])
    return p[0]


def nt_limit(phi: RationalInnerFunction, zeta: BoundaryPoint, radii: Sequence[float] | None = None,
             tol: float = 1e-7, guard: float = DEFAULT_GUARD) -> LimitReport:
    """Radial boundary value of phi at zeta with four-point Richardson extrapolation."""
    radii = default_radii() if radii is None else [float(r) for r in radii]
    if len(radii) < 8:
        raise ValueError("need at least 8 radii")
    if any(not 0 < r < 1 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must increase strictly inside (0, 1)")
    w1, w2 = zeta.point
    r = np.asarray(radii)
    try:
        vals = eval_rif(phi, r * w1, r * w2, guard)
    except DenominatorTooSmall as exc:
        raise NoConvergence(str(exc)) from exc
    h = 1.0 - r
    last = _neville_at_zero(h[-4:], vals[-4:])
    prev = _neville_at_zero(h[-5:-1], vals[-5:-1])
    change = abs(last - prev)
    if not np.isfinite(change) or change > tol:
        raise NoConvergence(f"extrapolated boundary values differ by {change:.3g}")
    err = np.abs(vals - last)
    use = err > 1e-13 * max(1.0, abs(last))
    rate = None
    if use.sum() >= 3:
        rate = float(np.polyfit(np.log(h[use]), np.log(err[use]), 1)[0])
    return LimitReport(complex(last), abs(last), float(change), rate, tuple(radii))


# ---------------------------------------------------------------- stability and zero sets

@dataclass(frozen=True)
class StabilityReport:
    min_modulus: float
    argmin: tuple[complex, complex]
    margin: float
    grid_per_dim: int


def _min_on_shrunken_bidisc(p: BiPolynomial, grid_per_dim: int, margin: float) -> StabilityReport:
    rmax = 1.0 - margin
    radii = np.linspace(0.0, rmax, grid_per_dim)
    angles = np.arange(grid_per_dim) * (TWO_PI / grid_per_dim)
    ring = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    best, arg = math.inf, (0j, 0j)
    for z1 in ring:
        vals = np.abs(eval_poly(p, z1, ring))
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, arg = float(vals[k]), (complex(z1), complex(ring[k]))

    def objective(x):
        z1 = x[0] * cmath.exp(1j * x[1])
        z2 = x[2] * cmath.exp(1j * x[3])
        return abs(eval_poly(p, z1, z2)) ** 2

    x0 = [abs(arg[0]), cmath.phase(arg[0]), abs(arg[1]), cmath.phase(arg[1])]
    res = minimize(objective, x0, method="L-BFGS-B",
                   bounds=[(0, rmax), (None, None), (0, rmax), (None, None)],
                   options={"ftol": 1e-30, "gtol": 1e-16, "maxiter": 500})
    polished = math.sqrt(max(float(res.fun), 0.0))
    if polished < best:
        x = res.x
        best = polished
        arg = (complex(x[0] * cmath.exp(1j * x[1])), complex(x[2] * cmath.exp(1j * x[3])))
    # the squared objective stalls near 1e-9 at a genuine zero; finish with 1-D Newton per coordinate
    for axis in (0, 1):
        z = list(arg)
        with np.errstate(all="ignore"):
            for _ in range(30):
                val = eval_poly(p, *z)
                d = grad_poly(p, *z)[axis]
                if d == 0 or not np.isfinite(val):
                    break
                z[axis] -= val / d
        if abs(z[axis]) <= rmax:
            val = abs(eval_poly(p, *z))
            if val < best:
                best, arg = val, (complex(z[0]), complex(z[1]))
    return StabilityReport(best, arg, margin, grid_per_dim)


def stability_check(p: BiPolynomial, grid_per_dim: int = 32, margin: float = 0.1,
                    threshold: float = 1e-12) -> StabilityReport:
    """Grid minimum of |p| on {|z1|, |z2| <= 1 - margin}, polished by local optimisation."""
    if grid_per_dim < 16:
        raise ValueError("grid_per_dim must be at least 16")
    if not 0.0 < margin < 1.0:
        raise ValueError("margin must lie in (0, 1)")
    report = _min_on_shrunken_bidisc(p, grid_per_dim, margin)
    if report.min_modulus < threshold:
        raise InstabilityDetected(
            f"|p| = {report.min_modulus:.3g} at {report.argmin} inside the bidisc")
    return report


def zero_set_interior_check(P: BiPolynomial, margin: float = 0.1, grid_per_dim: int = 32) -> float:
    """Minimum of |P| over the bidisc shrunk by ``margin``."""
    if not 0.0 < margin < 0.5:
        raise ValueError("margin must lie in (0, 0.5)")
    return _min_on_shrunken_bidisc(P, max(grid_per_dim, 16), margin).min_modulus


def build_pzeta(phi: RationalInnerFunction, zeta: complex, tol: float = 1e-12) -> BiPolynomial:
    """The polynomial (z^N p~) - zeta * p whose zeros are the level set {phi = zeta}."""
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > tol:
        raise NonUnimodularTarget(f"|zeta| = {abs(zeta)!r} is not 1")
    return phi.full_numerator() - phi.denominator * zeta


# ---------------------------------------------------------------- singularities

def _torus_newton(p: BiPolynomial, theta: np.ndarray, max_iter: int = 50, clip: float = 0.1):
    theta = np.array(theta, dtype=float)
    z = np.exp(1j * theta)
    val = eval_poly(p, z[0], z[1])
    for _ in range(max_iter):
        d1, d2 = grad_poly(p, z[0], z[1])
        dt = np.array([1j * z[0] * d1, 1j * z[1] * d2])
        jac = np.array([dt.real, dt.imag])
        step = -np.linalg.lstsq(jac, np.array([val.real, val.imag]), rcond=None)[0]
        step = np.clip(step, -clip, clip)
        t = 1.0
        for _ in range(30):
            cand = theta + t * step
            zc = np.exp(1j * cand)
            vc = eval_poly(p, zc[0], zc[1])
            if abs(vc) <= abs(val):
                break
            t *= 0.5
        else:
            break
        moved = float(np.max(np.abs(cand - theta)))
        theta, z, val = cand, zc, vc
        if val == 0 or moved < 1e-15:
            break
    return theta, abs(val)


def find_singularities(phi: RationalInnerFunction | BiPolynomial, grid_per_dim: int = 256,
                       refine_tol: float = 1e-10, max_candidates: int = 64) -> list[BoundaryPoint]:
    """Torus zeros of the denominator: grid scan for local minima, then Newton in the angles."""
    p = phi.denominator if isinstance(phi, RationalInnerFunction) else phi
    t = np.arange(grid_per_dim) * (TWO_PI / grid_per_dim)
    w = np.exp(1j * t)
    mod = np.abs(eval_poly(p, w[:, None], w[None, :]))
    is_min = np.ones_like(mod, dtype=bool)
    for d1 in (-1, 0, 1):
        for d2 in (-1, 0, 1):
            if d1 or d2:
                is_min &= mod <= np.roll(np.roll(mod, d1, axis=0), d2, axis=1)
    idx = np.argwhere(is_min)
    order = np.argsort(mod[is_min], kind="stable")[:max_candidates]
    found: list[BoundaryPoint] = []
    for i, j in idx[order]:
        theta, resid = _torus_newton(p, np.array([t[i], t[j]]))
        if resid >= refine_tol:
            continue
        pt = BoundaryPoint((theta[0], theta[1]))
        if all(pt.distance(q) > 1e-6 for q in found):
            found.append(pt)
    found.sort(key=lambda b: b.angles)
    return found


def is_singular(phi: RationalInnerFunction, point: BoundaryPoint, tol: float = 1e-8) -> bool:
    return abs(eval_poly(phi.denominator, *point.point)) < tol


def _rotated(phi: RationalInnerFunction, mu1: complex, mu2: complex, lam: complex) -> RationalInnerFunction:
    # lam * phi(mu1 z1, mu2 z2) with the unimodular constant folded into p as kappa = c^(-1/2)
    N, M = phi.monomial_powers
    n, m = phi.denominator.bidegree
    q = phi.denominator.substitute_scaled(mu1, mu2)
    c = lam * mu1 ** (n + N) * mu2 ** (m + M)
    kappa = 1.0 / cmath.sqrt(c)
    return RationalInnerFunction(q * kappa, (N, M), check_stability=False)


def rotate_symbol(phi: RationalInnerFunction, source: BoundaryPoint, target: BoundaryPoint,
                  value_rotation: complex = 1.0, tol: float = 1e-8) -> RationalInnerFunction:
    """lam * phi(mu1 z1, mu2 z2) with mu = source / target, moving the singularity to ``target``."""
    lam = complex(value_rotation)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise NonUnimodularTarget(f"value rotation {lam!r} is not unimodular")
    if not is_singular(phi, source, tol):
        raise SourceNotSingular(f"p does not vanish at {source.angles}")
    s1, s2 = source.point
    t1, t2 = target.point
    return _rotated(phi, s1 / t1, s2 / t2, lam)
