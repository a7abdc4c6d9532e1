"""Reference values computed independently of the library under test.

Everything here uses plain loops, scipy quadrature or closed forms derived by
hand, never the package's own evaluators or samplers.
"""

import math

import numpy as np
from scipy import integrate


def naive_eval(coeffs, z1, z2):
    """sum c_ij z1^i z2^j term by term."""
    coeffs = np.asarray(coeffs, dtype=complex)
    total = 0j
    for i in range(coeffs.shape[0]):
        for j in range(coeffs.shape[1]):
            total += coeffs[i, j] * z1**i * z2**j
    return total


def reflected_value(coeffs, z1, z2):
    """z1^n z2^m conj(p(1/conj z1, 1/conj z2)) straight from the definition."""
    n, m = np.asarray(coeffs).shape[0] - 1, np.asarray(coeffs).shape[1] - 1
    inner = naive_eval(coeffs, 1 / np.conj(z1), 1 / np.conj(z2))
    return z1**n * z2**m * np.conj(inner)


def knese_value(z1, z2):
    return (2 * z1 * z2 - z1 - z2) / (2 - z1 - z2)


def disc_cap_volume(a, delta):
    """Integral of (1-|z|^2)^a over {|z| < 1, |z - 1| < delta}, in polar coordinates."""
    if delta >= 2:
        return math.pi / (a + 1)

    def f(r):
        if r <= 0:
            return 0.0
        c = (1 + r * r - delta * delta) / (2 * r)
        th = math.pi if c <= -1 else (0.0 if c >= 1 else math.acos(c))
        return (1 - r * r) ** a * r * 2 * th

    lo = max(0.0, 1.0 - delta)
    kink = math.sqrt(max(0.0, 1 - delta * delta))
    pts = [kink] if lo < kink < 1 else None
    val, _ = integrate.quad(f, lo, 1.0, points=pts, limit=400, epsabs=0, epsrel=1e-12)
    return val


def box_volume(a, d1, d2):
    return disc_cap_volume(a, d1) * disc_cap_volume(a, d2)


def sublevel_volume_quad(beta, delta):
    """pi^2 times the integral of u^b v^b over {uv <= delta} in the unit square, by quadrature in u."""
    b = beta + 1.0

    def inner(u):
        vmax = min(1.0, delta / u)
        return u**beta * vmax**b / b

    val, _ = integrate.quad(inner, 0.0, 1.0, points=[delta], limit=400, epsabs=0, epsrel=1e-12)
    return math.pi**2 * val
