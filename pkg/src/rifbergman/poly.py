"""Dense bivariate polynomials with complex coefficients.

A polynomial of bidegree (n, m) is stored as an (n+1, m+1) complex array
``coeffs`` with ``coeffs[i, j]`` the coefficient of z1**i * z2**j.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidPolynomial


@dataclass(frozen=True, eq=False)
class BiPolynomial:
    coeffs: np.ndarray
    bidegree: tuple[int, int] = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, copy=True)
        if c.ndim == 0:
            c = c.reshape(1, 1)
        if c.ndim != 2 or c.shape[0] == 0 or c.shape[1] == 0:
            raise InvalidPolynomial(f"coefficient grid must be 2-D, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidPolynomial("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "bidegree", (c.shape[0] - 1, c.shape[1] - 1))

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int], complex], bidegree=None) -> BiPolynomial:
        """Build from ``{(i, j): coefficient}``; grid size is the tight bidegree unless given."""
        if bidegree is None:
            n = max((i for i, _ in terms), default=0)
            m = max((j for _, j in terms), default=0)
        else:
            n, m = bidegree
        c = np.zeros((n + 1, m + 1), dtype=complex)
        for (i, j), v in terms.items():
            c[i, j] += v
        return cls(c)

    def __call__(self, z1, z2):
        return eval_poly(self, z1, z2)

    def __sub__(self, other: BiPolynomial) -> BiPolynomial:
        n = max(self.bidegree[0], other.bidegree[0])
        m = max(self.bidegree[1], other.bidegree[1])
        return BiPolynomial(_padded(self, n, m) - _padded(other, n, m))

    def __mul__(self, scalar) -> BiPolynomial:
        return BiPolynomial(self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def allclose(self, other: BiPolynomial, atol: float = 1e-14) -> bool:
        n = max(self.bidegree[0], other.bidegree[0])
        m = max(self.bidegree[1], other.bidegree[1])
        return bool(np.allclose(_padded(self, n, m), _padded(other, n, m), rtol=0, atol=atol))

    def substitute_scaled(self, mu1: complex, mu2: complex) -> BiPolynomial:
        """Coefficients of z -> p(mu1*z1, mu2*z2)."""
        n, m = self.bidegree
        scale = np.power(complex(mu1), np.arange(n + 1))[:, None] * np.power(complex(mu2), np.arange(m + 1))[None, :]
        return BiPolynomial(self.coeffs * scale)

    def __repr__(self):
        return f"BiPolynomial(bidegree={self.bidegree}, terms={format_terms(self)!r})"


def _padded(p: BiPolynomial, n: int, m: int) -> np.ndarray:
    out = np.zeros((n + 1, m + 1), dtype=complex)
    out[: p.bidegree[0] + 1, : p.bidegree[1] + 1] = p.coeffs
    return out


def trim(p: BiPolynomial, tol: float = 0.0) -> BiPolynomial:
    """Drop trailing all-zero rows/columns so the bidegree is tight."""
    c = p.coeffs
    mask = np.abs(c) > tol
    if not mask.any():
        return BiPolynomial(np.zeros((1, 1), dtype=complex))
    rows = np.nonzero(mask.any(axis=1))[0]
    cols = np.nonzero(mask.any(axis=0))[0]
    return BiPolynomial(c[: rows[-1] + 1, : cols[-1] + 1])


def is_tight(p: BiPolynomial) -> bool:
    return trim(p).bidegree == p.bidegree


def reflect(p: BiPolynomial) -> BiPolynomial:
    """z1^n z2^m conj(p(1/conj z1, 1/conj z2)) on the same (n, m) grid."""
    if p.is_zero():
        raise InvalidPolynomial("cannot reflect the zero polynomial")
    return BiPolynomial(np.conj(p.coeffs[::-1, ::-1]))


def eval_poly(p: BiPolynomial, z1, z2):
    """Double Horner evaluation; broadcasts over array arguments."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    c = p.coeffs
    n, m = p.bidegree
    acc = None
    for i in range(n, -1, -1):
        inner = np.full(np.broadcast(z1, z2).shape, c[i, m], dtype=complex)
        for j in range(m - 1, -1, -1):
            inner = inner * z2 + c[i, j]
        acc = inner if acc is None else acc * z1 + inner
    if acc.ndim == 0:
        return complex(acc)
    return acc


def grad_poly(p: BiPolynomial, z1, z2):
    """Partial derivatives (dp/dz1, dp/dz2) evaluated at (z1, z2)."""
    n, m = p.bidegree
    c = p.coeffs
    d1 = BiPolynomial(c[1:, :] * np.arange(1, n + 1)[:, None]) if n > 0 else BiPolynomial(np.zeros((1, 1)))
    d2 = BiPolynomial(c[:, 1:] * np.arange(1, m + 1)[None, :]) if m > 0 else BiPolynomial(np.zeros((1, 1)))
    return eval_poly(d1, z1, z2), eval_poly(d2, z1, z2)


def format_terms(p: BiPolynomial, digits: int = 12, descending: bool = False) -> str:
    """Human-readable sum of monomials, e.g. ``2*z1*z2 - z1 - z2``."""
    parts = []
    n, m = p.bidegree
    if descending:
        order = sorted(((i, j) for i in range(n + 1) for j in range(m + 1)),
                       key=lambda ij: (-(ij[0] + ij[1]), -ij[0]))
    else:
        order = sorted(((i, j) for i in range(n + 1) for j in range(m + 1)),
                       key=lambda ij: (ij[0] + ij[1], -ij[0]))
    for i, j in order:
        c = complex(p.coeffs[i, j])
        if c == 0:
            continue
        c = complex(round(c.real, digits), round(c.imag, digits))
        if c.imag == 0:
            val = c.real
            sign = "-" if val < 0 else "+"
            mag = abs(val)
            coef = "" if (mag == 1 and (i or j)) else f"{mag:g}"
        else:
            sign = "+"
            coef = f"({c.real:g}{c.imag:+g}j)"
        mono = "*".join(s for s in (_power("z1", i), _power("z2", j)) if s)
        body = "*".join(s for s in (coef, mono) if s)
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _power(name: str, k: int) -> str:
    if k == 0:
        return ""
    return name if k == 1 else f"{name}^{k}"
