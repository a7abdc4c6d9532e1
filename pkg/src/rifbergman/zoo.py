"""Named symbols: the Knese function, the Phi_{A,B} family and trivial coordinates."""

from __future__ import annotations

import cmath

from .poly import BiPolynomial
from .rif import RationalInnerFunction, SymbolPair


def knese_denominator() -> BiPolynomial:
    return BiPolynomial.from_terms({(0, 0): 2, (1, 0): -1, (0, 1): -1}, bidegree=(1, 1))


def knese() -> RationalInnerFunction:
    """(2 z1 z2 - z1 - z2) / (2 - z1 - z2), singular only at (1, 1)."""
    return RationalInnerFunction(knese_denominator())


def ab_denominator(angle_a: float, angle_b: float) -> BiPolynomial:
    A = cmath.exp(1j * angle_a)
    B = cmath.exp(1j * angle_b)
    return BiPolynomial.from_terms({(0, 0): 2, (1, 0): -A, (0, 1): -B}, bidegree=(1, 1))


def phi_ab_second(angle_a: float, angle_b: float) -> RationalInnerFunction:
    """(2 z1 z2 - conj(B) z1 - conj(A) z2) / (2 - A z1 - B z2) with A = e^{i a}, B = e^{i b}.

    Unimodular A and B satisfy |A| + |B| = 2 automatically; A = 1 or B = 1 is
    accepted but then the pair no longer matches the intended family.
    """
    return RationalInnerFunction(ab_denominator(angle_a, angle_b))


def phi_ab(angle_a: float, angle_b: float) -> SymbolPair:
    return SymbolPair(knese(), phi_ab_second(angle_a, angle_b))


def knese_pair() -> SymbolPair:
    k = knese()
    return SymbolPair(k, k)


def coordinate(index: int) -> RationalInnerFunction:
    """The RIF z1 (index 1) or z2 (index 2): p = 1 with a single monomial factor."""
    powers = (1, 0) if index == 1 else (0, 1)
    return RationalInnerFunction(BiPolynomial([[1.0]]), powers)


def identity_pair() -> SymbolPair:
    return SymbolPair(coordinate(1), coordinate(2))


SYMBOLS = {
    "knese": knese,
    "knese-pair": knese_pair,
    "phi_ab": phi_ab,
    "identity-pair": identity_pair,
    "z1": lambda: coordinate(1),
    "z2": lambda: coordinate(2),
}
