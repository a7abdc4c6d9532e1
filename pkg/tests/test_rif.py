import cmath
import math

import numpy as np
import pytest

import oracles
from rifbergman.errors import (
    DenominatorTooSmall,
    InstabilityDetected,
    NoConvergence,
    NonUnimodularTarget,
    NotARationalInnerFunction,
    SourceNotSingular,
)
from rifbergman.poly import BiPolynomial
from rifbergman.rif import (
    BoundaryPoint,
    Neighborhood,
    RationalInnerFunction,
    build_pzeta,
    eval_rif,
    find_singularities,
    is_singular,
    nt_limit,
    rotate_symbol,
    stability_check,
    zero_set_interior_check,
)
from rifbergman.zoo import coordinate, knese, phi_ab_second

AB_ANGLES = [(2.0, 4.0), (0.5, 5.5), (math.pi, math.pi / 2)]


def interior_points(rng, n):
    r = np.sqrt(rng.uniform(0, 1, (2, n)))
    t = rng.uniform(0, 2 * np.pi, (2, n))
    return r[0] * np.exp(1j * t[0]), r[1] * np.exp(1j * t[1])


def test_knese_matches_closed_form():
    rng = np.random.default_rng(0)
    z1, z2 = interior_points(rng, 1000)
    assert np.allclose(knese()(z1, z2), oracles.knese_value(z1, z2), rtol=0, atol=1e-13)


def test_knese_special_values():
    phi = knese()
    assert phi(0, 0) == 0
    assert phi(0.5, 0) == pytest.approx(-0.5 / 1.5)


@pytest.mark.parametrize("angles", [None, *AB_ANGLES])
def test_modulus_below_one_inside_and_one_on_torus(angles):
    phi = knese() if angles is None else phi_ab_second(*angles)
    rng = np.random.default_rng(1)
    z1, z2 = interior_points(rng, 200_000)
    assert np.all(np.abs(phi(z1, z2)) < 1)
    t = np.linspace(0, 2 * np.pi, 128, endpoint=False)
    w1, w2 = np.meshgrid(np.exp(1j * t), np.exp(1j * t), indexing="ij")
    keep = np.abs(phi.denominator(w1, w2)) > 1e-3
    assert np.max(np.abs(np.abs(phi(w1[keep], w2[keep])) - 1)) < 1e-12


def test_knese_equals_one_on_antidiagonal_and_minus_one_on_coordinate_circles():
    phi = knese()
    t = np.linspace(0.1, 2 * np.pi - 0.1, 50)
    assert np.allclose(phi(np.exp(1j * t), np.exp(-1j * t)), 1.0, atol=1e-12)
    assert np.allclose(phi(np.ones_like(t), np.exp(1j * t)), -1.0, atol=1e-12)


def test_guard_raises_at_singularity():
    with pytest.raises(DenominatorTooSmall):
        knese()(1.0, 1.0)


def test_wrong_numerator_rejected():
    with pytest.raises(NotARationalInnerFunction):
        RationalInnerFunction(BiPolynomial([[2, -1], [-1, 0]]), numerator=BiPolynomial([[1, 0], [0, 1]]))


def test_unstable_denominator_rejected():
    with pytest.raises(InstabilityDetected):
        RationalInnerFunction(BiPolynomial([[0.5, 0], [0, -1]]))
    with pytest.raises(InstabilityDetected):
        stability_check(BiPolynomial([[1, 0], [0, -4]]))


def test_stability_report_for_knese():
    rep = stability_check(BiPolynomial([[2, -1], [-1, 0]]), margin=0.1)
    assert rep.min_modulus == pytest.approx(0.2, abs=1e-9)


def test_nt_limit_knese_origin():
    lim = nt_limit(knese(), BoundaryPoint((0.0, 0.0)))
    assert abs(lim.value + 1) < 1e-8
    assert abs(lim.modulus - 1) < 1e-10


@pytest.mark.parametrize("a,b", AB_ANGLES)
def test_nt_limit_ab_second_coordinate(a, b):
    A, B = cmath.exp(1j * a), cmath.exp(1j * b)
    lim = nt_limit(phi_ab_second(a, b), BoundaryPoint.from_complex(A.conjugate(), B.conjugate()))
    # along the radius, (2r^2 conj(AB) - 2r conj(AB)) / (2 - 2r) = -r conj(AB)
    assert abs(lim.value + (A * B).conjugate()) < 1e-8


def test_nt_limit_smooth_point():
    lim = nt_limit(knese(), BoundaryPoint((1.0, 2.0)))
    assert lim.value == pytest.approx(complex(oracles.knese_value(cmath.exp(1j), cmath.exp(2j))), abs=1e-9)


def test_nt_limit_needs_eight_radii():
    with pytest.raises(ValueError):
        nt_limit(knese(), BoundaryPoint((0, 0)), radii=[0.5, 0.6, 0.7])


def test_nt_limit_no_convergence():
    # radii crowding the singularity make the denominator fall under the guard
    radii = [1 - 10.0 ** -k for k in range(6, 16)]
    with pytest.raises(NoConvergence):
        nt_limit(knese(), BoundaryPoint((0.0, 0.0)), radii=radii, guard=1e-8)


def test_pzeta_knese_margin_value():
    P = build_pzeta(knese(), 1.0)
    assert np.allclose(P.coeffs, [[-2, 0], [0, 2]])
    assert zero_set_interior_check(P, 0.1) == pytest.approx(0.38, abs=1e-9)


def test_pzeta_rejects_non_unimodular():
    with pytest.raises(NonUnimodularTarget):
        build_pzeta(knese(), 0.5)


@pytest.mark.parametrize("k", range(0, 16, 3))
def test_pzeta_positive_inside(k):
    zeta = cmath.exp(2j * math.pi * k / 16)
    for phi in (knese(), phi_ab_second(2.0, 4.0)):
        assert zero_set_interior_check(build_pzeta(phi, zeta), 0.1) > 0


def test_singularities_knese_and_ab():
    sings = find_singularities(knese())
    assert len(sings) == 1 and sings[0].distance(BoundaryPoint((0, 0))) < 1e-7
    for a, b in AB_ANGLES:
        sings = find_singularities(phi_ab_second(a, b))
        assert len(sings) == 1
        assert sings[0].distance(BoundaryPoint((-a, -b))) < 1e-7


def test_smooth_coordinate_has_no_singularity():
    assert find_singularities(coordinate(1)) == []


def test_rotation_moves_singularity_and_preserves_values():
    phi = phi_ab_second(2.0, 4.0)
    src = BoundaryPoint((-2.0, -4.0))
    lam = cmath.exp(0.3j)
    rot = rotate_symbol(phi, src, BoundaryPoint((0, 0)), lam)
    assert is_singular(rot, BoundaryPoint((0, 0)))
    z1, z2 = 0.3 + 0.1j, -0.2 + 0.5j
    mu1, mu2 = src.point
    assert rot(z1, z2) == pytest.approx(lam * phi(mu1 * z1, mu2 * z2), abs=1e-13)
    # the rotated symbol is still inner
    t = np.linspace(0.2, 6.0, 40)
    assert np.allclose(np.abs(rot(np.exp(1j * t), np.exp(2j * t))), 1, atol=1e-12)


def test_rotation_errors():
    with pytest.raises(SourceNotSingular):
        rotate_symbol(knese(), BoundaryPoint((1, 1)), BoundaryPoint((0, 0)))
    with pytest.raises(NonUnimodularTarget):
        rotate_symbol(knese(), BoundaryPoint((0, 0)), BoundaryPoint((1, 1)), 2.0)


def test_boundary_point_and_neighborhood():
    p = BoundaryPoint((-0.1, 7.0))
    assert 0 <= p.angles[0] < 2 * np.pi and 0 <= p.angles[1] < 2 * np.pi
    assert p.distance(BoundaryPoint((2 * np.pi - 0.1, 7.0 - 2 * np.pi))) < 1e-12
    nb = Neighborhood(BoundaryPoint((0, 0)), 0.3)
    assert nb.contains(0.9, 0.95)
    assert not nb.contains(0.5, 0.95)
    with pytest.raises(ValueError):
        Neighborhood(BoundaryPoint((0, 0)), 1.5)
