"""Acceptance criteria 1-9, each checked at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line; the lines are collected
again in the terminal summary.
"""

import cmath
import math
import time

import numpy as np
import pytest

import oracles
from rifbergman.cli import main
from rifbergman.errors import BetaTooSmall
from rifbergman.fitting import fit_scaling_exponent
from rifbergman.measure import (
    CarlesonBox,
    WeightParams,
    carleson_box_volume,
    sublevel_indicator,
    sublevel_volume_exact,
    weighted_volume_mc,
)
from rifbergman.operators import ORIGIN, carleson_sweep, lojasiewicz_fit, theorem_certificate
from rifbergman.poly import BiPolynomial, reflect
from rifbergman.rif import BoundaryPoint, Neighborhood, build_pzeta, find_singularities, nt_limit, rotate_symbol, zero_set_interior_check
from rifbergman.zoo import coordinate, identity_pair, knese, knese_denominator, knese_pair, phi_ab_second

SEED = 0xB1D15C
AB_ANGLES = [(2.0, 4.0), (0.5, 5.5), (math.pi, math.pi / 2)]
RESULTS = []


def report(n, ok, detail, started):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  ({detail}; {time.perf_counter() - started:.1f} s)"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_1_reflection_involution():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(1000):
        n, m = rng.integers(0, 5, size=2)
        c = rng.uniform(-1, 1, (n + 1, m + 1)) + 1j * rng.uniform(-1, 1, (n + 1, m + 1))
        p = BiPolynomial(c)
        worst = max(worst, float(np.max(np.abs(reflect(reflect(p)).coeffs - c))))
    knese_ok = np.array_equal(reflect(knese_denominator()).coeffs, np.array([[0, -1], [-1, 2]], dtype=complex))
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-14 and knese_ok and elapsed < 1.0,
           f"max involution error {worst:.1e}, Knese numerator exact={knese_ok}", t0)


def test_criterion_2_sublevel_volume():
    t0 = time.perf_counter()
    misses, worst_fit = [], 0.0
    for beta in (0.0, 0.5, 1.0, 2.0):
        w = WeightParams(beta)
        for delta in (1e-1, 1e-2, 1e-3):
            est = weighted_volume_mc(sublevel_indicator(delta), w, 1_000_000, SEED, levels=12)
            exact = sublevel_volume_exact(w, delta)
            if not est.within(exact):
                misses.append((beta, delta, (est.value - exact) / est.std_error))
        grid = np.geomspace(1e-1, 1e-3, 9)
        fit = fit_scaling_exponent([(d, sublevel_volume_exact(w, d)) for d in grid], with_log_correction=True)
        worst_fit = max(worst_fit, abs(fit.exponent - (beta + 1)))
    elapsed = time.perf_counter() - t0
    report(2, not misses and worst_fit <= 0.05 and elapsed < 60,
           f"MC misses beyond 3 se: {misses or 'none'}, worst exponent error {worst_fit:.3f}", t0)


def test_criterion_3_carleson_box_growth():
    t0 = time.perf_counter()
    scales = [2.0**-k for k in range(2, 10)]
    pts = [(d, carleson_box_volume(WeightParams(0.0), CarlesonBox.square(ORIGIN, d), 1_000_000, SEED).value)
           for d in scales]
    fit = fit_scaling_exponent(pts, min_decades=2.0)
    exact = fit_scaling_exponent([(d, oracles.box_volume(0.0, d, d)) for d in scales])
    elapsed = time.perf_counter() - t0
    report(3, abs(fit.exponent - 4.0) <= 0.1 and elapsed < 60,
           f"fitted exponent {fit.exponent:.4f} (quadrature {exact.exponent:.4f})", t0)


def test_criterion_4_rif_modulus():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    r = np.sqrt(rng.uniform(0, 1, (2, 1_000_000)))
    t = rng.uniform(0, 2 * np.pi, (2, 1_000_000))
    z1, z2 = r[0] * np.exp(1j * t[0]), r[1] * np.exp(1j * t[1])
    grid = np.arange(512) * (2 * np.pi / 512)
    w1, w2 = np.meshgrid(np.exp(1j * grid), np.exp(1j * grid), indexing="ij")
    violations, torus_err = 0, 0.0
    for phi in [knese()] + [phi_ab_second(a, b) for a, b in AB_ANGLES]:
        violations += int(np.sum(np.abs(phi(z1, z2)) >= 1))
        keep = np.ones(w1.shape, dtype=bool)
        for s in find_singularities(phi):
            e1, e2 = s.point
            keep &= ~((np.abs(w1 - e1) < 1e-2) & (np.abs(w2 - e2) < 1e-2))
        torus_err = max(torus_err, float(np.max(np.abs(np.abs(phi(w1[keep], w2[keep])) - 1))))
    lim = nt_limit(knese(), ORIGIN)
    ok = (violations == 0 and torus_err < 1e-9 and abs(lim.value + 1) <= 1e-8
          and abs(lim.modulus - 1) <= 1e-10)
    elapsed = time.perf_counter() - t0
    report(4, ok and elapsed < 30,
           f"{violations} interior violations, torus error {torus_err:.1e}, limit {lim.value:.12g}", t0)


def test_criterion_5_zero_set_evidence():
    t0 = time.perf_counter()
    knese_min = zero_set_interior_check(build_pzeta(knese(), 1.0), 0.1)
    worst = math.inf
    for phi in [knese()] + [phi_ab_second(a, b) for a, b in AB_ANGLES]:
        for k in range(64):
            worst = min(worst, zero_set_interior_check(build_pzeta(phi, cmath.exp(2j * math.pi * k / 64)), 0.1))
    elapsed = time.perf_counter() - t0
    report(5, knese_min >= 0.379 and worst > 0 and elapsed < 30,
           f"Knese min {knese_min:.6f}, smallest over the zoo {worst:.4g}", t0)


def test_criterion_6_lojasiewicz():
    t0 = time.perf_counter()
    nb = Neighborhood(ORIGIN, 0.3)
    k = lojasiewicz_fit(knese(), ORIGIN, nb, 400_000, 32, SEED)
    z = lojasiewicz_fit(coordinate(1), ORIGIN, nb, 400_000, 32, SEED, require_singular=False)
    gaps = []
    for a, b in AB_ANGLES:
        rot = rotate_symbol(phi_ab_second(a, b), BoundaryPoint((-a, -b)), ORIGIN)
        gaps.append(abs(lojasiewicz_fit(rot, ORIGIN, nb, 400_000, 32, SEED).exponent_hat - k.exponent_hat))
    ok = (k.exponent_hat <= 2.2 and len(k.envelope_points) >= 6 and abs(z.exponent_hat - 1) <= 0.15
          and max(gaps) <= 0.2)
    elapsed = time.perf_counter() - t0
    report(6, ok and elapsed < 60,
           f"Knese q={k.exponent_hat:.3f} over {len(k.envelope_points)} bins, z1 q={z.exponent_hat:.3f}, "
           f"rotated AB gap {max(gaps):.3f}", t0)


def test_criterion_7_certificate():
    t0 = time.perf_counter()
    rep = theorem_certificate(knese_pair(), 8.0, 2.0, scales=[2.0**-k for k in range(2, 9)],
                              samples=10_000_000, seed=SEED)
    try:
        theorem_certificate(knese_pair(), 3.0, 2.0)
        rejected = False
    except BetaTooSmall:
        rejected = True
    exponent = rep.pullback_fit.exponent
    ok = rep.a == 0.0 and exponent >= 3.7 and not rep.growth_flag and rejected
    elapsed = time.perf_counter() - t0
    report(7, ok and elapsed < 300,
           f"pull-back exponent {exponent:.3f} vs 4, growth_flag={rep.growth_flag}, beta=3 rejected={rejected}", t0)


def test_criterion_8_identity_sweep():
    t0 = time.perf_counter()
    centers = [ORIGIN, BoundaryPoint((1.0, 2.0)), BoundaryPoint((math.pi, 0.3)),
               BoundaryPoint((4.0, 5.5)), BoundaryPoint((2.5, math.pi))]
    scales = [2.0**-k for k in range(6)]
    rep = carleson_sweep(identity_pair(), 1.0, 1.0, centers, scales, 1_000_000, SEED)
    worst = max(abs(r.ratio - 1) / r.ratio_se for r in rep.ratio_table)
    elapsed = time.perf_counter() - t0
    report(8, len(rep.ratio_table) == 30 and worst <= 3 and elapsed < 60,
           f"{len(rep.ratio_table)} ratios, worst deviation {worst:.2f} se", t0)


CONFIGS = {
    "reflect-check": 'symbol = "phi_ab"\n',
    "volume-lemma": "beta = 1.0\nscales = [0.1, 0.01, 0.001]\nsamples = 200000\n",
    "box-scaling": "a = 1.0\nsamples = 100000\n",
    "nt-limit": 'symbol = "phi_ab"\n',
    "zero-set": 'symbol = "knese"\nzetas = 16\n',
    "lojasiewicz": 'symbol = "phi_ab"\nsamples = 200000\n',
    "certificate": 'symbol = "knese-pair"\nbeta = 8.0\nq = 2.0\nsamples = 200000\n',
    "sweep": 'symbol = "knese-pair"\nbeta = 8.0\na = 0.0\nsamples = 200000\nscales = [0.5, 0.25]\ncenters = [[0.0, 0.0], [1.0, 2.0]]\n',
}


def test_criterion_9_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    differing = []
    for name, body in CONFIGS.items():
        cfg = tmp_path / f"{name}.toml"
        cfg.write_text(f'experiment = "{name}"\n{body}')
        blobs = []
        for workers in (1, 4, 8):
            for fmt in ("json", "csv"):
                out = tmp_path / f"{name}-{workers}.{fmt}"
                if main(["--config", str(cfg), "--workers", str(workers), "--format", fmt, "--output", str(out)]) != 0:
                    differing.append(f"{name} failed")
                blobs.append(out.read_bytes())
        if blobs[0::2].count(blobs[0]) != 3 or blobs[1::2].count(blobs[1]) != 3:
            differing.append(name)
    capsys.readouterr()
    report(9, not differing, f"{len(CONFIGS)} experiments x workers 1/4/8, differing: {differing or 'none'}", t0)
