"""Config-driven experiment runner.

Usage::

    rifbergman --config volume.toml [--seed 0x2A] [--workers 4] [--output out.csv] [--format csv]

The config is a flat TOML file. Top-level keys apply to every experiment; an
optional table named after the experiment overrides them::

    experiment = "volume-lemma"
    beta = 1.0
    scales = [0.1, 0.01, 0.001]
    output = "lemma.csv"

Exit status: 0 on success, 2 on a configuration error, 3 on a computational
error (the error class name is printed on stderr).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli

from . import operators as ops
from . import serialize as ser
from . import zoo
from .errors import ConfigError, RifError
from .fitting import fit_scaling_exponent
from .measure import (
    CarlesonBox,
    WeightParams,
    carleson_box_volume,
    sublevel_indicator,
    sublevel_volume_exact,
    weighted_volume_mc,
)
from .poly import format_terms, is_tight, reflect
from .rif import (
    BoundaryPoint,
    Neighborhood,
    RationalInnerFunction,
    SymbolPair,
    build_pzeta,
    find_singularities,
    nt_limit,
    zero_set_interior_check,
)
from .sampling import parse_seed

DEFAULT_SEED = 0xB1D15C

EXPERIMENTS = ("reflect-check", "volume-lemma", "box-scaling", "nt-limit", "zero-set",
               "lojasiewicz", "certificate", "sweep")

# default sample counts keep the standard error under 2% at the coarsest scale
DEFAULT_SAMPLES = {
    "volume-lemma": 1_000_000,
    "box-scaling": 1_000_000,
    "lojasiewicz": 400_000,
    "certificate": 1_000_000,
    "sweep": 1_000_000,
}

NEEDS = {
    "volume-lemma": ("beta",),
    "certificate": ("beta",),
    "sweep": ("beta", "a"),
}


@dataclass
class ExperimentConfig:
    experiment: str
    symbol: object = "knese"
    symbol_params: dict = field(default_factory=dict)
    beta: float | None = None
    a: float | None = None
    q: float | None = None
    scales: list = field(default_factory=list)
    samples: int | None = None
    seed: int = DEFAULT_SEED
    output: str | None = None
    format: str = "json"
    options: dict = field(default_factory=dict)


_KNOWN = {"experiment", "symbol", "symbol_params", "angle_a", "angle_b", "beta", "a", "q", "scales",
          "samples", "seed", "output", "format"}


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    flat = {k: v for k, v in raw.items() if not isinstance(v, dict) or k == "symbol_params"}
    exp = flat.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}; got {exp!r}")
    table = raw.get(exp, {})
    if not isinstance(table, dict):
        raise ConfigError(f"[{exp}] must be a table")
    flat.update(table)
    try:
        params = dict(flat.get("symbol_params", {}))
        for key in ("angle_a", "angle_b"):
            if key in flat:
                params[key] = float(flat[key])
        cfg = ExperimentConfig(
            experiment=exp,
            symbol=flat.get("symbol", "knese"),
            symbol_params=params,
            beta=_opt_float(flat.get("beta")),
            a=_opt_float(flat.get("a")),
            q=_opt_float(flat.get("q")),
            scales=[_scale(s) for s in flat.get("scales", [])],
            samples=None if flat.get("samples") is None else int(flat["samples"]),
            seed=parse_seed(flat.get("seed", DEFAULT_SEED)),
            output=flat.get("output"),
            format=str(flat.get("format", "json")),
            options={k: v for k, v in flat.items() if k not in _KNOWN},
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value in config: {exc}") from exc
    validate(cfg)
    return cfg


def _opt_float(x):
    if x is None:
        return None
    if isinstance(x, bool):
        raise ValueError("expected a number")
    return float(x)


def _scale(s):
    if isinstance(s, (list, tuple)):
        if len(s) != 2:
            raise ValueError("rectangular scales must be [delta1, delta2] pairs")
        return (float(s[0]), float(s[1]))
    return float(s)


def validate(cfg: ExperimentConfig):
    for key in NEEDS.get(cfg.experiment, ()):
        if getattr(cfg, key) is None:
            raise ConfigError(f"experiment {cfg.experiment} requires '{key}'")
    if cfg.format not in ("json", "csv"):
        raise ConfigError("format must be json or csv")
    if cfg.samples is not None and cfg.samples <= 0:
        raise ConfigError("samples must be positive")
    if cfg.experiment == "volume-lemma" and cfg.scales and any(not 0 < s < 1 for s in cfg.scales):
        raise ConfigError("volume-lemma scales must lie in (0, 1)")
    if cfg.experiment in ("box-scaling", "certificate", "sweep"):
        for s in cfg.scales:
            pair = s if isinstance(s, tuple) else (s, s)
            if not all(0 < d <= 2 for d in pair):
                raise ConfigError("box scales must lie in (0, 2]")
    if cfg.experiment == "volume-lemma" and cfg.beta is not None and cfg.beta <= -1:
        raise ConfigError("beta must exceed -1")
    resolve_symbol(cfg)


def resolve_symbol(cfg: ExperimentConfig):
    """A SymbolPair or a RationalInnerFunction from a zoo name or inline JSON."""
    spec = cfg.symbol
    try:
        if isinstance(spec, str) and spec.strip().startswith(("{", "[")):
            import json
            spec = json.loads(spec)
        if isinstance(spec, list):
            if len(spec) != 2:
                raise ConfigError("an inline symbol pair needs exactly two polynomials")
            return SymbolPair(ser.rif_from_json(spec[0]), ser.rif_from_json(spec[1]))
        if isinstance(spec, dict):
            return ser.rif_from_json(spec)
        if spec == "phi_ab":
            return zoo.phi_ab(cfg.symbol_params.get("angle_a", 2.0), cfg.symbol_params.get("angle_b", 4.0))
        if spec == "phi_ab_second":
            return zoo.phi_ab_second(cfg.symbol_params.get("angle_a", 2.0),
                                     cfg.symbol_params.get("angle_b", 4.0))
        if spec in zoo.SYMBOLS:
            return zoo.SYMBOLS[spec]()
    except ConfigError:
        raise
    except (RifError, ValueError, TypeError) as exc:
        raise ConfigError(f"cannot build symbol: {exc}") from exc
    raise ConfigError(f"unknown symbol {spec!r}; known: {', '.join(sorted(zoo.SYMBOLS))}")


def _as_pair(sym) -> SymbolPair:
    return sym if isinstance(sym, SymbolPair) else SymbolPair(sym, sym)


def _coordinates(sym) -> list[RationalInnerFunction]:
    if isinstance(sym, SymbolPair):
        return [sym.first] if sym.second is sym.first else [sym.first, sym.second]
    return [sym]


def _point(opt) -> BoundaryPoint | None:
    if opt is None:
        return None
    if not isinstance(opt, (list, tuple)) or len(opt) != 2:
        raise ConfigError("points are [theta1, theta2] pairs")
    return BoundaryPoint((float(opt[0]), float(opt[1])))


# ---------------------------------------------------------------- experiments
# each returns (json payload, csv header, csv rows, one-line key number)

def _reflect_check(cfg, workers):
    out, rows = [], []
    for idx, phi in enumerate(_coordinates(resolve_symbol(cfg))):
        p = phi.denominator
        twice = reflect(reflect(p))
        err = float(np.max(np.abs(twice.coeffs - p.coeffs)))
        out.append({"denominator": ser.poly_to_json(p, phi.monomial_powers),
                    "numerator": ser.poly_to_json(phi.numerator),
                    "numerator_terms": format_terms(phi.numerator, descending=True),
                    "denominator_terms": format_terms(p),
                    "tight_bidegree": is_tight(p),
                    "involution_error": err})
        n, m = phi.numerator.bidegree
        for i in range(n + 1):
            for j in range(m + 1):
                c = complex(phi.numerator.coeffs[i, j])
                rows.append([idx, i, j, c.real, c.imag])
    key = "numerator=" + " | ".join(o["numerator_terms"] for o in out)
    return {"coordinates": out}, ["coordinate", "i", "j", "re", "im"], rows, key


def _volume_lemma(cfg, workers):
    w = WeightParams(cfg.beta)
    scales = cfg.scales or [1e-1, 1e-2, 1e-3]
    samples = cfg.samples or DEFAULT_SAMPLES["volume-lemma"]
    levels = int(cfg.options.get("levels", 12))
    rows, table = [], []
    for d in sorted(scales, reverse=True):
        exact = sublevel_volume_exact(w, d)
        mc = weighted_volume_mc(sublevel_indicator(d), w, samples, cfg.seed, levels=levels, workers=workers)
        rows.append([d, exact, mc.value, mc.std_error])
        table.append({"delta": d, "exact": exact, "mc": ser.volume_to_json(mc),
                      "within_3se": mc.within(exact)})
    # the exponent is fitted on the closed form over a 9-point grid spanning the requested range
    grid = np.geomspace(max(scales), min(scales), 9)
    fit = fit_scaling_exponent([(d, sublevel_volume_exact(w, d)) for d in grid], with_log_correction=True,
                               min_decades=min(2.0, math.log10(max(scales) / min(scales))))
    payload = {"beta": cfg.beta, "levels": levels, "table": table, "fit": ser.fit_to_json(fit)}
    return payload, ["delta", "exact", "mc", "se"], rows, f"exponent={fit.exponent:.4f}"


def _box_scaling(cfg, workers):
    a = cfg.a if cfg.a is not None else (cfg.beta if cfg.beta is not None else 0.0)
    center = _point(cfg.options.get("center")) or BoundaryPoint((0.0, 0.0))
    scales = cfg.scales or list(ops.DEFAULT_SCALES)
    samples = cfg.samples or DEFAULT_SAMPLES["box-scaling"]
    rows, pts = [], []
    for s in sorted(scales, key=lambda x: -max(x) if isinstance(x, tuple) else -x):
        radii = s if isinstance(s, tuple) else (s, s)
        v = carleson_box_volume(WeightParams(a), CarlesonBox(center, radii), samples, cfg.seed, workers=workers)
        rows.append([*radii, v.value, v.std_error])
        pts.append((radii[0] * radii[1], v.value))
    fit = fit_scaling_exponent([(math.sqrt(s), v) for s, v in pts], min_decades=1.0)
    payload = {"a": a, "center": list(center.angles),
               "table": [{"radii": r[:2], "volume": r[2], "std_error": r[3]} for r in rows],
               "fit": ser.fit_to_json(fit)}
    return payload, ["delta1", "delta2", "volume", "se"], rows, f"exponent={fit.exponent:.4f}"


def _nt_limit(cfg, workers):
    out, rows = [], []
    given = _point(cfg.options.get("point"))
    for idx, phi in enumerate(_coordinates(resolve_symbol(cfg))):
        points = [given] if given else (find_singularities(phi) or [BoundaryPoint((0.0, 0.0))])
        for pt in points:
            lim = nt_limit(phi, pt)
            out.append({"coordinate": idx, "point": list(pt.angles), "value": ser._num(lim.value),
                        "modulus": lim.modulus, "change": lim.change, "rate": lim.rate})
            rows.append([idx, *pt.angles, lim.value.real, lim.value.imag, lim.modulus])
    key = "limits=" + ", ".join(f"{complex(o['value'][0], o['value'][1]):.10g}" for o in out)
    return {"limits": out}, ["coordinate", "theta1", "theta2", "re", "im", "modulus"], rows, key


def _zero_set(cfg, workers):
    margins = [float(m) for m in cfg.options.get("margins", [0.05, 0.1, 0.2])]
    count = int(cfg.options.get("zetas", 64))
    grid = int(cfg.options.get("grid", 32))
    rows, worst = [], math.inf
    for idx, phi in enumerate(_coordinates(resolve_symbol(cfg))):
        for k in range(count):
            zeta = np.exp(2j * math.pi * k / count)
            P = build_pzeta(phi, zeta)
            for margin in margins:
                mn = zero_set_interior_check(P, margin, grid)
                worst = min(worst, mn)
                rows.append([idx, 2 * math.pi * k / count, margin, mn])
    payload = {"margins": margins, "zetas": count,
               "table": [{"coordinate": r[0], "zeta_angle": r[1], "margin": r[2], "min_modulus": r[3]}
                         for r in rows],
               "min_overall": worst}
    return payload, ["coordinate", "zeta_angle", "margin", "min_modulus"], rows, f"min={worst:.6g}"


def _lojasiewicz(cfg, workers):
    radius = float(cfg.options.get("radius", 0.3))
    bins = int(cfg.options.get("bins", 32))
    samples = cfg.samples or DEFAULT_SAMPLES["lojasiewicz"]
    given = _point(cfg.options.get("point"))
    out, rows = [], []
    for idx, phi in enumerate(_coordinates(resolve_symbol(cfg))):
        eta = given or (find_singularities(phi) or [None])[0]
        if eta is None:
            raise ConfigError(f"coordinate {idx} has no torus singularity; give 'point'")
        est = ops.lojasiewicz_fit(phi, eta, Neighborhood(eta, radius), samples, bins, cfg.seed,
                                  require_singular=given is None, workers=workers)
        out.append({"coordinate": idx, "point": list(eta.angles), **ser.lojasiewicz_to_json(est)})
        rows.extend([idx, m, g] for m, g in est.envelope_points)
    key = "q_hat=" + ", ".join(f"{o['exponent_hat']:.4f}" for o in out)
    return {"estimates": out}, ["coordinate", "proximity", "gap"], rows, key


def _certificate(cfg, workers):
    sym = _as_pair(resolve_symbol(cfg))
    report = ops.theorem_certificate(
        sym, cfg.beta, cfg.q, [s if not isinstance(s, tuple) else s[0] for s in cfg.scales] or ops.DEFAULT_SCALES,
        cfg.samples or DEFAULT_SAMPLES["certificate"], cfg.seed,
        radius=float(cfg.options.get("radius", 0.3)), workers=workers)
    fit = report.pullback_fit
    key = f"growth_flag={report.growth_flag} pullback_exponent={fit.exponent:.4f}" if fit else \
        f"growth_flag={report.growth_flag}"
    return ser.report_to_json(report), ser.REPORT_COLUMNS, ser.report_rows(report), key


def _sweep(cfg, workers):
    sym = _as_pair(resolve_symbol(cfg))
    centers = cfg.options.get("centers")
    centers = [_point(c) for c in centers] if centers else None
    rect = [s for s in cfg.scales if isinstance(s, tuple)]
    square = [s for s in cfg.scales if not isinstance(s, tuple)]
    report = ops.carleson_sweep(sym, cfg.beta, cfg.a, centers, square or ops.DEFAULT_SCALES,
                                cfg.samples or DEFAULT_SAMPLES["sweep"], cfg.seed,
                                rectangular=rect or None, workers=workers)
    key = f"sup_ratio={report.sup_ratio:.6g} growth_flag={report.growth_flag}"
    return ser.report_to_json(report), ser.REPORT_COLUMNS, ser.report_rows(report), key


RUNNERS = {
    "reflect-check": _reflect_check,
    "volume-lemma": _volume_lemma,
    "box-scaling": _box_scaling,
    "nt-limit": _nt_limit,
    "zero-set": _zero_set,
    "lojasiewicz": _lojasiewicz,
    "certificate": _certificate,
    "sweep": _sweep,
}


def run(cfg: ExperimentConfig, workers: int = 1) -> tuple[str, str]:
    """Run one experiment; returns (report text, one-line key number)."""
    payload, header, rows, key = RUNNERS[cfg.experiment](cfg, workers)
    if cfg.format == "csv":
        text = ser.csv_text(header, rows)
    else:
        text = ser.dumps({"experiment": cfg.experiment, "seed": cfg.seed, "result": _clean(payload)})
    return text, key


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return ser._num(obj)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rifbergman", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", required=True, type=Path, help="TOML experiment file")
    parser.add_argument("--seed", help="override seed (decimal or 0x-hex)")
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--output", type=Path, help="report path (overrides config)")
    parser.add_argument("--format", choices=("json", "csv"), help="report format (overrides config)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = parse_config(args.config.read_text())
        if args.seed is not None:
            cfg.seed = parse_seed(args.seed)
        if args.format:
            cfg.format = args.format
        if args.output:
            cfg.output = str(args.output)
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
    except (ConfigError, OSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    try:
        text, key = run(cfg, args.workers)
    except ConfigError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (RifError, ArithmeticError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    out = Path(cfg.output) if cfg.output else None
    if out is None:
        sys.stdout.write(text)
        dest = "-"
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        dest = str(out)
    # keep stdout clean for the report itself when it is streamed there
    print(f"{cfg.experiment}  {key}  {dest}", file=sys.stderr if out is None else sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
