"""JSON and CSV forms of polynomials, estimates and reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict

import numpy as np

from .errors import InvalidPolynomial
from .fitting import ExponentFit
from .measure import VolumeEstimate
from .operators import BoundednessReport, LojasiewiczEstimate
from .poly import BiPolynomial
from .rif import RationalInnerFunction, SymbolPair


def _num(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def poly_to_json(p: BiPolynomial, monomial_powers=(0, 0)) -> dict:
    n, m = p.bidegree
    return {
        "bidegree": [n, m],
        "coeffs": [[float(c.real), float(c.imag)] for c in p.coeffs.ravel(order="C")],
        "monomial_powers": [int(k) for k in monomial_powers],
    }


def poly_from_json(obj) -> tuple[BiPolynomial, tuple[int, int]]:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        n, m = (int(k) for k in obj["bidegree"])
        flat = [complex(float(re), float(im)) for re, im in obj["coeffs"]]
        powers = tuple(int(k) for k in obj.get("monomial_powers", (0, 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidPolynomial(f"malformed polynomial JSON: {exc}") from exc
    if n < 0 or m < 0 or len(flat) != (n + 1) * (m + 1) or len(powers) != 2:
        raise InvalidPolynomial("coefficient count does not match bidegree")
    return BiPolynomial(np.array(flat).reshape(n + 1, m + 1)), powers


def rif_to_json(phi: RationalInnerFunction) -> dict:
    """The denominator p in the polynomial schema; the numerator is its reflection."""
    return poly_to_json(phi.denominator, phi.monomial_powers)


def rif_from_json(obj) -> RationalInnerFunction:
    p, powers = poly_from_json(obj)
    return RationalInnerFunction(p, powers)


def volume_to_json(v: VolumeEstimate) -> dict:
    return {k: _num(x) for k, x in asdict(v).items()}


def fit_to_json(f: ExponentFit | None):
    if f is None:
        return None
    return {
        "exponent": _num(f.exponent),
        "log_constant": _num(f.log_constant),
        "with_log_correction": f.with_log_correction,
        "residual_rms": _num(f.residual_rms),
        "window": [[_num(s), _num(v)] for s, v in f.window],
    }


def lojasiewicz_to_json(e: LojasiewiczEstimate) -> dict:
    return {
        "exponent_hat": _num(e.exponent_hat),
        "constant_hat": _num(e.constant_hat),
        "neighborhood": {"center": list(e.neighborhood.center.angles), "radius": e.neighborhood.radius},
        "envelope_points": [[_num(m), _num(g)] for m, g in e.envelope_points],
        "target_value": _num(complex(e.target_value)),
        "residual_rms": _num(e.residual_rms),
    }


def symbol_to_json(symbol: SymbolPair) -> dict:
    return {"first": rif_to_json(symbol.first), "second": rif_to_json(symbol.second)}


REPORT_COLUMNS = ["center_theta1", "center_theta2", "delta1", "delta2",
                  "pullback", "pullback_se", "box_volume", "ratio"]


def report_rows(report: BoundednessReport) -> list[list]:
    return [[*row.box.center.angles, *row.box.radii, row.pullback.value, row.pullback.std_error,
             row.box_volume.value, row.ratio] for row in report.ratio_table]


def report_to_json(report: BoundednessReport) -> dict:
    return {
        "symbol": symbol_to_json(report.symbol),
        "beta": _num(report.beta),
        "a": _num(report.a),
        "q_used": _num(report.q_used),
        "ratio_table": [
            {
                "center": list(row.box.center.angles),
                "radii": list(row.box.radii),
                "pullback": volume_to_json(row.pullback),
                "box_volume": volume_to_json(row.box_volume),
                "ratio": _num(row.ratio),
                "ratio_se": _num(row.ratio_se),
            }
            for row in report.ratio_table
        ],
        "sup_ratio": _num(report.sup_ratio),
        "growth_flag": report.growth_flag,
        "q_fits": [lojasiewicz_to_json(f) for f in report.q_fits],
        "pullback_fit": fit_to_json(report.pullback_fit),
        "theorem_exponent": _num(report.theorem_exponent),
        "bound_holds_below": _num(report.bound_holds_below),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if x is None else (repr(float(x)) if isinstance(x, (float, np.floating)) else x)
                         for x in row])
    return buf.getvalue()
