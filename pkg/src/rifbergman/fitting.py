"""Log-log regression of volume scaling laws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFit


@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    log_constant: float
    with_log_correction: bool
    residual_rms: float
    window: list[tuple[float, float]] = field(default_factory=list)

    def predict(self, scale: float) -> float:
        v = math.exp(self.log_constant) * scale**self.exponent
        if self.with_log_correction:
            v *= math.log(1.0 / scale)
        return v


def fit_scaling_exponent(points, with_log_correction: bool = False,
                         min_decades: float = 2.0) -> ExponentFit:
    """Least-squares slope of ln(value) against ln(scale).

    With ``with_log_correction`` the model is value = C * scale^q * ln(1/scale)
    with the power of the logarithm pinned to one, i.e. ln(value) - ln ln(1/scale)
    is regressed linearly on ln(scale).
    """
    pts = sorted(((float(s), float(v)) for s, v in points), key=lambda sv: -sv[0])
    if len(pts) < 4:
        raise DegenerateFit(f"need at least 4 points, got {len(pts)}")
    scales = np.array([s for s, _ in pts])
    values = np.array([v for _, v in pts])
    if np.any(scales <= 0) or np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise DegenerateFit("scales and values must be positive and finite")
    if np.any(np.diff(scales) >= 0):
        raise DegenerateFit("scales must be distinct")
    if math.log10(scales[0] / scales[-1]) < min_decades - 1e-12:
        raise DegenerateFit(f"scales span fewer than {min_decades} decades")
    x = np.log(scales)
    y = np.log(values)
    if with_log_correction:
        if np.any(scales >= 1):
            raise DegenerateFit("log correction needs scales below 1")
        y = y - np.log(np.log(1.0 / scales))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ExponentFit(float(slope), float(intercept), with_log_correction,
                       float(np.sqrt(np.mean(resid**2))), pts)
