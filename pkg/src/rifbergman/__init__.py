"""Rational inner functions on the bidisc and their composition operators on weighted Bergman spaces."""

from .errors import *  # noqa: F401,F403
from .fitting import ExponentFit, fit_scaling_exponent
from .measure import (
    CarlesonBox,
    VolumeEstimate,
    WeightParams,
    carleson_box_volume,
    sublevel_indicator,
    sublevel_volume_exact,
    weighted_volume_mc,
)
from .operators import (
    BoundednessReport,
    LojasiewiczEstimate,
    carleson_sweep,
    lojasiewicz_fit,
    pullback_volume,
    theorem_certificate,
)
from .poly import BiPolynomial, eval_poly, reflect
from .rif import (
    BoundaryPoint,
    Neighborhood,
    RationalInnerFunction,
    SymbolPair,
    build_pzeta,
    eval_rif,
    find_singularities,
    nt_limit,
    rotate_symbol,
    stability_check,
    zero_set_interior_check,
)
from .zoo import knese, knese_pair, phi_ab

__version__ = "0.1.0"
