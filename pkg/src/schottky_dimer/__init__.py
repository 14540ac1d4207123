"""Dimer models with Fock weights on minimal graphs from Schottky-uniformized M-curves."""

from .curve import Curve
from .degeneration import (
    LimitScan,
    SeriesExpansion,
    curve_family,
    fit_order,
    geometric_schedule,
    kernel_order1,
    limit_scan,
    subgroup_reference,
    weight_order1,
)
from .errors import (
    AdmissibilityError,
    ConfigError,
    GraphError,
    PoleCollisionError,
    QuadratureError,
    SchottkyDimerError,
    TruncationError,
)
from .fock import FockWeights, fock_weight, write_weights_csv
from .minimal_graph import (
    MinimalGraph,
    Track,
    build_honeycomb_patch,
    build_square_patch,
    check_angle_map,
    discrete_abel,
    honeycomb_track_angles,
    load_graph,
    save_graph,
    square_track_angles,
)
from .schottky import INFINITY, SchottkyGroup, cross_ratio, is_infinite

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "ConfigError",
    "Curve",
    "FockWeights",
    "GraphError",
    "INFINITY",
    "LimitScan",
    "MinimalGraph",
    "PoleCollisionError",
    "QuadratureError",
    "SchottkyDimerError",
    "SchottkyGroup",
    "SeriesExpansion",
    "Track",
    "TruncationError",
    "build_honeycomb_patch",
    "build_square_patch",
    "check_angle_map",
    "cross_ratio",
    "curve_family",
    "discrete_abel",
    "fit_order",
    "fock_weight",
    "geometric_schedule",
    "honeycomb_track_angles",
    "is_infinite",
    "kernel_order1",
    "limit_scan",
    "load_graph",
    "save_graph",
    "square_track_angles",
    "subgroup_reference",
    "weight_order1",
    "write_weights_csv",
]
