"""Exact tools for equidistant and odd-distance point sets in l1, l-infinity
and Euclidean space."""
from .metric import (
    Configuration,
    DimensionError,
    FormatError,
    MetricKind,
    Point,
    distance,
    embed_l1_to_linf,
    parse_scalar,
    render_scalar,
    truncate,
)

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "DimensionError",
    "FormatError",
    "MetricKind",
    "Point",
    "distance",
    "embed_l1_to_linf",
    "parse_scalar",
    "render_scalar",
    "truncate",
]
