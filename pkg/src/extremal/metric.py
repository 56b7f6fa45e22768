"""Exact points, metrics and configurations.

Every coordinate is a :class:`fractions.Fraction`.  Euclidean distances are
reported squared so that all values stay rational.
"""
from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, Sequence

import numpy as np

Scalar = Fraction

ZERO = Fraction(0)

_SCALAR_RE = re.compile(r"\s*(-?\d+)(?:\s*/\s*(\d+))?\s*")


class DimensionError(ValueError):
    """Raised when points of different dimensions are combined."""

    def __init__(self, dim_a: int, dim_b: int, what: str = "points"):
        self.dims = (dim_a, dim_b)
        super().__init__(f"dimension mismatch between {what}: {dim_a} != {dim_b}")


class FormatError(ValueError):
    """Malformed scalar, point or configuration document."""


def parse_scalar(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a JSON integer into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise FormatError(f"not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise FormatError(f"not a scalar: {value!r}")
    m = _SCALAR_RE.fullmatch(value)
    if m is None:
        raise FormatError(f"not a scalar: {value!r}")
    num, den = m.groups()
    if den is not None and int(den) == 0:
        raise FormatError(f"zero denominator: {value!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def render_scalar(s: Fraction) -> str:
    s = Fraction(s)
    if s.denominator == 1:
        return str(s.numerator)
    return f"{s.numerator}/{s.denominator}"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coordinate")


@dataclass(frozen=True)
class Point:
    """An immutable point with exact rational coordinates."""

    coords: tuple[Fraction, ...]

    def __init__(self, coords: Iterable):
        cs = tuple(_as_fraction(c) for c in coords)
        if not cs:
            raise ValueError("a point needs at least one coordinate")
        object.__setattr__(self, "coords", cs)

    @classmethod
    def _raw(cls, coords: tuple[Fraction, ...]) -> "Point":
        # trusted constructor for generators that already hold Fractions
        p = object.__new__(cls)
        object.__setattr__(p, "coords", coords)
        return p

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, k):
        return self.coords[k]

    def __iter__(self):
        return iter(self.coords)

    def __add__(self, other: "Point") -> "Point":
        _check_dims(self, other)
        return Point._raw(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Point") -> "Point":
        _check_dims(self, other)
        return Point._raw(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Point":
        return Point._raw(tuple(-a for a in self.coords))

    def scale(self, factor) -> "Point":
        f = _as_fraction(factor)
        return Point._raw(tuple(f * a for a in self.coords))

    def to_json(self) -> list[str]:
        return [render_scalar(c) for c in self.coords]

    def __repr__(self) -> str:
        return "Point(" + ", ".join(render_scalar(c) for c in self.coords) + ")"


def _check_dims(p: Point, q: Point) -> None:
    if p.dim != q.dim:
        raise DimensionError(p.dim, q.dim)


class MetricKind(enum.Enum):
    L1 = "l1"
    LINF = "linf"
    L2SQ = "l2sq"

    @classmethod
    def parse(cls, name: "str | MetricKind") -> "MetricKind":
        if isinstance(name, MetricKind):
            return name
        aliases = {"l1": cls.L1, "linf": cls.LINF, "l2sq": cls.L2SQ,
                   "LInfinity": cls.LINF, "L1": cls.L1, "L2Squared": cls.L2SQ}
        try:
            return aliases[name]
        except KeyError:
            raise FormatError(f"unknown metric {name!r}") from None


def distance(p: Point, q: Point, metric: MetricKind) -> Fraction:
    """Exact l1, l-infinity or squared l2 distance between two points."""
    _check_dims(p, q)
    diffs = [abs(a - b) for a, b in zip(p.coords, q.coords)]
    if metric is MetricKind.L1:
        return sum(diffs, ZERO)
    if metric is MetricKind.LINF:
        return max(diffs)
    if metric is MetricKind.L2SQ:
        return sum((d * d for d in diffs), ZERO)
    raise ValueError(f"unsupported metric {metric!r}")


def truncate(p: Point) -> Point:
    """Drop the last coordinate."""
    if p.dim < 2:
        raise ValueError("truncation needs a point of dimension at least 2")
    return Point._raw(p.coords[:-1])


def embed_l1_to_linf(p: Point) -> Point:
    """Isometric embedding of l1^n into l-infinity^(2^(n-1)).

    Coordinate ``c`` of the image is ``x1 + s2*x2 + ... + sn*xn``; the sign
    patterns run in product order (++...+, ++...-, ..., --...-), so the
    highest bit of ``c`` carries the sign of ``x2``.
    """
    x = p.coords
    n = len(x)
    out = []
    for c in range(1 << (n - 1)):
        acc = x[0]
        for k in range(1, n):
            acc = acc - x[k] if (c >> (n - 1 - k)) & 1 else acc + x[k]
        out.append(acc)
    return Point._raw(tuple(out))


@dataclass(frozen=True)
class Configuration:
    """Ordered sequence of points in a fixed dimension, tagged with a metric.

    Distinctness is not enforced here; the verifiers report duplicates as
    violations.
    """

    points: tuple[Point, ...]
    metric: MetricKind
    dim: int

    def __init__(self, points: Iterable, metric: "MetricKind | str", dim: int | None = None):
        pts = tuple(p if isinstance(p, Point) else Point(p) for p in points)
        if dim is None:
            if not pts:
                raise ValueError("dimension of an empty configuration must be given")
            dim = pts[0].dim
        if dim < 1:
            raise ValueError("dimension must be positive")
        for p in pts:
            if p.dim != dim:
                raise DimensionError(dim, p.dim, "configuration and point")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "metric", MetricKind.parse(metric))
        object.__setattr__(self, "dim", dim)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, k):
        return self.points[k]

    def with_metric(self, metric) -> "Configuration":
        return Configuration(self.points, metric, self.dim)

    def is_distinct(self) -> bool:
        return len(set(self.points)) == len(self.points)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric.value,
            "dim": self.dim,
            "points": [p.to_json() for p in self.points],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc) -> "Configuration":
        if not isinstance(doc, dict):
            raise FormatError("configuration must be a JSON object")
        try:
            metric = MetricKind.parse(doc["metric"])
            dim = doc["dim"]
            raw = doc["points"]
        except KeyError as exc:
            raise FormatError(f"configuration is missing field {exc.args[0]!r}") from None
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise FormatError(f"bad dimension {dim!r}")
        if not isinstance(raw, list):
            raise FormatError("points must be a list")
        pts = []
        for row in raw:
            if not isinstance(row, list):
                raise FormatError(f"point must be a list, got {row!r}")
            pts.append(Point._raw(tuple(parse_scalar(v) for v in row)))
        try:
            return cls(pts, metric, dim)
        except DimensionError as exc:
            raise FormatError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "Configuration":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from None
        return cls.from_dict(doc)


def common_denominator(points: Sequence[Point]) -> int:
    den = 1
    seen = set()
    for p in points:
        for c in p.coords:
            d = c.denominator
            if d != 1 and d not in seen:
                seen.add(d)
                den = lcm(den, d)
    return den


# int64 kernels need |coordinate difference| * dim (or its square) to fit
_INT64_SAFE = 1 << 62


def integer_matrix(points: Sequence[Point], metric: MetricKind | None = None):
    """Scale points to a common denominator.

    Returns ``(X, den)`` with ``X[i, k] == points[i][k] * den``.  ``X`` is an
    ``int64`` array when every distance computed from it is guaranteed not to
    overflow, otherwise an object array of Python integers.
    """
    den = common_denominator(points)
    m = len(points)
    n = points[0].dim if m else 0
    rows = []
    big = 0
    for p in points:
        row = [c.numerator * (den // c.denominator) if c else 0 for c in p.coords]
        rows.append(row)
        for v in row:
            if v > big:
                big = v
            elif -v > big:
                big = -v
    span = 2 * big
    if metric is MetricKind.L2SQ:
        fits = span * span * max(n, 1) < _INT64_SAFE
    else:
        fits = span * max(n, 1) < _INT64_SAFE
    if fits:
        X = np.array(rows, dtype=np.int64).reshape(m, n)
    else:
        X = np.empty((m, n), dtype=object)
        for i, row in enumerate(rows):
            X[i, :] = row
    return X, den


def distance_scale(den: int, metric: MetricKind) -> int:
    """Denominator of distances computed from an integer matrix."""
    return den * den if metric is MetricKind.L2SQ else den


def lex_points(values: Sequence[Fraction], dim: int):
    for combo in product(values, repeat=dim):
        yield Point._raw(tuple(combo))
