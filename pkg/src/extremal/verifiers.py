"""Exact predicates over configurations.

Each check returns a :class:`Verdict`.  A failing verdict carries the
lexicographically first violating index tuple together with the exact
distances that make it a violation, so the witness can be re-checked with
:func:`extremal.metric.distance`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np

from . import _kernels as K
from .metric import Configuration, MetricKind, distance, distance_scale, integer_matrix, render_scalar

_CODES = {MetricKind.L1: K.L1, MetricKind.LINF: K.LINF, MetricKind.L2SQ: K.L2SQ}


@dataclass(frozen=True)
class Witness:
    kind: str
    indices: tuple[int, ...]
    distances: tuple[Fraction, ...]
    detail: str = ""

    def to_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "indices": list(self.indices),
            "distances": [render_scalar(d) for d in self.distances],
        }
        if self.detail:
            doc["detail"] = self.detail
        return doc


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: Witness | None = None
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        doc = {"ok": self.ok, "witness": self.witness.to_dict() if self.witness else None}
        if self.stats:
            doc["stats"] = self.stats
        return doc


OK = Verdict(True)


def _fail(kind, indices, config, detail=""):
    pts = config.points
    dists = tuple(distance(pts[a], pts[b], config.metric) for a, b in _pairs_of(kind, indices))
    return Verdict(False, Witness(kind, tuple(indices), dists, detail))


def _pairs_of(kind, idx):
    if kind == "unequal-successor-distance":
        i, j1, j2 = idx
        return [(i, j1), (i, j2)]
    if kind == "unequal-distances":
        a, b, c, d = idx
        return [(a, b), (c, d)]
    return [tuple(idx)]


def _int_distances(config: Configuration):
    X, den = integer_matrix(config.points, config.metric)
    D = K.pairwise_distances(X, _CODES[config.metric])
    return D, distance_scale(den, config.metric)


def _first_pair(mask: np.ndarray):
    """Lexicographically first (i, j), i < j, where ``mask`` holds."""
    upper = np.triu(mask, k=1)
    hits = np.flatnonzero(upper.any(axis=1))
    if len(hits) == 0:
        return None
    i = int(hits[0])
    j = int(np.flatnonzero(upper[i])[0])
    return i, j


def _need(config: Configuration, at_least: int) -> None:
    if len(config) < at_least:
        raise ValueError(f"need at least {at_least} points, got {len(config)}")


def check_right_equidistant(config: Configuration) -> Verdict:
    """Every point is equally far from all points after it."""
    if len(config) == 0:
        raise ValueError("empty configuration")
    X, _ = integer_matrix(config.points, config.metric)
    i, j, kind = K.right_equidistant_scan(X, _CODES[config.metric])
    if kind == 0:
        return OK
    if kind == 1:
        return _fail("duplicate-point", (i, j), config, "points must be distinct")
    return _fail("unequal-successor-distance", (i, i + 1, j), config)


def _odd_mask(D, scale, metric):
    if metric is MetricKind.L2SQ:
        return _odd_root_mask(D, scale)
    whole = D % scale == 0
    q = D // scale
    return whole & (q % 2 == 1)


def _odd_root_mask(D, scale):
    m = D.shape[0]
    out = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for j in range(i + 1, m):
            v = int(D[i, j])
            if v % scale:
                continue
            v //= scale
            r = isqrt(v)
            out[i, j] = out[j, i] = r * r == v and r % 2 == 1
    return out


def check_odd_distances(config: Configuration) -> Verdict:
    """Every pairwise distance is an odd integer.

    Under the squared Euclidean metric the distance itself must be an odd
    integer, so the squared value has to be the square of an odd integer.
    """
    _need(config, 2)
    D, scale = _int_distances(config)
    bad = _first_pair(~_odd_mask(D, scale, config.metric))
    if bad is None:
        return OK
    detail = "squared distance is not an odd square" if config.metric is MetricKind.L2SQ else "distance is not an odd integer"
    return _fail("not-odd", bad, config, detail)


def check_not_divisible(config: Configuration, k: int) -> Verdict:
    """Every pairwise distance is a positive integer not divisible by ``k``."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    _need(config, 2)
    D, scale = _int_distances(config)
    if config.metric is MetricKind.L2SQ:
        good = np.zeros(D.shape, dtype=bool)
        m = D.shape[0]
        for i in range(m):
            for j in range(i + 1, m):
                v = int(D[i, j])
                if v % scale == 0:
                    v //= scale
                    r = isqrt(v)
                    good[i, j] = good[j, i] = r * r == v and r > 0 and r % k != 0
    else:
        q = D // scale
        good = (D % scale == 0) & (q > 0) & (q % k != 0)
    bad = _first_pair(~good.astype(bool))
    if bad is None:
        return OK
    return _fail("divisible-or-fractional", bad, config, f"distance must be an integer not divisible by {k}")


def check_equilateral(config: Configuration) -> Verdict:
    """All pairwise distances coincide."""
    _need(config, 2)
    D, _ = _int_distances(config)
    ref = D[0, 1]
    bad = _first_pair(D != ref)
    if bad is None:
        return OK
    return _fail("unequal-distances", (0, 1) + bad, config)


def distance_spectrum(config: Configuration) -> list[Fraction]:
    """Sorted distinct pairwise distances."""
    _need(config, 2)
    D, scale = _int_distances(config)
    iu = np.triu_indices(D.shape[0], k=1)
    vals = {int(v) for v in D[iu]}
    return sorted(Fraction(v, scale) for v in vals)


PREDICATES = {
    "right-equidistant": check_right_equidistant,
    "odd-distances": check_odd_distances,
    "not-divisible": check_not_divisible,
    "equilateral": check_equilateral,
}
