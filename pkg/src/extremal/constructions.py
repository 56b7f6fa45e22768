"""Generators for the explicit extremal configurations.

All generators are deterministic: the same arguments always give the same
sequence of points in the same order.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from .metric import ZERO, Configuration, MetricKind, Point

ONE = Fraction(1)
HALF = Fraction(1, 2)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def subset_ordering(n: int) -> list[int]:
    """All nonempty subsets of ``[n]`` as bitmasks, in decreasing numeric order.

    Bit ``n - 1 - k`` (most significant first) stands for element ``k + 1``,
    so the mask reads left to right like the indicator vector.  A proper
    superset always has a strictly larger value and therefore comes first.
    """
    _require(1 <= n <= 20, f"n must be in 1..20, got {n}")
    return list(range((1 << n) - 1, 0, -1))


def indicator(mask: int, n: int) -> tuple[int, ...]:
    return tuple((mask >> (n - 1 - k)) & 1 for k in range(n))


def _scaled(vec, factor: Fraction) -> Point:
    return Point._raw(tuple(factor if v == 1 else (-factor if v == -1 else ZERO) for v in vec))


def gen_right_equidistant_linf(n: int) -> Configuration:
    """Right-equidistant sequence of ``2**(n+1) - 1`` points in l-infinity^n.

    Each nonempty subset ``S_i`` (supersets first) contributes its indicator
    vector scaled by ``2**-i`` and then by ``2**(1-i)``; the origin closes
    the sequence.
    """
    _require(1 <= n <= 16, f"n must be in 1..16, got {n}")
    pts = []
    for i, mask in enumerate(subset_ordering(n), start=1):
        v = indicator(mask, n)
        pts.append(_scaled(v, Fraction(1, 1 << i)))
        pts.append(_scaled(v, Fraction(2, 1 << i)))
    pts.append(Point._raw((ZERO,) * n))
    return Configuration(pts, MetricKind.LINF, n)


def cross_polytope_vertices(n: int) -> list[tuple[int, ...]]:
    """Vertices ``e1 + e_i`` and ``e1 - e_{n+1-i}`` interleaved, ending at 0."""
    verts = []
    for i in range(1, n + 1):
        a = [0] * n
        a[0] += 1
        a[i - 1] += 1
        b = [0] * n
        b[0] += 1
        b[n - i] -= 1
        verts.append(tuple(a))
        verts.append(tuple(b))
    return verts


def gen_right_equidistant_l1(n: int) -> Configuration:
    """Right-equidistant sequence of ``4n - 1`` points in l1^n."""
    _require(1 <= n <= 10000, f"n must be in 1..10000, got {n}")
    verts = cross_polytope_vertices(n)
    zeros = [ZERO] * n
    pts = []
    for i in range(1, 2 * n):
        v = verts[i - 1]
        for factor in (Fraction(1, 1 << i), Fraction(2, 1 << i)):
            coords = zeros.copy()
            for k, c in enumerate(v):
                if c:
                    coords[k] = c * factor
            pts.append(Point._raw(tuple(coords)))
    pts.append(Point._raw(tuple(zeros)))
    return Configuration(pts, MetricKind.L1, n)


def gen_hypercube_odd(n: int) -> Configuration:
    """The ``2**n`` vertices of the unit cube in binary counting order."""
    _require(1 <= n <= 16, f"n must be in 1..16, got {n}")
    return _grid(n, 2)


def gen_grid_mod_k(n: int, k: int) -> Configuration:
    """``{0, ..., k-1}**n``; every l-infinity distance lies in ``[1, k-1]``."""
    _require(n >= 1, f"n must be positive, got {n}")
    _require(k >= 2, f"k must be at least 2, got {k}")
    _require(k ** n <= 10 ** 6, f"k**n = {k}**{n} exceeds the 10**6 point cap")
    return _grid(n, k)


def _grid(n: int, k: int) -> Configuration:
    vals = [Fraction(v) for v in range(k)]
    pts = [Point._raw(c) for c in product(vals, repeat=n)]
    return Configuration(pts, MetricKind.LINF, n)


def gen_cross_polytope_odd_l1(n: int) -> Configuration:
    """The ``2n`` points ``+-e_i / 2``; all pairwise l1 distances equal 1."""
    _require(n >= 1, f"n must be positive, got {n}")
    pts = []
    for i in range(n):
        for s in (HALF, -HALF):
            c = [ZERO] * n
            c[i] = s
            pts.append(Point._raw(tuple(c)))
    return Configuration(pts, MetricKind.L1, n)


def gen_euclidean_right_equidistant(n: int) -> Configuration:
    """Centroid of the standard simplex in dimension ``n + 1``, then its vertices."""
    _require(n >= 1, f"n must be positive, got {n}")
    d = n + 1
    pts = [Point._raw((Fraction(1, d),) * d)]
    for i in range(d):
        c = [ZERO] * d
        c[i] = ONE
        pts.append(Point._raw(tuple(c)))
    return Configuration(pts, MetricKind.L2SQ, d)


GENERATORS = {
    "right-equidistant-linf": gen_right_equidistant_linf,
    "right-equidistant-l1": gen_right_equidistant_l1,
    "hypercube-odd": gen_hypercube_odd,
    "grid-mod-k": gen_grid_mod_k,
    "cross-polytope-l1": gen_cross_polytope_odd_l1,
    "euclid-simplex-center": gen_euclidean_right_equidistant,
}
