"""Colouring l1^n so that no two points of one colour are an odd integer apart.

Cells are translates of the open cross-polytope ``C = {x : |x|_1 < 1/2}``
placed periodically along the lattice of integer vectors with even
coordinate sum.  Lattice points are an even l1 distance apart and a cell
has l1 radius 1/2, so two points lying in translates ``C + y`` and
``C + y'`` of one cell are within ``(2t - 1, 2t + 1)`` of each other where
``2t = |y - y'|_1``; their distance is never an odd integer.  A covering
is a finite set of offsets whose periodic cells cover space, and a point's
colour is the first offset whose cells contain it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm

import numpy as np

from . import _kernels as K
from .metric import DimensionError, Point, parse_scalar, render_scalar
from .verifiers import Verdict, Witness

HALF = Fraction(1, 2)
OVERFLOW = -1


class CoveringError(RuntimeError):
    """Coverage was not reached; ``witness`` is an uncovered grid point."""

    def __init__(self, message: str, witness: Point):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class EvenSumLattice:
    """Integer vectors with even coordinate sum.

    Generated by ``e_k + e_n`` for ``k < n`` together with ``2 e_n``.
    """

    dim: int

    determinant = 2

    def generators(self) -> list[tuple[int, ...]]:
        n = self.dim
        gens = []
        for k in range(n - 1):
            g = [0] * n
            g[k] = 1
            g[n - 1] = 1
            gens.append(tuple(g))
        last = [0] * n
        last[n - 1] = 2
        gens.append(tuple(last))
        return gens

    def _check(self, p: Point) -> None:
        if p.dim != self.dim:
            raise DimensionError(self.dim, p.dim, "lattice and point")

    def contains(self, p: Point) -> bool:
        self._check(p)
        if any(c.denominator != 1 for c in p.coords):
            return False
        return sum(c.numerator for c in p.coords) % 2 == 0

    def reduce(self, p: Point) -> Point:
        """Representative in ``[0, 1)^(n-1) x [0, 2)`` of ``p`` modulo the lattice."""
        self._check(p)
        head = []
        last = p.coords[-1]
        for c in p.coords[:-1]:
            f = math.floor(c)
            head.append(c - f)
            last -= f
        last -= 2 * math.floor(last / 2)
        return Point._raw(tuple(head) + (last,))

    def nearest(self, p: Point) -> tuple[Point, Fraction]:
        """Closest lattice point in l1 and its distance.

        Rounding every coordinate is optimal unless the rounded sum is odd;
        then the single cheapest coordinate moves to its other neighbour.
        """
        self._check(p)
        lam = []
        total = Fraction(0)
        flip_cost = None
        flip_at = -1
        for k, c in enumerate(p.coords):
            f = math.floor(c)
            rem = c - f
            if 2 * rem <= 1:
                near, alt, z, other = rem, 1 - rem, f, f + 1
            else:
                near, alt, z, other = 1 - rem, rem, f + 1, f
            lam.append((z, other))
            total += near
            if flip_cost is None or alt - near < flip_cost:
                flip_cost, flip_at = alt - near, k
        coords = [z for z, _ in lam]
        if sum(coords) % 2:
            coords[flip_at] = lam[flip_at][1]
            total += flip_cost
        return Point(coords), total


@dataclass(frozen=True)
class CrossPolytopeCell:
    """The open l1 ball of radius 1/2 about the origin."""

    dim: int
    radius: Fraction = HALF

    def contains(self, p: Point) -> bool:
        return sum((abs(c) for c in p.coords), Fraction(0)) < self.radius

    def volume(self) -> Fraction:
        return Fraction(1, math.factorial(self.dim))


@dataclass
class Covering:
    dim: int
    offsets: list[Point]
    verified_resolution: Fraction
    strategy: str = "greedy_grid"
    seed: int = 0
    full: bool = False

    def __len__(self) -> int:
        return len(self.offsets)

    @property
    def density_ratio(self) -> Fraction:
        """Lattice determinant over cell volume: the fewest offsets any
        covering could use."""
        return EvenSumLattice.determinant / CrossPolytopeCell(self.dim).volume()

    def to_dict(self) -> dict:
        n = self.dim
        return {
            "dim": n,
            "strategy": self.strategy,
            "seed": self.seed,
            "verified_resolution": render_scalar(self.verified_resolution),
            "full": self.full,
            "count": len(self.offsets),
            "density_lower_bound": render_scalar(self.density_ratio),
            # display only; the asymptotic constant is not a checkable bound
            "covering_bound_estimate": round(2 * math.factorial(n) * 2 * n * math.log(n), 3) if n > 1 else None,
            "offsets": [p.to_json() for p in self.offsets],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "Covering":
        dim = doc["dim"]
        offsets = [Point(parse_scalar(v) for v in row) for row in doc["offsets"]]
        for o in offsets:
            if o.dim != dim:
                raise DimensionError(dim, o.dim, "covering and offset")
        return cls(dim, offsets, parse_scalar(doc["verified_resolution"]),
                   doc.get("strategy", "greedy_grid"), doc.get("seed", 0), bool(doc.get("full", False)))


def lattice_contains(lattice: EvenSumLattice, p: Point) -> bool:
    return lattice.contains(p)


def reduce_mod_lattice(lattice: EvenSumLattice, p: Point) -> Point:
    return lattice.reduce(p)


def in_periodic_cell(p: Point, offset: Point) -> bool:
    """Whether ``p`` lies in ``offset + C + lattice``."""
    _, gap = EvenSumLattice(p.dim).nearest(p - offset)
    return gap < HALF


# -- coverage -------------------------------------------------------------


def domain_grid(dim: int, steps: int) -> np.ndarray:
    """Numerators (over ``steps``) of the grid on ``[0,1)^(n-1) x [0,2)``."""
    axes = [range(steps)] * (dim - 1) + [range(2 * steps)]
    return np.array(list(product(*axes)), dtype=np.int64).reshape(-1, dim)


def _hits(grid: np.ndarray, o: np.ndarray, q: int, slack: int) -> np.ndarray:
    # open-cell membership with an l1 margin of slack / (2q)
    return 2 * K.lattice_gap(grid - o, q) + slack < q


def _covered(grid: np.ndarray, offsets: np.ndarray, q: int, slack: int = 0) -> np.ndarray:
    """For each grid row, index of the first covering offset or -1 (all over ``q``)."""
    owner = np.full(len(grid), -1, dtype=np.int64)
    for i, o in enumerate(offsets):
        todo = np.flatnonzero(owner < 0)
        if len(todo) == 0:
            break
        owner[todo[_hits(grid[todo], o, q, slack)]] = i
    return owner


def _slack(dim: int, q: int, steps: int) -> int:
    # every point lies within l1 distance dim / (2 * steps) of a grid point
    return dim * (q // steps)


def build_covering(dim: int, strategy: str = "greedy_grid", seed: int = 0,
                   resolution: Fraction = Fraction(1, 16), full: bool = True,
                   max_offsets: int = 20000) -> Covering:
    """Offsets whose periodic cells cover the fundamental-domain grid at
    ``resolution``.

    With ``full`` (the default) each grid point must sit inside a cell with
    room to spare for the whole grid box around it.  The lattice distance is
    1-Lipschitz in l1, so this certifies that every point of space is
    covered, not only the grid points.

    ``greedy_grid`` starts from a regular grid of offsets, patches any
    uncovered grid point by adding an offset there, then drops offsets whose
    removal keeps the grid covered.  ``randomized`` draws seeded offsets
    uniformly from the grid refined by two until the grid is covered.
    """
    if not 1 <= dim <= 4:
        raise ValueError(f"dim must be in 1..4, got {dim}")
    resolution = Fraction(resolution)
    if resolution <= 0 or resolution.numerator != 1:
        raise ValueError("resolution must be 1/k for a positive integer k")
    steps = resolution.denominator
    if steps <= dim and full:
        raise ValueError("resolution too coarse to certify full coverage")
    if steps ** dim * 2 > 4_000_000:
        raise ValueError("fundamental-domain grid is too large")
    if strategy in ("greedy", "greedy_grid"):
        q, offs = _greedy_offsets(dim, steps, full, max_offsets)
        strategy = "greedy_grid"
    elif strategy in ("random", "randomized"):
        q, offs = _random_offsets(dim, steps, full, seed, max_offsets)
        strategy = "randomized"
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    offsets = [Point(Fraction(int(v), q) for v in row) for row in offs]
    return Covering(dim, offsets, resolution, strategy, seed, full)


def _greedy_offsets(dim, steps, full, max_offsets):
    q = steps
    slack = _slack(dim, q, steps) if full else 0
    grid = domain_grid(dim, steps)
    # largest spacing s (in grid steps) with dim * (s + slack') < steps
    s = max(1, (steps - 1) // dim - (1 if full else 0))
    axes = [range(0, steps, s)] * (dim - 1) + [range(0, 2 * steps, s)]
    offs = [np.array(c, dtype=np.int64) for c in product(*axes)]
    owner = _covered(grid, np.array(offs), q, slack)
    while (owner < 0).any():
        if len(offs) >= max_offsets:
            raise CoveringError("offset budget exhausted",
                                Point(Fraction(int(v), q) for v in grid[np.argmax(owner < 0)]))
        offs.append(grid[int(np.argmax(owner < 0))].copy())
        owner = _covered(grid, np.array(offs), q, slack)
    masks = [_hits(grid, o, q, slack) for o in offs]
    counts = np.sum(masks, axis=0)
    kept = []
    for o, mine in zip(reversed(offs), reversed(masks)):
        if (counts[mine] > 1).all():
            counts -= mine
        else:
            kept.append(o)
    kept.reverse()
    return q, np.array(kept)


def _random_offsets(dim, steps, full, seed, max_offsets):
    q = 2 * steps
    slack = _slack(dim, q, steps) if full else 0
    grid = 2 * domain_grid(dim, steps)
    rng = np.random.default_rng(seed)
    hi = np.array([q] * (dim - 1) + [2 * q], dtype=np.int64)
    covered = np.zeros(len(grid), dtype=bool)
    offs = []
    draws = 0
    while not covered.all():
        if draws >= 50 * max_offsets:
            raise CoveringError("offset budget exhausted",
                                Point(Fraction(int(v), q) for v in grid[np.argmax(~covered)]))
        draws += 1
        o = rng.integers(0, hi)
        hit = _hits(grid, o, q, slack)
        if (hit & ~covered).any():
            offs.append(o)
            covered |= hit
    return q, np.array(offs)


def covering_certified(covering: Covering) -> Point | None:
    """First grid point (at the recorded resolution) left uncovered, or None.

    For a covering built with ``full`` the margin check is applied too.
    """
    steps = covering.verified_resolution.denominator
    den = lcm(steps, *(c.denominator for o in covering.offsets for c in o.coords))
    grid = domain_grid(covering.dim, steps) * (den // steps)
    slack = _slack(covering.dim, den, steps) if covering.full else 0
    offs = _offset_matrix(covering, den)
    owner = _covered(grid, offs, den, slack)
    if (owner >= 0).all():
        return None
    return Point(Fraction(int(v), den) for v in grid[int(np.argmax(owner < 0))])


# -- colours --------------------------------------------------------------


def color_of(covering: Covering, p: Point) -> int:
    """Index of the first offset whose periodic cell contains ``p``;
    :data:`OVERFLOW` when none does."""
    if p.dim != covering.dim:
        raise DimensionError(covering.dim, p.dim, "covering and point")
    lattice = EvenSumLattice(p.dim)
    for i, o in enumerate(covering.offsets):
        if lattice.nearest(p - o)[1] < HALF:
            return i
    return OVERFLOW


def _offset_matrix(covering: Covering, q: int) -> np.ndarray:
    return np.array([[int(c * q) for c in o.coords] for o in covering.offsets],
                    dtype=np.int64).reshape(-1, covering.dim)


def colors_int(covering: Covering, P: np.ndarray, q: int) -> np.ndarray:
    """Colours of the rows of ``P / q`` (``q`` must clear every offset denominator)."""
    return _covered(P, _offset_matrix(covering, q), q)


def _l1(A):
    return np.abs(A).sum(axis=1)


def verify_coloring(covering: Covering, samples: int = 100_000, seed: int = 0) -> Verdict:
    """Sample point pairs and look for a same-coloured pair at odd integer distance.

    Half of the pairs are built at an exact odd integer l1 distance (1 or 3)
    so that the check has teeth; the rest are independent random points.  A
    second pass draws points inside explicit cells ``C + y`` and ``C + y'``
    and checks that their distance stays strictly within 1 of ``|y - y'|_1``.
    Uncovered points get singleton colours and are counted in the stats.
    """
    n = covering.dim
    rng = np.random.default_rng(seed)
    den = lcm(2520, *(c.denominator for o in covering.offsets for c in o.coords))
    q = den
    half = samples // 2
    X = rng.integers(-3 * q, 3 * q + 1, size=(samples, n))
    Y = np.empty_like(X)
    Y[half:] = rng.integers(-3 * q, 3 * q + 1, size=(samples - half, n))
    t = rng.choice([1, 3], size=half)
    Y[:half] = X[:half] + _random_l1_vectors(rng, t * q, n)
    cx = colors_int(covering, X, q)
    cy = colors_int(covering, Y, q)
    d = _l1(X - Y)
    odd = (d % q == 0) & ((d // q) % 2 == 1)
    same = (cx == cy) & (cx >= 0)
    bad = np.flatnonzero(odd & same)
    stats = {
        "pairs": int(samples),
        "odd_pairs": int(odd.sum()),
        "same_color_pairs": int(same.sum()),
        "uncovered_points": int((cx < 0).sum() + (cy < 0).sum()),
        "colors": len(covering.offsets),
    }
    if len(bad):
        k = int(bad[0])
        x = Point(Fraction(int(v), q) for v in X[k])
        y = Point(Fraction(int(v), q) for v in Y[k])
        w = Witness("same-color-odd-distance", (k,), (Fraction(int(d[k]), q),),
                    f"{x} and {y} share colour {int(cx[k])}")
        return Verdict(False, w, stats)

    # sandwich: x in C + y, x' in C + y'
    yl = _random_lattice(rng, samples, n)
    yr = _random_lattice(rng, samples, n)
    xl = yl * q + _random_in_cell(rng, samples, n, q)
    xr = yr * q + _random_in_cell(rng, samples, n, q)
    two_t = _l1(yl - yr) * q
    dist = _l1(xl - xr)
    viol = np.flatnonzero(~((dist > two_t - q) & (dist < two_t + q)))
    stats["sandwich_pairs"] = int(samples)
    stats["sandwich_violations"] = int(len(viol))
    if len(viol):
        k = int(viol[0])
        w = Witness("sandwich", (k,), (Fraction(int(dist[k]), q), Fraction(int(two_t[k]), q)),
                    "distance of cell points is not within 1 of the lattice distance")
        return Verdict(False, w, stats)
    return Verdict(True, None, stats)


def _compositions(rng, totals, parts):
    """Random nonnegative integer rows of length ``parts`` summing to ``totals``."""
    totals = np.asarray(totals, dtype=np.int64)
    cuts = np.sort(rng.integers(0, totals[:, None] + 1, size=(len(totals), parts - 1)), axis=1)
    edges = np.concatenate([np.zeros((len(totals), 1), np.int64), cuts, totals[:, None]], axis=1)
    return np.diff(edges, axis=1)


def _random_l1_vectors(rng, norms, n):
    """Integer vectors whose absolute values sum exactly to ``norms``."""
    parts = _compositions(rng, norms, n)
    return parts * rng.choice([-1, 1], size=parts.shape)


def _random_lattice(rng, count, n):
    Z = rng.integers(-4, 5, size=(count, n))
    odd = Z.sum(axis=1) % 2 == 1
    Z[odd, -1] += 1
    return Z


def _random_in_cell(rng, count, n, q):
    """Integer numerators (over ``q``) of points strictly inside C."""
    budgets = rng.integers(0, q // 2, size=count)
    parts = _compositions(rng, budgets, n + 1)[:, :n]
    return parts * rng.choice([-1, 1], size=parts.shape)
