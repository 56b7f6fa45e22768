"""Exhaustive searches over finite candidate grids.

Two searches are provided: maximum cliques of the odd-distance graph
(:func:`max_odd_distance_clique`) and longest right-equidistant orderings
(:func:`max_right_equidistant`).  Both are exact on their grid.  Under the
l-infinity metric the known tight bounds act as guards: exceeding them
raises :class:`BoundViolation`.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np

from . import _kernels as K
from .metric import Configuration, FormatError, MetricKind, Point, lex_points, parse_scalar, render_scalar

GRID_CAP = 10 ** 6
CLIQUE_CAP = 20_000

_CODES = {MetricKind.L1: K.L1, MetricKind.LINF: K.LINF, MetricKind.L2SQ: K.L2SQ}


class GridCapError(ValueError):
    pass


class BoundViolation(RuntimeError):
    """A search beat a proven upper bound; the witness is attached."""

    def __init__(self, message: str, result: "SearchResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class CandidateGrid:
    """The Cartesian power ``values ** dim``, enumerated lexicographically."""

    dim: int
    values: tuple[Fraction, ...]

    def __init__(self, dim: int, values: Sequence):
        vals = tuple(sorted({parse_scalar(v) if not isinstance(v, Fraction) else v for v in values}))
        if dim < 1:
            raise ValueError("grid dimension must be positive")
        if not vals:
            raise ValueError("grid needs at least one value")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values) ** self.dim

    @property
    def permutation_symmetric(self) -> bool:
        # one value list is shared by every axis
        return True

    def points(self) -> list[Point]:
        if len(self) > GRID_CAP:
            raise GridCapError(f"grid has {len(self)} candidates, cap is {GRID_CAP}")
        return list(lex_points(self.values, self.dim))

    def orbit_representatives(self) -> list[int]:
        """Indices of the lexicographically smallest member of each orbit
        under coordinate permutations (the nondecreasing tuples)."""
        v = len(self.values)
        out = []
        for combo in combinations_with_replacement(range(v), self.dim):
            idx = 0
            for c in combo:
                idx = idx * v + c
            out.append(idx)
        return sorted(out)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "values": [render_scalar(v) for v in self.values]}


def _dyadic(den: int, top: int = 2) -> list[Fraction]:
    return [Fraction(k, den) for k in range(top * den + 1)]


PRESETS = {
    "binary": [Fraction(0), Fraction(1)],
    "ternary": [Fraction(0), Fraction(1), Fraction(2)],
    "quarter": [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)],
    "right-eq-1d": [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)],
    "dyadic": _dyadic(8),
    "dyadic4": _dyadic(4),
    "half": [Fraction(k, 2) for k in range(-3, 4)],
    "cross": [Fraction(k, 2) for k in range(-2, 3)],
}


def parse_grid(spec, dim: int | None) -> CandidateGrid:
    """Grid from a preset name, a JSON list of values, or a JSON object
    ``{"dim": n, "values": [...]}``."""
    if isinstance(spec, CandidateGrid):
        return spec
    if isinstance(spec, str) and spec in PRESETS:
        if dim is None:
            raise FormatError("a preset grid needs an explicit dimension")
        return CandidateGrid(dim, PRESETS[spec])
    doc = spec
    if isinstance(spec, str):
        try:
            doc = json.loads(spec)
        except json.JSONDecodeError:
            raise FormatError(f"grid must be a preset ({', '.join(PRESETS)}) or JSON") from None
    if isinstance(doc, list):
        if dim is None:
            raise FormatError("a value-list grid needs an explicit dimension")
        return CandidateGrid(dim, [parse_scalar(v) for v in doc])
    if isinstance(doc, dict) and "values" in doc:
        d = doc.get("dim", dim)
        if d is None:
            raise FormatError("grid dimension missing")
        if dim is not None and d != dim:
            raise FormatError(f"grid dimension {d} disagrees with --dim {dim}")
        return CandidateGrid(d, [parse_scalar(v) for v in doc["values"]])
    raise FormatError("unrecognised grid description")


@dataclass
class SearchResult:
    best_size: int
    witness: Configuration
    nodes_explored: int
    exhaustive: bool
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        doc = {
            "best_size": self.best_size,
            "exhaustive": self.exhaustive,
            "nodes_explored": self.nodes_explored,
            "witness": self.witness.to_dict(),
        }
        doc.update(self.extra)
        if timing:
            doc["wall_time"] = round(self.wall_time, 6)
        return doc


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("EXTREMAL_THREADS", "1")))
    except ValueError:
        return 1


def _grid_distances(pts: list[Point], metric: MetricKind):
    from .metric import distance_scale, integer_matrix

    X, den = integer_matrix(pts, metric)
    if X.dtype != np.int64:
        raise GridCapError("grid values are too large for exact int64 distances")
    return K.pairwise_distances(X, _CODES[metric]), distance_scale(den, metric), X


def odd_distance_graph(pts: list[Point], metric: MetricKind) -> np.ndarray:
    """Adjacency matrix: an edge joins points at odd integer distance."""
    D, scale, _ = _grid_distances(pts, metric)
    whole = D % scale == 0
    q = D // scale
    if metric is MetricKind.L2SQ:
        r = np.rint(np.sqrt(q.astype(np.float64))).astype(np.int64)
        # float sqrt can be one off for large q
        r -= r * r > q
        r += (r + 1) * (r + 1) <= q
        adj = whole & (r * r == q) & (r % 2 == 1)
    else:
        adj = whole & (q % 2 == 1)
    np.fill_diagonal(adj, False)
    return adj


def _candidates(grid):
    """Points, dimension and first-point choices for a grid or an explicit set."""
    if isinstance(grid, Configuration):
        pts = list(dict.fromkeys(grid.points))
        return pts, grid.dim, list(range(len(pts)))
    pts = grid.points()
    firsts = grid.orbit_representatives() if grid.permutation_symmetric else list(range(len(pts)))
    return pts, grid.dim, firsts


def max_odd_distance_clique(grid: "CandidateGrid | Configuration", metric: "MetricKind | str" = MetricKind.LINF,
                            threads: int = 1, poset_prune: bool = True) -> SearchResult:
    """Largest set of grid points with pairwise odd integer distances.

    Colour-bounded branch and bound fixes the optimum size; a second pass
    in index order returns the lexicographically smallest clique of that
    size.  Under l-infinity, branches holding three pairwise comparable
    points (a 3-chain of the last-coordinate order) are cut as well.
    """
    metric = MetricKind.parse(metric)
    t0 = time.perf_counter()
    pts, dim, _ = _candidates(grid)
    m = len(pts)
    if m > CLIQUE_CAP:
        raise GridCapError(f"{m} candidates exceed the clique-search cap {CLIQUE_CAP}")
    adj = odd_distance_graph(pts, metric)
    comp = None
    if poset_prune and metric is MetricKind.LINF and dim >= 2:
        from .metric import integer_matrix

        X, _ = integer_matrix(pts, MetricKind.LINF)
        P = K.precedence_matrix(X)
        comp = P | P.T
    size, nodes = _clique_size(adj, comp, threads)
    clique, nodes2 = K.lex_first_clique(adj, size, comp)
    witness = Configuration([pts[i] for i in clique], metric, dim)
    res = SearchResult(size, witness, nodes + nodes2, True, time.perf_counter() - t0,
                       {"candidates": m, "metric": metric.value})
    if metric is MetricKind.LINF and size > 2 ** dim:
        raise BoundViolation(f"odd-distance set of size {size} exceeds 2**{dim}", res)
    return res


def _clique_size(adj, comp, threads):
    m = adj.shape[0]
    if m == 0:
        return 0, 0
    if threads <= 1:
        size, _, nodes = K.max_clique(adj, comp)
        return size, nodes
    # one task per root vertex; a shared incumbent only ever grows
    deg = adj.sum(axis=1)
    order = np.lexsort((np.arange(m), -deg))
    best = [0]
    nodes = [0]

    def task(pos):
        v = int(order[pos])
        earlier = order[:pos]
        cands = earlier[adj[v, earlier]]
        s, _, n = K.max_clique(adj, comp, prefix=[v], cands=cands, lower=best[0])
        best[0] = max(best[0], s)
        nodes[0] += n
        return s

    with ThreadPoolExecutor(max_workers=threads) as ex:
        sizes = list(ex.map(task, range(m)))
    return max(sizes + [best[0]]), nodes[0]


def _right_eq_hard_cap(metric: MetricKind, dim: int, m: int) -> int:
    if metric is MetricKind.LINF:
        return 2 ** (dim + 1)
    if metric is MetricKind.L2SQ:
        return dim + 3
    return m


def max_right_equidistant(grid: "CandidateGrid | Configuration", metric: "MetricKind | str" = MetricKind.LINF,
                          hard_cap: int | None = None, threads: int = 1) -> SearchResult:
    """Longest right-equidistant sequence of distinct grid points.

    Sequences are extended one point at a time; a candidate must sit at the
    already fixed distance from every earlier point but the last.  The
    first point is restricted to one representative per orbit under
    coordinate permutations.
    """
    metric = MetricKind.parse(metric)
    t0 = time.perf_counter()
    pts, dim, firsts = _candidates(grid)
    m = len(pts)
    if m > CLIQUE_CAP:
        raise GridCapError(f"{m} candidates exceed the search cap {CLIQUE_CAP}")
    D, _, _ = _grid_distances(pts, metric)
    cap = hard_cap if hard_cap is not None else _right_eq_hard_cap(metric, dim, m)
    if threads <= 1:
        best, seq, nodes, capped = K.right_equidistant_dfs(D, firsts, cap)
    else:
        best, seq, nodes, capped = _right_eq_parallel(D, firsts, cap, threads)
    witness = Configuration([pts[i] for i in seq], metric, dim)
    res = SearchResult(best, witness, nodes, not capped, time.perf_counter() - t0,
                       {"candidates": m, "metric": metric.value, "hard_cap": cap})
    if metric is MetricKind.LINF and best > 2 ** (dim + 1) - 1:
        raise BoundViolation(f"right-equidistant sequence of length {best} exceeds "
                             f"2**{dim + 1} - 1", res)
    return res


def _right_eq_parallel(D, firsts, cap, threads):
    def task(f):
        return K.right_equidistant_dfs(D, [f], cap)

    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(task, firsts))
    best = max(p[0] for p in parts)
    # first representative reaching the optimum, matching the serial order
    seq = next(p[1] for p in parts if p[0] == best)
    return best, seq, sum(p[2] for p in parts), any(p[3] for p in parts)


def search_odd_l1_seven(grid: CandidateGrid | None = None, artifact: str | None = None,
                        threads: int = 1) -> SearchResult:
    """Odd-distance clique search in l1^3, by default on the half-integer
    grid ``{-3/2, ..., 3/2}**3``.  Cliques of size 7 or more are written to
    ``artifact`` when a path is given."""
    grid = grid if grid is not None else CandidateGrid(3, PRESETS["half"])
    if grid.dim != 3:
        raise ValueError("this search runs in dimension 3")
    res = max_odd_distance_clique(grid, MetricKind.L1, threads=threads)
    res.extra["seven_found"] = res.best_size >= 7
    if artifact and res.best_size >= 7:
        with open(artifact, "w") as fh:
            json.dump(res.to_dict(timing=False), fh)
            fh.write("\n")
        res.extra["artifact"] = artifact
    return res
