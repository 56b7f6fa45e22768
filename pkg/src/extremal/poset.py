"""The last-coordinate partial order on l-infinity^n and what it certifies.

``x`` strictly precedes ``y`` when the l-infinity distance between their
first ``n - 1`` coordinates is strictly smaller than ``y_n - x_n``.  For
comparable points the l-infinity distance is the last-coordinate gap; for
incomparable ones it is the distance of the truncations.  A set with
pairwise odd distances therefore has no three-element chain, and its
maximum antichain truncates to an odd-distance set one dimension lower.
:func:`certify_odd_bound` records that recursion level by level.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from . import _kernels as K
from .metric import Configuration, MetricKind, Point, DimensionError, integer_matrix, truncate


class Comparison(enum.Enum):
    PRECEDES = "precedes"
    SUCCEEDS = "succeeds"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class CertificateError(Exception):
    """A level of the odd-distance recursion broke its bound.

    ``triple`` holds configuration indices of a three-element chain (or of
    three points on a line in dimension 1).
    """

    def __init__(self, message: str, triple: tuple[int, int, int]):
        super().__init__(message)
        self.triple = triple


def _head_gap(x: Point, y: Point) -> Fraction:
    return max(abs(a - b) for a, b in zip(x.coords[:-1], y.coords[:-1]))


def compare(x: Point, y: Point) -> Comparison:
    if x.dim != y.dim:
        raise DimensionError(x.dim, y.dim)
    if x.dim < 2:
        raise ValueError("the order needs dimension at least 2")
    if x == y:
        return Comparison.EQUAL
    spread = _head_gap(x, y)
    gap = y.coords[-1] - x.coords[-1]
    if spread < gap:
        return Comparison.PRECEDES
    if spread < -gap:
        return Comparison.SUCCEEDS
    return Comparison.INCOMPARABLE


def claim1_distance(x: Point, y: Point) -> Fraction:
    """l-infinity distance computed through the order: the last-coordinate
    gap for comparable points, the truncated distance otherwise."""
    c = compare(x, y)
    if c is Comparison.EQUAL:
        raise ValueError("points must be distinct")
    if c is Comparison.INCOMPARABLE:
        return _head_gap(x, y)
    return abs(y.coords[-1] - x.coords[-1])


class ComparabilityRelation:
    """Strict precedence among the points of an l-infinity configuration.

    ``precedes[i, j]`` is true when point ``i`` strictly precedes point
    ``j``.  The relation is transitive by the triangle inequality, so the
    matrix is its own transitive closure.
    """

    def __init__(self, config: Configuration):
        if config.metric is not MetricKind.LINF:
            raise ValueError("the order is defined on l-infinity configurations")
        if config.dim < 2:
            raise ValueError("the order needs dimension at least 2")
        self.config = config
        X, _ = integer_matrix(config.points, MetricKind.LINF)
        self.precedes = K.precedence_matrix(X)
        self.precedes.setflags(write=False)

    def __len__(self) -> int:
        return len(self.config)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.precedes))]

    @property
    def comparable(self) -> np.ndarray:
        return self.precedes | self.precedes.T

    def is_transitively_closed(self) -> bool:
        P = self.precedes.astype(np.int64)
        return not ((P @ P > 0) & ~self.precedes).any()

    def is_acyclic(self) -> bool:
        return not (self.precedes & self.precedes.T).any() and not self.precedes.diagonal().any()


def longest_chain(rel: ComparabilityRelation) -> tuple[int, list[int]]:
    """Length of a longest chain and the lexicographically smallest witness."""
    m = len(rel)
    if m == 0:
        return 0, []
    P = rel.precedes
    X, _ = integer_matrix(rel.config.points, MetricKind.LINF)
    # a successor always has a strictly larger last coordinate
    order = sorted(range(m), key=lambda i: X[i, -1], reverse=True)
    up = np.ones(m, dtype=np.int64)
    for v in order:
        succ = np.flatnonzero(P[v])
        if len(succ):
            up[v] = 1 + up[succ].max()
    length = int(up.max())
    v = int(np.flatnonzero(up == length)[0])
    chain = [v]
    while up[v] > 1:
        v = int(np.flatnonzero(P[v] & (up == up[v] - 1))[0])
        chain.append(v)
    return length, chain


@dataclass(frozen=True)
class ChainCover:
    chains: list[list[int]]

    def __len__(self) -> int:
        return len(self.chains)


def dilworth_decompose(rel: ComparabilityRelation) -> tuple[ChainCover, list[int]]:
    """Minimum chain cover and maximum antichain of equal size.

    Chains come from a maximum matching between a left and a right copy of
    the points (an edge per strict precedence); the antichain comes from the
    König vertex cover of that matching.
    """
    m = len(rel)
    P = rel.precedes
    if m == 0:
        return ChainCover([]), []
    match = maximum_bipartite_matching(csr_matrix(P.astype(np.int8)), perm_type="column")
    match_left = np.asarray(match, dtype=np.int64)  # left i -> right j, or -1
    match_right = np.full(m, -1, dtype=np.int64)
    for i, j in enumerate(match_left):
        if j >= 0:
            match_right[j] = i

    chains = []
    for start in range(m):
        if match_right[start] >= 0:
            continue
        chain = [start]
        while match_left[chain[-1]] >= 0:
            chain.append(int(match_left[chain[-1]]))
        chains.append(chain)

    # alternating search from unmatched left vertices
    seen_left = np.zeros(m, dtype=bool)
    seen_right = np.zeros(m, dtype=bool)
    stack = [i for i in range(m) if match_left[i] < 0]
    seen_left[stack] = True
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(P[i] & ~seen_right):
            seen_right[j] = True
            k = match_right[j]
            if k >= 0 and not seen_left[k]:
                seen_left[k] = True
                stack.append(int(k))
    antichain = [int(i) for i in np.flatnonzero(seen_left & ~seen_right)]
    if len(antichain) != len(chains):
        raise AssertionError(f"chain cover {len(chains)} != antichain {len(antichain)}")
    return ChainCover(chains), antichain


@dataclass
class BoundCertificate:
    """One level of the odd-distance recursion.

    ``indices`` lists configuration indices of this level's points; the
    points themselves are the originals truncated down to ``level_dim``.
    ``antichain_indices`` and the chains index into ``indices``.
    """

    level_dim: int
    set_size: int
    indices: list[int]
    chain_cover: ChainCover
    max_chain_length: int
    antichain_indices: list[int]
    child: "BoundCertificate | None" = None

    def levels(self):
        node = self
        while node is not None:
            yield node
            node = node.child

    def implied_bound(self) -> int:
        if self.child is None:
            return self.set_size
        return self.max_chain_length * self.child.implied_bound()

    def to_dict(self) -> dict:
        return {
            "level_dim": self.level_dim,
            "set_size": self.set_size,
            "indices": self.indices,
            "max_chain_length": self.max_chain_length,
            "chain_cover": self.chain_cover.chains,
            "antichain_indices": self.antichain_indices,
            "child": self.child.to_dict() if self.child else None,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BoundCertificate":
        child = doc.get("child")
        return cls(
            level_dim=doc["level_dim"],
            set_size=doc["set_size"],
            indices=list(doc["indices"]),
            chain_cover=ChainCover([list(c) for c in doc["chain_cover"]]),
            max_chain_length=doc["max_chain_length"],
            antichain_indices=list(doc["antichain_indices"]),
            child=cls.from_dict(child) if child else None,
        )


def certify_odd_bound(config: Configuration) -> BoundCertificate:
    """Build the recursive certificate that ``len(config) <= 2**dim``."""
    from .verifiers import check_odd_distances

    if config.metric is not MetricKind.LINF:
        raise ValueError("certificates are built for l-infinity configurations")
    if len(config) >= 2 and not check_odd_distances(config).ok:
        raise ValueError("configuration does not have pairwise odd distances")
    return _certify_level(list(config.points), list(range(len(config))), config.dim)


def _certify_level(points: list[Point], indices: list[int], dim: int) -> BoundCertificate:
    size = len(points)
    if dim == 1:
        if size >= 3:
            order = sorted(range(size), key=lambda a: points[a].coords[0])[:3]
            raise CertificateError("three points on a line with pairwise odd distances",
                                   tuple(indices[a] for a in order))
        return BoundCertificate(1, size, indices, ChainCover([[a] for a in range(size)]),
                                1 if size else 0, list(range(size)))
    rel = ComparabilityRelation(Configuration(points, MetricKind.LINF, dim))
    length, chain = longest_chain(rel)
    if length >= 3:
        raise CertificateError(f"chain of length {length} at dimension {dim}",
                               tuple(indices[a] for a in chain[:3]))
    cover, antichain = dilworth_decompose(rel)
    child_points = [truncate(points[a]) for a in antichain]
    child = _certify_level(child_points, [indices[a] for a in antichain], dim - 1)
    return BoundCertificate(dim, size, indices, cover, length, antichain, child)


@dataclass
class CertificateCheck:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(config: Configuration, cert: BoundCertificate) -> CertificateCheck:
    """Re-check a certificate from the raw points.

    Comparisons are evaluated directly on Fractions, independently of the
    relation matrices used to build the certificate.
    """
    problems: list[str] = []
    top = config.dim
    expected_indices: Sequence[int] = list(range(len(config)))
    node: BoundCertificate | None = cert
    expected_dim = top
    bounds = []
    while node is not None:
        tag = f"level {node.level_dim}"
        if node.level_dim != expected_dim:
            problems.append(f"{tag}: expected dimension {expected_dim}")
            break
        if list(node.indices) != list(expected_indices):
            problems.append(f"{tag}: point indices do not follow the parent antichain")
            break
        if node.set_size != len(node.indices):
            problems.append(f"{tag}: set_size {node.set_size} != {len(node.indices)} points")
        pts = [Point(config.points[i].coords[: node.level_dim]) for i in node.indices]
        m = len(pts)
        covered = sorted(a for ch in node.chain_cover.chains for a in ch)
        if covered != list(range(m)):
            problems.append(f"{tag}: chains do not partition the points")
        if len(node.chain_cover.chains) != len(node.antichain_indices):
            problems.append(f"{tag}: cover size differs from antichain size")
        if any(len(ch) > node.max_chain_length for ch in node.chain_cover.chains):
            problems.append(f"{tag}: a chain exceeds max_chain_length")
        if node.max_chain_length > 2:
            problems.append(f"{tag}: max_chain_length {node.max_chain_length} > 2")
        if node.level_dim == 1:
            if m > 2:
                problems.append(f"{tag}: {m} points in dimension 1")
            if node.child is not None:
                problems.append(f"{tag}: dimension 1 must be the last level")
            bounds.append(m)
            break
        prec = _precedence_fractions(pts)
        for ch in node.chain_cover.chains:
            for a, b in zip(ch, ch[1:]):
                if not prec[a, b]:
                    problems.append(f"{tag}: chain step {a}->{b} is not a strict precedence")
        anti = node.antichain_indices
        for s, a in enumerate(anti):
            for b in anti[s + 1:]:
                if prec[a, b] or prec[b, a] or pts[a] == pts[b]:
                    problems.append(f"{tag}: antichain members {a},{b} are comparable")
        steps = prec.astype(np.int64)
        longest = 0 if m == 0 else (1 if not prec.any() else (3 if (steps @ steps).any() else 2))
        if longest > node.max_chain_length:
            problems.append(f"{tag}: a chain of length {longest} exists")
        if m > node.max_chain_length * len(anti):
            problems.append(f"{tag}: {m} > {node.max_chain_length} * {len(anti)}")
        bounds.append(node.max_chain_length)
        expected_indices = [node.indices[a] for a in anti]
        expected_dim -= 1
        node = node.child
        if node is None:
            problems.append(f"{tag}: missing child level")
    implied = 1
    for b in bounds:
        implied *= b
    if not problems and len(config) > implied:
        problems.append(f"implied bound {implied} is below the set size {len(config)}")
    if not problems and implied > 2 ** top:
        problems.append(f"implied bound {implied} exceeds 2**{top}")
    return CertificateCheck(not problems, problems)


def _precedence_fractions(pts: list[Point]) -> np.ndarray:
    m = len(pts)
    P = np.zeros((m, m), dtype=bool)
    for a in range(m):
        xa = pts[a].coords
        for b in range(m):
            if a == b:
                continue
            xb = pts[b].coords
            gap = xb[-1] - xa[-1]
            if gap > 0 and all(abs(u - v) < gap for u, v in zip(xa[:-1], xb[:-1])):
                P[a, b] = True
    return P
