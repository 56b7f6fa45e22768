"""Integer kernels behind the exact predicates and searches.

Every kernel works on integer matrices obtained by scaling rational points
to a common denominator, so results are exact.  ``int64`` inputs run through
numba when it is available; setting ``EXTREMAL_NO_NUMBA=1`` (or calling
:func:`set_backend`) selects the pure numpy implementations instead.  The
numpy versions also accept object arrays of Python integers, which is how
configurations with very large denominators are handled.

The two search implementations follow the same visiting order, so they
report identical node counts.
"""
from __future__ import annotations

import contextlib
import os
import sys

import numpy as np

try:
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

L1, LINF, L2SQ = 0, 1, 2

_backend = "numpy" if (
    not _HAVE_NUMBA or os.environ.get("EXTREMAL_NO_NUMBA", "").lower() in ("1", "true", "yes")
) else "numba"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@contextlib.contextmanager
def using(name: str):
    old = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


def _jit(fn):
    if not _HAVE_NUMBA:
        return fn
    return njit(cache=True, nogil=True)(fn)


def _fast(*arrays) -> bool:
    return _backend == "numba" and all(a.dtype == np.int64 for a in arrays)


# ---------------------------------------------------------------------------
# distances


def _row_dist_np(block, x, code):
    diff = np.abs(block - x)
    if code == L1:
        return diff.sum(axis=1)
    if code == LINF:
        return diff.max(axis=1)
    return (diff * diff).sum(axis=1)


@_jit
def _pairwise_nb(X, code):
    m, n = X.shape
    D = np.zeros((m, m), np.int64)
    for i in range(m):
        for j in range(i + 1, m):
            acc = 0
            for k in range(n):
                d = X[i, k] - X[j, k]
                if d < 0:
                    d = -d
                if code == L1:
                    acc += d
                elif code == LINF:
                    if d > acc:
                        acc = d
                else:
                    acc += d * d
            D[i, j] = acc
            D[j, i] = acc
    return D


def _pairwise_np(X, code):
    m = X.shape[0]
    D = np.zeros((m, m), dtype=X.dtype)
    if X.dtype == object:
        D[:] = 0
    for i in range(m - 1):
        row = _row_dist_np(X[i + 1:], X[i], code)
        D[i, i + 1:] = row
        D[i + 1:, i] = row
    return D


def pairwise_distances(X: np.ndarray, code: int) -> np.ndarray:
    """Full matrix of scaled distances between the rows of ``X``."""
    if X.shape[0] == 0:
        return np.zeros((0, 0), dtype=X.dtype)
    if X.shape[1] == 0:
        return np.zeros((X.shape[0], X.shape[0]), dtype=X.dtype)
    if _fast(X):
        return _pairwise_nb(X, code)
    return _pairwise_np(X, code)


# ---------------------------------------------------------------------------
# right-equidistance scan
#
# Returns (i, j, kind): kind 0 means no violation, 1 means rows i and j
# coincide, 2 means d(i, j) differs from d(i, i + 1).


@_jit
def _right_eq_scan_nb(X, code):
    m, n = X.shape
    for i in range(m - 1):
        first = -1
        for j in range(i + 1, m):
            acc = 0
            for k in range(n):
                d = X[i, k] - X[j, k]
                if d < 0:
                    d = -d
                if code == L1:
                    acc += d
                elif code == LINF:
                    if d > acc:
                        acc = d
                else:
                    acc += d * d
            if acc == 0:
                return i, j, 1
            if first < 0:
                first = acc
            elif acc != first:
                return i, j, 2
    return -1, -1, 0


def _sparse_rows(X, code):
    m = X.shape[0]
    support = [np.flatnonzero(X[i] != 0) for i in range(m)]
    norms = np.empty(m, dtype=X.dtype)
    for i in range(m):
        vals = X[i, support[i]]
        norms[i] = np.abs(vals).sum() if code == L1 else (vals * vals).sum()
    return support, norms


def _right_eq_scan_np(X, code):
    m, n = X.shape
    sparse = code != LINF and n > 16
    if sparse:
        support, norms = _sparse_rows(X, code)
    for i in range(m - 1):
        if sparse:
            d = norms[i + 1:].copy()
            if code == L1:
                for k in support[i]:
                    col = X[i + 1:, k]
                    d += np.abs(col - X[i, k]) - np.abs(col)
            else:
                d += norms[i]
                for k in support[i]:
                    d -= 2 * X[i, k] * X[i + 1:, k]
        else:
            d = _row_dist_np(X[i + 1:], X[i], code)
        bad = (d != d[0]) | (d == 0)
        if bad.any():
            t = int(np.argmax(bad))
            return i, i + 1 + t, 1 if d[t] == 0 else 2
    return -1, -1, 0


def right_equidistant_scan(X: np.ndarray, code: int):
    if X.shape[0] < 2:
        return -1, -1, 0
    if _fast(X):
        i, j, kind = _right_eq_scan_nb(X, code)
        return int(i), int(j), int(kind)
    return _right_eq_scan_np(X, code)


# ---------------------------------------------------------------------------
# strict precedence of the last-coordinate order


@_jit
def _precedence_nb(X):
    m, n = X.shape
    P = np.zeros((m, m), np.bool_)
    for i in range(m):
        for j in range(m):
            gap = X[j, n - 1] - X[i, n - 1]
            if gap <= 0:
                continue
            mx = 0
            for k in range(n - 1):
                d = X[j, k] - X[i, k]
                if d < 0:
                    d = -d
                if d > mx:
                    mx = d
            P[i, j] = mx < gap
    return P


def _precedence_np(X):
    m, n = X.shape
    P = np.zeros((m, m), dtype=bool)
    head = X[:, : n - 1]
    last = X[:, n - 1]
    for i in range(m):
        gap = last - last[i]
        if n > 1:
            spread = np.abs(head - head[i]).max(axis=1)
        else:
            spread = np.zeros(m, dtype=X.dtype)
        P[i] = (gap > 0) & (spread < gap)
    return P.astype(bool)


def precedence_matrix(X: np.ndarray) -> np.ndarray:
    """``P[i, j]`` is true when row ``i`` strictly precedes row ``j``."""
    if X.shape[0] == 0:
        return np.zeros((0, 0), dtype=bool)
    if _fast(X):
        return _precedence_nb(X)
    return _precedence_np(X)


# ---------------------------------------------------------------------------
# l1 distance to the even-sum integer lattice


@_jit
def _lattice_gap_nb(A, q):
    m, n = A.shape
    out = np.empty(m, np.int64)
    for i in range(m):
        total = 0
        parity = 0
        flip = q + 1
        for k in range(n):
            a = A[i, k]
            f = a // q
            rem = a - f * q
            if 2 * rem <= q:
                near = rem
                alt = q - rem
                lam = f
            else:
                near = q - rem
                alt = rem
                lam = f + 1
            total += near
            parity += lam
            if alt - near < flip:
                flip = alt - near
        if parity % 2 != 0:
            total += flip
        out[i] = total
    return out


def _lattice_gap_np(A, q):
    f = A // q
    rem = A - f * q
    down = 2 * rem <= q
    near = np.where(down, rem, q - rem)
    alt = np.where(down, q - rem, rem)
    lam = np.where(down, f, f + 1)
    total = near.sum(axis=1)
    odd = lam.sum(axis=1) % 2 != 0
    return total + np.where(odd, (alt - near).min(axis=1), 0)


def lattice_gap(A: np.ndarray, q: int) -> np.ndarray:
    """Scaled l1 distance from each row of ``A / q`` to the nearest integer
    vector with even coordinate sum."""
    A = np.atleast_2d(A)
    if _fast(A):
        return _lattice_gap_nb(A, np.int64(q))
    return _lattice_gap_np(A, q)


# ---------------------------------------------------------------------------
# maximum clique: colour-ordered branch and bound, then lexicographic witness


@_jit
def _color_sort_nb(adj, R, nR, out, outcol):
    cls = np.empty(nR, np.int64)
    used = np.zeros(nR + 1, np.bool_)
    ncls = 0
    for t in range(nR):
        v = R[t]
        for s in range(t):
            if adj[v, R[s]]:
                used[cls[s]] = True
        k = 0
        while used[k]:
            k += 1
        cls[t] = k
        if k + 1 > ncls:
            ncls = k + 1
        for s in range(t):
            used[cls[s]] = False
    pos = 0
    for k in range(ncls):
        for t in range(nR):
            if cls[t] == k:
                out[pos] = R[t]
                outcol[pos] = k + 1
                pos += 1
    return ncls


def _color_sort_np(adj, R):
    nR = len(R)
    cls = np.empty(nR, dtype=np.int64)
    for t in range(nR):
        nb = cls[:t][adj[R[t], R[:t]]]
        used = np.zeros(t + 2, dtype=bool)
        used[nb] = True
        cls[t] = int(np.argmin(used))
    order = np.argsort(cls, kind="stable")
    return R[order], cls[order] + 1


@_jit
def _max_clique_nb(adj, comp, use_comp, prefix, cands, lower):
    nc = cands.shape[0]
    np0 = prefix.shape[0]
    C = np.empty((nc + 1, max(nc, 1)), np.int64)
    K = np.empty((nc + 1, max(nc, 1)), np.int64)
    P = np.zeros(nc + 1, np.int64)
    clique = np.empty(np0 + nc + 1, np.int64)
    clique[:np0] = prefix
    tmp = np.empty(max(nc, 1), np.int64)
    best = lower
    best_clique = np.empty(0, np.int64)
    nodes = 0
    if nc == 0:
        if np0 > best:
            return np0, prefix.copy(), nodes
        return best, best_clique, nodes
    _color_sort_nb(adj, cands, nc, C[0], K[0])
    P[0] = nc - 1
    d = 0
    while d >= 0:
        p = P[d]
        if p < 0 or np0 + d + K[d, p] <= best:
            d -= 1
            continue
        v = C[d, p]
        P[d] = p - 1
        clique[np0 + d] = v
        nodes += 1
        cnt = 0
        for t in range(p):
            w = C[d, t]
            if not adj[v, w]:
                continue
            ok = True
            if use_comp and comp[v, w]:
                for s in range(np0 + d):
                    u = clique[s]
                    if comp[u, v] and comp[u, w]:
                        ok = False
                        break
            if ok:
                tmp[cnt] = w
                cnt += 1
        size = np0 + d + 1
        if cnt == 0:
            if size > best:
                best = size
                best_clique = clique[:size].copy()
        else:
            _color_sort_nb(adj, tmp, cnt, C[d + 1], K[d + 1])
            P[d + 1] = cnt - 1
            d += 1
    return best, best_clique, nodes


class _CliqueNP:
    def __init__(self, adj, comp, use_comp, prefix, lower):
        self.adj = adj
        self.comp = comp
        self.use_comp = use_comp
        self.clique = list(prefix)
        self.best = lower
        self.best_clique = np.empty(0, dtype=np.int64)
        self.nodes = 0

    def _extend(self, v, R):
        w = R[self.adj[v, R]]
        if self.use_comp and len(w) and self.clique:
            cv = self.comp[v, w]
            if cv.any():
                u = np.asarray(self.clique)
                clash = (self.comp[u][:, w] & self.comp[u, v][:, None]).any(axis=0)
                w = w[~(cv & clash)]
        return w

    def expand(self, R, col):
        for p in range(len(R) - 1, -1, -1):
            if len(self.clique) + col[p] <= self.best:
                return
            v = int(R[p])
            self.nodes += 1
            nxt = self._extend(v, R[:p])
            self.clique.append(v)
            if len(nxt) == 0:
                if len(self.clique) > self.best:
                    self.best = len(self.clique)
                    self.best_clique = np.array(self.clique, dtype=np.int64)
            else:
                self.expand(*_color_sort_np(self.adj, nxt))
            self.clique.pop()


def max_clique(adj, comp=None, prefix=None, cands=None, lower=0):
    """Size of a maximum clique extending ``prefix`` inside ``cands``.

    ``cands`` must already be compatible with ``prefix``.  Returns
    ``(size, clique, nodes)``; ``clique`` is empty when nothing beats
    ``lower``.  With ``comp`` given, branches that would contain three
    pairwise comparable vertices are cut.
    """
    m = adj.shape[0]
    use_comp = comp is not None
    if comp is None:
        comp = np.zeros((1, 1), dtype=bool)
    prefix = np.zeros(0, np.int64) if prefix is None else np.asarray(prefix, np.int64)
    if cands is None:
        deg = adj.sum(axis=1)
        cands = np.lexsort((np.arange(m), -deg)).astype(np.int64)
    cands = np.asarray(cands, np.int64)
    if _backend == "numba":
        best, clique, nodes = _max_clique_nb(adj, comp, use_comp, prefix, cands, lower)
        return int(best), clique, int(nodes)
    s = _CliqueNP(adj, comp, use_comp, prefix, lower)
    if len(cands) == 0:
        if len(prefix) > lower:
            return len(prefix), prefix.copy(), 0
        return lower, s.best_clique, 0
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(cands) + 100))
    s.expand(*_color_sort_np(adj, cands))
    return s.best, s.best_clique, s.nodes


@_jit
def _lex_clique_nb(adj, comp, use_comp, target):
    m = adj.shape[0]
    C = np.empty((target + 1, m), np.int64)
    N = np.zeros(target + 1, np.int64)
    P = np.zeros(target + 1, np.int64)
    scratch = np.empty(m, np.int64)
    scratch_col = np.empty(m, np.int64)
    clique = np.empty(target + 1, np.int64)
    nodes = 0
    for t in range(m):
        C[0, t] = t
    N[0] = m
    d = 0
    while d >= 0:
        p = P[d]
        if p >= N[d] or d + (N[d] - p) < target:
            d -= 1
            continue
        v = C[d, p]
        P[d] = p + 1
        clique[d] = v
        nodes += 1
        if d + 1 == target:
            return clique[:target].copy(), nodes
        cnt = 0
        for t in range(p + 1, N[d]):
            w = C[d, t]
            if not adj[v, w]:
                continue
            ok = True
            if use_comp and comp[v, w]:
                for s in range(d):
                    u = clique[s]
                    if comp[u, v] and comp[u, w]:
                        ok = False
                        break
            if ok:
                C[d + 1, cnt] = w
                cnt += 1
        if d + 1 + cnt < target:
            continue
        ncol = _color_sort_nb(adj, C[d + 1], cnt, scratch, scratch_col)
        if d + 1 + ncol < target:
            continue
        N[d + 1] = cnt
        P[d + 1] = 0
        d += 1
    return np.empty(0, np.int64), nodes


def _lex_clique_np(adj, comp, use_comp, target):
    helper = _CliqueNP(adj, comp, use_comp, [], 0)
    nodes = 0

    def rec(R):
        nonlocal nodes
        d = len(helper.clique)
        for p in range(len(R)):
            if d + (len(R) - p) < target:
                return None
            v = int(R[p])
            nodes += 1
            if d + 1 == target:
                return helper.clique + [v]
            nxt = helper._extend(v, R[p + 1:])
            if d + 1 + len(nxt) < target:
                continue
            _, col = _color_sort_np(adj, nxt)
            if d + 1 + (int(col.max()) if len(col) else 0) < target:
                continue
            helper.clique.append(v)
            found = rec(nxt)
            helper.clique.pop()
            if found is not None:
                return found
        return None

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * target + 100))
    found = rec(np.arange(adj.shape[0], dtype=np.int64))
    if found is None:
        return np.empty(0, np.int64), nodes
    return np.array(found, dtype=np.int64), nodes


def lex_first_clique(adj, target, comp=None):
    """Lexicographically smallest clique of size ``target`` (index order)."""
    if target <= 0:
        return np.empty(0, np.int64), 0
    use_comp = comp is not None
    if comp is None:
        comp = np.zeros((1, 1), dtype=bool)
    if _backend == "numba":
        clique, nodes = _lex_clique_nb(adj, comp, use_comp, target)
        return clique, int(nodes)
    return _lex_clique_np(adj, comp, use_comp, target)


# ---------------------------------------------------------------------------
# right-equidistant sequences: ordered depth-first extension


@_jit
def _right_eq_dfs_nb(D, firsts, cap, lower):
    m = D.shape[0]
    seq = np.empty(cap + 1, np.int64)
    cand = np.zeros((cap + 2, m), np.bool_)
    nxt = np.zeros(cap + 2, np.int64)
    best = lower
    best_seq = np.empty(0, np.int64)
    nodes = 0
    capped = False
    fi = 0
    L = 0
    while True:
        if L == 0:
            if fi >= firsts.shape[0]:
                break
            f = firsts[fi]
            fi += 1
            seq[0] = f
            nodes += 1
            for t in range(m):
                cand[1, t] = t != f
            if 1 > best:
                best = 1
                best_seq = seq[:1].copy()
            if cap <= 1:
                if m > 1:
                    capped = True
                continue
            if m <= best:
                continue
            nxt[1] = 0
            L = 1
            continue
        c = nxt[L]
        while c < m and not cand[L, c]:
            c += 1
        if c >= m:
            L -= 1
            continue
        nxt[L] = c + 1
        seq[L] = c
        nodes += 1
        last = seq[L - 1]
        r = D[last, c]
        cnt = 0
        for t in range(m):
            b = cand[L, t] and t != c and D[t, last] == r
            cand[L + 1, t] = b
            if b:
                cnt += 1
        size = L + 1
        if size > best:
            best = size
            best_seq = seq[:size].copy()
        if size >= cap:
            if cnt > 0:
                capped = True
            continue
        if size + cnt <= best:
            continue
        nxt[size] = 0
        L = size
    return best, best_seq, nodes, capped


def _right_eq_dfs_np(D, firsts, cap, lower):
    m = D.shape[0]
    state = {"best": lower, "seq": np.empty(0, np.int64), "nodes": 0, "capped": False}
    seq = []

    def rec(cand):
        last = seq[-1]
        for c in np.flatnonzero(cand):
            c = int(c)
            state["nodes"] += 1
            seq.append(c)
            nxt = cand & (D[:, last] == D[last, c])
            nxt[c] = False
            size = len(seq)
            if size > state["best"]:
                state["best"] = size
                state["seq"] = np.array(seq, dtype=np.int64)
            cnt = int(nxt.sum())
            if size >= cap:
                if cnt > 0:
                    state["capped"] = True
            elif size + cnt > state["best"]:
                rec(nxt)
            seq.pop()

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * cap + 100))
    for f in firsts:
        f = int(f)
        state["nodes"] += 1
        seq.append(f)
        cand = np.ones(m, dtype=bool)
        cand[f] = False
        if 1 > state["best"]:
            state["best"] = 1
            state["seq"] = np.array(seq, dtype=np.int64)
        if cap <= 1:
            if m > 1:
                state["capped"] = True
        elif m > state["best"]:
            rec(cand)
        seq.pop()
    return state["best"], state["seq"], state["nodes"], state["capped"]


def right_equidistant_dfs(D, firsts, cap, lower=0):
    """Longest right-equidistant ordering of rows of the distance matrix ``D``.

    Returns ``(length, sequence, nodes, capped)``; ``capped`` is true when
    the length cap cut off a branch that could have been extended.
    """
    firsts = np.asarray(firsts, np.int64)
    if _backend == "numba" and D.dtype == np.int64:
        best, s, nodes, capped = _right_eq_dfs_nb(D, firsts, int(cap), int(lower))
        return int(best), s, int(nodes), bool(capped)
    return _right_eq_dfs_np(D, firsts, int(cap), int(lower))
