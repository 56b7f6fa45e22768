"""Time the hot kernels under the numba and pure-numpy backends.

    python benchmarks/bench_kernels.py [--repeat 3] [--json]

Each case runs once untimed per backend (numba compiles on first call),
then the best of ``--repeat`` timings is reported.
"""
import argparse
import json
import time

from extremal import _kernels as K
from extremal import constructions as C
from extremal import search as S
from extremal.metric import MetricKind, integer_matrix


def _matrix(config):
    X, _ = integer_matrix(config.points, config.metric)
    return X


def cases():
    # equilateral sets are right-equidistant, so the scans run to the end
    cube11 = _matrix(C.gen_hypercube_odd(11))
    cross = _matrix(C.gen_cross_polytope_odd_l1(400))
    grid = _matrix(C.gen_grid_mod_k(4, 6))
    cube9 = _matrix(C.gen_hypercube_odd(9))
    # 2^1024 denominators: bigint rows on either backend
    linf10 = _matrix(C.gen_right_equidistant_linf(10))
    half = S.parse_grid("half", 3)
    quarter = S.CandidateGrid(2, ["0", "1/4", "1/2", "1"])
    return {
        "pairwise l1, 1296 pts": lambda: K.pairwise_distances(grid, K.L1),
        "right-eq scan linf, 2048 pts": lambda: K.right_equidistant_scan(cube11, K.LINF),
        "right-eq scan l1, 800 pts dim 400": lambda: K.right_equidistant_scan(cross, K.L1),
        "right-eq scan bigint, 2047 pts": lambda: K.right_equidistant_scan(linf10, K.LINF),
        "precedence, 512 pts": lambda: K.precedence_matrix(cube9),
        "odd clique l1 {-3/2..3/2}^3": lambda: S.max_odd_distance_clique(half, MetricKind.L1),
        "right-eq search {0,1/4,1/2,1}^2": lambda: S.max_right_equidistant(quarter, MetricKind.LINF),
    }


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="emit one JSON object instead of a table")
    args = ap.parse_args()

    rows = {}
    for name, fn in cases().items():
        row = {}
        for backend in ("numba", "numpy"):
            with K.using(backend):
                row[backend] = best_of(fn, args.repeat)
        row["speedup"] = row["numpy"] / row["numba"] if row["numba"] > 0 else float("inf")
        rows[name] = row

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'case':36s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, r in rows.items():
        print(f"{name:36s} {r['numba']:10.4f} {r['numpy']:10.4f} {r['speedup']:7.1f}x")


if __name__ == "__main__":
    main()
