"""Acceptance criteria, one test each.

Every test prints a single ``ACnn PASS|FAIL <summary>`` line (visible with
``pytest -s`` and in the terminal summary) and asserts the criterion at its
stated tolerance.
"""
import io
import json
import random
import sys
import time
from fractions import Fraction as F

import pytest

from extremal import cli
from extremal import constructions as C
from extremal import search as S
from extremal.coloring import build_covering, verify_coloring
from extremal.metric import Configuration, MetricKind, Point, distance, embed_l1_to_linf
from extremal.poset import (ComparabilityRelation, certify_odd_bound, claim1_distance, dilworth_decompose,
                            verify_certificate)
from extremal.verifiers import check_not_divisible, check_odd_distances, check_right_equidistant

L1, LINF, L2SQ = MetricKind.L1, MetricKind.LINF, MetricKind.L2SQ

RESULTS: dict[str, str] = {}


def report(tag, ok, summary, capsys):
    line = f"{tag} {'PASS' if ok else 'FAIL'} {summary}"
    RESULTS[tag] = line
    with capsys.disabled():
        print("\n" + line, end="")
    assert ok, line


def _cli(argv, stdin, monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    with capsys.disabled():
        buf = io.StringIO()
        old = sys.stdout
        sys.stdout = buf
        try:
            code = cli.main(argv)
        finally:
            sys.stdout = old
    return code, buf.getvalue()


def test_ac01_right_equidistant_linf(monkeypatch, capsys):
    t0 = time.perf_counter()
    bad = []
    for n in range(1, 11):
        code, out = _cli(["generate", "right-equidistant-linf", "--n", str(n)], "", monkeypatch, capsys)
        pts = json.loads(out)["points"]
        if code != 0 or len(pts) != 2 ** (n + 1) - 1 or len({tuple(p) for p in pts}) != len(pts):
            bad.append(n)
            continue
        code, _ = _cli(["verify", "right-equidistant"], out, monkeypatch, capsys)
        if code != 0:
            bad.append(n)
    dt = time.perf_counter() - t0
    report("AC01", not bad and dt < 10, f"n=1..10 sizes 2^(n+1)-1, verify exit 0; failures={bad}; {dt:.2f}s < 10s",
           capsys)


def test_ac02_right_equidistant_l1(capsys):
    times, bad = {}, []
    for n in (1, 2, 3, 10, 100, 1000):
        t0 = time.perf_counter()
        c = C.gen_right_equidistant_l1(n)
        ok = len(c) == 4 * n - 1 and check_right_equidistant(c).ok
        times[n] = time.perf_counter() - t0
        if not ok:
            bad.append(n)
    report("AC02", not bad and times[1000] < 60,
           f"4n-1 points verified for n in {{1,2,3,10,100,1000}}; failures={bad}; n=1000 {times[1000]:.2f}s < 60s",
           capsys)


def test_ac03_odd_distance_lower_bounds(capsys):
    from extremal.verifiers import distance_spectrum

    bad = []
    for n in range(1, 11):
        c = C.gen_hypercube_odd(n)
        if len(c) != 2 ** n or not check_odd_distances(c).ok or (n > 0 and distance_spectrum(c) != [F(1)]):
            bad.append(("hypercube", n))
    for n, k in [(8, 2), (5, 3), (4, 4), (3, 5)]:
        c = C.gen_grid_mod_k(n, k)
        if len(c) != k ** n or not check_not_divisible(c, k).ok:
            bad.append(("grid", n, k))
    report("AC03", not bad, f"hypercube n<=10 all distances 1; grid_mod_k 4 cases; failures={bad}", capsys)


def test_ac04_linf_odd_clique_tightness(capsys):
    sizes, tripped, t3 = {}, False, 0.0
    for n in (1, 2, 3):
        t0 = time.perf_counter()
        try:
            res = S.max_odd_distance_clique(S.parse_grid("ternary", n), LINF)
            sizes[n] = (res.best_size, res.exhaustive)
        except S.BoundViolation:
            tripped = True
        if n == 3:
            t3 = time.perf_counter() - t0
    ok = not tripped and all(sizes.get(n) == (2 ** n, True) for n in (1, 2, 3)) and t3 < 5
    report("AC04", ok, f"{{0,1,2}}^n best sizes {sizes}; guard tripped={tripped}; n=3 {t3:.3f}s < 5s", capsys)


def test_ac05_linf_right_equidistant_tightness(capsys):
    r1 = S.max_right_equidistant(S.CandidateGrid(1, ["0", "1/4", "1/2", "1", "2"]), LINF, threads=1)
    t0 = time.perf_counter()
    r2 = S.max_right_equidistant(S.CandidateGrid(2, ["0", "1/4", "1/2", "1"]), LINF, threads=1)
    dt = time.perf_counter() - t0
    ok = (r1.best_size, r1.exhaustive, r2.best_size, r2.exhaustive) == (3, True, 7, True) and dt < 120
    ok = ok and check_right_equidistant(r2.witness).ok
    report("AC05", ok, f"1-D best {r1.best_size}, 2-D best {r2.best_size} (exhaustive); 2-D {dt:.2f}s < 120s",
           capsys)


def _rand_scalar(rng):
    return F(rng.randint(-60, 60), rng.choice([1, 2, 3, 4, 5, 6, 8, 9, 16]))


def test_ac06_pair_distance_via_order(capsys):
    rng = random.Random(20240601)
    fails = 0
    for n in range(2, 7):
        done = 0
        while done < 10_000:
            x = Point(_rand_scalar(rng) for _ in range(n))
            # half the pairs are built comparable so both branches get exercised
            if done % 2:
                y = Point(_rand_scalar(rng) for _ in range(n))
            else:
                head = [c + F(rng.randint(-4, 4), 8) for c in x.coords[:-1]]
                y = Point(head + [x.coords[-1] + F(rng.randint(5, 40), 8)])
            if x == y:
                continue
            done += 1
            fails += claim1_distance(x, y) != distance(x, y, LINF)
    report("AC06", fails == 0, f"5 x 10^4 pairs, dims 2..6, mismatches={fails}", capsys)


def _brute_antichain(prec):
    """Largest antichain by enumerating all 2^m subsets."""
    m = len(prec)
    comp = [sum(1 << j for j in range(m) if prec[i][j] or prec[j][i]) for i in range(m)]
    good = [False] * (1 << m)
    good[0] = True
    best = 0
    for mask in range(1, 1 << m):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        good[mask] = good[rest] and not (comp[low] & rest)
        if good[mask]:
            best = max(best, bin(mask).count("1"))
    return best


def test_ac07_dilworth_oracle(capsys):
    rng = random.Random(7)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        n = rng.randint(2, 4)
        m = rng.randint(1, 12)
        pts = list(dict.fromkeys(Point(F(rng.randint(-6, 6), 2) for _ in range(n)) for _ in range(m)))
        rel = ComparabilityRelation(Configuration(pts, LINF))
        cover, _ = dilworth_decompose(rel)
        mismatches += len(cover) != _brute_antichain(rel.precedes.tolist())
    dt = time.perf_counter() - t0
    report("AC07", mismatches == 0 and dt < 30, f"200 configurations, mismatches={mismatches}; {dt:.2f}s < 30s",
           capsys)


def test_ac08_certificate_soundness(capsys):
    bad, t8 = [], 0.0
    for n in range(1, 9):
        t0 = time.perf_counter()
        c = C.gen_hypercube_odd(n)
        cert = certify_odd_bound(c)
        levels = list(cert.levels())
        sizes = [lv.set_size for lv in levels]
        ok = sizes == [2 ** (n - k) for k in range(n)]
        ok = ok and all(lv.max_chain_length <= 2 for lv in levels) and verify_certificate(c, cert).ok
        if n == 8:
            t8 = time.perf_counter() - t0
        if not ok:
            bad.append(n)
    report("AC08", not bad and t8 < 30, f"hypercube n=1..8 levels (2^n..2), chains <= 2, verifier accepts; "
           f"failures={bad}; n=8 {t8:.2f}s < 30s", capsys)


def test_ac09_embedding_isometry(capsys):
    rng = random.Random(99)
    fails = 0
    for n in range(1, 6):
        for _ in range(1000):
            p = Point(_rand_scalar(rng) for _ in range(n))
            q = Point(_rand_scalar(rng) for _ in range(n))
            fails += distance(embed_l1_to_linf(p), embed_l1_to_linf(q), LINF) != distance(p, q, L1)
    report("AC09", fails == 0, f"5 x 10^3 pairs, dims 1..5, mismatches={fails}", capsys)


def test_ac10_coloring_soundness(capsys):
    rows, ok = [], True
    for dim in (1, 2, 3):
        cov = build_covering(dim, resolution=F(1, 16), seed=0)
        v = verify_coloring(cov, samples=100_000, seed=dim)
        s = v.stats
        good = v.ok and s.get("sandwich_violations") == 0 and s["uncovered_points"] == 0
        ok &= good
        rows.append(f"dim{dim}:{len(cov)} colours,{s['odd_pairs']} odd pairs,"
                    f"sandwich viol {s.get('sandwich_violations')}")
    report("AC10", ok, "; ".join(rows), capsys)


def test_ac11_l1_exploratory_search(capsys, tmp_path):
    t0 = time.perf_counter()
    res = S.search_odd_l1_seven(artifact=str(tmp_path / "seven.json"))
    dt = time.perf_counter() - t0
    ok = res.best_size >= 6 and check_odd_distances(res.witness).ok and dt < 300
    report("AC11", ok, f"best_size={res.best_size} on {{-3/2..3/2}}^3 (7 found: {res.extra['seven_found']}); "
           f"{dt:.2f}s < 300s", capsys)


def test_ac12_euclidean_sequence(capsys):
    bad = []
    for n in range(1, 21):
        c = C.gen_euclidean_right_equidistant(n)
        if len(c) != n + 2 or c.metric is not L2SQ or not check_right_equidistant(c).ok:
            bad.append(n)
    report("AC12", not bad, f"n=1..20 emit n+2 points, right-equidistant under squared l2; failures={bad}", capsys)


@pytest.fixture(scope="module", autouse=True)
def _summary(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is None or not RESULTS:
        return
    reporter.write_line("")
    reporter.write_line("acceptance summary")
    for tag in sorted(RESULTS):
        reporter.write_line(RESULTS[tag])
