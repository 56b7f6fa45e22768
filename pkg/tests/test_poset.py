import copy
import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from extremal import constructions as C
from extremal.metric import Configuration, MetricKind, Point, distance
from extremal.poset import (BoundCertificate, CertificateError, Comparison, ComparabilityRelation,
                            certify_odd_bound, claim1_distance, compare, dilworth_decompose,
                            longest_chain, verify_certificate)

from conftest import point_sets, points
from oracles import brute_max_antichain

LINF = MetricKind.LINF


def P(*xs):
    return Point(F(x) for x in xs)


def rel_of(pts):
    return ComparabilityRelation(Configuration(pts, LINF))


@pytest.mark.parametrize("x, y, want", [
    (P(0, 0), P("1/4", 1), Comparison.PRECEDES),
    (P("1/4", 1), P(0, 0), Comparison.SUCCEEDS),
    (P(0, 0), P(1, "1/2"), Comparison.INCOMPARABLE),
    (P(0, 0), P(1, 1), Comparison.INCOMPARABLE),
    (P(2, 3), P(2, 3), Comparison.EQUAL),
])
def test_compare_examples(x, y, want):
    assert compare(x, y) is want


@pytest.mark.parametrize("x, y, want", [
    (P(0, 0), P("1/4", 1), F(1)),
    (P(0, 0), P(1, "1/2"), F(1)),
    (P(0, 0, 0), P("1/2", "1/4", 2), F(2)),
])
def test_pair_distance_through_the_order(x, y, want):
    assert claim1_distance(x, y) == want == distance(x, y, LINF)


@given(st.integers(2, 6).flatmap(lambda n: st.tuples(points(n), points(n))))
def test_pair_distance_through_the_order_matches_distance(xy):
    x, y = xy
    assume(x != y)
    assert claim1_distance(x, y) == distance(x, y, LINF)


def test_pair_distance_through_the_order_rejects_equal_points():
    with pytest.raises(ValueError):
        claim1_distance(P(1, 2), P(1, 2))


@given(point_sets(dim=3, max_size=7, lo=-3, hi=3))
def test_strict_order_axioms(pts):
    pts = list(dict.fromkeys(pts))
    prec = rel_of(pts).precedes
    m = len(pts)
    assert not prec.diagonal().any()
    assert not (prec & prec.T).any()
    for a in range(m):
        for b in range(m):
            for c in range(m):
                if prec[a, b] and prec[b, c]:
                    assert prec[a, c]
    r = rel_of(pts)
    assert r.is_acyclic() and r.is_transitively_closed()


@given(point_sets(dim=3, max_size=7, lo=-3, hi=3), points(3, -5, 5))
def test_order_is_translation_invariant(pts, t):
    pts = list(dict.fromkeys(pts))
    assert (rel_of(pts).precedes == rel_of([p + t for p in pts]).precedes).all()


@given(point_sets(dim=4, max_size=6, lo=-3, hi=3), st.permutations(range(3)))
def test_order_ignores_permutations_of_the_head(pts, perm):
    pts = list(dict.fromkeys(pts))
    moved = [Point([p[i] for i in perm] + [p[3]]) for p in pts]
    assert (rel_of(pts).precedes == rel_of(moved).precedes).all()


def test_precedence_matrix_matches_pairwise_compare():
    rng = random.Random(3)
    pts = [P(*(F(rng.randint(-8, 8), 4) for _ in range(3))) for _ in range(25)]
    pts = list(dict.fromkeys(pts))
    prec = rel_of(pts).precedes
    for a, b in combinations(range(len(pts)), 2):
        c = compare(pts[a], pts[b])
        assert prec[a, b] == (c is Comparison.PRECEDES)
        assert prec[b, a] == (c is Comparison.SUCCEEDS)


def test_relation_needs_linf_and_dim_two():
    with pytest.raises(ValueError):
        ComparabilityRelation(Configuration([P(0)], LINF))
    with pytest.raises(ValueError):
        ComparabilityRelation(Configuration([P(0, 0)], MetricKind.L1))


def test_precedes_matrix_is_read_only():
    r = rel_of([P(0, 0), P(0, 1)])
    with pytest.raises(ValueError):
        r.precedes[0, 0] = True


def test_longest_chain_examples():
    assert longest_chain(rel_of([P(0, 0), P("1/4", 1), P("1/2", 2)])) == (3, [0, 1, 2])
    assert longest_chain(rel_of([P(5, 5)])) == (1, [0])
    for n in range(2, 9):
        assert longest_chain(ComparabilityRelation(C.gen_hypercube_odd(n)))[0] == 2


def _brute_longest_chain(prec):
    m = len(prec)
    best = 1 if m else 0
    for mask in range(1, 1 << m):
        idx = [i for i in range(m) if mask >> i & 1]
        if len(idx) > best and all(prec[a][b] or prec[b][a] for a, b in combinations(idx, 2)):
            best = len(idx)
    return best


@settings(max_examples=60)
@given(point_sets(dim=2, min_size=1, max_size=9, lo=-2, hi=2))
def test_longest_chain_matches_brute_force(pts):
    pts = list(dict.fromkeys(pts))
    r = rel_of(pts)
    length, chain = longest_chain(r)
    assert length == _brute_longest_chain(r.precedes)
    assert len(chain) == length
    assert all(r.precedes[a, b] for a, b in zip(chain, chain[1:]))


def test_dilworth_examples():
    anti = [P(0, 0), P(1, 0), P(2, 0)]
    cover, ac = dilworth_decompose(rel_of(anti))
    assert sorted(cover.chains) == [[0], [1], [2]] and ac == [0, 1, 2]
    cover, ac = dilworth_decompose(rel_of([P(0, 0), P("1/4", 1), P("1/2", 2)]))
    assert cover.chains == [[0, 1, 2]] and len(ac) == 1
    cover, ac = dilworth_decompose(ComparabilityRelation(C.gen_hypercube_odd(2)))
    assert len(cover) == 2 and len(ac) == 2
    assert cover.chains == [[0, 1], [2, 3]] and ac == [1, 3]


def _check_decomposition(r):
    cover, ac = dilworth_decompose(r)
    prec = r.precedes
    flat = sorted(i for c in cover.chains for i in c)
    assert flat == list(range(len(r)))
    for c in cover.chains:
        assert all(prec[a, b] for a, b in zip(c, c[1:]))
    assert all(not prec[a, b] and not prec[b, a] for a, b in combinations(ac, 2))
    assert len(cover) == len(ac)
    return len(ac)


@settings(max_examples=80)
@given(point_sets(dim=3, min_size=1, max_size=10, lo=-2, hi=2))
def test_dilworth_matches_brute_force_antichain(pts):
    pts = list(dict.fromkeys(pts))
    r = rel_of(pts)
    assert _check_decomposition(r) == brute_max_antichain(r.precedes.tolist())


def test_dilworth_on_empty_relation():
    cover, ac = dilworth_decompose(ComparabilityRelation(Configuration([], LINF, 2)))
    assert len(cover) == 0 and ac == []


@pytest.mark.parametrize("n", range(1, 8))
def test_certificate_on_hypercube(n):
    c = C.gen_hypercube_odd(n)
    cert = certify_odd_bound(c)
    levels = list(cert.levels())
    assert [lv.set_size for lv in levels] == [2 ** (n - k) for k in range(n)]
    assert all(lv.max_chain_length <= 2 for lv in levels)
    assert cert.implied_bound() >= len(c)
    check = verify_certificate(c, cert)
    assert check.ok, check.problems


def test_certificate_small_cases():
    one = Configuration([P(3, 4)], LINF)
    cert = certify_odd_bound(one)
    assert [lv.set_size for lv in cert.levels()] == [1, 1]
    assert verify_certificate(one, cert).ok
    base = certify_odd_bound(C.gen_hypercube_odd(1))
    assert base.child is None and base.set_size == 2 and base.level_dim == 1


def test_certificate_round_trips_through_json():
    c = C.gen_hypercube_odd(4)
    cert = certify_odd_bound(c)
    again = BoundCertificate.from_dict(cert.to_dict())
    assert again.to_dict() == cert.to_dict()
    assert verify_certificate(c, again).ok


def test_certificate_on_a_shifted_odd_set():
    # odd distances 1 and 3, not a hypercube
    c = Configuration([P(0, 0), P(3, 0), P(0, 1), P(3, 1)], LINF)
    cert = certify_odd_bound(c)
    assert verify_certificate(c, cert).ok
    assert cert.implied_bound() <= 4


@pytest.mark.parametrize("tamper", [
    lambda d: d.__setitem__("set_size", d["set_size"] + 1),
    lambda d: d.__setitem__("max_chain_length", 1),
    lambda d: d.__setitem__("chain_cover", [[0, 3], [1], [2]] + d["chain_cover"][2:]),
    lambda d: d.__setitem__("antichain_indices", [0, 1]),
    lambda d: d["child"].__setitem__("indices", [0, 1, 2, 3]),
    lambda d: d.__setitem__("child", None),
    lambda d: d.__setitem__("level_dim", 2),
])
def test_verifier_rejects_tampered_certificates(tamper):
    c = C.gen_hypercube_odd(3)
    doc = copy.deepcopy(certify_odd_bound(c).to_dict())
    tamper(doc)
    check = verify_certificate(c, BoundCertificate.from_dict(doc))
    assert not check.ok and check.problems


def test_certify_preconditions():
    with pytest.raises(ValueError):
        certify_odd_bound(Configuration([P(0, 0), P(0, 2)], LINF))
    with pytest.raises(ValueError):
        certify_odd_bound(Configuration([P(0, 0), P(0, 1)], MetricKind.L1))


def test_certify_reports_collinear_triples_in_dimension_one():
    from extremal.poset import _certify_level

    with pytest.raises(CertificateError) as info:
        _certify_level([P(0), P(1), P(2)], [5, 6, 7], 1)
    assert info.value.triple == (5, 6, 7)


def test_certify_reports_three_chains():
    from extremal.poset import _certify_level

    with pytest.raises(CertificateError) as info:
        _certify_level([P(0, 0), P(0, 1), P(0, 2)], [0, 1, 2], 2)
    assert info.value.triple == (0, 1, 2)
