from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from extremal.metric import Point

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DENOMS = [1, 2, 3, 4, 5, 7, 8, 12]


def scalars(lo=-20, hi=20):
    return st.builds(Fraction, st.integers(lo * 12, hi * 12), st.sampled_from(DENOMS))


def points(dim, lo=-20, hi=20):
    return st.lists(scalars(lo, hi), min_size=dim, max_size=dim).map(Point)


@st.composite
def point_sets(draw, dim=None, min_size=1, max_size=8, lo=-6, hi=6):
    n = draw(st.integers(1, 4)) if dim is None else dim
    return draw(st.lists(points(n, lo, hi), min_size=min_size, max_size=max_size))


@pytest.fixture(params=["numba", "numpy"])
def each_backend(request):
    from extremal import _kernels as K

    with K.using(request.param):
        yield request.param
