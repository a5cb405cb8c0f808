import pytest
from hypothesis import given, settings, strategies as st

from identgb.groebner import compare, degrevlex
from identgb.groebner.ordering import MonomialOrdering, key_compare
from identgb.polysys import PolySystem

LINEAR = ("x1_0", "x2_0", "x1_1", "x2_1", "x1_2", "x2_2", "x1_3", "x2_3", "x1_4", "x2_4", "a", "b", "c")


def _linear_system():
    return PolySystem(LINEAR, [], 101, ("a", "b", "c"))


def test_differential_rank_matches_listing():
    o = _linear_system().ordering()
    assert o.ranked == ("x2_4", "x1_4", "x2_3", "x1_3", "x2_2", "x1_2", "x2_1", "x1_1", "x2_0", "x1_0", "a", "b", "c")

    def unit(v):
        return tuple(int(u == v) for u in LINEAR)

    assert compare(unit("x2_4"), unit("x1_4"), o) == 1
    assert compare(unit("x1_4"), unit("x2_3"), o) == 1


def test_degrevlex_revlex_rule():
    o = degrevlex(("x", "y"))
    assert compare((2, 1), (1, 2), o) == 1
    assert compare((0, 0), (0, 1), o) == -1


def test_bad_rank_or_weights():
    with pytest.raises(ValueError):
        MonomialOrdering("degrevlex", ("x", "y"), (0, 0))
    with pytest.raises(ValueError):
        MonomialOrdering("weighted", ("x", "y"), (0, 1), (1,))
    with pytest.raises(ValueError):
        degrevlex(("x", "y")).compare((1,), (1, 0))


def _orderings():
    S = PolySystem(("x_0", "x_1", "y_0", "y_1", "a"), [], 101, ("a",))
    base = S.ordering()
    return [
        degrevlex(("u", "v", "w", "t", "s")),
        base,
        S.ordering("weighted", [2, 2, 1, 1, 3]),
    ]


_exp = st.tuples(*[st.integers(0, 6)] * 5)


@pytest.mark.parametrize("o", _orderings(), ids=lambda o: o.kind)
@settings(max_examples=300, deadline=None)
@given(m1=_exp, m2=_exp, m3=_exp)
def test_ordering_laws(o, m1, m2, m3):
    c = o.compare(m1, m2)
    assert c == -o.compare(m2, m1)
    assert (c == 0) == (m1 == m2)
    assert o.compare((0,) * 5, m1) <= 0
    prod = lambda a, b: tuple(x + y for x, y in zip(a, b))  # noqa: E731
    if c < 0:
        assert o.compare(prod(m1, m3), prod(m2, m3)) < 0
    assert key_compare(o, m1, m2) == c


def test_weighted_breaks_ties_by_differential_order():
    S = PolySystem(("x_0", "x_1", "a"), [], 101, ("a",))
    o = S.ordering("weighted", [2, 2, 1])
    # equal weighted degree 2: x_1 (deg 1) vs a^2 (deg 2) -> total degree decides
    assert o.compare((0, 1, 0), (0, 0, 2)) == -1
    # equal weighted and total degree: x_1 outranks x_0
    assert o.compare((0, 1, 0), (1, 0, 0)) == 1
