import random

import pytest

from identgb.builtin import get_model
from identgb.groebner import degrevlex
from identgb.groebner.ordering import MonomialOrdering
from identgb.identifiability import standard_weights
from identgb.model import parse_model
from identgb.polysys import PolySystem
from identgb.weights import (
    LevelMap,
    WeightMap,
    apply_weight_substitution,
    assign_weights_inverted,
    assign_weights_standard,
    compute_levels,
    weighted_compare,
)


def test_levels_intro(intro):
    assert dict(compute_levels(intro).levels) == {"x1": 0, "x2": 1, "a": 1, "b": 1, "c": 2}


def test_levels_single_state():
    m = parse_model("model s\nstates x1\nx1' = 0\noutput y = x1\n")
    assert dict(compute_levels(m).levels) == {"x1": 0}


def test_levels_goodwin():
    lv = compute_levels(get_model("goodwin"))
    assert {s: lv[s] for s in ("x1", "b", "c", "x4", "x2", "x3", "beta")} == {
        "x1": 0, "b": 1, "c": 1, "x4": 1, "x2": 2, "x3": 2, "beta": 3,
    }
    assert lv.max_level == 3


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_levels_are_minimal_and_stable():
    m = get_model("seir")
    full = compute_levels(m)
    for cap in (1, 2, 3):
        part = compute_levels(m, cap)
        for s, v in part.levels.items():
            if v is not None:
                assert full[s] == v


def test_never_appearing_symbols_get_weight_one():
    m = parse_model("model q\nstates x1\nparams q\nx1' = 0\noutput y = x1\n")
    with pytest.warns(UserWarning):
        lv = compute_levels(m)
    assert lv["q"] is None
    assert assign_weights_standard(lv).of("q") == 1


def test_standard_weights_intro(intro):
    w = assign_weights_standard(compute_levels(intro))
    assert (w.of("x1"), w.of("x2"), w.of("a"), w.of("b"), w.of("c")) == (1, 2, 1, 1, 3)


def test_standard_weights_chemical():
    assert standard_weights(get_model("chemical")).nontrivial() == {"x2": 2, "c": 3}


def test_standard_weights_goodwin():
    assert standard_weights(get_model("goodwin")).nontrivial() == {"x2": 3, "x3": 3, "x4": 2, "beta": 4}


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_only_top_level_parameters_are_raised():
    for name in ("seir", "seirp", "goodwin", "nfkb", "seiqrdc"):
        m = get_model(name)
        lv = compute_levels(m)
        w = assign_weights_standard(lv)
        for q in m.params:
            if w.of(q) > 1:
                assert lv[q] == lv.max_level


def test_inverted():
    lv = LevelMap({"x1": 0, "x2": 1, "a": 1}, ("x1", "x2"), ("a",))
    w = assign_weights_inverted(lv)
    assert (w.of("x1"), w.of("x2"), w.of("a")) == (2, 1, 1)
    lv = LevelMap({"x1": 0, "x4": 1, "x2": 2, "x3": 2}, ("x1", "x4", "x2", "x3"), ())
    assert assign_weights_inverted(lv).nontrivial() == {"x1": 3, "x4": 2}
    single = LevelMap({"x1": 0}, ("x1",), ())
    assert assign_weights_inverted(single).of("x1") == 1


def test_weightmap_validation():
    with pytest.raises(ValueError):
        WeightMap({"x": 0})
    with pytest.raises(ValueError):
        WeightMap({}, zaux_weight=4)
    assert WeightMap({}, zaux_weight=3).of("z_aux") == 3


def test_jets_inherit_state_weight():
    S = PolySystem(("x_0", "x_1", "a"), [{(1, 1, 1): 1}], 101, ("a",))
    assert S.variable_weights(WeightMap({"x": 2})) == [2, 2, 1]


def _uni(n=8):
    names = tuple(f"x{i}" for i in range(1, n + 1))
    return names, degrevlex(names)


def test_weighted_compare_examples():
    names, o = _uni()
    w = WeightMap({"x8": 2})
    x8 = tuple(int(v == "x8") for v in names)
    x7 = tuple(int(v == "x7") for v in names)
    assert weighted_compare(x8, x7, w, o) == 1
    assert weighted_compare((0,) * 8, x7, w, o) == -1
    with pytest.raises(ValueError):
        weighted_compare((1, 0), x7, w, o)


def test_identity_weights_reduce_to_tiebreak():
    r = random.Random(3)
    names = ("y_2", "x_2", "y_1", "x_1", "a", "b")
    o = MonomialOrdering("diff_degrevlex", names, tuple(range(6)))
    ident = WeightMap({})
    for _ in range(100):
        m1 = tuple(r.randint(0, 3) for _ in names)
        m2 = tuple(r.randint(0, 3) for _ in names)
        assert weighted_compare(m1, m2, ident, o) == o.compare(m1, m2)


def test_substitution_examples():
    S = PolySystem(("x", "y"), [{(1, 0): 1, (0, 1): 1}, {(1, 0): 1, (0, 1): -1}], 101)
    T = apply_weight_substitution(S, WeightMap({"x": 2}))
    assert T.polys == [{(2, 0): 1, (0, 1): 1}, {(2, 0): 1, (0, 1): 100}]
    assert T.back_substitute().polys == S.polys
    assert apply_weight_substitution(S, WeightMap({})).polys == S.polys


def test_jason210_substitution():
    from identgb.builtin import jason210

    S = jason210()
    T = S.substitute_weights(WeightMap({"x8": 2}))
    assert T.polys[2] == S.polys[2]
    assert (1, 1, 1, 1, 0, 1, 0, 2) in T.polys[0]
    assert (1, 1, 1, 1, 0, 1, 0, 1) not in T.polys[0]
    assert T.back_substitute().polys == S.polys
