import pytest

from identgb import ParseError
from identgb.builtin import get_model, jason210
from identgb.generator import generate
from identgb.polysys import PolySystem
from identgb.weights import WeightMap


def test_text_round_trip():
    S = generate(get_model("chemical"), seed=2).system
    T = PolySystem.from_text(S.to_text())
    assert T.to_text() == S.to_text()
    assert T.variables == S.ordering().ranked


def test_header_lists_differential_order():
    text = generate(get_model("linear"), seed=1, bounds=2).system.to_text()
    lines = text.splitlines()
    assert lines[0] == "# prime: 11863279"
    names = lines[1].split(": ", 1)[1].split(", ")
    assert names.index("x2_2") < names.index("x1_2") < names.index("x2_1") < names.index("a")


def test_weighted_round_trip():
    S = jason210().substitute_weights(WeightMap({"x8": 2}))
    T = PolySystem.from_text(S.to_text())
    assert T.weights == {"x8": 2}
    assert T.back_substitute().polys == jason210().polys


def test_missing_prime_header():
    with pytest.raises(ParseError):
        PolySystem.from_text("x + y\n")


def test_unknown_variable():
    with pytest.raises(ParseError):
        PolySystem.from_text("# prime: 7\n# variables: x\nx + y\n")


def test_substitute_values():
    S = PolySystem(("x", "y"), [{(1, 1): 1, (0, 0): 2}], 7)
    T = S.substitute_values({"y": 3})
    assert T.variables == ("x",) and T.polys == [{(1,): 3, (0,): 2}]


@pytest.mark.parametrize("name", ["chemical", "seir", "seir2", "seirp", "intro", "sian_example", "goodwin"])
def test_specialized_systems_are_not_homogeneous(name):
    from identgb.identifiability import model_weights

    ss = generate(get_model(name), seed=0)
    S = ss.system
    assert S.has_nonhomogeneous()
    for scheme in ("standard", "inverted"):
        w = model_weights(ss.prolonged.model, scheme, ss.local)
        assert S.has_nonhomogeneous(S.variable_weights(w))
        assert S.substitute_weights(w).has_nonhomogeneous()
