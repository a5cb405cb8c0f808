from fractions import Fraction

import pytest

from identgb import ModelError, parse_model
from identgb.builtin import LIGHT, get_model
from identgb.calculus import format_jet_polynomial, lie_iterate
from identgb.generator import (
    SamplingError,
    compute_output_values,
    generate,
    jacobian_local_identifiability,
    prolong,
    sample_point,
    solution_point,
    specialize,
)
from identgb.groebner import DEFAULT_PRIME

WORKED = {"a": 119791, "x": 139697, "c": 75091}


def _eqs(ps):
    return {format_jet_polynomial(e, "flat") for e in ps.equations}


def test_prolong_worked_example(sian_example):
    ps = prolong(sian_example, 3)
    assert _eqs(ps) == {
        "-x_0 + y_0",
        "-x_0*a - c^2 + x_1",
        "-x_1 + y_1",
        "-x_1*a + x_2",
        "-x_2 + y_2",
        "-x_2*a + x_3",
        "-x_3 + y_3",
    }


def test_prolong_bound_zero():
    m = parse_model("model z\nstates x1\nparams k\nx1' = k*x1\noutput y = x1\n")
    assert _eqs(prolong(m, 0)) == {"-x1_0 + y_0"}


def test_prolong_linear_model():
    ps = prolong(get_model("linear"), 4)
    assert len(ps.equations) == 13
    assert ps.state_orders == {"x1": 4, "x2": 4}


def test_prolong_clears_denominators_with_zaux():
    ps = prolong(get_model("goodwin"), 2)
    assert ps.zaux is not None
    for e in ps.equations:
        assert e.poly.ring.domain.is_QQ


def test_sample_overrides_and_determinism(sian_example):
    s = sample_point(sian_example, overrides=WORKED)
    assert dict(s.values) == WORKED
    assert sample_point(sian_example, seed=4) == sample_point(sian_example, seed=4)
    for v in sample_point(get_model("seirp"), seed=2).values.values():
        assert 1 <= v <= 2**20


def test_sample_resamples_vanishing_denominator():
    m = get_model("goodwin")
    s = sample_point(m, seed=0, prime=7)
    assert (s["c"] + s["x4"]) % 7 != 0
    with pytest.raises(SamplingError):
        sample_point(m, prime=7, overrides={k: 1 for k in m.states + m.params if k not in ("c",)} | {"c": 6})


def test_sample_rejects_unknown_override(sian_example):
    with pytest.raises(ModelError):
        sample_point(sian_example, overrides={"nope": 1})


def test_output_values_worked_example(sian_example):
    s = sample_point(sian_example, overrides=WORKED)
    y = compute_output_values(sian_example, s, 3, exact=True)
    assert [y[("y", i)] for i in range(4)] == [139697, 22373101608, 2680096214723928, 321051405657994059048]
    ymod = compute_output_values(sian_example, s, 3)
    assert ymod[("y", 1)] == 22373101608 % DEFAULT_PRIME


def test_output_values_constant_output():
    m = parse_model("model k\nstates x\nparams a\nx' = a*x\noutput y = 7\n")
    y = compute_output_values(m, sample_point(m), 3, exact=True)
    assert [y[("y", i)] for i in range(4)] == [7, 0, 0, 0]


def test_output_values_match_lie_derivatives(intro):
    vals = {"a": 2, "b": 3, "c": 5, "x1": 1, "x2": 1}
    s = sample_point(intro, overrides=vals)
    y = compute_output_values(intro, s, 4, exact=True)
    assert [y[("y1", i)] for i in range(3)] == [1, 5, 25]
    for i, h in enumerate(lie_iterate(0, 4, intro)):
        assert y[("y1", i)] == h.evaluate(vals)


def test_output_values_rational_model():
    m = get_model("goodwin")
    s = sample_point(m, seed=3)
    y = compute_output_values(m, s, 3, exact=True)
    vals = {k: Fraction(v) for k, v in s.values.items()}
    for i, h in enumerate(lie_iterate(0, 3, m)):
        assert y[("y", i)] == h.evaluate(vals)


def test_specialize_worked_example(sian_example):
    s = sample_point(sian_example, overrides=WORKED)
    ps = prolong(sian_example, 3)
    yhat = compute_output_values(sian_example, s, 3)
    ss = specialize(ps, yhat, s)
    S = ss.system
    assert all(0 <= c < DEFAULT_PRIME for poly in S.polys for c in poly.values())
    texts = set(S.to_text().splitlines())
    p = DEFAULT_PRIME
    assert f"{p - 1}*x_0 + 139697" in texts
    assert f"{p - 1}*x_1 + {22373101608 % p}" in texts
    with pytest.raises(ModelError):
        specialize(ps, {("y", 0): 1}, s)


@pytest.mark.parametrize("name", LIGHT + ("linear",))
def test_sample_solves_specialized_system(name):
    ss = generate(get_model(name), seed=7)
    assert all(v == 0 for v in ss.system.evaluate(solution_point(ss)))


def test_generation_is_deterministic():
    a = generate(get_model("seir"), seed=11)
    b = generate(get_model("seir"), seed=11)
    assert a.system.to_text() == b.system.to_text()
    assert a.fixed == b.fixed and a.bounds == b.bounds


def test_local_identifiability():
    intro = get_model("intro")
    loc = jacobian_local_identifiability(intro, sample_point(intro))
    assert loc & set(intro.params) == {"a"} and "x1" in loc
    m = get_model("sian_example")
    assert jacobian_local_identifiability(m, sample_point(m)) == {"a", "x", "c"}
    m = parse_model("model q\nstates x1\nparams q\nx1' = 0\noutput y = x1\n")
    assert "q" not in jacobian_local_identifiability(m, sample_point(m))


def test_explicit_bounds_override():
    ss = generate(get_model("intro"), bounds=3, fix_nonidentifiable=False)
    assert ss.bounds == {0: 3}
    assert "y1_3" not in ss.system.variables
    assert "x1_3" in ss.system.variables
