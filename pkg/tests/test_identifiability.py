import json

import pytest

from identgb.builtin import get_model
from identgb.groebner import f4
from identgb.identifiability import IdentConfig, global_verdicts, identify
from identgb.polysys import PolySystem
from identgb.weights import WeightMap

WORKED = {"a": 119791, "x": 139697, "c": 75091}
CONFIGS = [("none", "substitute"), ("standard", "substitute"), ("standard", "native"), ("inverted", "substitute")]


@pytest.mark.parametrize("weights,strategy", CONFIGS)
def test_sian_example(sian_example, weights, strategy):
    r = identify(sian_example, weights=weights, strategy=strategy, overrides=WORKED)
    assert r.completed
    assert r.verdicts == {"x": "global", "a": "global", "c": "local"}
    assert r.values["a"] == 119791 and r.values["x"] == 139697


def test_intro(intro):
    r = identify(intro)
    assert r.verdicts == {"x1": "global", "x2": "none", "a": "global", "b": "none", "c": "none"}


def test_chemical_all_global():
    r = identify(get_model("chemical"))
    assert set(r.verdicts.values()) == {"global"}


def test_global_implies_local():
    for name in ("intro", "sian_example", "chemical", "goodwin"):
        r = identify(get_model(name), seed=3)
        assert set(r.verdicts) == set(r.local) | set(r.verdicts)
        for s, v in r.verdicts.items():
            if v != "none":
                assert s in r.local


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("root", [0, 5])
def test_back_substitution_single_variable(k, root):
    S = PolySystem(("v",), [{(1,): 1, (0,): -root}], 101)
    T = S.substitute_weights(WeightMap({"v": k}))
    assert T.polys[0] == {m: c for m, c in {(k,): 1, (0,): -root % 101}.items() if c}
    o = T.ordering()
    basis, _ = f4(T.to_fp(o))
    glob, values, _ = global_verdicts(basis, None, T, ["v"])
    truth, tvals, _ = global_verdicts(f4(S.to_fp(S.ordering()))[0], None, S, ["v"])
    assert glob == truth == {"v": True}
    assert values["v"] == tvals["v"] == root


def test_empty_query(sian_example):
    S = PolySystem(("v",), [{(1,): 1}], 101)
    assert global_verdicts(f4(S.to_fp(S.ordering()))[0], None, S, []) == ({}, {}, {})
    with pytest.raises(KeyError):
        global_verdicts(f4(S.to_fp(S.ordering()))[0], None, S, ["w"])


def test_timeout_gives_partial_report():
    r = identify(get_model("seir2"), weights="none", timeout=0.5, seed=1)
    assert r.partial and not r.completed
    assert set(r.verdicts.values()) <= {"local", "none"}
    assert json.loads(json.dumps(r.to_json()))["completed"] is False


def test_report_json(sian_example):
    r = identify(sian_example, overrides=WORKED)
    d = r.to_json()
    for key in ("model", "prime", "seed", "ordering", "weights", "verdicts", "stats", "timings_ms", "evidence"):
        assert key in d
    assert d["evidence"]["a"] == "NF(a) = 119791" or d["evidence"]["a"].startswith("NF(a^")


def test_config_validation():
    with pytest.raises(ValueError):
        IdentConfig(weights="heavy")
    with pytest.raises(ValueError):
        IdentConfig(strategy="magic")
    with pytest.raises(ValueError):
        IdentConfig(timeout=0)
    assert IdentConfig().timeout == 1800
