import random

import pytest

from identgb.builtin import get_model
from identgb.groebner import FpPolynomial, PolyRing, degrevlex


def random_system(rng, prime, nvars=None, ngens=None, maxdeg=3, maxterms=4):
    """A small random list of polynomials over F_p under degrevlex."""
    nvars = nvars or rng.randint(1, 4)
    ngens = ngens or rng.randint(1, 5)
    names = ["x", "y", "z", "w"][:nvars]
    ring = PolyRing(degrevlex(names), prime)
    polys = []
    for _ in range(ngens):
        terms = {}
        for _ in range(rng.randint(1, maxterms)):
            e = [0] * nvars
            for _ in range(rng.randint(0, maxdeg)):
                e[rng.randrange(nvars)] += 1
            terms[tuple(e)] = rng.randrange(1, prime)
        f = FpPolynomial.from_terms(ring, terms)
        if not f.is_zero():
            polys.append(f)
    if not polys:
        polys.append(ring.var(names[0]))
    return ring, polys


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def intro():
    return get_model("intro")


@pytest.fixture
def sian_example():
    return get_model("sian_example")


# ---------------------------------------------------------------- acceptance summary

ACCEPTANCE: dict[int, dict] = {}


def record(number: int, title: str, ok: bool, detail: str = "", part: str | None = None):
    """Store one acceptance outcome; parametrized criteria record one part per case."""
    entry = ACCEPTANCE.setdefault(number, {"title": title, "parts": {}})
    entry["parts"][part or ""] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        entry = ACCEPTANCE[number]
        parts = entry["parts"]
        ok = all(v[0] for v in parts.values())
        if len(parts) == 1:
            detail = next(iter(parts.values()))[1]
        else:
            bad = [k for k, v in parts.items() if not v[0]]
            detail = f"{len(parts) - len(bad)}/{len(parts)} ok" + (f"; failing: {', '.join(bad)}" if bad else "")
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {entry['title']}  ({detail})")
