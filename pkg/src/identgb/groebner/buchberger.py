"""Textbook Buchberger algorithm used as a correctness oracle.

Deliberately shares nothing with the F4 engine beyond the ordering's direct
comparator: polynomials are plain dicts from exponent tuples to residues.
"""

from __future__ import annotations

from functools import cmp_to_key
from itertools import combinations

from .poly import FpPolynomial, GroebnerBasis, PolyRing


def _lead(f: dict, key) -> tuple:
    return max(f, key=key)


def _sub_scaled(f: dict, g: dict, mono: tuple, c: int, p: int) -> dict:
    out = dict(f)
    for m, v in g.items():
        mm = tuple(a + b for a, b in zip(m, mono))
        nv = (out.get(mm, 0) - c * v) % p
        if nv:
            out[mm] = nv
        else:
            out.pop(mm, None)
    return out


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _reduce(f: dict, basis: list[dict], key, p: int) -> dict:
    rem: dict = {}
    f = dict(f)
    leads = [(_lead(g, key), g) for g in basis]
    while f:
        m = _lead(f, key)
        c = f[m]
        for lm, g in leads:
            if _divides(lm, m):
                q = tuple(a - b for a, b in zip(m, lm))
                f = _sub_scaled(f, g, q, c * pow(g[lm], -1, p) % p, p)
                break
        else:
            rem[m] = c
            del f[m]
    return rem


def _monic(f: dict, key, p: int) -> dict:
    inv = pow(f[_lead(f, key)], -1, p)
    return {m: c * inv % p for m, c in f.items()}


def buchberger(system: list[FpPolynomial], ring: PolyRing | None = None) -> GroebnerBasis:
    """Reduced Groebner basis via pairwise S-polynomials with the coprime-leading-monomial skip."""
    system = [f for f in system]
    if ring is None:
        if not system:
            raise ValueError("empty system")
        ring = system[0].ring
    p = ring.prime
    o = ring.ordering
    key = cmp_to_key(o.compare)
    G = [_monic(f.as_dict(), key, p) for f in system if f]
    if not G:
        return GroebnerBasis([], ring, True)
    pairs = list(combinations(range(len(G)), 2))
    while pairs:
        i, j = pairs.pop(0)
        f, g = G[i], G[j]
        lf, lg = _lead(f, key), _lead(g, key)
        if all(a == 0 or b == 0 for a, b in zip(lf, lg)):
            continue
        lcm = tuple(max(a, b) for a, b in zip(lf, lg))
        s = _sub_scaled({}, f, tuple(a - b for a, b in zip(lcm, lf)), -1, p)
        s = _sub_scaled(s, g, tuple(a - b for a, b in zip(lcm, lg)), 1, p)
        h = _reduce(s, G, key, p)
        if h:
            G.append(_monic(h, key, p))
            pairs.extend((k, len(G) - 1) for k in range(len(G) - 1))
    # minimalize then inter-reduce
    leads = [_lead(g, key) for g in G]
    keep = []
    for i, g in enumerate(G):
        redundant = False
        for j in range(len(G)):
            if j == i or not _divides(leads[j], leads[i]):
                continue
            if leads[j] != leads[i] or j < i:
                redundant = True
                break
        if not redundant:
            keep.append(g)
    out = []
    for i, g in enumerate(keep):
        lm = _lead(g, key)
        tail = {m: c for m, c in g.items() if m != lm}
        others = keep[:i] + keep[i + 1 :]
        red = _reduce(tail, others, key, p)
        red[lm] = 1
        out.append(FpPolynomial.from_terms(ring, red))
    out.sort(key=lambda f: f.lead_key, reverse=True)
    return GroebnerBasis(out, ring, True)
