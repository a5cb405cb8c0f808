"""Polynomial systems over F_p in jet variables and parameters, with a plain-text format.

Text format::

    # prime: 11863279
    # variables: x_3, x_2, x_1, x_0, a, c
    # params: a, c
    # weights: x=2
    139697 + 11863278*x_0
    ...

Jet variables are written ``<base>_<order>``; anything that is neither a jet
nor a declared parameter (such as ``z_aux``) is an auxiliary variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from sympy import GF
from sympy.polys.rings import PolyRing as SymPolyRing

from .groebner.field import check_prime
from .groebner.ordering import MonomialOrdering, degrevlex, differential_rank, legacy_rank
from .groebner.poly import FpPolynomial, PolyRing
from .model import ParseError, _ExprParser, _tokenize

_JET_RE = re.compile(r"(.+)_(\d+)\Z")


def split_jet(name: str) -> tuple[str, int] | None:
    m = _JET_RE.match(name)
    return (m.group(1), int(m.group(2))) if m else None


@dataclass
class PolySystem:
    """Polynomials as maps from exponent tuples (over ``variables``) to residues mod ``prime``.

    ``weights`` is set on systems produced by weight substitution and records
    the exponent each variable was raised to.
    """

    variables: tuple[str, ...]
    polys: list[dict[tuple[int, ...], int]]
    prime: int
    params: tuple[str, ...] = ()
    weights: dict[str, int] | None = None
    name: str = ""
    state_order: tuple[str, ...] = ()

    def __post_init__(self):
        self.variables = tuple(self.variables)
        self.params = tuple(self.params)
        n = len(self.variables)
        p = self.prime
        clean = []
        for poly in self.polys:
            d = {}
            for m, c in poly.items():
                if len(m) != n:
                    raise ValueError("exponent vector length does not match the variables")
                c %= p
                if c:
                    d[tuple(m)] = c
            clean.append(d)
        self.polys = clean

    # ------------------------------------------------------------ metadata

    @property
    def jets(self) -> dict[str, tuple[str, int]]:
        out = {}
        for v in self.variables:
            if v in self.params:
                continue
            j = split_jet(v)
            if j is not None:
                out[v] = j
        return out

    @property
    def aux(self) -> tuple[str, ...]:
        jets = self.jets
        return tuple(v for v in self.variables if v not in jets and v not in self.params)

    def __len__(self):
        return len(self.polys)

    @property
    def num_polys(self) -> int:
        return len(self.polys)

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def variable_weights(self, w) -> list[int]:
        """Per-variable weights from a WeightMap; jets inherit their base's weight."""
        jets = self.jets
        return [w.of(v, jets[v][0] if v in jets else None) for v in self.variables]

    # ------------------------------------------------------------ orderings

    def ordering(self, kind: str = "diff_degrevlex", weights: Sequence[int] | None = None) -> MonomialOrdering:
        jets = self.jets
        bases = tuple(jets[v][0] if v in jets else v for v in self.variables)
        if kind == "degrevlex":
            return degrevlex(self.variables)
        if kind == "sian_legacy":
            rank = legacy_rank(self.variables, jets, self.params, self.state_order)
            return MonomialOrdering("degrevlex", self.variables, rank, None, bases)
        rank = differential_rank(self.variables, jets, self.params)
        if kind == "diff_degrevlex":
            return MonomialOrdering("diff_degrevlex", self.variables, rank, None, bases)
        if kind == "weighted":
            if weights is None:
                raise ValueError("weighted ordering requires weights")
            return MonomialOrdering("weighted", self.variables, rank, tuple(int(w) for w in weights), bases)
        raise ValueError(f"unknown ordering {kind!r}")

    def ring(self, ordering: MonomialOrdering | None = None) -> PolyRing:
        return PolyRing(ordering or self.ordering(), self.prime)

    def to_fp(self, ordering: MonomialOrdering | None = None) -> list[FpPolynomial]:
        r = self.ring(ordering)
        return [FpPolynomial.from_terms(r, poly) for poly in self.polys]

    # ------------------------------------------------------------ transforms

    def substitute_weights(self, w) -> "PolySystem":
        """Raise every variable of weight ``k > 1`` to the ``k``-th power."""
        ws = self.variable_weights(w)
        polys = [{tuple(e * k for e, k in zip(m, ws)): c for m, c in poly.items()} for poly in self.polys]
        record = {v: k for v, k in zip(self.variables, ws) if k > 1}
        return PolySystem(self.variables, polys, self.prime, self.params, record, self.name, self.state_order)

    def back_substitute(self) -> "PolySystem":
        """Undo :meth:`substitute_weights`."""
        if not self.weights:
            return self
        ws = [self.weights.get(v, 1) for v in self.variables]
        polys = []
        for poly in self.polys:
            d = {}
            for m, c in poly.items():
                if any(e % k for e, k in zip(m, ws)):
                    raise ValueError("exponent not divisible by the recorded weight")
                d[tuple(e // k for e, k in zip(m, ws))] = c
            polys.append(d)
        return PolySystem(self.variables, polys, self.prime, self.params, None, self.name, self.state_order)

    def substitute_values(self, values: Mapping[str, int]) -> "PolySystem":
        """Replace the given variables by residues and drop them from the universe."""
        p = self.prime
        keep = [i for i, v in enumerate(self.variables) if v not in values]
        fixed = [(i, values[v] % p) for i, v in enumerate(self.variables) if v in values]
        polys = []
        for poly in self.polys:
            d: dict = {}
            for m, c in poly.items():
                for i, val in fixed:
                    if m[i]:
                        c = c * pow(val, m[i], p) % p
                if c:
                    nm = tuple(m[i] for i in keep)
                    d[nm] = (d.get(nm, 0) + c) % p
            d = {m: c for m, c in d.items() if c}
            if d:
                polys.append(d)
        variables = tuple(self.variables[i] for i in keep)
        params = tuple(v for v in self.params if v not in values)
        return PolySystem(variables, polys, p, params, self.weights, self.name, self.state_order)

    def evaluate(self, point: Mapping[str, int]) -> list[int]:
        p = self.prime
        vals = [point[v] % p for v in self.variables]
        out = []
        for poly in self.polys:
            s = 0
            for m, c in poly.items():
                t = c
                for v, e in zip(vals, m):
                    if e:
                        t = t * pow(v, e, p) % p
                s += t
            out.append(s % p)
        return out

    def is_homogeneous_poly(self, index: int, weights: Sequence[int] | None = None) -> bool:
        w = weights or [1] * len(self.variables)
        degs = {sum(e * k for e, k in zip(m, w)) for m in self.polys[index]}
        return len(degs) <= 1

    def has_nonhomogeneous(self, weights: Sequence[int] | None = None) -> bool:
        return any(not self.is_homogeneous_poly(i, weights) for i in range(len(self.polys)))

    # ------------------------------------------------------------ text I/O

    def format_poly(self, poly: Mapping[tuple[int, ...], int], ordering: MonomialOrdering | None = None) -> str:
        o = ordering or self.ordering()
        if not poly:
            return "0"
        items = sorted(poly.items(), key=lambda mc: o.key(mc[0]), reverse=True)
        parts = []
        for m, c in items:
            factors = [v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, m) if e]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    def to_text(self) -> str:
        o = self.ordering()
        lines = [f"# prime: {self.prime}", "# variables: " + ", ".join(o.ranked)]
        lines.append("# params: " + ", ".join(self.params))
        if self.state_order:
            lines.append("# states: " + ", ".join(self.state_order))
        if self.weights:
            lines.append("# weights: " + ", ".join(f"{v}={k}" for v, k in self.weights.items()))
        if self.name:
            lines.append(f"# name: {self.name}")
        lines.extend(self.format_poly(poly, o) for poly in self.polys)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PolySystem":
        header: dict[str, str] = {}
        body: list[tuple[int, str]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = re.match(r"#\s*(\w+)\s*:\s*(.*)\Z", line)
                if m:
                    header[m.group(1).lower()] = m.group(2).strip()
                continue
            body.append((lineno, line.split("#", 1)[0]))
        if "prime" not in header:
            raise ParseError("missing '# prime:' header", 1, 1)
        try:
            prime = check_prime(int(header["prime"]))
        except ValueError as exc:
            raise ParseError(str(exc), 1, 1) from None

        def names(key):
            return [s.strip() for s in header.get(key, "").split(",") if s.strip()]

        variables = names("variables")
        params = names("params")
        if not variables:
            found = []
            for _, line in body:
                for tok in re.findall(r"[A-Za-z][A-Za-z0-9_]*", line):
                    if tok not in found:
                        found.append(tok)
            variables = found
        if len(set(variables)) != len(variables):
            raise ParseError("duplicate variable in header", 1, 1)
        weights = None
        if header.get("weights"):
            weights = {}
            for item in header["weights"].split(","):
                v, _, k = item.partition("=")
                weights[v.strip()] = int(k)
        ring = SymPolyRing(variables, GF(prime)) if variables else None
        if ring is None:
            ring = SymPolyRing(["_unused"], GF(prime))
        index = {v: i for i, v in enumerate(variables)}

        def resolve(name, order, tok, parser):
            if order or name not in index:
                parser.error(f"unknown variable {name}", tok)
            return ring.gens[index[name]]

        polys = []
        for lineno, line in body:
            toks = _tokenize(line, lineno, 0)
            value = _ExprParser(toks, lineno, resolve, lambda c: ring(c)).parse()
            d = {}
            for m, c in value.terms():
                if variables:
                    d[tuple(m)] = int(c) % prime
                else:
                    d[()] = int(c) % prime
            polys.append(d)
        state_order = tuple(names("states"))
        return cls(tuple(variables), polys, prime, tuple(params), weights, header.get("name", ""), state_order)


def polysystem_from_fp(polys: Sequence[FpPolynomial], params: Iterable[str] = ()) -> PolySystem:
    if not polys:
        raise ValueError("empty polynomial list")
    ring = polys[0].ring
    return PolySystem(ring.variables, [f.as_dict() for f in polys], ring.prime, tuple(params))
