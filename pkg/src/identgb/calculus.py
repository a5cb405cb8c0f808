"""Lie derivatives along a model and total derivatives of jet polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from sympy import QQ
from sympy.polys.rings import PolyRing

from .model import Model, ModelError, ParseError, RationalExpr, _ExprParser, _tokenize, jet_name


@dataclass(frozen=True, order=True)
class JetVar:
    """The ``order``-th time derivative of a state, output or input."""

    base: str
    order: int
    kind: str = "state"

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("jet order must be non-negative")
        if self.kind not in ("state", "output", "input"):
            raise ValueError(f"unknown jet kind {self.kind!r}")

    @property
    def name(self) -> str:
        return f"{self.base}_{self.order}"

    def shift(self, k: int = 1) -> "JetVar":
        return JetVar(self.base, self.order + k, self.kind)

    def __str__(self):
        return self.name


class JetUniverse:
    """Fixed, ordered variable universe of jet variables plus parameters.

    ``aux`` holds extra order-free symbols such as the denominator-clearing
    variable ``z_aux``.
    """

    def __init__(self, jets: Iterable[JetVar], params: Iterable[str], aux: Iterable[str] = ()):
        self.jets = tuple(jets)
        self.params = tuple(params)
        self.aux = tuple(aux)
        names = [j.name for j in self.jets] + list(self.params) + list(self.aux)
        if len(set(names)) != len(names):
            raise ModelError("jet variable names collide with parameter names")
        self.names = tuple(names)
        self.ring = PolyRing(self.names, QQ)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.jet_index = {(j.base, j.order): i for i, j in enumerate(self.jets)}

    def __eq__(self, other):
        return isinstance(other, JetUniverse) and self.names == other.names and self.jets == other.jets

    def __hash__(self):
        return hash(self.names)

    def gen(self, name: str):
        return self.ring.gens[self.index[name]]

    def jet(self, base: str, order: int):
        try:
            return self.ring.gens[self.jet_index[(base, order)]]
        except KeyError:
            raise ModelError(f"jet {base}^({order}) is outside the universe") from None

    def has_jet(self, base: str, order: int) -> bool:
        return (base, order) in self.jet_index

    @cached_property
    def successor(self) -> dict[int, int]:
        """Index map from each jet to its next derivative (when in the universe)."""
        out = {}
        for i, j in enumerate(self.jets):
            nxt = self.jet_index.get((j.base, j.order + 1))
            if nxt is not None:
                out[i] = nxt
        return out

    def variable(self, index: int):
        """JetVar for a jet index, or the plain name for parameters/aux symbols."""
        return self.jets[index] if index < len(self.jets) else self.names[index]


class JetPolynomial:
    """Polynomial with exact rational coefficients over a :class:`JetUniverse`."""

    __slots__ = ("universe", "poly")

    def __init__(self, universe: JetUniverse, poly=None):
        self.universe = universe
        self.poly = universe.ring.zero if poly is None else poly

    @classmethod
    def from_terms(cls, universe: JetUniverse, terms: Mapping[tuple, Fraction | int]) -> "JetPolynomial":
        poly = universe.ring.zero
        for monom, c in terms.items():
            c = Fraction(c)
            if c:
                poly += universe.ring({tuple(monom): QQ(c.numerator, c.denominator)})
        return cls(universe, poly)

    @property
    def terms(self) -> dict[tuple, Fraction]:
        return {m: Fraction(int(c.numerator), int(c.denominator)) for m, c in self.poly.terms()}

    def variables(self) -> set[str]:
        names = self.universe.names
        return {names[i] for m in self.poly.monoms() for i, e in enumerate(m) if e}

    def jets(self) -> set[JetVar]:
        n = len(self.universe.jets)
        return {self.universe.jets[i] for m in self.poly.monoms() for i, e in enumerate(m) if e and i < n}

    def is_zero(self) -> bool:
        return not self.poly

    def _wrap(self, poly):
        return JetPolynomial(self.universe, poly)

    def _other(self, other):
        if isinstance(other, JetPolynomial):
            if other.universe != self.universe:
                raise ModelError("jet polynomials over different universes")
            return other.poly
        c = Fraction(other)
        return self.universe.ring(QQ(c.numerator, c.denominator))

    def __add__(self, other):
        return self._wrap(self.poly + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.poly - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.poly)

    def __mul__(self, other):
        return self._wrap(self.poly * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.poly)

    def __pow__(self, k: int):
        return self._wrap(self.poly**k)

    def __eq__(self, other):
        if isinstance(other, JetPolynomial):
            return self.universe == other.universe and self.poly == other.poly
        return NotImplemented

    def __hash__(self):
        return hash((self.universe, tuple(sorted(self.poly.terms()))))

    def to_str(self, style: str = "prime") -> str:
        return format_jet_polynomial(self, style)

    __str__ = to_str

    def __repr__(self):
        return f"JetPolynomial({self.to_str()!r})"


def total_derivative(p: JetPolynomial) -> JetPolynomial:
    """Apply the derivation sending each jet of order i to order i+1 and parameters to 0."""
    u = p.universe
    ring = u.ring
    succ = u.successor
    out = ring.zero
    for i in range(len(u.jets)):
        d = p.poly.diff(ring.gens[i])
        if not d:
            continue
        if i not in succ:
            j = u.jets[i]
            raise ModelError(f"derivative of {j.base}^({j.order}) is outside the universe")
        out += d * ring.gens[succ[i]]
    return JetPolynomial(u, out)


def lie_derivative(h: RationalExpr, m: Model) -> RationalExpr:
    """``sum_i f_i dh/dx_i + sum_j u_j' dh/du_j`` (all input jet orders are shifted)."""
    field_names = set(h.names)
    model_names = set(s.name for s in m.field.symbols)
    if h.field != m.field:
        if not field_names <= model_names:
            raise ModelError("expression is not over this model's symbols")
    used = h.symbols()
    out = RationalExpr(m.field.zero)
    for x in m.states:
        if x in used:
            out = out + m.odes[x] * h.diff(x)
    cap = m.input_order_cap
    for u in m.inputs:
        for k in range(cap + 1):
            name = jet_name(u, k)
            if name in used:
                if k == cap:
                    raise ModelError(f"input {u} differentiated beyond order {cap}")
                out = out + RationalExpr.symbol(m.field, jet_name(u, k + 1)) * h.diff(name)
    return out


def lie_iterate(y_index: int, k: int, m: Model) -> list[RationalExpr]:
    """``[g_j, L(g_j), ..., L^k(g_j)]`` for output ``y_index``."""
    if not 0 <= y_index < len(m.outputs):
        raise ModelError(f"invalid output index {y_index}")
    if k < 0:
        raise ValueError("iteration count must be non-negative")
    seq = [m.outputs[y_index][1]]
    for _ in range(k):
        seq.append(lie_derivative(seq[-1], m))
    return seq


def _prime_name(j: JetVar) -> str:
    return j.base + "'" * j.order


def format_jet_polynomial(p: JetPolynomial, style: str = "prime") -> str:
    """Render with jets as ``x1'''`` (``prime``), ``diff(x1,3)`` (``diff``) or ``x1_3`` (``flat``)."""
    from .model import format_poly

    u = p.universe
    names = []
    for i, n in enumerate(u.names):
        if i < len(u.jets):
            j = u.jets[i]
            if style == "prime":
                names.append(_prime_name(j))
            elif style == "diff":
                names.append(j.base if j.order == 0 else f"diff({j.base},{j.order})")
            else:
                names.append(j.name)
        else:
            names.append(n)
    return format_poly(p.poly, tuple(names))


def parse_jet_polynomial(text: str, universe: JetUniverse) -> JetPolynomial:
    """Parse a polynomial written with ``x1'''``, ``x1^(3)`` or ``diff(x1,3)`` jets.

    A bare jet base means order 0 and flat names such as ``x1_3`` are accepted too.
    """
    ring = universe.ring

    def resolve(name, order, tok, parser):
        if name in universe.params or name in universe.aux:
            if order:
                parser.error(f"{name} is not a jet variable", tok)
            return ring.gens[universe.index[name]]
        if universe.has_jet(name, order):
            return universe.jet(name, order)
        if order == 0 and name in universe.index:
            return ring.gens[universe.index[name]]
        parser.error(f"unknown jet variable {name} of order {order}", tok)

    class _RingAsField:
        def __call__(self, c):
            return ring(c)

    toks = _tokenize(text, 1, 0)
    parser = _ExprParser(toks, 1, resolve, _RingAsField(), jet_caret=True)
    try:
        value = parser.parse()
    except ZeroDivisionError:
        raise ParseError("division is not allowed in jet polynomials", 1, 1) from None
    if not hasattr(value, "ring"):
        raise ParseError("not a polynomial", 1, 1)
    return JetPolynomial(universe, value)
