"""ODE models in state-space form and the line-oriented DSL used to write them.

A model file looks like::

    model intro
    states x1, x2
    params a, b, c
    x1' = a*x1 + b*x2
    x2' = c*x1
    output y1 = x1

Expressions use ``+ - * / ^`` (``**`` is accepted as a synonym for ``^``),
parentheses, integer literals and declared identifiers. ``#`` starts a
comment and ``;`` may be used to put several statements on one line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from sympy import QQ, Symbol
from sympy.polys.fields import FracField

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\*\*|[-+*/^(),=';]))")
RESERVED = frozenset({"model", "states", "params", "inputs", "output", "diff"})


class ModelError(ValueError):
    """A model violates one of its structural invariants."""


class ParseError(ModelError):
    """Syntax or symbol error while reading DSL text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


def jet_name(base: str, order: int) -> str:
    """Generator name of the ``order``-th derivative of ``base`` (``u''`` style)."""
    return base + "'" * order


@lru_cache(maxsize=None)
def expression_field(names: tuple[str, ...]) -> FracField:
    return FracField([Symbol(n) for n in names], QQ)


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(poly, names: tuple[str, ...]) -> str:
    """Render a sympy ``PolyElement`` in DSL syntax."""
    terms = sorted(poly.terms(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))
    if not terms:
        return "0"
    out = []
    for k, (monom, coeff) in enumerate(terms):
        c = _to_fraction(coeff)
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, monom) if e]
        mag = abs(c)
        if not factors:
            body = _format_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_coeff(mag) + "*" + "*".join(factors)
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


class RationalExpr:
    """Exact rational function over the symbols of a model.

    Backed by an element of a sympy fraction field, which keeps numerator and
    denominator coprime with the denominator's leading coefficient positive.
    """

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    @property
    def field(self) -> FracField:
        return self.value.field

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.value.field.symbols)

    @property
    def numerator(self):
        return self.value.numer

    @property
    def denominator(self):
        return self.value.denom

    @classmethod
    def constant(cls, field: FracField, c) -> "RationalExpr":
        c = Fraction(c)
        return cls(field(c.numerator) / field(c.denominator))

    @classmethod
    def symbol(cls, field: FracField, name: str) -> "RationalExpr":
        names = [s.name for s in field.symbols]
        return cls(field.gens[names.index(name)])

    def symbols(self) -> frozenset[str]:
        """Names occurring with a nonzero exponent in numerator or denominator."""
        names = self.names
        used = set()
        for poly in (self.value.numer, self.value.denom):
            for monom in poly.monoms():
                used.update(names[i] for i, e in enumerate(monom) if e)
        return frozenset(used)

    def is_zero(self) -> bool:
        return not self.value.numer

    def is_constant(self) -> bool:
        return not self.symbols()

    def is_polynomial(self) -> bool:
        return self.value.denom.is_ground

    def diff(self, name: str) -> "RationalExpr":
        names = self.names
        if name not in names:
            return RationalExpr(self.value.field.zero)
        return RationalExpr(self.value.diff(self.value.field.gens[names.index(name)]))

    def evaluate(self, values: Mapping[str, Fraction | int]) -> Fraction:
        """Exact value at a point; raises ``ZeroDivisionError`` on a vanishing denominator."""
        names = self.names
        num = _eval_poly(self.value.numer, names, values)
        den = _eval_poly(self.value.denom, names, values)
        return num / den

    def _coerce(self, other):
        if isinstance(other, RationalExpr):
            if other.field != self.field:
                raise ModelError("expressions belong to different symbol universes")
            return other.value
        c = Fraction(other)
        return self.field(c.numerator) / self.field(c.denominator)

    def __add__(self, other):
        return RationalExpr(self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RationalExpr(self.value - self._coerce(other))

    def __rsub__(self, other):
        return RationalExpr(self._coerce(other) - self.value)

    def __mul__(self, other):
        return RationalExpr(self.value * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        d = self._coerce(other)
        if not d:
            raise ZeroDivisionError("division by the zero expression")
        return RationalExpr(self.value / d)

    def __rtruediv__(self, other):
        if self.is_zero():
            raise ZeroDivisionError("division by the zero expression")
        return RationalExpr(self._coerce(other) / self.value)

    def __neg__(self):
        return RationalExpr(-self.value)

    def __pow__(self, k: int):
        if k < 0 and self.is_zero():
            raise ZeroDivisionError("negative power of the zero expression")
        return RationalExpr(self.value**k)

    def __eq__(self, other):
        if isinstance(other, RationalExpr):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.evaluate({}) == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_str())

    def to_str(self) -> str:
        names = self.names
        num = format_poly(self.value.numer, names)
        den = self.value.denom
        if den.is_ground and _to_fraction(den.LC) == 1:
            return num
        den_s = format_poly(den, names)
        num_s = num if len(self.value.numer.terms()) == 1 and "/" not in num else f"({num})"
        if len(den.terms()) > 1 or "*" in den_s or "/" in den_s:
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"

    __str__ = to_str

    def __repr__(self):
        return f"RationalExpr({self.to_str()!r})"


def _eval_poly(poly, names, values) -> Fraction:
    total = Fraction(0)
    for monom, coeff in poly.terms():
        term = _to_fraction(coeff)
        for i, e in enumerate(monom):
            if e:
                term *= Fraction(values[names[i]]) ** e
        total += term
    return total


@dataclass(frozen=True, eq=True)
class Model:
    """State-space model ``x' = f(x, mu, u)``, ``y = g(x, mu, u)``."""

    name: str
    states: tuple[str, ...]
    params: tuple[str, ...]
    inputs: tuple[str, ...]
    odes: Mapping[str, RationalExpr]
    outputs: tuple[tuple[str, RationalExpr], ...]

    __hash__ = None  # type: ignore[assignment]

    @property
    def field(self) -> FracField:
        return model_field(self.states, self.params, self.inputs)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.outputs)

    @property
    def input_order_cap(self) -> int:
        return len(self.states) + len(self.params) + 2

    def expr(self, text: str) -> RationalExpr:
        """Parse a single expression over this model's symbols."""
        return parse_expression(text, self)

    def denominators(self) -> list:
        """Distinct non-constant denominators of all right-hand sides."""
        seen = []
        for e in list(self.odes.values()) + [g for _, g in self.outputs]:
            d = e.denominator
            if not d.is_ground and d not in seen:
                seen.append(d)
        return seen

    def __str__(self):
        return format_model(self)


def model_field(states: tuple[str, ...], params: tuple[str, ...], inputs: tuple[str, ...]) -> FracField:
    names = list(states) + list(params)
    cap = len(states) + len(params) + 2
    for u in inputs:
        names.extend(jet_name(u, k) for k in range(cap + 1))
    return expression_field(tuple(names))


# --------------------------------------------------------------------------
# tokenizer and expression parser


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "id", "op", "end"
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip()) if text[pos:].strip() else pos
            raise ParseError(f"unexpected character {text[bad]!r}", line, col0 + bad + 1)
        start = m.start(m.lastindex)
        kind = {1: "num", 2: "id", 3: "op"}[m.lastindex]
        toks.append(_Tok(kind, m.group(m.lastindex), col0 + start + 1))
        pos = m.end()
    toks.append(_Tok("end", "", col0 + len(text) + 1))
    return toks


class _ExprParser:
    """Recursive-descent parser evaluating directly into field elements."""

    def __init__(self, toks: list[_Tok], line: int, resolve: Callable, field: FracField, jet_caret: bool = False):
        self.toks = toks
        self.i = 0
        self.line = line
        self.resolve = resolve
        self.field = field
        self.jet_caret = jet_caret

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.take()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of line'!r}", self.line, t.col)
        return t

    def error(self, msg: str, tok: _Tok):
        raise ParseError(msg, self.line, tok.col)

    def parse(self):
        value = self.expr()
        t = self.peek()
        if t.kind != "end":
            self.error(f"unexpected token {t.text!r}", t)
        return value

    def expr(self):
        value = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op.text == "*":
                value = value * rhs
            else:
                if not rhs:
                    self.error("zero denominator", op)
                value = value / rhs
        return value

    def unary(self):
        t = self.peek()
        if t.text == "-":
            self.take()
            return -self.unary()
        if t.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t.text in ("^", "**"):
            self.take()
            exp_tok = self.peek()
            e = self.integer_exponent()
            if e < 0 and not base:
                self.error("zero denominator", exp_tok)
            return base**e
        return base

    def integer_exponent(self) -> int:
        paren = self.peek().text == "("
        if paren:
            self.take()
        sign = 1
        if self.peek().text in ("-", "+"):
            sign = -1 if self.take().text == "-" else 1
        t = self.take()
        if t.kind != "num":
            self.error("exponent must be an integer constant", t)
        if paren:
            self.expect(")")
        return sign * int(t.text)

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return self.field(int(t.text))
        if t.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if t.kind == "id":
            if t.text == "diff" and self.peek().text == "(":
                self.take()
                name = self.take()
                if name.kind != "id":
                    self.error("expected identifier in diff(...)", name)
                self.expect(",")
                k = self.take()
                if k.kind != "num":
                    self.error("expected derivative order in diff(...)", k)
                self.expect(")")
                return self.resolve(name.text, int(k.text), name, self)
            order = 0
            while self.peek().text == "'":
                self.take()
                order += 1
            if self.jet_caret and self.peek().text == "^" and self.toks[self.i + 1].text == "(":
                save = self.i
                self.take()
                self.take()
                k = self.take()
                if k.kind == "num" and self.peek().text == ")":
                    self.take()
                    order += int(k.text)
                else:
                    self.i = save
            return self.resolve(t.text, order, t, self)
        self.error(f"unexpected token {t.text or 'end of line'!r}", t)


def _model_resolver(states, params, inputs, field):
    names = [s.name for s in field.symbols]
    declared = set(states) | set(params)
    cap = len(states) + len(params) + 2

    def resolve(name, order, tok, parser):
        if name in inputs:
            if order > cap:
                parser.error(f"derivative order {order} of input {name} exceeds {cap}", tok)
            return field.gens[names.index(jet_name(name, order))]
        if name not in declared:
            parser.error(f"undeclared symbol {name}", tok)
        if order:
            parser.error(f"derivative of non-input symbol {name} in expression", tok)
        return field.gens[names.index(name)]

    return resolve


def parse_expression(text: str, model: Model) -> RationalExpr:
    field = model.field
    toks = _tokenize(text, 1, 0)
    parser = _ExprParser(toks, 1, _model_resolver(model.states, model.params, model.inputs, field), field)
    return RationalExpr(parser.parse())


# --------------------------------------------------------------------------
# model DSL


def _statements(text: str):
    """Yield (line number, column offset, statement text) triples."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        offset = 0
        for part in body.split(";"):
            if part.strip():
                lead = len(part) - len(part.lstrip())
                yield lineno, offset + lead, part.strip()
            offset += len(part) + 1


def _parse_names(rest: str, lineno: int, col: int, what: str) -> list[str]:
    names = [n.strip() for n in rest.split(",")] if rest.strip() else []
    for n in names:
        if not IDENT_RE.match(n):
            raise ParseError(f"invalid {what} identifier {n!r}", lineno, col + 1)
        if n in RESERVED:
            raise ParseError(f"reserved word {n!r} used as identifier", lineno, col + 1)
    return names


_DECL_RE = re.compile(r"(model|states|params|inputs)(?:\s+(.*))?\Z", re.S)
_ODE_RE = re.compile(r"([A-Za-z][A-Za-z0-9_]*)\s*'\s*=(.*)\Z", re.S)
_OUT_RE = re.compile(r"(?:output\s+)?([A-Za-z][A-Za-z0-9_]*)\s*=(.*)\Z", re.S)


def parse_model(text: str) -> Model:
    """Parse DSL text into a validated :class:`Model`.

    Declarations may appear in any order relative to equations; symbol order
    is declaration order.
    """
    name = "unnamed"
    states: list[str] = []
    params: list[str] = []
    inputs: list[str] = []
    odes_src = []
    outs_src = []
    seen_decl: set[str] = set()
    for lineno, col, stmt in _statements(text):
        m = _DECL_RE.match(stmt)
        if m and not _ODE_RE.match(stmt) and "=" not in stmt:
            kw, rest = m.group(1), m.group(2) or ""
            if kw in seen_decl:
                raise ParseError(f"duplicate '{kw}' declaration", lineno, col + 1)
            seen_decl.add(kw)
            if kw == "model":
                if not IDENT_RE.match(rest.strip()):
                    raise ParseError(f"invalid model name {rest.strip()!r}", lineno, col + 7)
                name = rest.strip()
            else:
                target = {"states": states, "params": params, "inputs": inputs}[kw]
                target.extend(_parse_names(rest, lineno, col + len(kw) + 1, kw[:-1]))
            continue
        m = _ODE_RE.match(stmt)
        if m:
            eq = stmt.index("=")
            odes_src.append((m.group(1), lineno, col, col + eq + 1, m.group(2)))
            continue
        m = _OUT_RE.match(stmt)
        if m:
            eq = stmt.index("=")
            outs_src.append((m.group(1), lineno, col, col + eq + 1, m.group(2)))
            continue
        raise ParseError(f"cannot parse statement {stmt!r}", lineno, col + 1)

    declared = states + params + inputs
    dupes = {n for n in declared if declared.count(n) > 1}
    if dupes:
        raise ParseError(f"symbol {sorted(dupes)[0]} declared more than once")

    field = model_field(tuple(states), tuple(params), tuple(inputs))
    resolve = _model_resolver(states, params, inputs, field)

    def parse_rhs(src, lineno, col):
        toks = _tokenize(src, lineno, col)
        return RationalExpr(_ExprParser(toks, lineno, resolve, field).parse())

    odes: dict[str, RationalExpr] = {}
    for lhs, lineno, col, rcol, src in odes_src:
        if lhs not in states:
            if lhs in declared:
                raise ParseError(f"{lhs} is not a state and cannot have an ODE", lineno, col + 1)
            raise ParseError(f"undeclared symbol {lhs}", lineno, col + 1)
        if lhs in odes:
            raise ParseError(f"duplicate ODE for state {lhs}", lineno, col + 1)
        odes[lhs] = parse_rhs(src, lineno, rcol)
    outputs = []
    for lhs, lineno, col, rcol, src in outs_src:
        outputs.append((lhs, parse_rhs(src, lineno, rcol)))
    ordered = {s: odes[s] for s in states if s in odes}
    ordered.update({s: e for s, e in odes.items() if s not in ordered})
    model = Model(name, tuple(states), tuple(params), tuple(inputs), ordered, tuple(outputs))
    validate_model(model)
    return model


def validate_model(m: Model) -> None:
    """Raise :class:`ModelError` describing the first violated invariant."""
    declared = list(m.states) + list(m.params) + list(m.inputs)
    for n in declared + list(m.output_names):
        if not IDENT_RE.match(n) or n in RESERVED:
            raise ModelError(f"invalid identifier {n!r}")
    for n in declared:
        if declared.count(n) > 1:
            raise ModelError(f"symbol {n} declared more than once")
    for s in m.states:
        if s not in m.odes:
            raise ModelError(f"missing ODE for state {s}")
    for s in m.odes:
        if s not in m.states:
            raise ModelError(f"ODE given for undeclared state {s}")
    names = set(declared)
    for y in m.output_names:
        if y in names:
            raise ModelError(f"output {y} clashes with a declared symbol")
        names.add(y)
    allowed = set(m.states) | set(m.params)
    for u in m.inputs:
        allowed.update(jet_name(u, k) for k in range(m.input_order_cap + 1))
    exprs = [(f"{s}'", e) for s, e in m.odes.items()] + [(y, g) for y, g in m.outputs]
    for label, e in exprs:
        for sym in sorted(e.symbols()):
            if sym not in allowed:
                raise ModelError(f"undeclared symbol {sym} in equation for {label}")
        if not e.denominator:
            raise ModelError(f"zero denominator in equation for {label}")


def format_model(m: Model) -> str:
    lines = [f"model {m.name}", "states " + ", ".join(m.states), "params " + ", ".join(m.params)]
    if m.inputs:
        lines.append("inputs " + ", ".join(m.inputs))
    for s in m.states:
        lines.append(f"{s}' = {m.odes[s].to_str()}")
    for y, g in m.outputs:
        lines.append(f"output {y} = {g.to_str()}")
    return "\n".join(lines) + "\n"


def build_model(
    name: str,
    states: Iterable[str],
    params: Iterable[str],
    odes: Mapping[str, str],
    outputs: Iterable[tuple[str, str]],
    inputs: Iterable[str] = (),
) -> Model:
    """Convenience constructor from expression strings."""
    lines = [f"model {name}", "states " + ", ".join(states), "params " + ", ".join(params)]
    inputs = list(inputs)
    if inputs:
        lines.append("inputs " + ", ".join(inputs))
    lines += [f"{s}' = {rhs}" for s, rhs in odes.items()]
    lines += [f"output {y} = {g}" for y, g in outputs]
    return parse_model("\n".join(lines))
