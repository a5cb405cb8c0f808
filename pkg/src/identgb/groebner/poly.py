"""Sparse polynomials over F_p with terms kept in decreasing monomial order."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .field import check_prime, inv_mod
from .ordering import MonomialOrdering


class PolyRing:
    """Variables, characteristic and monomial ordering shared by a family of polynomials."""

    def __init__(self, ordering: MonomialOrdering, prime: int):
        self.ordering = ordering
        self.prime = check_prime(prime)
        self.variables = ordering.variables
        self.n = ordering.n
        self.high = ordering.high_mask
        self._unit_k = ordering.unit_keys
        self._nbytes = 2 * self.n

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.ordering == other.ordering and self.prime == other.prime

    def __hash__(self):
        return hash((self.ordering, self.prime))

    def with_ordering(self, ordering: MonomialOrdering) -> "PolyRing":
        return PolyRing(ordering, self.prime)

    def key_of(self, packed: int) -> int:
        k = 0
        i = 0
        while packed:
            e = packed & 0xFFFF
            if e:
                k += e * self._unit_k[i]
            packed >>= 16
            i += 1
        return k

    def divides(self, a: int, b: int) -> bool:
        """Packed exponent ``a`` divides packed exponent ``b``."""
        h = self.high
        return ((b | h) - a) & h == h

    def lcm(self, a: int, b: int) -> int:
        h = self.high
        ge = ((a | h) - b) & h  # fields where a >= b
        mask = (ge >> 15) * 0xFFFF
        return (a & mask) | (b & ~mask)

    def coprime(self, a: int, b: int) -> bool:
        return self.lcm(a, b) == a + b

    def degree(self, packed: int) -> int:
        d = 0
        while packed:
            d += packed & 0xFFFF
            packed >>= 16
        return d

    def unpack(self, packed: int) -> tuple[int, ...]:
        return self.ordering.unpack(packed)

    def pack(self, exps: Sequence[int]) -> int:
        return self.ordering.pack(exps)

    def poly(self, terms: Mapping[Sequence[int], int] | Iterable[tuple[Sequence[int], int]]) -> "FpPolynomial":
        return FpPolynomial.from_terms(self, terms)

    def var(self, name: str) -> "FpPolynomial":
        i = self.variables.index(name)
        exps = [0] * self.n
        exps[i] = 1
        return FpPolynomial.from_terms(self, {tuple(exps): 1})

    def constant(self, c: int) -> "FpPolynomial":
        return FpPolynomial.from_terms(self, {(0,) * self.n: c})

    def format_monomial(self, packed: int) -> str:
        parts = []
        for v, e in zip(self.variables, self.unpack(packed)):
            if e == 1:
                parts.append(v)
            elif e:
                parts.append(f"{v}^{e}")
        return "*".join(parts)


class FpPolynomial:
    """Immutable polynomial; ``terms`` lists ``(key, packed exponents, coefficient)`` by decreasing key."""

    __slots__ = ("ring", "_terms")

    def __init__(self, ring: PolyRing, terms: Sequence[tuple[int, int, int]]):
        self.ring = ring
        self._terms = tuple(terms)

    @classmethod
    def from_terms(cls, ring: PolyRing, terms) -> "FpPolynomial":
        p = ring.prime
        acc: dict[int, list] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, c in items:
            if len(exps) != ring.n:
                raise ValueError("exponent vector does not match the ring")
            e = ring.pack(exps)
            k = ring.ordering.key(exps)
            if k in acc:
                acc[k][1] = (acc[k][1] + c) % p
            else:
                acc[k] = [e, c % p]
        out = sorted(((k, e, c) for k, (e, c) in acc.items() if c), reverse=True)
        return cls(ring, out)

    @classmethod
    def from_packed(cls, ring: PolyRing, items: Iterable[tuple[int, int]]) -> "FpPolynomial":
        """Build from ``(packed exponents, coefficient)`` pairs, merging duplicates."""
        p = ring.prime
        acc: dict[int, list] = {}
        for e, c in items:
            k = ring.key_of(e)
            if k in acc:
                acc[k][1] = (acc[k][1] + c) % p
            else:
                acc[k] = [e, c % p]
        return cls(ring, sorted(((k, e, c) for k, (e, c) in acc.items() if c), reverse=True))

    # ------------------------------------------------------------------

    @property
    def raw_terms(self) -> tuple[tuple[int, int, int], ...]:
        return self._terms

    @property
    def terms(self) -> list[tuple[tuple[int, ...], int]]:
        return [(self.ring.unpack(e), c) for _, e, c in self._terms]

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][1] == 0)

    def constant_value(self) -> int:
        if not self._terms:
            return 0
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms[0][2]

    @property
    def lm(self) -> tuple[int, ...]:
        return self.ring.unpack(self._terms[0][1])

    @property
    def lc(self) -> int:
        return self._terms[0][2]

    @property
    def lead_key(self) -> int:
        return self._terms[0][0]

    @property
    def lead_packed(self) -> int:
        return self._terms[0][1]

    def total_degree(self) -> int:
        return max((self.ring.degree(e) for _, e, _ in self._terms), default=-1)

    def is_homogeneous(self, weights: Sequence[int] | None = None) -> bool:
        if not self._terms:
            return True
        w = weights or [1] * self.ring.n
        degs = {sum(a * b for a, b in zip(self.ring.unpack(e), w)) for _, e, _ in self._terms}
        return len(degs) == 1

    def monic(self) -> "FpPolynomial":
        if not self._terms or self._terms[0][2] == 1:
            return self
        p = self.ring.prime
        inv = inv_mod(self._terms[0][2], p)
        return FpPolynomial(self.ring, [(k, e, c * inv % p) for k, e, c in self._terms])

    def scale(self, c: int) -> "FpPolynomial":
        p = self.ring.prime
        c %= p
        if c == 0:
            return FpPolynomial(self.ring, [])
        return FpPolynomial(self.ring, [(k, e, v * c % p) for k, e, v in self._terms])

    def mul_term(self, exps: Sequence[int] | int, c: int = 1) -> "FpPolynomial":
        r = self.ring
        e0 = exps if isinstance(exps, int) else r.pack(exps)
        k0 = r.key_of(e0)
        p = r.prime
        c %= p
        if c == 0:
            return FpPolynomial(r, [])
        return FpPolynomial(r, [(k + k0, e + e0, v * c % p) for k, e, v in self._terms])

    def _check(self, other: "FpPolynomial"):
        if self.ring != other.ring:
            raise ValueError("polynomials over different rings")

    def __add__(self, other: "FpPolynomial") -> "FpPolynomial":
        self._check(other)
        return _combine(self, other, 1)

    def __sub__(self, other: "FpPolynomial") -> "FpPolynomial":
        self._check(other)
        return _combine(self, other, -1)

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        out = FpPolynomial(self.ring, [])
        for _, e, c in other._terms:
            out = out + self.mul_term(e, c)
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, FpPolynomial) and self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def evaluate(self, values: Mapping[str, int]) -> int:
        p = self.ring.prime
        vals = [values[v] % p for v in self.ring.variables]
        total = 0
        for _, e, c in self._terms:
            t = c
            for i, k in enumerate(self.ring.unpack(e)):
                if k:
                    t = t * pow(vals[i], k, p) % p
            total += t
        return total % p

    def variables(self) -> set[str]:
        used = 0
        for _, e, _ in self._terms:
            used |= e
        return {v for i, v in enumerate(self.ring.variables) if (used >> (16 * i)) & 0xFFFF}

    def to_str(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (_, e, c) in enumerate(self._terms):
            mono = self.ring.format_monomial(e)
            body = mono if (c == 1 and mono) else (f"{c}*{mono}" if mono else str(c))
            parts.append(body if i == 0 else " + " + body)
        return "".join(parts)

    __str__ = to_str

    def __repr__(self):
        return f"FpPolynomial({self.to_str()!r})"


def _combine(a: FpPolynomial, b: FpPolynomial, sign: int) -> FpPolynomial:
    p = a.ring.prime
    ta, tb = a._terms, b._terms
    i = j = 0
    out = []
    while i < len(ta) and j < len(tb):
        ka, kb = ta[i][0], tb[j][0]
        if ka > kb:
            out.append(ta[i])
            i += 1
        elif kb > ka:
            out.append((kb, tb[j][1], sign * tb[j][2] % p))
            j += 1
        else:
            c = (ta[i][2] + sign * tb[j][2]) % p
            if c:
                out.append((ka, ta[i][1], c))
            i += 1
            j += 1
    out.extend(ta[i:])
    out.extend((k, e, sign * c % p) for k, e, c in tb[j:])
    return FpPolynomial(a.ring, out)


def spoly(f: FpPolynomial, g: FpPolynomial) -> FpPolynomial:
    """``(M/LT(f)) f - (M/LT(g)) g`` with ``M = lcm(LM(f), LM(g))``."""
    if f.is_zero() or g.is_zero():
        raise ValueError("S-polynomial of a zero polynomial")
    r = f.ring
    m = r.lcm(f.lead_packed, g.lead_packed)
    p = r.prime
    a = f.mul_term(m - f.lead_packed, inv_mod(f.lc, p))
    b = g.mul_term(m - g.lead_packed, inv_mod(g.lc, p))
    return a - b


def normal_form(f: FpPolynomial, basis: Sequence[FpPolynomial]) -> FpPolynomial:
    """Full multivariate division remainder of ``f`` by ``basis``."""
    if not f._terms:
        return f
    r = f.ring
    p = r.prime
    divs = [(g.lead_packed, g.lead_key, inv_mod(g.lc, p), g._terms) for g in basis if g._terms]
    terms = {k: [e, c] for k, e, c in f._terms}
    heap = [-k for k in terms]
    heapq.heapify(heap)
    rem = []
    cache: dict[int, int] = {}
    while heap:
        k = -heapq.heappop(heap)
        entry = terms.pop(k, None)
        if entry is None:
            continue
        e, c = entry
        if not c:
            continue
        idx = cache.get(e)
        if idx is None:
            idx = -1
            for t, (le, _, _, _) in enumerate(divs):
                if r.divides(le, e):
                    idx = t
                    break
            cache[e] = idx
        if idx < 0:
            rem.append((k, e, c))
            continue
        le, lk, linv, gt = divs[idx]
        qe, qk = e - le, k - lk
        factor = c * linv % p
        for gk, ge, gc in gt[1:]:
            nk = gk + qk
            cur = terms.get(nk)
            if cur is None:
                terms[nk] = [ge + qe, (-factor * gc) % p]
                heapq.heappush(heap, -nk)
            else:
                cur[1] = (cur[1] - factor * gc) % p
    return FpPolynomial(r, rem)


@dataclass
class GroebnerBasis:
    polynomials: list[FpPolynomial]
    ring: PolyRing
    reduced: bool = False

    @property
    def ordering(self) -> MonomialOrdering:
        return self.ring.ordering

    def __iter__(self):
        return iter(self.polynomials)

    def __len__(self):
        return len(self.polynomials)

    def normal_form(self, f: FpPolynomial) -> FpPolynomial:
        return normal_form(f, self.polynomials)

    def is_unit(self) -> bool:
        return any(g.is_constant() and not g.is_zero() for g in self.polynomials)

    def leading_monomials(self) -> list[tuple[int, ...]]:
        return [g.lm for g in self.polynomials]

    def as_sorted_strings(self) -> list[str]:
        return [g.to_str() for g in self.polynomials]

    def satisfies_certificate(self) -> bool:
        """Every pairwise S-polynomial reduces to zero."""
        gs = self.polynomials
        for i in range(len(gs)):
            for j in range(i + 1, len(gs)):
                if normal_form(spoly(gs[i], gs[j]), gs):
                    return False
        return True


def reduce_basis(basis: Sequence[FpPolynomial] | GroebnerBasis) -> GroebnerBasis:
    """Autoreduce until stable: every element monic and reduced against the others.

    On a Groebner basis this yields the unique reduced basis of its ideal.
    """
    polys = list(basis.polynomials if isinstance(basis, GroebnerBasis) else basis)
    polys = [g.monic() for g in polys if g]
    if not polys:
        raise ValueError("empty basis")
    ring = polys[0].ring
    changed = True
    while changed:
        if any(g.is_constant() for g in polys):
            return GroebnerBasis([ring.constant(1)], ring, True)
        changed = False
        polys.sort(key=lambda g: g.lead_key)
        for i, g in enumerate(polys):
            h = normal_form(g, polys[:i] + polys[i + 1 :])
            if h != g:
                polys = polys[:i] + polys[i + 1 :] + ([h.monic()] if h else [])
                changed = True
                break
    polys.sort(key=lambda g: g.lead_key, reverse=True)
    return GroebnerBasis(polys, ring, True)
