"""Monomial orderings: degrevlex, differential degrevlex and weighted.

Besides a direct comparator, every ordering provides an integer *sort key*
that is additive in the exponents, so ``key(m1 * m2) == key(m1) + key(m2)``
and integer comparison of keys reproduces the ordering. The key stacks the
fields ``[weighted degree, degree, s_{n-1}, ..., s_1]`` (most significant
first) where ``s_k`` is the sum of the exponents of the ``k`` highest-ranked
variables; for equal degree a larger ``s_{n-1}`` means a smaller exponent on
the lowest variable, which is exactly the reverse-lexicographic rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

KINDS = ("degrevlex", "diff_degrevlex", "weighted")
FIELD_BITS = 16
FIELD_MASK = (1 << FIELD_BITS) - 1
MAX_EXPONENT = (1 << (FIELD_BITS - 1)) - 1


@dataclass(frozen=True)
class MonomialOrdering:
    """``rank[i]`` is the position of ``variables[i]`` when listed from largest to smallest."""

    kind: str
    variables: tuple[str, ...]
    rank: tuple[int, ...]
    weights: tuple[int, ...] | None = None
    bases: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ordering kind {self.kind!r}")
        n = len(self.variables)
        if sorted(self.rank) != list(range(n)):
            raise ValueError("variable rank must be a permutation of the universe")
        if self.kind == "weighted":
            if self.weights is None or len(self.weights) != n:
                raise ValueError("weighted ordering needs one weight per variable")
            if any(w < 1 for w in self.weights):
                raise ValueError("weights must be positive")
        elif self.weights is not None:
            raise ValueError(f"{self.kind} ordering does not take weights")
        if self.bases is not None and len(self.bases) != n:
            raise ValueError("bases must match the universe")

    @property
    def n(self) -> int:
        return len(self.variables)

    @cached_property
    def ranked(self) -> tuple[str, ...]:
        """Variables from largest to smallest."""
        out = [""] * self.n
        for v, r in zip(self.variables, self.rank):
            out[r] = v
        return tuple(out)

    def base_of(self, v: str) -> str:
        if self.bases is None:
            return v
        return self.bases[self.variables.index(v)]

    def with_weights(self, weights: Sequence[int]) -> "MonomialOrdering":
        return MonomialOrdering("weighted", self.variables, self.rank, tuple(int(w) for w in weights), self.bases)

    def unweighted(self) -> "MonomialOrdering":
        kind = "diff_degrevlex" if self.kind == "weighted" else self.kind
        return MonomialOrdering(kind, self.variables, self.rank, None, self.bases)

    # ------------------------------------------------------------------
    # direct comparator

    def compare(self, m1: Sequence[int], m2: Sequence[int]) -> int:
        """-1, 0 or 1 as ``m1`` is smaller than, equal to or greater than ``m2``."""
        if len(m1) != self.n or len(m2) != self.n:
            raise ValueError("monomials are over a different variable universe")
        if self.weights is not None:
            w1 = sum(e * w for e, w in zip(m1, self.weights))
            w2 = sum(e * w for e, w in zip(m2, self.weights))
            if w1 != w2:
                return -1 if w1 < w2 else 1
        d1, d2 = sum(m1), sum(m2)
        if d1 != d2:
            return -1 if d1 < d2 else 1
        for i in self._revlex_scan:
            if m1[i] != m2[i]:
                return 1 if m1[i] < m2[i] else -1
        return 0

    @cached_property
    def _revlex_scan(self) -> tuple[int, ...]:
        """Variable indices from the smallest-ranked to the largest-ranked."""
        return tuple(sorted(range(self.n), key=lambda i: -self.rank[i]))

    # ------------------------------------------------------------------
    # packed representation

    @cached_property
    def unit_keys(self) -> tuple[int, ...]:
        n = self.n
        units = []
        for i in range(n):
            r = self.rank[i]
            k = 1 << (FIELD_BITS * (n - 1)) if n else 0
            for field in range(r, n - 1):
                k += 1 << (FIELD_BITS * field)
            if self.weights is not None:
                k += self.weights[i] << (FIELD_BITS * n)
            units.append(k)
        return tuple(units)

    @cached_property
    def unit_exps(self) -> tuple[int, ...]:
        return tuple(1 << (FIELD_BITS * i) for i in range(self.n))

    @cached_property
    def high_mask(self) -> int:
        return sum(1 << (FIELD_BITS * i + FIELD_BITS - 1) for i in range(self.n))

    def key(self, exps: Sequence[int]) -> int:
        return sum(e * u for e, u in zip(exps, self.unit_keys) if e)

    def pack(self, exps: Sequence[int]) -> int:
        if any(e > MAX_EXPONENT or e < 0 for e in exps):
            raise OverflowError(f"exponent outside 0..{MAX_EXPONENT}")
        return sum(e << (FIELD_BITS * i) for i, e in enumerate(exps) if e)

    def unpack(self, packed: int) -> tuple[int, ...]:
        return tuple((packed >> (FIELD_BITS * i)) & FIELD_MASK for i in range(self.n))

    def grading(self, key: int) -> int:
        """Degree used by the normal selection strategy (weighted degree when weighted)."""
        if self.weights is not None:
            return key >> (FIELD_BITS * self.n)
        return (key >> (FIELD_BITS * (self.n - 1))) & FIELD_MASK if self.n else 0


def key_compare(o: MonomialOrdering, m1: Sequence[int], m2: Sequence[int]) -> int:
    k1, k2 = o.key(m1), o.key(m2)
    return (k1 > k2) - (k1 < k2)


def degrevlex(variables: Iterable[str]) -> MonomialOrdering:
    """Plain degrevlex with the variables listed from largest to smallest."""
    variables = tuple(variables)
    return MonomialOrdering("degrevlex", variables, tuple(range(len(variables))))


def differential_rank(
    variables: Sequence[str],
    jets: Mapping[str, tuple[str, int]],
    params: Iterable[str],
) -> tuple[int, ...]:
    """Jets by derivative order descending, bases reverse-alphabetically; then parameters
    alphabetically; then any remaining (auxiliary) variables alphabetically."""
    params = set(params)
    jet_vars = sorted((v for v in variables if v in jets), key=lambda v: (jets[v][1], jets[v][0]), reverse=True)
    par_vars = sorted(v for v in variables if v in params and v not in jets)
    aux_vars = sorted(v for v in variables if v not in jets and v not in params)
    order = jet_vars + par_vars + aux_vars
    pos = {v: i for i, v in enumerate(order)}
    return tuple(pos[v] for v in variables)


def diff_degrevlex(
    variables: Sequence[str],
    jets: Mapping[str, tuple[str, int]],
    params: Iterable[str],
) -> MonomialOrdering:
    variables = tuple(variables)
    bases = tuple(jets[v][0] if v in jets else v for v in variables)
    return MonomialOrdering("diff_degrevlex", variables, differential_rank(variables, jets, params), None, bases)


def weighted(base: MonomialOrdering, weights: Sequence[int]) -> MonomialOrdering:
    """Weighted degree first, ties broken by ``base``'s ranking."""
    return base.with_weights(weights)


def legacy_rank(
    variables: Sequence[str],
    jets: Mapping[str, tuple[str, int]],
    params: Iterable[str],
    base_order: Sequence[str],
) -> tuple[int, ...]:
    """Jets grouped by base in ``base_order`` with orders ascending, then parameters, then the rest."""
    params = list(params)
    where = {b: i for i, b in enumerate(base_order)}
    jet_vars = sorted((v for v in variables if v in jets), key=lambda v: (where.get(jets[v][0], len(where)), jets[v][0], jets[v][1]))
    par_vars = [v for v in params if v in variables and v not in jets]
    rest = [v for v in variables if v not in jets and v not in params]
    order = jet_vars + par_vars + rest
    pos = {v: i for i, v in enumerate(order)}
    return tuple(pos[v] for v in variables)
