"""Levels of model symbols along iterated Lie derivatives and the weights derived from them."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .calculus import lie_derivative
from .model import Model, jet_name

NEVER = None  # level value of a symbol that never appears


@dataclass(frozen=True)
class LevelMap:
    """Level of every state and parameter; ``None`` marks "never appears"."""

    levels: Mapping[str, int | None]
    states: tuple[str, ...] = ()
    params: tuple[str, ...] = ()

    @property
    def max_level(self) -> int:
        seen = [v for v in self.levels.values() if v is not None]
        return max(seen) if seen else 0

    @property
    def max_state_level(self) -> int:
        seen = [self.levels[s] for s in self.states if self.levels.get(s) is not None]
        return max(seen) if seen else 0

    @property
    def never(self) -> tuple[str, ...]:
        return tuple(s for s, v in self.levels.items() if v is None)

    def __getitem__(self, name: str) -> int | None:
        return self.levels[name]


@dataclass(frozen=True)
class WeightMap:
    """Positive integer weights per symbol; unlisted symbols weigh 1.

    Jet variables of a state inherit the state's weight through :meth:`of`.
    """

    weights: Mapping[str, int]
    scheme: str = "identity"
    source_levels: LevelMap | None = None
    zaux_weight: int = 1

    def __post_init__(self):
        for s, w in self.weights.items():
            if int(w) != w or w < 1:
                raise ValueError(f"weight of {s} must be a positive integer, got {w}")
        if not 1 <= self.zaux_weight <= 3:
            raise ValueError("z_aux weight must lie in 1..3")

    def of(self, symbol: str, base: str | None = None) -> int:
        if base is not None:
            symbol = base
        if symbol == "z_aux":
            return self.zaux_weight
        return int(self.weights.get(symbol, 1))

    def nontrivial(self) -> dict[str, int]:
        return {s: w for s, w in self.weights.items() if w > 1}

    def is_identity(self) -> bool:
        return not self.nontrivial() and self.zaux_weight == 1

    def to_json(self) -> dict:
        out = {"scheme": self.scheme, "weights": dict(self.weights)}
        if self.source_levels is not None:
            out["levels"] = dict(self.source_levels.levels)
        return out


def identity_weights(m: Model | None = None) -> WeightMap:
    names = (list(m.states) + list(m.params)) if m is not None else []
    return WeightMap({s: 1 for s in names}, "identity")


def _reachable(m: Model) -> set[str]:
    """States and parameters connected to some output through the dependency graph."""
    frontier = set()
    for _, g in m.outputs:
        frontier |= g.symbols()
    seen: set[str] = set()
    while frontier:
        v = frontier.pop()
        if v in seen:
            continue
        seen.add(v)
        if v in m.odes:
            frontier |= m.odes[v].symbols()
    return seen & (set(m.states) | set(m.params))


def compute_levels(m: Model, max_iter: int | None = None) -> LevelMap:
    """Minimal Lie-iteration index at which each state and parameter appears.

    Iteration stops early once every symbol reachable from the outputs has been
    seen; further derivatives cannot reveal anything new.
    """
    if max_iter is None:
        max_iter = len(m.states) + len(m.params)
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    tracked = set(m.states) | set(m.params)
    target = _reachable(m)
    levels: dict[str, int] = {}
    current = [g for _, g in m.outputs]
    for i in range(max_iter + 1):
        for h in current:
            for s in h.symbols():
                if s in tracked:
                    levels.setdefault(s, i)
        if target <= set(levels) or i == max_iter:
            break
        current = [lie_derivative(h, m) for h in current]
    full = {s: levels.get(s) for s in list(m.states) + list(m.params)}
    never = [s for s, v in full.items() if v is None]
    if never and any(s in m.params for s in never):
        warnings.warn(f"symbols never appear in output derivatives: {', '.join(never)}", stacklevel=2)
    return LevelMap(full, tuple(m.states), tuple(m.params))


def assign_weights_standard(
    levels: LevelMap,
    identifiable: Iterable[str] | None = None,
    zaux_weight: int = 1,
) -> WeightMap:
    """States get level + 1; parameters at the overall maximal level get level + 1.

    When ``identifiable`` is given, only locally identifiable parameters are
    eligible for the raised weight.
    """
    mx = levels.max_level
    ident = None if identifiable is None else set(identifiable)
    w = {}
    for s in levels.states:
        lv = levels.levels.get(s)
        w[s] = 1 if lv is None else lv + 1
    for p in levels.params:
        lv = levels.levels.get(p)
        eligible = ident is None or p in ident
        w[p] = lv + 1 if lv is not None and lv == mx and eligible else 1
    return WeightMap(w, "standard", levels, zaux_weight)


def assign_weights_inverted(levels: LevelMap, zaux_weight: int = 1) -> WeightMap:
    """States get ``M - level + 1`` with ``M`` the largest state level; parameters stay at 1."""
    big = levels.max_state_level
    w = {}
    for s in levels.states:
        lv = levels.levels.get(s)
        w[s] = 1 if lv is None else big - lv + 1
    for p in levels.params:
        w[p] = 1
    return WeightMap(w, "inverted", levels, zaux_weight)


def weighted_degree(exps: Iterable[int], weights: Iterable[int]) -> int:
    return sum(e * w for e, w in zip(exps, weights))


def weighted_compare(m1, m2, w: WeightMap, ordering) -> int:
    """Compare exponent vectors by weighted degree, then by the tie-break ordering.

    ``ordering`` is a :class:`~identgb.groebner.ordering.MonomialOrdering`
    supplying the variable universe and its differential rev-lex ranking.
    Returns -1, 0 or 1.
    """
    from .groebner.ordering import MonomialOrdering

    if len(m1) != len(m2) or len(m1) != len(ordering.variables):
        raise ValueError("monomials are over mismatched variable universes")
    ws = [w.of(v, ordering.base_of(v)) for v in ordering.variables]
    d1, d2 = weighted_degree(m1, ws), weighted_degree(m2, ws)
    if d1 != d2:
        return -1 if d1 < d2 else 1
    tie = MonomialOrdering(ordering.kind if ordering.kind != "weighted" else "diff_degrevlex", ordering.variables, ordering.rank)
    return tie.compare(m1, m2)


def apply_weight_substitution(system, w: WeightMap):
    """Replace every variable ``v`` of weight ``k > 1`` by ``v^k``.

    Returns a new :class:`~identgb.polysys.PolySystem` under plain differential
    degrevlex that remembers the weights for back substitution.
    """
    return system.substitute_weights(w)
