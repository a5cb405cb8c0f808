"""Global identifiability verdicts from a Groebner basis of the specialized system.

A symbol that is locally identifiable is globally identifiable when the basis
pins its variable to a single value, i.e. the normal form of ``v`` (or of
``v^k`` after substituting ``v -> v^k``) is a constant.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping

from .generator import SpecializedSystem, generate
from .groebner import GBTimeout, GroebnerBasis, f4
from .groebner.field import DEFAULT_PRIME
from .groebner.ordering import MonomialOrdering
from .groebner.f4 import F4Stats
from .model import Model
from .polysys import PolySystem
from .weights import (
    WeightMap,
    assign_weights_inverted,
    assign_weights_standard,
    compute_levels,
    identity_weights,
)

WEIGHT_SCHEMES = ("none", "standard", "inverted")
DEFAULT_TIMEOUT = 1800.0
STRATEGIES = ("substitute", "native")


@dataclass
class IdentConfig:
    weights: str = "standard"
    strategy: str = "substitute"
    prime: int = DEFAULT_PRIME
    seed: int | None = 0
    bounds: Mapping[int, int] | int | None = None
    overrides: Mapping[str, int] | None = None
    timeout: float | None = DEFAULT_TIMEOUT
    zaux_weight: int = 1
    fix_nonidentifiable: bool = True

    def __post_init__(self):
        if self.weights not in WEIGHT_SCHEMES:
            raise ValueError(f"unknown weight scheme {self.weights!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass
class IdentReport:
    model: str
    verdicts: dict[str, str]
    weights: dict[str, int]
    config: IdentConfig
    stats: F4Stats
    completed: bool
    seconds: float
    polys: int = 0
    vars: int = 0
    local: frozenset[str] = frozenset()
    fixed: dict[str, int] = field(default_factory=dict)
    values: dict[str, int] = field(default_factory=dict)
    evidence: dict[str, str] = field(default_factory=dict)
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def partial(self) -> bool:
        return not self.completed

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "ordering": self.ordering,
            "completed": self.completed,
            "verdicts": dict(self.verdicts),
            "weights": dict(self.weights),
            "weight_scheme": self.config.weights,
            "strategy": self.config.strategy,
            "prime": self.config.prime,
            "seed": self.config.seed,
            "polys": self.polys,
            "vars": self.vars,
            "fixed": sorted(self.fixed),
            "evidence": dict(self.evidence),
            "seconds": round(self.seconds, 3),
            "timings_ms": {k: round(v, 1) for k, v in self.timings_ms.items()},
            "stats": self.stats.to_json(),
        }

    @property
    def ordering(self) -> str:
        if self.config.weights == "none":
            return "diff_degrevlex"
        if self.config.strategy == "native":
            return f"weighted ({self.config.weights})"
        return f"diff_degrevlex after substitution ({self.config.weights})"


def model_weights(m: Model, scheme: str, local=None, zaux_weight: int = 1) -> WeightMap:
    """Weights of the named scheme; ``local`` filters parameters for the standard scheme."""
    if scheme == "none":
        return identity_weights(m)
    levels = compute_levels(m)
    if scheme == "standard":
        return assign_weights_standard(levels, local, zaux_weight)
    if scheme == "inverted":
        return assign_weights_inverted(levels, zaux_weight)
    raise ValueError(f"unknown weight scheme {scheme!r}")


def standard_weights(m: Model, seed: int | None = 0, prime: int = DEFAULT_PRIME) -> WeightMap:
    """Standard weights with parameters filtered by local identifiability at a random point.

    The Jacobian test only runs when some parameter sits at the maximal level,
    since no other parameter can be raised anyway.
    """
    from .generator import jacobian_analysis, sample_point

    levels = compute_levels(m)
    top = [q for q in m.params if levels[q] is not None and levels[q] == levels.max_level]
    local = jacobian_analysis(m, sample_point(m, seed, prime), prime).local if top else ()
    return assign_weights_standard(levels, local)


def groebner_for(system: PolySystem, w: WeightMap | None, strategy: str, timeout=None):
    """Basis of ``system`` under the requested weighting; returns (basis, stats, system used)."""
    if w is None or w.is_identity():
        S = system
        o = S.ordering()
    elif strategy == "substitute":
        S = system.substitute_weights(w)
        o = S.ordering()
    else:
        S = system
        o = S.ordering("weighted", S.variable_weights(w))
    basis, stats = f4(S.to_fp(o), timeout=timeout)
    return basis, stats, S


def global_verdicts(
    basis: GroebnerBasis,
    ss: SpecializedSystem | None,
    system: PolySystem,
    symbols,
) -> tuple[dict[str, bool], dict[str, int], dict[str, str]]:
    """Whether each symbol's variable has a constant normal form (after raising to its recorded weight).

    Returns the verdicts, the constant values found and a printable normal form per symbol.
    Without ``ss`` a symbol is its own variable.
    """
    ring = basis.ring
    rec = system.weights or {}
    out: dict[str, bool] = {}
    values: dict[str, int] = {}
    evidence: dict[str, str] = {}
    for sym in symbols:
        var = ss.symbol_variable(sym) if ss is not None else sym
        if var not in ring.variables:
            raise KeyError(f"{sym} has no variable in the basis ring")
        k = rec.get(var, 1)
        exps = [0] * ring.n
        exps[ring.variables.index(var)] = k
        nf = basis.normal_form(ring.poly({tuple(exps): 1}))
        head = var if k == 1 else f"{var}^{k}"
        if nf.is_constant():
            out[sym] = True
            values[sym] = nf.constant_value()
            evidence[sym] = f"NF({head}) = {values[sym]}"
        else:
            out[sym] = False
            text = nf.to_str()
            evidence[sym] = f"NF({head}) = " + (text if len(text) <= 200 else text[:200] + " ...")
    return out, values, evidence


def identify(m: Model, config: IdentConfig | None = None, **kw) -> IdentReport:
    """Run the whole pipeline and classify every state and parameter as global, local or none."""
    cfg = config or IdentConfig(**kw)
    t0 = time.monotonic()
    ss = generate(
        m,
        prime=cfg.prime,
        seed=cfg.seed,
        bounds=cfg.bounds,
        overrides=cfg.overrides,
        fix_nonidentifiable=cfg.fix_nonidentifiable,
    )
    t_gen = time.monotonic()
    w = model_weights(m, cfg.weights, ss.local, cfg.zaux_weight)
    symbols = list(m.states) + list(m.params)
    verdicts = {s: ("local" if s in ss.local and s not in ss.fixed else "none") for s in symbols}
    evidence = {}
    for s in symbols:
        if s in ss.fixed:
            evidence[s] = f"fixed to its sampled value {ss.fixed[s]}"
        elif s not in ss.local:
            evidence[s] = "Jacobian rank does not drop without this column"
    remaining = None if cfg.timeout is None else max(0.0, cfg.timeout - (time.monotonic() - t0))
    report = IdentReport(
        m.name,
        verdicts,
        w.nontrivial(),
        cfg,
        F4Stats(),
        False,
        0.0,
        ss.system.num_polys,
        ss.system.num_vars,
        ss.local,
        dict(ss.fixed),
        evidence=evidence,
        timings_ms={"generate": (t_gen - t0) * 1000},
    )
    try:
        basis, stats, used = groebner_for(ss.system, w, cfg.strategy, remaining)
    except GBTimeout as exc:
        report.stats = exc.stats
        report.seconds = time.monotonic() - t0
        report.timings_ms["groebner"] = (time.monotonic() - t_gen) * 1000
        return report
    if basis.is_unit():
        raise RuntimeError("specialized system is inconsistent: the sampled point is not a solution")
    candidates = [s for s in symbols if verdicts[s] == "local"]
    report.timings_ms["groebner"] = (time.monotonic() - t_gen) * 1000
    glob, values, ev = global_verdicts(basis, ss, used, candidates)
    evidence.update(ev)
    for s in candidates:
        if glob[s]:
            verdicts[s] = "global"
    report.stats = stats
    report.completed = True
    report.values = values
    report.seconds = time.monotonic() - t0
    return report
