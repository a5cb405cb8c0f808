"""Bundled models and the Jason-210 raw polynomial system."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .groebner.field import DEFAULT_PRIME
from .model import Model, ModelError, parse_model
from .polysys import PolySystem

LIGHT = ("chemical", "seir", "seir2", "seirp", "intro", "sian_example", "goodwin")
HEAVY = ("ssaair", "pharm", "hpv1", "hpv2", "nfkb", "seiqrdc", "sirsforced", "siraqj")
OTHER = ("linear",)

ALIASES = {
    "ex:intro": "intro",
    "ex:sian-example": "sian_example",
    "sian-example": "sian_example",
    "chemical-network": "chemical",
    "hpv": "hpv1",
    "hpv-1": "hpv1",
    "hpv-2": "hpv2",
    "jason-210": "jason210",
}


class ModelNotFound(ModelError, KeyError):
    def __str__(self):
        return str(self.args[0])


def model_names() -> tuple[str, ...]:
    return LIGHT + HEAVY + OTHER


def tier(name: str) -> str:
    name = ALIASES.get(name, name)
    if name in LIGHT or name in OTHER:
        return "light"
    if name in HEAVY or name == "jason210":
        return "heavy"
    raise ModelNotFound(f"no builtin model named {name!r}")


@lru_cache(maxsize=None)
def get_model(name: str) -> Model:
    key = ALIASES.get(name, name)
    if key not in model_names():
        raise ModelNotFound(f"no builtin model named {name!r}")
    text = resources.files("identgb.data").joinpath(f"{key}.model").read_text()
    return parse_model(text)


def builtin_models(tier_name: str | None = None) -> list[Model]:
    """All bundled ODE models, optionally restricted to one tier ("light" or "heavy")."""
    if tier_name is None:
        names = model_names()
    elif tier_name == "light":
        names = LIGHT
    elif tier_name == "heavy":
        names = HEAVY
    else:
        raise ValueError(f"unknown tier {tier_name!r}")
    return [get_model(n) for n in names]


def jason210(prime: int = DEFAULT_PRIME) -> PolySystem:
    """The three-generator Jason-210 system in x1..x8 (no ODE form)."""
    names = tuple(f"x{i}" for i in range(1, 9))

    def mono(**e):
        return tuple(e.get(v, 0) for v in names)

    f1 = {
        mono(x1=2, x3=4): 1,
        mono(x1=1, x2=1, x3=2, x5=2): 1,
        mono(x1=1, x2=1, x3=1, x4=1, x5=1, x7=1): 1,
        mono(x1=1, x2=1, x3=1, x4=1, x6=1, x8=1): 1,
        mono(x1=1, x2=1, x4=2, x6=2): 1,
        mono(x2=2, x4=4): 1,
    }
    return PolySystem(names, [f1, {mono(x2=6): 1}, {mono(x1=6): 1}], prime, (), None, "jason210")
