"""Groebner bases over prime fields."""

from .buchberger import buchberger
from .f4 import F4Stats, GBTimeout, f4
from .field import DEFAULT_PRIME, check_prime, inv_mod, is_prime
from .ordering import MonomialOrdering, degrevlex, diff_degrevlex, weighted
from .poly import FpPolynomial, GroebnerBasis, PolyRing, normal_form, reduce_basis, spoly

__all__ = [
    "DEFAULT_PRIME",
    "F4Stats",
    "FpPolynomial",
    "GBTimeout",
    "GroebnerBasis",
    "MonomialOrdering",
    "PolyRing",
    "buchberger",
    "check_prime",
    "degrevlex",
    "diff_degrevlex",
    "f4",
    "inv_mod",
    "is_prime",
    "normal_form",
    "reduce_basis",
    "spoly",
    "weighted",
]


def compare(m1, m2, ordering: MonomialOrdering) -> int:
    """-1, 0 or 1 comparing two exponent vectors under ``ordering``."""
    return ordering.compare(m1, m2)
