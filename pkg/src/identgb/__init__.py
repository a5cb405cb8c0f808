"""Weighted monomial orderings for Groebner bases of identifiability systems."""

from .model import Model, ModelError, ParseError, RationalExpr, parse_model, validate_model, format_model

__version__ = "0.1.0"

__all__ = ["Model", "ModelError", "ParseError", "RationalExpr", "parse_model", "validate_model", "format_model"]
