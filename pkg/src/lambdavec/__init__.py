"""Interpreter, type checker and metatheory audits for a vectorial lambda-calculus."""

from .scalar import Scalar, parse_scalar
from .syntax import (
    Abs, App, Arrow, Forall, Scale, Sum, TScale, TSum, TVar, TyAbs, TyApp, Var, Zero,
)
from .parse import ParseError, parse_program, parse_term, parse_type, show_term, show_type
from .checker import Derivation, TypingError, check, infer, replay
from .rewrite import FuelExhausted, normalize, normalize_no_F, one_step
from .typesys import canon, equiv, order_leq, preceq

__all__ = [
    "Scalar", "parse_scalar",
    "Abs", "App", "Arrow", "Forall", "Scale", "Sum", "TScale", "TSum", "TVar", "TyAbs",
    "TyApp", "Var", "Zero",
    "ParseError", "parse_program", "parse_term", "parse_type", "show_term", "show_type",
    "Derivation", "TypingError", "check", "infer", "replay",
    "FuelExhausted", "normalize", "normalize_no_F", "one_step",
    "canon", "equiv", "order_leq", "preceq",
]

__version__ = "0.1.0"
