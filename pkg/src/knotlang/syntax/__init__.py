"""Source and target syntax: AST, parser, pretty-printer, scoping."""

from .ast import *  # noqa: F401,F403
from .ast import Loc, Term, Type
from .parser import parse_source, parse_target, parse_type, tokenize
from .pretty import pretty, pretty_type
from .scope import all_names, free_vars

__all__ = [
    "Loc",
    "Term",
    "Type",
    "all_names",
    "free_vars",
    "parse_source",
    "parse_target",
    "parse_type",
    "pretty",
    "pretty_type",
    "tokenize",
]
