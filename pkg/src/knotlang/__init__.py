"""knotlang: Landin's Knot under three typing disciplines, with typed closure conversion."""

from .cconv import closure_convert, convert_type, subst_type, typecheck_target
from .context import EMPTY, Context
from .errors import ErrorKind, KnotError, ParseError, SortError, TypingError
from .sorts import is_full_ground, sort_of_source, sort_of_target
from .syntax import free_vars, parse_source, parse_target, pretty
from .typecheck import Mode, explain, typecheck_source

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "Context",
    "ErrorKind",
    "KnotError",
    "Mode",
    "ParseError",
    "SortError",
    "TypingError",
    "closure_convert",
    "convert_type",
    "explain",
    "free_vars",
    "is_full_ground",
    "parse_source",
    "parse_target",
    "pretty",
    "sort_of_source",
    "sort_of_target",
    "subst_type",
    "typecheck_source",
    "typecheck_target",
]
