"""Hand-written recursive-descent parser for the source and target grammars.

Source grammar (whitespace-insensitive, ``--`` starts a line comment)::

    term   ::= "lam" ("[" nat "]")? ident ":" type "." term
             | "let" ident "=" term "in" term
             | assign ( ";" term )?
    assign ::= app ( ":=" app )?
    app    ::= atom+
    atom   ::= ident | nat | "unit" | "new" atom | "!" atom
             | "<" term "," term ">" | "proj1" atom | "proj2" atom | "(" term ")"
    type   ::= btype ( "->" ( "[" nat "]" )? type )?
    btype  ::= "Nat" | "Unit" | "Ref" btype | "<" type "x" type ">" | "(" type ")"

The target grammar adds ``pack <type, term> as type``,
``unpack <a, x> = term in term``, existential types
``exists a : Type n . type`` and type variables.  In target programs a run of
directly nested ``lam`` binders is one piece of multi-parameter code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError
from .ast import (
    NAT,
    UNIT_T,
    App,
    Arrow,
    Assign,
    Code,
    Deref,
    Exists,
    Lam,
    Let,
    Lit,
    Loc,
    New,
    Pack,
    Pair,
    Product,
    Proj,
    Ref,
    Seq,
    Term,
    TVar,
    Type,
    UnitV,
    Unpack,
    Var,
)

KEYWORDS = frozenset(
    {"lam", "let", "in", "unit", "new", "pack", "unpack", "as", "exists", "Nat", "Unit", "Ref", "Type"}
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<proj>proj[0-9]+(?![A-Za-z0-9_']))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<nat>[0-9]+)
  | (?P<sym>:=|->|[():.;=!<>,\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "nat", "proj", "kw", "sym", "eof"
    text: str
    loc: Loc

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        loc = Loc(line, pos - line_start + 1)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", loc, frozenset())
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "ident" and lexeme in KEYWORDS:
            kind = "kw"
        if kind != "ws":
            tokens.append(Token(kind, lexeme, loc))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            line_start = pos + lexeme.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", Loc(line, pos - line_start + 1)))
    return tokens


_ATOM_START = {"(", "<", "!"}
_ATOM_KW = {"unit", "new", "pack", "unpack"}


class Parser:
    def __init__(self, text: str, target: bool = False):
        self.tokens = tokenize(text)
        self.pos = 0
        self.target = target

    # -- token helpers --

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def fail(self, *expected: str):
        t = self.tok
        raise ParseError(f"unexpected {t.describe()}", t.loc, frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail("identifier")
        return self.advance().text

    def nat(self) -> int:
        if self.tok.kind != "nat":
            self.fail("natural number")
        return int(self.advance().text)

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "nat", "proj"):
            return True
        if t.kind == "sym":
            return t.text in _ATOM_START
        if t.kind == "kw":
            return t.text in _ATOM_KW and (self.target or t.text in ("unit", "new"))
        return False

    # -- entry --

    def parse_program(self) -> Term:
        e = self.term()
        if self.tok.kind != "eof":
            self.fail("end of input", "';'", "':='")
        return e

    # -- terms --

    def term(self) -> Term:
        loc = self.tok.loc
        if self.at("lam"):
            return self.lam()
        if self.at("let"):
            self.advance()
            name = self.ident()
            self.expect("=")
            bound = self.term()
            self.expect("in")
            return Let(name, bound, self.term(), loc=loc)
        first = self.assign()
        if self.at(";"):
            self.advance()
            return Seq(first, self.term(), loc=loc)
        return first

    def lam(self) -> Term:
        loc = self.advance().loc
        level = None
        if self.at("["):
            self.advance()
            level = self.nat()
            self.expect("]")
        name = self.ident()
        self.expect(":")
        ty = self.type()
        self.expect(".")
        if self.target:
            if level is not None:
                raise ParseError("code takes no level annotation", loc, frozenset())
            # `lam x:A. lam y:B. e` folds; `lam x:A. (lam y:B. e)` does not
            nested = self.at("lam")
            body = self.term()
            if nested and isinstance(body, Code):
                return Code(((name, ty),) + body.params, body.body, loc=loc)
            return Code(((name, ty),), body, loc=loc)
        return Lam(name, ty, self.term(), level, loc=loc)

    def assign(self) -> Term:
        loc = self.tok.loc
        lhs = self.app()
        if self.at(":="):
            self.advance()
            return Assign(lhs, self.app(), loc=loc)
        return lhs

    def app(self) -> Term:
        loc = self.tok.loc
        if not self.starts_atom():
            expected = ["identifier", "natural number", "'unit'", "'new'", "'!'", "'<'", "'('", "'proj1'", "'proj2'"]
            if self.target:
                expected += ["'pack'", "'unpack'"]
            self.fail(*expected)
        e = self.atom()
        while self.starts_atom():
            e = App(e, self.atom(), loc=loc)
        return e

    def atom(self) -> Term:
        t = self.tok
        loc = t.loc
        if t.kind == "ident":
            self.advance()
            return Var(t.text, loc=loc)
        if t.kind == "nat":
            self.advance()
            return Lit(int(t.text), loc=loc)
        if t.kind == "proj":
            index = int(t.text[4:])
            if index not in (1, 2):
                raise ParseError(f"no projection {t.text}", loc, frozenset({"'proj1'", "'proj2'"}))
            self.advance()
            return Proj(index, self.atom(), loc=loc)
        if self.at("unit"):
            self.advance()
            return UnitV(loc=loc)
        if self.at("new"):
            self.advance()
            return New(self.atom(), loc=loc)
        if self.at("!"):
            self.advance()
            return Deref(self.atom(), loc=loc)
        if self.at("<"):
            self.advance()
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect(">")
            return Pair(left, right, loc=loc)
        if self.at("("):
            self.advance()
            e = self.term()
            self.expect(")")
            return e
        if self.at("pack"):
            self.advance()
            self.expect("<")
            witness = self.type()
            self.expect(",")
            payload = self.term()
            self.expect(">")
            self.expect("as")
            ty = self.type()
            if not isinstance(ty, Exists):
                raise ParseError("pack must be annotated with an existential type", loc, frozenset({"'exists'"}))
            return Pack(witness, payload, ty, loc=loc)
        if self.at("unpack"):
            self.advance()
            self.expect("<")
            tvar = self.ident()
            self.expect(",")
            var = self.ident()
            self.expect(">")
            self.expect("=")
            package = self.term()
            self.expect("in")
            return Unpack(tvar, var, package, self.term(), loc=loc)
        self.fail("term")

    # -- types --

    def type(self) -> Type:
        if self.target and self.at("exists"):
            self.advance()
            var = self.ident()
            if var == "x":
                self.fail("type variable name")
            self.expect(":")
            self.expect("Type")
            level = self.nat()
            self.expect(".")
            return Exists(var, level, self.type())
        dom = self.btype()
        if self.at("->"):
            self.advance()
            level = None
            if self.at("["):
                if self.target:
                    self.fail("type")
                self.advance()
                level = self.nat()
                self.expect("]")
            return Arrow(dom, self.type(), level)
        return dom

    def btype(self) -> Type:
        t = self.tok
        if self.at("Nat"):
            self.advance()
            return NAT
        if self.at("Unit"):
            self.advance()
            return UNIT_T
        if self.at("Ref"):
            self.advance()
            return Ref(self.btype())
        if self.at("<"):
            self.advance()
            left = self.type()
            if not (self.tok.kind == "ident" and self.tok.text == "x"):
                self.fail("'x'")
            self.advance()
            right = self.type()
            self.expect(">")
            return Product(left, right)
        if self.at("("):
            self.advance()
            ty = self.type()
            self.expect(")")
            return ty
        if self.target and t.kind == "ident" and t.text != "x":
            self.advance()
            return TVar(t.text)
        expected = ["'Nat'", "'Unit'", "'Ref'", "'<'", "'('"]
        if self.target:
            expected.append("type variable")
        self.fail(*expected)


def parse_source(text: str) -> Term:
    """Parse a source-language program; raises :class:`ParseError`."""
    return Parser(text).parse_program()


def parse_target(text: str) -> Term:
    """Parse a target-language program; raises :class:`ParseError`."""
    return Parser(text, target=True).parse_program()


def parse_type(text: str, target: bool = False) -> Type:
    p = Parser(text, target=target)
    ty = p.type()
    if p.tok.kind != "eof":
        p.fail("end of input")
    return ty
