"""Concrete syntax reader.

Grammar (choice binds loosest and does not associate, application is
left-associative, ``!`` prefixes an atom)::

    term   ::= body [ "(+)" body ]
    body   ::= lambda | app
    lambda ::= "\\" binder+ "." term          binder ::= ["!"] ident
    app    ::= atom+ [lambda]
    atom   ::= ident | "(" term ")" | "!" atom

``--`` starts a line comment.  ``λ`` and ``⊕`` are accepted as aliases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import (
    CALCULI,
    App,
    Bang,
    BangLam,
    Choice,
    Lam,
    Term,
    Var,
    subst,
    uses_bang,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ForeignConstructorError(ValueError):
    """A constructor that does not belong to the requested calculus."""


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<oplus>\(\+\)|⊕)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<lam>\\|λ)
  | (?P<bang>!)
  | (?P<dot>\.)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", line, i - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, i - line_start + 1))
        i = m.end()
    tokens.append(Token("eof", "", line, i - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_reserved: bool):
        self.tokens = tokenize(text)
        self.i = 0
        self.allow_reserved = allow_reserved

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def expect(self, kind: str) -> Token:
        tok = self.tok
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"expected {kind}, found {found!r}")
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.expect("ident")
        if tok.text.startswith("_") and not self.allow_reserved:
            raise self.error(f"identifier {tok.text!r} is reserved", tok)
        return tok.text

    def parse(self) -> Term:
        t = self.term()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return t

    def term(self) -> Term:
        left = self.body()
        if self.tok.kind != "oplus":
            return left
        self.i += 1
        right = self.body()
        if self.tok.kind == "oplus":
            raise self.error("choice is not associative; add parentheses")
        return Choice(left, right)

    def body(self) -> Term:
        if self.tok.kind == "lam":
            return self.lam()
        return self.app()

    def lam(self) -> Term:
        self.expect("lam")
        binders = []
        while self.tok.kind in ("ident", "bang"):
            banged = self.tok.kind == "bang"
            if banged:
                self.i += 1
            binders.append((banged, self.ident()))
        if not binders:
            raise self.error("expected a binder after lambda")
        self.expect("dot")
        t = self.term()
        for banged, name in reversed(binders):
            t = BangLam(name, t) if banged else Lam(name, t)
        return t

    def app(self) -> Term:
        t = self.atom()
        while True:
            if self.tok.kind in ("ident", "lparen", "bang"):
                t = App(t, self.atom())
            elif self.tok.kind == "lam":
                return App(t, self.lam())
            else:
                return t

    def atom(self) -> Term:
        kind = self.tok.kind
        if kind == "ident":
            return Var(self.ident())
        if kind == "bang":
            self.i += 1
            return Bang(self.atom())
        if kind == "lparen":
            self.i += 1
            t = self.term()
            self.expect("rparen")
            return t
        found = self.tok.text or "end of input"
        raise self.error(f"expected a term, found {found!r}")


def parse(
    text: str,
    calculus: str = "cbv",
    *,
    check_affine: bool = True,
    prelude: dict[str, Term] | None = None,
    allow_reserved: bool = False,
) -> Term:
    """Read a term of ``calculus``.

    Free identifiers naming ``prelude`` entries are replaced by their
    definitions.  Bang terms are affinity-checked unless ``check_affine`` is
    false.
    """
    if calculus not in CALCULI:
        raise ValueError(f"unknown calculus {calculus!r}")
    t = _Parser(text, allow_reserved).parse()
    if prelude:
        t = expand_prelude(t, prelude)
    check_calculus(t, calculus)
    if calculus == "bang" and check_affine:
        from .calculi.bang import affine_check

        ok, violations = affine_check(t)
        if not ok:
            raise ForeignConstructorError("term is not affine: " + "; ".join(violations))
    return t


def check_calculus(t: Term, calculus: str) -> None:
    if calculus in ("cbv", "cbn") and uses_bang(t):
        raise ForeignConstructorError(f"'!' constructors are not part of {calculus}")


def expand_prelude(t: Term, prelude: dict[str, Term]) -> Term:
    from .terms import free_vars

    for name in sorted(free_vars(t)):
        if name in prelude:
            t = subst(t, name, prelude[name])
    return t


def parse_prelude(text: str) -> dict[str, Term]:
    """Read ``NAME = term`` definitions, one per line; later ones may use earlier ones."""
    defs: dict[str, Term] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("--", 1)[0].strip()
        if not line:
            continue
        name, sep, body = line.partition("=")
        name = name.strip()
        if not sep or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", name):
            raise ParseError("expected 'NAME = term'", lineno, 1)
        try:
            t = _Parser(body, False).parse()
        except ParseError as exc:
            raise ParseError(str(exc).split(": ", 1)[1], lineno, exc.column) from None
        defs[name] = expand_prelude(t, defs)
    return defs
