"""Call-by-name calculus: beta anywhere, choice only in cbn-surface contexts.

Surface contexts ``S ::= [] | \\x.S | S M`` never enter an argument; head
contexts ``H ::= \\x.H | K``, ``K ::= [] | K M`` are the prefix of leading
lambdas followed by the application spine.
"""

from __future__ import annotations

from functools import lru_cache

from ..multidist import MultiDist
from ..terms import App, Choice, Lam, Term
from .base import Redex, checked_step


@lru_cache(maxsize=200_000)
def cbn_redexes(t: Term) -> tuple[Redex, ...]:
    out: list[Redex] = []
    _walk(t, (), True, True, True, out)
    return tuple(out)


def _walk(t: Term, pos: tuple, surface: bool, head: bool, lam_prefix: bool, out: list[Redex]) -> None:
    # lam_prefix: still inside the leading lambdas, where H may descend into a body
    match t:
        case App(fun, arg):
            if isinstance(fun, Lam):
                out.append(Redex(pos, "beta_cbn", surface, head=head))
            _walk(fun, pos + ("fun",), surface, head, False, out)
            _walk(arg, pos + ("arg",), False, False, False, out)
        case Lam(_, body):
            _walk(body, pos + ("body",), surface, head and lam_prefix, lam_prefix, out)
        case Choice(l, r):
            if surface:
                out.append(Redex(pos, "oplus", True, head=head))
            _walk(l, pos + ("left",), False, False, False, out)
            _walk(r, pos + ("right",), False, False, False, out)


def cbn_step(t: Term, redex: Redex) -> MultiDist:
    return checked_step(t, redex, cbn_redexes(t))


def head_redex(t: Term) -> Redex | None:
    for r in cbn_redexes(t):
        if r.head:
            return r
    return None


def is_head_nf(t: Term) -> bool:
    return head_redex(t) is None
