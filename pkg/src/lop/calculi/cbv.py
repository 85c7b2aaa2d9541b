"""Call-by-value calculus: beta_v anywhere, choice only in surface contexts.

Surface contexts are ``S ::= [] | M S | S M`` (never under a lambda or a
choice); left contexts are ``L ::= [] | L M | V L``.
"""

from __future__ import annotations

from functools import lru_cache

from ..multidist import MultiDist
from ..terms import App, Choice, Lam, Term, is_value
from .base import Redex, checked_step


@lru_cache(maxsize=200_000)
def cbv_redexes(t: Term) -> tuple[Redex, ...]:
    """All redexes of ``t`` in pre-order (outermost first, then left to right)."""
    out: list[Redex] = []
    _walk(t, (), True, True, out)
    return tuple(out)


def _walk(t: Term, pos: tuple, surface: bool, left: bool, out: list[Redex]) -> None:
    match t:
        case App(fun, arg):
            if isinstance(fun, Lam) and is_value(arg):
                out.append(Redex(pos, "beta_v", surface, left))
            _walk(fun, pos + ("fun",), surface, left, out)
            _walk(arg, pos + ("arg",), surface, left and is_value(fun), out)
        case Lam(_, body):
            _walk(body, pos + ("body",), False, False, out)
        case Choice(l, r):
            if surface:
                out.append(Redex(pos, "oplus", True, left))
            _walk(l, pos + ("left",), False, False, out)
            _walk(r, pos + ("right",), False, False, out)


def cbv_step(t: Term, redex: Redex) -> MultiDist:
    return checked_step(t, redex, cbv_redexes(t))


def cbv_nf_kind(t: Term) -> str:
    """``normal`` (no redex), ``surface_normal_only`` (only deep ones) or ``reducible``."""
    rs = cbv_redexes(t)
    if not rs:
        return "normal"
    if any(r.surface for r in rs):
        return "reducible"
    return "surface_normal_only"
