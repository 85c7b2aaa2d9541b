"""Linear calculus with ``!``: beta anywhere, choice only outside ``!`` and ``(+)``.

Surface contexts are ``S ::= [] | M S | S M | \\x.S | \\!x.S``; going under
a lambda stays surface here.
"""

from __future__ import annotations

from functools import lru_cache

from ..multidist import MultiDist
from ..terms import App, Bang, BangLam, Choice, Lam, Term, Var
from .base import Redex, checked_step


def affine_check(t: Term) -> tuple[bool, list[str]]:
    """Every linear binder ``\\x.P`` uses ``x`` at most once in ``P``, never under ``!``.

    Bang binders are unconstrained.
    """
    violations: list[str] = []
    _affine(t, violations)
    return not violations, violations


def _affine(t: Term, violations: list[str]) -> None:
    match t:
        case Lam(x, body):
            n, under_bang = _occurrences(body, x, False)
            if n > 1:
                violations.append(f"\\{x} binds {n} occurrences")
            if under_bang:
                violations.append(f"\\{x} occurs under '!'")
            _affine(body, violations)
        case BangLam(_, body) | Bang(body):
            _affine(body, violations)
        case App(a, b) | Choice(a, b):
            _affine(a, violations)
            _affine(b, violations)


def _occurrences(t: Term, x: str, banged: bool) -> tuple[int, bool]:
    match t:
        case Var(name):
            return (1, banged) if name == x else (0, False)
        case Lam(y, body) | BangLam(y, body):
            return (0, False) if y == x else _occurrences(body, x, banged)
        case Bang(body):
            return _occurrences(body, x, True)
        case App(a, b) | Choice(a, b):
            n1, u1 = _occurrences(a, x, banged)
            n2, u2 = _occurrences(b, x, banged)
            return n1 + n2, u1 or u2
    raise TypeError(f"not a term: {t!r}")


def is_affine(t: Term) -> bool:
    return affine_check(t)[0]


@lru_cache(maxsize=200_000)
def bang_redexes(t: Term) -> tuple[Redex, ...]:
    """All redexes in pre-order; ``left``/``head`` are not defined here."""
    out: list[Redex] = []
    _walk(t, (), True, out)
    return tuple(out)


def _walk(t: Term, pos: tuple, surface: bool, out: list[Redex]) -> None:
    match t:
        case App(fun, arg):
            if isinstance(fun, Lam):
                out.append(Redex(pos, "beta_lin", surface))
            elif isinstance(fun, BangLam) and isinstance(arg, Bang):
                out.append(Redex(pos, "beta_bang", surface))
            _walk(fun, pos + ("fun",), surface, out)
            _walk(arg, pos + ("arg",), surface, out)
        case Lam(_, body) | BangLam(_, body):
            _walk(body, pos + ("body",), surface, out)
        case Bang(body):
            _walk(body, pos + ("bang",), False, out)
        case Choice(l, r):
            if surface:
                out.append(Redex(pos, "oplus", True))
            _walk(l, pos + ("left",), False, out)
            _walk(r, pos + ("right",), False, out)


def bang_step(t: Term, redex: Redex) -> MultiDist:
    return checked_step(t, redex, bang_redexes(t))


def is_surface_normal(t: Term) -> bool:
    return not any(r.surface for r in bang_redexes(t))
