"""Term syntax shared by the three calculi.

Terms are immutable.  Equality and hashing are up to alpha-equivalence: both
go through a nameless canonical key, so terms can be used directly as set
members and dictionary keys in reduction-graph searches.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

CALCULI = ("cbv", "cbn", "bang")

# Names used by the translations; never accepted in user input.
RESERVED_Z = "__z"
RESERVED_W = "__w"
RESERVED = frozenset({RESERVED_Z, RESERVED_W})

Position = tuple[str, ...]


class Term:
    __slots__ = ()

    @cached_property
    def key(self) -> str:
        """Nameless canonical encoding; equal for alpha-equivalent terms."""
        return _canonical(self, [])

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: Term) -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Lam(Term):
    var: str
    body: Term

    def __repr__(self) -> str:
        return f"Lam({self.var!r}, {self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class BangLam(Term):
    var: str
    body: Term

    def __repr__(self) -> str:
        return f"BangLam({self.var!r}, {self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class App(Term):
    fun: Term
    arg: Term

    def __repr__(self) -> str:
        return f"App({self.fun!r}, {self.arg!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Bang(Term):
    body: Term

    def __repr__(self) -> str:
        return f"Bang({self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Choice(Term):
    left: Term
    right: Term

    def __repr__(self) -> str:
        return f"Choice({self.left!r}, {self.right!r})"


def _canonical(t: Term, env: list[str]) -> str:
    match t:
        case Var(name):
            for depth, bound in enumerate(reversed(env)):
                if bound == name:
                    return f"#{depth}"
            return name
        case Lam(var, body):
            env.append(var)
            inner = _canonical(body, env)
            env.pop()
            return "\\" + inner
        case BangLam(var, body):
            env.append(var)
            inner = _canonical(body, env)
            env.pop()
            return "&" + inner
        case App(fun, arg):
            return f"({_canonical(fun, env)} {_canonical(arg, env)})"
        case Bang(body):
            return "!" + _canonical(body, env)
        case Choice(left, right):
            return f"[{_canonical(left, env)}|{_canonical(right, env)}]"
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(a: Term, b: Term) -> bool:
    return a.key == b.key


def size(t: Term) -> int:
    match t:
        case Var():
            return 1
        case Lam(_, body) | BangLam(_, body) | Bang(body):
            return 1 + size(body)
        case App(fun, arg):
            return 1 + size(fun) + size(arg)
        case Choice(left, right):
            return 1 + size(left) + size(right)
    raise TypeError(f"not a term: {t!r}")


def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case Lam(var, body) | BangLam(var, body):
            return free_vars(body) - {var}
        case Bang(body):
            return free_vars(body)
        case App(a, b) | Choice(a, b):
            return free_vars(a) | free_vars(b)
    raise TypeError(f"not a term: {t!r}")


def all_names(t: Term) -> frozenset[str]:
    """Free and bound names occurring anywhere in ``t``."""
    match t:
        case Var(name):
            return frozenset((name,))
        case Lam(var, body) | BangLam(var, body):
            return all_names(body) | {var}
        case Bang(body):
            return all_names(body)
        case App(a, b) | Choice(a, b):
            return all_names(a) | all_names(b)
    raise TypeError(f"not a term: {t!r}")


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def subst(t: Term, var: str, arg: Term) -> Term:
    """Capture-avoiding substitution ``t[arg/var]``."""
    return _subst(t, var, arg, free_vars(arg))


def _subst(t: Term, var: str, arg: Term, arg_fv: frozenset[str]) -> Term:
    match t:
        case Var(name):
            return arg if name == var else t
        case Lam(x, body) | BangLam(x, body):
            if x == var or var not in free_vars(body):
                return t
            if x in arg_fv:
                fresh = fresh_name(x, arg_fv | all_names(body) | {var})
                body = _subst(body, x, Var(fresh), frozenset((fresh,)))
                x = fresh
            return type(t)(x, _subst(body, var, arg, arg_fv))
        case Bang(body):
            return Bang(_subst(body, var, arg, arg_fv))
        case App(fun, a):
            return App(_subst(fun, var, arg, arg_fv), _subst(a, var, arg, arg_fv))
        case Choice(left, right):
            return Choice(_subst(left, var, arg, arg_fv), _subst(right, var, arg, arg_fv))
    raise TypeError(f"not a term: {t!r}")


def is_value(t: Term) -> bool:
    """CbV values: variables and (linear) abstractions.  A choice never is."""
    return isinstance(t, (Var, Lam))


# -- positions ---------------------------------------------------------------

def children(t: Term) -> list[tuple[str, Term]]:
    match t:
        case Lam(_, body) | BangLam(_, body):
            return [("body", body)]
        case Bang(body):
            return [("bang", body)]
        case App(fun, arg):
            return [("fun", fun), ("arg", arg)]
        case Choice(left, right):
            return [("left", left), ("right", right)]
    return []


def subterm_at(t: Term, pos: Position) -> Term:
    for step in pos:
        for sel, child in children(t):
            if sel == step:
                t = child
                break
        else:
            raise ValueError(f"invalid position {pos!r}")
    return t


def is_position(t: Term, pos: Position) -> bool:
    try:
        subterm_at(t, pos)
    except ValueError:
        return False
    return True


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    """Fill the hole at ``pos`` with ``new`` (capture allowed, as for contexts)."""
    if not pos:
        return new
    step, rest = pos[0], pos[1:]
    match t, step:
        case Lam(x, body), "body":
            return Lam(x, replace_at(body, rest, new))
        case BangLam(x, body), "body":
            return BangLam(x, replace_at(body, rest, new))
        case Bang(body), "bang":
            return Bang(replace_at(body, rest, new))
        case App(fun, arg), "fun":
            return App(replace_at(fun, rest, new), arg)
        case App(fun, arg), "arg":
            return App(fun, replace_at(arg, rest, new))
        case Choice(left, right), "left":
            return Choice(replace_at(left, rest, new), right)
        case Choice(left, right), "right":
            return Choice(left, replace_at(right, rest, new))
    raise ValueError(f"invalid position {pos!r}")


def subterms(t: Term, pos: Position = ()) -> Iterator[tuple[Position, Term]]:
    """Pre-order walk (node before children, left child first)."""
    yield pos, t
    for sel, child in children(t):
        yield from subterms(child, pos + (sel,))


def uses_bang(t: Term) -> bool:
    return any(isinstance(s, (Bang, BangLam)) for _, s in subterms(t))


# -- printing ------------------------------------------------------------------

_TOP, _CHOICE_L, _CHOICE_R, _FUN, _ARG, _BANG = range(6)


def show(t: Term) -> str:
    """Concrete syntax with minimal parentheses; ``parse(show(t)) == t``."""
    return _show(t, _TOP)


def _show(t: Term, ctx: int) -> str:
    match t:
        case Var(name):
            return name
        case Lam(x, body) | BangLam(x, body):
            bang = "!" if isinstance(t, BangLam) else ""
            text = f"\\{bang}{x}. {_show(body, _TOP)}"
            return text if ctx in (_TOP, _CHOICE_R) else f"({text})"
        case App(fun, arg):
            text = f"{_show(fun, _FUN)} {_show(arg, _ARG)}"
            return f"({text})" if ctx in (_ARG, _BANG) else text
        case Bang(body):
            return "!" + _show(body, _BANG)
        case Choice(left, right):
            text = f"{_show(left, _CHOICE_L)} (+) {_show(right, _CHOICE_R)}"
            return text if ctx == _TOP else f"({text})"
    raise TypeError(f"not a term: {t!r}")
