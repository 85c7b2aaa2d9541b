from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..multidist import HALF, MultiDist
from ..terms import App, Bang, BangLam, Choice, Lam, Position, Term, replace_at, subst, subterm_at

KINDS = ("beta_v", "beta_lin", "beta_bang", "beta_cbn", "oplus")


class InvalidRedexError(ValueError):
    pass


@dataclass(frozen=True)
class Redex:
    """A redex occurrence: where it is, which rule fires, and its context class.

    ``left`` is only meaningful in cbv and ``head`` only in cbn; both are
    ``None`` in the linear calculus.
    """

    position: Position
    kind: str
    surface: bool
    left: Optional[bool] = None
    head: Optional[bool] = None

    @property
    def deep(self) -> bool:
        return not self.surface

    @property
    def internal(self) -> Optional[bool]:
        if self.left is not None:
            return not self.left
        if self.head is not None:
            return not self.head
        return None

    @property
    def is_beta(self) -> bool:
        return self.kind != "oplus"

    def flags(self) -> dict[str, Optional[bool]]:
        return {
            "surface": self.surface,
            "left": self.left,
            "head": self.head,
            "deep": self.deep,
            "internal": self.internal,
        }

    def to_json(self) -> dict:
        return {"position": list(self.position), "kind": self.kind, **self.flags()}


def contract(t: Term, redex: Redex) -> MultiDist:
    """Fire ``redex`` in ``t`` without checking it belongs to a calculus."""
    sub = subterm_at(t, redex.position)
    if redex.kind == "oplus":
        if not isinstance(sub, Choice):
            raise InvalidRedexError(f"no choice at {redex.position}")
        return MultiDist(
            (
                (HALF, replace_at(t, redex.position, sub.left)),
                (HALF, replace_at(t, redex.position, sub.right)),
            )
        )
    match sub:
        case App(Lam(x, body), arg) if redex.kind != "beta_bang":
            return MultiDist.point(replace_at(t, redex.position, subst(body, x, arg)))
        case App(BangLam(x, body), Bang(arg)) if redex.kind == "beta_bang":
            return MultiDist.point(replace_at(t, redex.position, subst(body, x, arg)))
    raise InvalidRedexError(f"no {redex.kind} redex at {redex.position}")


def checked_step(t: Term, redex: Redex, available: Sequence[Redex]) -> MultiDist:
    for r in available:
        if r.position == redex.position and r.kind == redex.kind:
            return contract(t, r)
    raise InvalidRedexError(f"{redex.kind} at {list(redex.position)} is not a redex here")


def pick_first(redexes: Sequence[Redex]) -> Optional[Redex]:
    return redexes[0] if redexes else None
