"""Redex enumeration and single steps for the three calculi, selected by tag."""

from __future__ import annotations

from typing import Callable, Optional

from ..multidist import MultiDist
from ..terms import CALCULI, Term
from .bang import affine_check, bang_redexes, bang_step, is_affine
from .base import InvalidRedexError, Redex, contract, pick_first
from .cbn import cbn_redexes, cbn_step, head_redex, is_head_nf
from .cbv import cbv_nf_kind, cbv_redexes, cbv_step

_REDEXES = {"cbv": cbv_redexes, "cbn": cbn_redexes, "bang": bang_redexes}

__all__ = [
    "InvalidRedexError",
    "Redex",
    "affine_check",
    "bang_redexes",
    "bang_step",
    "beta_redexes",
    "cbn_redexes",
    "cbn_step",
    "cbv_nf_kind",
    "cbv_redexes",
    "cbv_step",
    "contract",
    "head_redex",
    "is_affine",
    "is_head_nf",
    "redexes",
    "selector",
    "step",
]


def _check(calculus: str) -> None:
    if calculus not in CALCULI:
        raise ValueError(f"unknown calculus {calculus!r}")


def redexes(t: Term, calculus: str) -> tuple[Redex, ...]:
    _check(calculus)
    return _REDEXES[calculus](t)


def beta_redexes(t: Term, calculus: str) -> tuple[Redex, ...]:
    return tuple(r for r in redexes(t, calculus) if r.is_beta)


def step(t: Term, redex: Redex, calculus: str) -> MultiDist:
    _check(calculus)
    for r in _REDEXES[calculus](t):
        if r.position == redex.position and r.kind == redex.kind:
            return contract(t, r)
    raise InvalidRedexError(f"{redex.kind} at {list(redex.position)} is not a redex here")


# Which redexes each redex class admits; "any" is the unrestricted relation.
_CLASSES: dict[str, Callable[[Redex], bool]] = {
    "any": lambda r: True,
    "surface": lambda r: r.surface,
    "deep": lambda r: not r.surface,
    "left": lambda r: bool(r.left),
    "head": lambda r: bool(r.head),
    "beta": lambda r: r.is_beta,
    "oplus": lambda r: not r.is_beta,
}

CLASS_CALCULI = {"left": ("cbv",), "head": ("cbn",)}


def redexes_of_class(t: Term, calculus: str, cls: str) -> list[Redex]:
    keep = _CLASSES[cls]
    return [r for r in redexes(t, calculus) if keep(r)]


def selector(calculus: str, cls: str) -> Callable[[Term], Optional[Redex]]:
    """Leftmost-outermost redex of class ``cls`` (or None) for each term."""
    if cls not in _CLASSES:
        raise ValueError(f"unknown redex class {cls!r}")
    allowed = CLASS_CALCULI.get(cls)
    if allowed and calculus not in allowed:
        raise ValueError(f"{cls} reduction is not defined for {calculus}")
    return lambda t: pick_first(redexes_of_class(t, calculus, cls))
