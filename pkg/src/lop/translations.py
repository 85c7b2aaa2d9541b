"""Translations between the calculi, and step-by-step simulation checks.

* ``translate_cbv``: probabilistic cbv into the plain lambda calculus, with
  ``M (+) N`` read as ``__z M N`` (simple) or ``__z (\\__w.M) (\\__w.N)``
  (surface-preserving).
* ``translate_bang``: the linear calculus into its choice-free fragment,
  ``M (+) N`` becoming ``__z !M !N``.
* ``translate_cbn``: the call-by-name embedding into the linear calculus,
  banging every argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .calculi import redexes, step
from .calculi.bang import affine_check, is_surface_normal
from .calculi.base import Redex
from .calculi.cbn import is_head_nf
from .multidist import MultiDist
from .terms import (
    RESERVED,
    RESERVED_W,
    RESERVED_Z,
    App,
    Bang,
    BangLam,
    Choice,
    Lam,
    Position,
    Term,
    Var,
    free_vars,
    is_value,
    show,
    uses_bang,
)

VARIANTS = ("simple", "surface-preserving")
SIMULATIONS = ("cbv-simple", "cbv-surface", "bang", "cbn")


class ReservedNameError(ValueError):
    pass


def _no_reserved(t: Term) -> None:
    clash = free_vars(t) & RESERVED
    if clash:
        raise ReservedNameError(f"reserved name(s) {sorted(clash)} occur free in the input")


def translate_cbv(t: Term, variant: str = "simple") -> Term:
    if variant not in VARIANTS:
        raise ValueError(f"unknown cbv translation variant {variant!r}")
    if uses_bang(t):
        raise ValueError("cbv input contains '!' constructors")
    _no_reserved(t)
    return _cbv(t, variant == "surface-preserving")


def _cbv(t: Term, thunk: bool) -> Term:
    match t:
        case Var():
            return t
        case Lam(x, body):
            return Lam(x, _cbv(body, thunk))
        case App(f, a):
            return App(_cbv(f, thunk), _cbv(a, thunk))
        case Choice(l, r):
            l2, r2 = _cbv(l, thunk), _cbv(r, thunk)
            if thunk:
                l2, r2 = Lam(RESERVED_W, l2), Lam(RESERVED_W, r2)
            return App(App(Var(RESERVED_Z), l2), r2)
    raise TypeError(f"not a cbv term: {t!r}")


def translate_bang(t: Term) -> Term:
    ok, violations = affine_check(t)
    if not ok:
        raise ValueError("input is not affine: " + "; ".join(violations))
    _no_reserved(t)
    return _bang(t)


def _bang(t: Term) -> Term:
    match t:
        case Var():
            return t
        case Lam(x, body):
            return Lam(x, _bang(body))
        case BangLam(x, body):
            return BangLam(x, _bang(body))
        case Bang(body):
            return Bang(_bang(body))
        case App(f, a):
            return App(_bang(f), _bang(a))
        case Choice(l, r):
            return App(App(Var(RESERVED_Z), Bang(_bang(l))), Bang(_bang(r)))
    raise TypeError(f"not a term: {t!r}")


def translate_cbn(t: Term) -> Term:
    if uses_bang(t):
        raise ValueError("cbn input contains '!' constructors")
    return _cbn(t)


def _cbn(t: Term) -> Term:
    match t:
        case Var():
            return t
        case Lam(x, body):
            return BangLam(x, _cbn(body))
        case App(f, a):
            return App(_cbn(f), Bang(_cbn(a)))
        case Choice(l, r):
            return Choice(_cbn(l), _cbn(r))
    raise TypeError(f"not a cbn term: {t!r}")


def translate_md(m: MultiDist, f: Callable[[Term], Term]) -> MultiDist:
    return MultiDist(tuple((p, f(t)) for p, t in m.entries))


# ---------------------------------------------------------------- simulation


@dataclass(frozen=True)
class _Sim:
    source: str
    target: str
    translate: Callable[[Term], Term]
    choice_path: dict[str, Position]  # where a choice branch lands in the image
    arg_path: Position  # where an application argument lands
    kinds: dict[str, str]  # source redex kind -> target redex kind
    surface: bool  # whether surface flags must agree


_SIMS = {
    "cbv-simple": _Sim("cbv", "cbv", lambda t: translate_cbv(t, "simple"),
                       {"left": ("fun", "arg"), "right": ("arg",)}, ("arg",), {"beta_v": "beta_v"}, False),
    "cbv-surface": _Sim("cbv", "cbv", lambda t: translate_cbv(t, "surface-preserving"),
                        {"left": ("fun", "arg", "body"), "right": ("arg", "body")}, ("arg",),
                        {"beta_v": "beta_v"}, True),
    "bang": _Sim("bang", "bang", translate_bang,
                 {"left": ("fun", "arg", "bang"), "right": ("arg", "bang")}, ("arg",),
                 {"beta_lin": "beta_lin", "beta_bang": "beta_bang"}, True),
    "cbn": _Sim("cbn", "bang", translate_cbn, {"left": ("left",), "right": ("right",)}, ("arg", "bang"),
                {"beta_cbn": "beta_bang", "oplus": "oplus"}, True),
}


def source_calculus(which: str) -> str:
    return _SIMS[which].source


def image_position(t: Term, pos: Position, which: str) -> Position:
    """Position in the translation of ``t`` corresponding to ``pos`` in ``t``."""
    sim = _SIMS[which]
    out: list[str] = []
    for sel in pos:
        match t:
            case Choice(l, r):
                out.extend(sim.choice_path[sel])
                t = l if sel == "left" else r
            case App(f, a):
                if sel == "fun":
                    out.append("fun")
                    t = f
                else:
                    out.extend(sim.arg_path)
                    t = a
            case Lam(_, body) | BangLam(_, body) | Bang(body):
                out.append(sel)
                t = body
            case _:
                raise ValueError(f"invalid position {pos}")
    return tuple(out)


@dataclass
class SimulationReport:
    which: str
    term: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "check": "simulate",
            "which": self.which,
            "term": self.term,
            "verdict": "pass" if self.passed else "fail",
            "checked": self.checked,
            "witness": [],
            "failures": self.failures,
        }


def check_simulation(term: Term, which: str, steps: int = 2) -> SimulationReport:
    """Match source steps and target steps through the translation.

    Every source step of a simulated kind must map to a target step at the
    image position whose result is the translated result (with the same
    surface flag where the translation preserves it), and every target step
    must arise this way.  Terms reachable within ``steps`` source steps are
    checked too.
    """
    if which not in _SIMS:
        raise ValueError(f"unknown simulation {which!r}")
    sim = _SIMS[which]
    report = SimulationReport(which, show(term))
    seen: set[Term] = set()
    layer = [term]
    for depth in range(steps + 1):
        nxt: list[Term] = []
        for t in layer:
            if t in seen:
                continue
            seen.add(t)
            report.checked += 1
            _check_one(t, sim, which, report)
            if depth < steps:
                for r in redexes(t, sim.source):
                    nxt.extend(step(t, r, sim.source).terms)
        layer = nxt
    return report


def _check_one(t: Term, sim: _Sim, which: str, report: SimulationReport) -> None:
    image = sim.translate(t)
    targets = {(r.position, r.kind): r for r in redexes(image, sim.target)}
    matched: set = set()
    for r in redexes(t, sim.source):
        if r.kind not in sim.kinds:
            continue
        key = (image_position(t, r.position, which), sim.kinds[r.kind])
        tr = targets.get(key)
        if tr is None:
            report.failures.append(f"{show(t)}: {r.kind} at {list(r.position)} has no image step")
            continue
        if key in matched:
            report.failures.append(f"{show(t)}: two source steps share the image {key}")
        matched.add(key)
        if sim.surface and tr.surface != r.surface:
            report.failures.append(f"{show(t)}: surface flag differs at {list(r.position)}")
        want = translate_md(step(t, r, sim.source), sim.translate)
        got = step(image, tr, sim.target)
        if want != got:
            report.failures.append(f"{show(t)}: step at {list(r.position)} gives {got}, expected {want}")
    for key in targets.keys() - matched:
        report.failures.append(f"{show(t)}: target step {key[1]} at {list(key[0])} has no source")
    if sim.source == "cbv" and is_value(t) != is_value(image):
        report.failures.append(f"{show(t)}: value status not preserved")
    if which == "cbn" and is_head_nf(t) != is_surface_normal(image):
        report.failures.append(f"{show(t)}: head normal form status not preserved")
