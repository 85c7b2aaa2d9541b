"""Parallel and deep-parallel beta_v reduction on cbv terms, and postponement.

``M => N`` contracts any set of beta_v redexes already present in ``M``;
the deep variant never contracts one in a surface position.  Both are
decided by computing the (finite) set of reducts bottom-up from the rules.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import chain, combinations
from typing import Optional

from ..calculi import redexes, step
from ..multidist import MultiDist
from ..search import reachable
from ..terms import App, Choice, Lam, Term, Var, is_value, replace_at, subst, subterm_at
from .checks import CheckResult, match_entries
from .graph import DEFAULT_BUDGET, successor_fn


class ValuePreservationError(AssertionError):
    """A value parallel-reduced to a non-value."""


@lru_cache(maxsize=100_000)
def par_reducts(t: Term) -> frozenset[Term]:
    match t:
        case Var():
            return frozenset({t})
        case Lam(x, body):
            return frozenset(Lam(x, b) for b in par_reducts(body))
        case Choice(l, r):
            return frozenset(Choice(a, b) for a in par_reducts(l) for b in par_reducts(r))
        case App(f, a):
            out = {App(f2, a2) for f2 in par_reducts(f) for a2 in par_reducts(a)}
            if isinstance(f, Lam) and is_value(a):
                for w2 in par_reducts(a):
                    if not is_value(w2):
                        raise ValuePreservationError(f"{a} => {w2}")
                    out.update(subst(m2, f.var, w2) for m2 in par_reducts(f.body))
            return frozenset(out)
    raise TypeError(f"not a cbv term: {t!r}")


@lru_cache(maxsize=100_000)
def deep_par_reducts(t: Term) -> frozenset[Term]:
    match t:
        case Var():
            return frozenset({t})
        case Lam(x, body):
            return frozenset(Lam(x, b) for b in par_reducts(body))
        case Choice(l, r):
            return frozenset(Choice(a, b) for a in par_reducts(l) for b in par_reducts(r))
        case App(f, a):
            return frozenset(App(f2, a2) for f2 in deep_par_reducts(f) for a2 in deep_par_reducts(a))
    raise TypeError(f"not a cbv term: {t!r}")


def par_reduces(a: Term, b: Term) -> bool:
    return b in par_reducts(a)


def deep_par_reduces(a: Term, b: Term) -> bool:
    return b in deep_par_reducts(a)


def developments(t: Term, deep_only: bool = False) -> frozenset[Term]:
    """Independent oracle: contract every subset of the redexes of ``t``.

    Deepest positions go first, so the positions of the remaining (outer)
    redexes stay valid.
    """
    positions = [r.position for r in redexes(t, "cbv") if r.is_beta and (r.deep or not deep_only)]
    out = set()
    for subset in chain.from_iterable(combinations(positions, k) for k in range(len(positions) + 1)):
        s = t
        for pos in sorted(subset, key=len, reverse=True):
            sub = subterm_at(s, pos)
            s = replace_at(s, pos, subst(sub.fun.body, sub.fun.var, sub.arg))
        out.add(s)
    return frozenset(out)


def deep_reachable(t: Term, budget: int = DEFAULT_BUDGET) -> tuple[set[Term], bool]:
    def succ(u: Term):
        return [step(u, r, "cbv").terms[0] for r in redexes(u, "cbv") if r.deep]

    reach, _ = reachable(t, succ, budget)
    return set(reach.parents), reach.exhausted


def check_postponement(term: Term, budget: int = DEFAULT_BUDGET) -> CheckResult:
    """Deep-parallel then surface steps can be reordered: surface first, then deep-parallel."""
    succ = successor_fn("cbv", "surface")
    start = MultiDist.point(term)
    surface_reach: Optional[dict] = None
    exhausted = True
    witness = []
    for m1 in sorted(deep_par_reducts(term)):
        for r in redexes(m1, "cbv"):
            if not r.surface:
                continue
            n = step(m1, r, "cbv")
            if surface_reach is None:
                reach, _ = reachable(start, succ, budget)
                surface_reach, exhausted = reach.parents, reach.exhausted
            s = next((s for s in surface_reach if match_entries(s, n, deep_par_reduces) is not None), None)
            if s is None:
                return CheckResult("postpone", str(term), "fail" if exhausted else "budget",
                                   [str(m1), r.to_json()], f"no surface reduct of [1 M] deep-parallel reduces to {n}")
            witness.append(s.to_json())
    return CheckResult("postpone", str(term), "pass", witness)
