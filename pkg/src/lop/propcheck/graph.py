"""Reduction graphs over multidistributions and joinability search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from ..calculi import redexes_of_class, step
from ..calculi.base import Redex
from ..multidist import MultiDist, lift_step
from ..search import join, reachable

DEFAULT_BUDGET = 20_000


def single_steps(m: MultiDist, calculus: str, cls: str = "any") -> Iterator[MultiDist]:
    """Multidistributions one entry-step away: one redex of class ``cls`` in one entry.

    Lifted steps reduce several entries at once, but they factor into these,
    so ``=>*`` reachability is the same with far fewer edges.
    """
    entries = m.entries
    for i, (p, t) in enumerate(entries):
        for r in redexes_of_class(t, calculus, cls):
            image = step(t, r, calculus)
            yield MultiDist(entries[:i] + tuple((p * q, s) for q, s in image.entries) + entries[i + 1:])


def successor_fn(calculus: str, cls: str = "any") -> Callable[[MultiDist], Iterator[MultiDist]]:
    return lambda m: single_steps(m, calculus, cls)


def lifted_choices(m: MultiDist, calculus: str, cls: str = "any",
                   limit: int = 100_000) -> Iterator[tuple[Optional[Redex], ...]]:
    """Every lifting choice (keep, or one redex of class ``cls``) for the entries of ``m``."""
    options = [(None, *redexes_of_class(t, calculus, cls)) for t in m.terms]
    count = 1
    for o in options:
        count *= len(o)
    if count > limit:
        raise ValueError(f"{count} lifting choices exceed the limit of {limit}")
    return itertools.product(*options)


def one_lifted_step(m: MultiDist, calculus: str, cls: str = "any") -> dict[MultiDist, tuple]:
    """All results of a single lifted step of class ``cls`` (including keeping everything)."""
    out: dict[MultiDist, tuple] = {}
    for choice in lifted_choices(m, calculus, cls):
        out.setdefault(lift_step(m, choice, calculus), choice)
    return out


@dataclass
class ReductionGraph:
    """Everything reachable from ``root`` by single-entry steps of one redex class."""

    root: MultiDist
    calculus: str
    cls: str = "any"
    budget: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        reach, _ = reachable(self.root, successor_fn(self.calculus, self.cls), self.budget)
        self.parents = reach.parents
        self.exhausted = reach.exhausted

    @property
    def nodes(self) -> set[MultiDist]:
        return set(self.parents)

    def __contains__(self, m: MultiDist) -> bool:
        return m in self.parents

    def path_to(self, m: MultiDist) -> list[MultiDist]:
        path = [m]
        while (m := self.parents[m]) is not None:
            path.append(m)
        return path[::-1]


@dataclass
class JoinVerdict:
    verdict: str  # "yes" or "no-within-budget"
    left: list[MultiDist]
    right: list[MultiDist]
    nodes: int
    exhausted: bool  # both graphs explored completely: provably not joinable

    @property
    def ok(self) -> bool:
        return self.verdict == "yes"

    @property
    def witness(self) -> Optional[MultiDist]:
        return self.left[-1] if self.ok else None


def joinable(a: MultiDist, b: MultiDist, calculus: str, budget: int = DEFAULT_BUDGET,
             cls: str = "any") -> JoinVerdict:
    res = join(a, b, successor_fn(calculus, cls), budget)
    return JoinVerdict("yes" if res.found else "no-within-budget",
                       res.left_path, res.right_path, res.nodes, res.exhausted)
