"""Exhaustive and seeded-random term generation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from ..calculi.bang import is_affine
from ..terms import App, Bang, BangLam, Choice, Lam, Term, Var

BINDERS = ("x", "y", "u", "v", "w", "s", "t", "r", "q", "p", "o", "n")
FREE_POOL = ("a", "b", "c", "d")


@dataclass(frozen=True)
class TermGen:
    calculus: str = "cbv"
    max_size: int = 7
    free_vars: int = 2
    closed_only: bool = False
    mode: str = "exhaustive"
    seed: int = 0
    count: int = 1000

    @property
    def pool(self) -> tuple[str, ...]:
        return () if self.closed_only else FREE_POOL[: self.free_vars]

    def __iter__(self) -> Iterator[Term]:
        if self.mode == "exhaustive":
            return iter(enumerate_terms(self.calculus, self.max_size, self.pool))
        if self.mode == "random":
            return sample_terms(self.calculus, self.max_size, self.pool, self.count, self.seed)
        raise ValueError(f"unknown enumeration mode {self.mode!r}")


def enumerate_terms(calculus: str, max_size: int, pool: tuple[str, ...] = ("a", "b")) -> list[Term]:
    """All alpha-distinct terms with at most ``max_size`` nodes, smallest first.

    Bang terms are restricted to affine ones.
    """
    out: list[Term] = []
    for n in range(1, max_size + 1):
        terms = _exact(calculus, n, 0, pool)
        if calculus == "bang":
            terms = tuple(t for t in terms if is_affine(t))
        out.extend(terms)
    return out


@lru_cache(maxsize=None)
def _exact(calculus: str, n: int, depth: int, pool: tuple[str, ...]) -> tuple[Term, ...]:
    out: list[Term] = []
    if n == 1:
        out.extend(Var(BINDERS[i]) for i in range(depth))
        out.extend(Var(v) for v in pool)
        return tuple(out)
    binder = BINDERS[depth]
    for body in _exact(calculus, n - 1, depth + 1, pool):
        out.append(Lam(binder, body))
    if calculus == "bang":
        for body in _exact(calculus, n - 1, depth + 1, pool):
            out.append(BangLam(binder, body))
        for body in _exact(calculus, n - 1, depth, pool):
            out.append(Bang(body))
    for k in range(1, n - 1):
        lefts = _exact(calculus, k, depth, pool)
        rights = _exact(calculus, n - 1 - k, depth, pool)
        for a in lefts:
            for b in rights:
                out.append(App(a, b))
        for a in lefts:
            for b in rights:
                out.append(Choice(a, b))
    return tuple(out)


def sample_terms(
    calculus: str, max_size: int, pool: tuple[str, ...], count: int, seed: int
) -> Iterator[Term]:
    """``count`` terms drawn uniformly (by size, then uniformly within the size)."""
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        n = rng.randint(1, max_size)
        terms = _exact(calculus, n, 0, pool)
        if not terms:
            continue
        t = rng.choice(terms)
        if calculus == "bang" and not is_affine(t):
            continue
        produced += 1
        yield t
