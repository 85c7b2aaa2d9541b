"""Multidistributions over terms, their lifting, and associated distributions.

Probabilities are exact ``Fraction``s.  A multidistribution keeps duplicate
entries apart (``[1/2 a, 1/2 a] != [1 a]``); equality is multiset equality
after sorting entries by canonical term key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence

from .terms import Term

if TYPE_CHECKING:
    from .calculi.base import Redex

HALF = Fraction(1, 2)


class MassOverflowError(ValueError):
    """Total mass of a multidistribution would exceed 1."""


class InvalidChoiceError(ValueError):
    """A lifting choice does not fit the multidistribution it is applied to."""


@dataclass(frozen=True, eq=False)
class MultiDist:
    entries: tuple[tuple[Fraction, Term], ...] = ()

    def __post_init__(self) -> None:
        entries = tuple((Fraction(p), t) for p, t in self.entries)
        for p, _ in entries:
            if p <= 0:
                raise ValueError(f"non-positive probability {p}")
        if sum(p for p, _ in entries) > 1:
            raise MassOverflowError(f"total mass {sum(p for p, _ in entries)} exceeds 1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def point(cls, t: Term, p: Fraction | int = 1) -> MultiDist:
        return cls(((Fraction(p), t),))

    @cached_property
    def canonical(self) -> tuple[tuple[str, Fraction], ...]:
        return tuple(sorted((t.key, p) for p, t in self.entries))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiDist):
            return NotImplemented
        return self.canonical == other.canonical

    def __hash__(self) -> int:
        return hash(self.canonical)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[Fraction, Term]]:
        return iter(self.entries)

    def __add__(self, other: MultiDist) -> MultiDist:
        return md_sum(self, other)

    @property
    def mass(self) -> Fraction:
        return sum((p for p, _ in self.entries), Fraction(0))

    @property
    def terms(self) -> list[Term]:
        return [t for _, t in self.entries]

    def __str__(self) -> str:
        return "[" + ", ".join(f"{p} {t}" for p, t in self.entries) + "]"

    def __repr__(self) -> str:
        return f"MultiDist({str(self)})"

    def to_json(self) -> dict:
        return {"entries": [{"p": fraction_str(p), "term": str(t)} for p, t in self.entries]}

    @classmethod
    def from_json(cls, data: dict | str, calculus: str = "cbv", **parse_kw) -> MultiDist:
        from .parser import parse

        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            tuple(
                (parse_fraction(e["p"]), parse(e["term"], calculus, **parse_kw))
                for e in data["entries"]
            )
        )


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    q = Fraction(text)
    if q < 0:
        raise ValueError(f"negative probability {text!r}")
    return q


def md_scale(q: Fraction | int, m: MultiDist) -> MultiDist:
    q = Fraction(q)
    if not 0 < q <= 1:
        raise ValueError(f"scalar {q} outside (0, 1]")
    return MultiDist(tuple((q * p, t) for p, t in m.entries))


def md_sum(a: MultiDist, b: MultiDist) -> MultiDist:
    """Concatenation; raises ``MassOverflowError`` past total mass 1."""
    return MultiDist(a.entries + b.entries)


@dataclass(frozen=True)
class Distribution:
    """Exact (sub)distribution; zero masses are never stored."""

    mass: Mapping[Hashable, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mass", {k: Fraction(v) for k, v in self.mass.items() if v})

    def __getitem__(self, key: Hashable) -> Fraction:
        return self.mass.get(key, Fraction(0))

    def __len__(self) -> int:
        return len(self.mass)

    @property
    def total(self) -> Fraction:
        return sum(self.mass.values(), Fraction(0))

    def __le__(self, other: Distribution) -> bool:
        return all(v <= other[k] for k, v in self.mass.items())


def associated_distribution(m: MultiDist) -> Distribution:
    """Sum the probabilities of alpha-equal terms (terms hash up to alpha)."""
    acc: dict[Term, Fraction] = {}
    for p, t in m.entries:
        acc[t] = acc.get(t, Fraction(0)) + p
    return Distribution(acc)


# A lifting choice holds, per entry, either None (keep) or a redex of that entry.
LiftChoice = Sequence[Optional["Redex"]]


def lift_step(m: MultiDist, choice: LiftChoice, calculus: str) -> MultiDist:
    """Keep entries with ``None``; replace the others by ``p * step(term, redex)``."""
    from .calculi import step  # calculi build MultiDists, so import late
    from .calculi.base import InvalidRedexError

    if len(choice) != len(m.entries):
        raise InvalidChoiceError(f"{len(choice)} choices for {len(m.entries)} entries")
    out: list[tuple[Fraction, Term]] = []
    for index, ((p, t), redex) in enumerate(zip(m.entries, choice)):
        if redex is None:
            out.append((p, t))
            continue
        try:
            image = step(t, redex, calculus)
        except InvalidRedexError as exc:
            raise InvalidRedexError(f"entry {index} ({t}): {exc}") from None
        out.extend((p * q, s) for q, s in image.entries)
    return MultiDist(tuple(out))


def full_choice(m: MultiDist, select: Callable[[Term], Optional[Redex]]) -> list:
    return [select(t) for t in m.terms]


def full_step(
    m: MultiDist, select: Callable[[Term], Optional[Redex]], calculus: str
) -> MultiDist:
    """Full lifting: every entry for which ``select`` yields a redex is reduced."""
    return lift_step(m, full_choice(m, select), calculus)


def merge_pairs(pairs: Iterable[tuple[Fraction, Term]]) -> list[tuple[Fraction, Term]]:
    """Merge entries with alpha-equal terms, keeping first-seen order."""
    acc: dict[Term, Fraction] = {}
    for p, t in pairs:
        acc[t] = acc.get(t, Fraction(0)) + p
    return [(p, t) for t, p in acc.items()]
