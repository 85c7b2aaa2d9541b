"""Strategies, observation sets and limit evaluation.

A limit is never computed in closed form: ``evaluate_limit`` runs a
strategy for a bounded number of lifted steps and reports, per observation
class, an exact lower bound together with the mass still unaccounted for.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .calculi import CLASS_CALCULI, beta_redexes, redexes, selector, step
from .calculi.base import Redex
from .calculi.bang import is_surface_normal
from .calculi.cbn import is_head_nf
from .multidist import (
    Distribution,
    MultiDist,
    fraction_str,
    lift_step,
    merge_pairs,
    parse_fraction,
)
from .search import join
from .terms import CALCULI, Term, is_value, show

DEFAULT_EPSILON = Fraction(1, 2**20)
DEFAULT_MAX_STEPS = 10_000
DEFAULT_JOIN_FUEL = 200

# ---------------------------------------------------------------- strategies

_FULL = {"full-surface": "surface", "full-left": "left", "full-head": "head", "full-any": "any"}
STRATEGIES = (*_FULL, "leftmost-any", "random")
_RANDOM_RE = re.compile(r"random(?:\((\d+)\)|:(\d+))?$")


@dataclass(frozen=True)
class Strategy:
    """How each lifted step picks redexes.

    The ``full-*`` strategies reduce, in every entry that has one, the
    leftmost redex of their class.  ``leftmost-any`` reduces only the first
    reducible entry.  ``random`` keeps or reduces each entry at random.
    """

    name: str
    calculus: str
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.calculus not in CALCULI:
            raise ValueError(f"unknown calculus {self.calculus!r}")
        if self.name not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.name!r}")
        cls = _FULL.get(self.name)
        if cls in CLASS_CALCULI and self.calculus not in CLASS_CALCULI[cls]:
            raise ValueError(f"{self.name} is not defined for {self.calculus}")
        if self.name == "random" and self.seed is None:
            object.__setattr__(self, "seed", 0)

    @classmethod
    def parse(cls, text: str, calculus: str) -> Strategy:
        m = _RANDOM_RE.match(text)
        if m:
            seed = m.group(1) or m.group(2)
            return cls("random", calculus, int(seed) if seed else 0)
        return cls(text, calculus)

    @property
    def label(self) -> str:
        return f"random({self.seed})" if self.name == "random" else self.name

    @property
    def allows_deep(self) -> bool:
        return self.name in ("full-any", "leftmost-any", "random")

    @property
    def redex_class(self) -> str:
        return _FULL.get(self.name, "any")

    def is_stuck(self, m: MultiDist) -> bool:
        """No entry has a redex this strategy could ever pick."""
        pick = selector(self.calculus, self.redex_class)
        return all(pick(t) is None for t in m.terms)

    def chooser(self) -> Callable[[MultiDist], list[Optional[Redex]]]:
        """A fresh choice function; the random one carries its own generator."""
        calc = self.calculus
        if self.name in _FULL:
            pick = selector(calc, _FULL[self.name])
            return lambda m: [pick(t) for t in m.terms]
        if self.name == "leftmost-any":
            pick = selector(calc, "any")

            def first_entry(m: MultiDist) -> list[Optional[Redex]]:
                out: list[Optional[Redex]] = [None] * len(m)
                for i, t in enumerate(m.terms):
                    if (r := pick(t)) is not None:
                        out[i] = r
                        break
                return out

            return first_entry
        rng = random.Random(self.seed)

        def at_random(m: MultiDist) -> list[Optional[Redex]]:
            return [rng.choice((None, *redexes(t, calc))) for t in m.terms]

        return at_random


# ---------------------------------------------------------- observation sets

OBSERVATIONS: dict[str, tuple[str, ...]] = {
    "values": ("cbv",),
    "values-upto-beta": ("cbv",),
    "normal-forms": CALCULI,
    "normal-form-singletons": CALCULI,
    "surface-nf-bang": ("bang",),
    "surface-nf-bang-upto-beta": ("bang",),
    "hnf": ("cbn",),
    "hnf-upto-beta": ("cbn",),
    "cbn-nf-singletons": ("cbn",),
}


@dataclass(frozen=True)
class ObservationSet:
    id: str
    calculus: str
    join_fuel: int = DEFAULT_JOIN_FUEL

    def __post_init__(self) -> None:
        if self.id not in OBSERVATIONS:
            raise ValueError(f"unknown observation set {self.id!r}")
        if self.calculus not in OBSERVATIONS[self.id]:
            raise ValueError(f"observation set {self.id} is not defined for {self.calculus}")

    @property
    def upto_beta(self) -> bool:
        return self.id.endswith("-upto-beta")

    @property
    def singletons(self) -> bool:
        return self.id.endswith("-singletons")

    def member(self, t: Term) -> bool:
        match self.id:
            case "values" | "values-upto-beta":
                return is_value(t)
            case "surface-nf-bang" | "surface-nf-bang-upto-beta":
                return is_surface_normal(t)
            case "hnf" | "hnf-upto-beta":
                return is_head_nf(t)
        return not redexes(t, self.calculus)


@dataclass(frozen=True)
class ObsClass:
    id: str
    repr: str
    resolved: bool = True


class Classifier:
    """Assigns observation classes, remembering every decision it makes.

    Up-to-beta classes are keyed by a beta normal form when one turns up
    within ``join_fuel`` steps.  Otherwise the term is joined against the
    existing classes; a failed search opens a provisional class and records
    a warning, so a wrong merge is never reported.
    """

    def __init__(self, obs: ObservationSet) -> None:
        self.obs = obs
        self.classes: dict[str, ObsClass] = {}
        self.reps: dict[str, Term] = {}
        self.warnings: list[str] = []
        self._cache: dict[Term, Optional[ObsClass]] = {}

    def __call__(self, t: Term) -> Optional[ObsClass]:
        if t in self._cache:
            return self._cache[t]
        c = self._classify(t)
        self._cache[t] = c
        if c is not None and c.id not in self.classes:
            self.classes[c.id] = c
            self.reps[c.id] = t
        return c

    def _classify(self, t: Term) -> Optional[ObsClass]:
        obs = self.obs
        if not obs.member(t):
            return None
        if obs.singletons:
            return ObsClass(t.key, show(t))
        if not obs.upto_beta:
            return ObsClass(obs.id, obs.id)
        nf = beta_normalize(t, obs.calculus, obs.join_fuel)
        if nf is not None:
            return ObsClass("nf:" + nf.key, show(nf))
        succ = _beta_successors(obs.calculus)
        for cid, rep in self.reps.items():
            if join(t, rep, succ, obs.join_fuel).found:
                return self.classes[cid]
        self.warnings.append(f"unresolved class for {show(t)}: no beta normal form or join within fuel")
        return ObsClass("u:" + t.key, show(t), resolved=False)

    def distribution(self, m: MultiDist) -> Distribution:
        acc: dict[str, Fraction] = {}
        for p, t in m.entries:
            c = self(t)
            if c is not None:
                acc[c.id] = acc.get(c.id, Fraction(0)) + p
        return Distribution(acc)


def beta_normalize(t: Term, calculus: str, fuel: int) -> Optional[Term]:
    """Leftmost-outermost beta normal form within ``fuel`` steps, else None."""
    for _ in range(fuel + 1):
        rs = beta_redexes(t, calculus)
        if not rs:
            return t
        (_, t), = step(t, rs[0], calculus).entries
    return None


def _beta_successors(calculus: str) -> Callable[[Term], list[Term]]:
    def succ(t: Term) -> list[Term]:
        return [step(t, r, calculus).entries[0][1] for r in beta_redexes(t, calculus)]

    return succ


def classify_observation(
    term: Term, obs: ObservationSet, classifier: Optional[Classifier] = None
) -> Optional[str]:
    """Class id of ``term`` (None when it is not observed)."""
    c = (classifier or Classifier(obs))(term)
    return None if c is None else c.id


# ------------------------------------------------------------- trace, result


@dataclass(frozen=True)
class Trace:
    calculus: str
    strategy: str
    states: tuple[MultiDist, ...]
    choices: tuple[tuple[Optional[Redex], ...], ...]
    observed: tuple[Distribution, ...] = ()
    compact: bool = False

    def __len__(self) -> int:
        return len(self.choices)

    def replay(self) -> None:
        """Re-run every recorded step; raises AssertionError on a mismatch."""
        for i, (a, choice, b) in enumerate(zip(self.states, self.choices, self.states[1:])):
            nxt = lift_step(a, choice, self.calculus)
            if self.compact:
                nxt = MultiDist(tuple(merge_pairs(nxt.entries)))
            if nxt != b:
                raise AssertionError(f"step {i}: recorded {b}, replay gives {nxt}")

    def to_json(self) -> dict:
        steps = []
        for i, m in enumerate(self.states):
            item: dict = {"multidist": m.to_json()}
            if i < len(self.choices):
                item["choice"] = [None if r is None else r.to_json() for r in self.choices[i]]
            if i < len(self.observed):
                item["observed"] = {k: fraction_str(v) for k, v in self.observed[i].mass.items()}
            steps.append(item)
        return {"calculus": self.calculus, "strategy": self.strategy, "compact": self.compact, "steps": steps}

    @classmethod
    def from_json(cls, data: dict) -> Trace:
        calc = data["calculus"]
        states, choices, observed = [], [], []
        for item in data["steps"]:
            states.append(MultiDist.from_json(item["multidist"], calc, allow_reserved=True))
            if "choice" in item:
                choices.append(tuple(None if r is None else redex_from_json(r) for r in item["choice"]))
            if "observed" in item:
                observed.append(Distribution({k: parse_fraction(v) for k, v in item["observed"].items()}))
        return cls(calc, data["strategy"], tuple(states), tuple(choices), tuple(observed),
                   data.get("compact", False))


def redex_from_json(data: dict) -> Redex:
    return Redex(tuple(data["position"]), data["kind"], data["surface"], data.get("left"), data.get("head"))


@dataclass(frozen=True)
class ClassMass:
    id: str
    repr: str
    mass: Fraction
    resolved: bool = True


@dataclass(frozen=True)
class LimitResult:
    observation: str
    classes: tuple[ClassMass, ...]
    residual: Fraction
    steps: int
    converged: bool
    warnings: tuple[str, ...] = ()

    @property
    def distribution(self) -> Distribution:
        return Distribution({c.id: c.mass for c in self.classes})

    @property
    def observed_mass(self) -> Fraction:
        return sum((c.mass for c in self.classes), Fraction(0))

    def mass_of(self, term: Term) -> Fraction:
        """Mass of the class containing ``term``, matched by representative or id."""
        for c in self.classes:
            if c.id in (term.key, "nf:" + term.key, "u:" + term.key) or c.repr == show(term):
                return c.mass
        return Fraction(0)

    def to_json(self) -> dict:
        return {
            "observation": self.observation,
            "classes": [
                {"repr": c.repr, "mass": fraction_str(c.mass), "resolved": c.resolved} for c in self.classes
            ],
            "residual": fraction_str(self.residual),
            "steps": self.steps,
            "converged": self.converged,
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------- evaluation


def evaluate_limit(
    m: MultiDist,
    strategy: Strategy,
    obs: ObservationSet,
    max_steps: int = DEFAULT_MAX_STEPS,
    epsilon: Fraction = DEFAULT_EPSILON,
    *,
    compact: bool = False,
    record: bool = True,
    classifier: Optional[Classifier] = None,
) -> tuple[LimitResult, Trace]:
    """Run ``strategy`` from ``m`` and bound the limit distribution over ``obs``.

    With ``compact`` alpha-equal entries are merged after every step.  For
    the deterministic ``full-*`` strategies this leaves every observed
    distribution unchanged and keeps divergent runs from growing without bound.
    Pass a shared ``classifier`` to keep provisional class ids comparable
    across runs.
    """
    if strategy.calculus != obs.calculus:
        raise ValueError(f"strategy is for {strategy.calculus}, observations for {obs.calculus}")
    classifier = classifier or Classifier(obs)
    choose = strategy.chooser()
    total = m.mass
    warns: list[str] = []
    check_deep = strategy.allows_deep and obs.id in (
        "values", "values-upto-beta", "surface-nf-bang", "surface-nf-bang-upto-beta")

    if compact:
        m = MultiDist(tuple(merge_pairs(m.entries)))
    current = classifier.distribution(m)
    states, choices, observed = [m], [], [current]
    steps = 0
    converged = total - current.total <= epsilon
    while not converged and steps < max_steps:
        choice = choose(m)
        if all(r is None for r in choice) and strategy.is_stuck(m):
            converged = True
            break
        if check_deep:
            for t, r in zip(m.terms, choice):
                if r is not None and r.deep:
                    after = step(t, r, obs.calculus).entries[0][1]
                    if classifier(t) != classifier(after):
                        warns.append(f"deep step changed the class of {show(t)}")
        m = lift_step(m, choice, obs.calculus)
        if compact:
            m = MultiDist(tuple(merge_pairs(m.entries)))
        steps += 1
        nxt = classifier.distribution(m)
        dropped = [k for k, v in current.mass.items() if nxt[k] < v]
        if dropped:
            warns.append(f"step {steps}: class mass decreased for {dropped}")
        current = nxt
        if record:
            states.append(m)
            choices.append(tuple(choice))
            observed.append(current)
        converged = total - current.total <= epsilon

    warns.extend(classifier.warnings)
    classes = tuple(
        ClassMass(cid, classifier.classes[cid].repr, mass, classifier.classes[cid].resolved)
        for cid, mass in current.mass.items()
    )
    result = LimitResult(obs.id, classes, total - current.total, steps, converged, tuple(warns))
    if not record:
        states, choices, observed = [m], [], [current]
    trace = Trace(obs.calculus, strategy.label, tuple(states), tuple(choices), tuple(observed), compact)
    return result, trace


def valuable_mass(
    m: MultiDist, strategy: Strategy, max_steps: int = DEFAULT_MAX_STEPS,
    epsilon: Fraction = DEFAULT_EPSILON,
) -> Fraction:
    """Lower bound on the probability that ``m`` evaluates to a value."""
    if strategy.calculus != "cbv":
        raise ValueError("valuable_mass is defined for cbv only")
    result, _ = evaluate_limit(m, strategy, ObservationSet("values", "cbv"), max_steps, epsilon,
                               compact=True, record=False)
    return result.observed_mass


# ---------------------------------------------------------------- comparison


@dataclass(frozen=True)
class Comparison:
    verdict: str  # equal-within | a-below-b | b-below-a | incomparable
    deltas: dict[str, Fraction] = field(default_factory=dict)  # a - b, per class repr
    tolerance: Fraction = Fraction(0)
    genuine: tuple[str, ...] = ()  # classes differing by more than the tolerance


def compare_limits(a: LimitResult, b: LimitResult) -> Comparison:
    """Pointwise order on the class lower bounds.

    When neither side dominates, the difference is only called genuine if
    some class moves by more than the two residuals together; otherwise the
    results may still converge to the same limit and are ``equal-within``.
    """
    if a.observation != b.observation:
        raise ValueError(f"cannot compare {a.observation} with {b.observation}")
    da, db = a.distribution, b.distribution
    names = {c.id: c.repr for c in (*a.classes, *b.classes)}
    deltas = {names[k]: da[k] - db[k] for k in sorted(names, key=lambda k: names[k]) if da[k] != db[k]}
    tol = a.residual + b.residual
    genuine = tuple(k for k, d in deltas.items() if abs(d) > tol)
    if not deltas:
        verdict = "equal-within"
    elif all(d <= 0 for d in deltas.values()):
        verdict = "a-below-b"
    elif all(d >= 0 for d in deltas.values()):
        verdict = "b-below-a"
    else:
        verdict = "incomparable" if genuine else "equal-within"
    return Comparison(verdict, deltas, tol, genuine)
