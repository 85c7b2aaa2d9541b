"""Suite runners: a check applied over an enumerated or sampled term universe.

Runners yield ``CheckResult``-like objects with ``passed`` and ``to_json``;
``jobs > 1`` fans the terms out over a process pool, keeping input order.
"""

from __future__ import annotations

import json
import multiprocessing
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, partial
from typing import Callable, Iterable, Iterator, Optional, TextIO

from ..asymptotics import Classifier, ObservationSet, Strategy, Trace, evaluate_limit
from ..calculi import redexes, selector, step
from ..multidist import MultiDist, lift_step, merge_pairs
from ..terms import App, Lam, Term
from ..terms import size as term_size
from ..translations import check_simulation, source_calculus
from .checks import (
    CheckResult,
    check_commute_pointwise,
    check_confluence,
    check_diamond_oplus,
    check_left_standardization_fails,
    check_standardization_witness,
)
from .enumerate import enumerate_terms, sample_terms
from .graph import DEFAULT_BUDGET
from .parallel import check_postponement

CHECKS = ("confluence", "diamond", "commute", "standardize", "postpone", "simulate", "regressions")
DEFAULT_SIZES = {"cbv": 9, "cbn": 9, "bang": 8}
POOL = ("a", "b")


def _map(fn: Callable, items: Iterable, jobs: int) -> Iterator:
    if jobs <= 1:
        yield from map(fn, items)
        return
    with multiprocessing.Pool(jobs) as pool:
        yield from pool.imap(fn, items, chunksize=256)


def universe(calculus: str, size: Optional[int] = None, closed: bool = False) -> list[Term]:
    return list(_universe(calculus, size or DEFAULT_SIZES[calculus], closed))


@lru_cache(maxsize=8)
def _universe(calculus: str, size: int, closed: bool) -> tuple[Term, ...]:
    return tuple(enumerate_terms(calculus, size, () if closed else POOL))


# ------------------------------------------------------------ term suites


def _interesting(calculus: str, check: str, t: Term) -> bool:
    rs = redexes(t, calculus)
    oplus = sum(1 for r in rs if r.kind == "oplus")
    if check == "confluence":
        return len(rs) >= 2
    if check == "diamond":
        return oplus >= 2
    if check == "commute":
        return oplus >= 1 and len(rs) > oplus
    return True


def _confluence(t: Term, calculus: str, budget: int) -> CheckResult:
    return check_confluence(t, calculus, budget)


def _diamond(t: Term, calculus: str) -> CheckResult:
    return check_diamond_oplus(t, calculus)


def _commute(t: Term, calculus: str) -> CheckResult:
    return check_commute_pointwise(t, calculus)


def _postpone(t: Term, budget: int) -> CheckResult:
    return check_postponement(t, budget)


def run_term_suite(check: str, calculus: str, size: Optional[int] = None,
                   budget: int = DEFAULT_BUDGET, jobs: int = 1) -> Iterator[CheckResult]:
    """One result per term of the universe that has something to check."""
    if check == "postpone" and calculus != "cbv":
        raise ValueError("postponement is checked for cbv only")
    if check not in ("confluence", "diamond", "commute", "postpone"):
        raise ValueError(f"{check} is not a term suite")
    terms = [t for t in universe(calculus, size) if _interesting(calculus, check, t)]
    fn = {
        "confluence": partial(_confluence, calculus=calculus, budget=budget),
        "diamond": partial(_diamond, calculus=calculus),
        "commute": partial(_commute, calculus=calculus),
        "postpone": partial(_postpone, budget=budget),
    }[check]
    return _map(fn, terms, jobs)


def _simulate(t: Term, which: str, steps: int):
    return check_simulation(t, which, steps)


def run_simulation_suite(which: str, size: Optional[int] = None, steps: int = 1,
                         jobs: int = 1) -> Iterator:
    terms = universe(source_calculus(which), size)
    yield from _map(partial(_simulate, which=which, steps=steps), terms, jobs)


def run_regressions(budget: int = DEFAULT_BUDGET) -> Iterator:
    for calc in ("cbv", "cbn"):
        yield check_left_standardization_fails(calc, budget)


# -------------------------------------------------- random traces


def random_trace(t: Term, calculus: str, length: int, rng: random.Random) -> Trace:
    """Up to ``length`` lifted steps, each entry kept or reduced at random.

    At least one entry is reduced per step while any redex remains.
    """
    m = MultiDist.point(t)
    states, choices = [m], []
    for _ in range(length):
        options = [redexes(u, calculus) for u in m.terms]
        live = [i for i, o in enumerate(options) if o]
        if not live:
            break
        choice = [rng.choice(o) if o and rng.random() < 0.6 else None for o in options]
        if all(c is None for c in choice):
            i = rng.choice(live)
            choice[i] = rng.choice(options[i])
        m = lift_step(m, choice, calculus)
        states.append(m)
        choices.append(tuple(choice))
    return Trace(calculus, "random", tuple(states), tuple(choices))


def strongly_normalizing(t: Term, calculus: str, budget: int = DEFAULT_BUDGET) -> Optional[bool]:
    """Whether every reduction from ``t`` terminates (None when the budget runs out).

    Follows both branches of choices; a cycle or a budget overrun means no.
    """
    state: dict[Term, int] = {}  # 1 = on the stack, 2 = done

    def succ(u: Term) -> list[Term]:
        return [s for r in redexes(u, calculus) for s in step(u, r, calculus).terms]

    stack = [(t, iter(succ(t)))]
    state[t] = 1
    while stack:
        u, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            state[u] = 2
            stack.pop()
            continue
        s = state.get(nxt)
        if s == 1:
            return False
        if s is None:
            if len(state) >= budget:
                return None
            state[nxt] = 1
            stack.append((nxt, iter(succ(nxt))))
    return True


@dataclass
class StandardizeOutcome:
    term: str
    seed: int
    length: int
    verdict: str
    strongly_normalizing: Optional[bool]

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {"check": "standardize", "term": self.term, "verdict": self.verdict, "seed": self.seed,
                "length": self.length, "strongly_normalizing": self.strongly_normalizing, "witness": []}


def _standardize_one(item: tuple[int, Term], calculus: str, seed: int, budget: int) -> StandardizeOutcome:
    index, t = item
    rng = random.Random(f"{seed}:{index}")
    trace = random_trace(t, calculus, rng.randint(1, 6), rng)
    res = check_standardization_witness(trace, budget)
    sn = strongly_normalizing(t, calculus, budget)
    verdict = "pass" if res.found else ("fail" if res.exhausted else "budget")
    return StandardizeOutcome(str(t), seed, len(trace), verdict, sn)


def run_standardize(calculus: str, count: int = 1000, seed: int = 0, size: Optional[int] = None,
                    budget: int = DEFAULT_BUDGET, jobs: int = 1) -> Iterator[StandardizeOutcome]:
    terms = list(sample_terms(calculus, size or DEFAULT_SIZES[calculus], POOL, count, seed))
    fn = partial(_standardize_one, calculus=calculus, seed=seed, budget=budget)
    yield from _map(fn, list(enumerate(terms)), jobs)


# ------------------------------------------------- strategy agreement


def random_multidist(calculus: str, rng: random.Random, size: int = 9, closed: bool = True,
                     fuel: int = 100, size_cap: Optional[int] = 400) -> MultiDist:
    """One to three entries, probabilities from repeated halving.

    With ``size_cap`` set, candidates whose full-surface run produces a term
    larger than the cap within ``fuel`` steps are redrawn; call-by-name
    self-applications otherwise grow exponentially.
    """
    while True:
        m = _draw_multidist(calculus, rng, size, closed)
        if size_cap is None or _stays_small(m, calculus, fuel, size_cap):
            return m


def _stays_small(m: MultiDist, calculus: str, fuel: int, cap: int) -> bool:
    pick = selector(calculus, "surface")
    for _ in range(fuel):
        if any(term_size(t) > cap for t in m.terms):
            return False
        choice = [pick(t) for t in m.terms]
        if all(c is None for c in choice):
            return True
        m = MultiDist(tuple(merge_pairs(lift_step(m, choice, calculus).entries)))
    return all(term_size(t) <= cap for t in m.terms)


def _draw_multidist(calculus: str, rng: random.Random, size: int, closed: bool) -> MultiDist:
    k = rng.randint(1, 3)
    probs = [Fraction(1)]
    while len(probs) < k:
        i = rng.randrange(len(probs))
        half = probs[i] / 2
        probs[i:i + 1] = [half, half]
    if rng.random() < 0.3:
        probs[-1] /= 2  # leave some mass out now and then
    pool = () if closed else POOL
    terms = list(sample_terms(calculus, size, pool, k, rng.randrange(2**32)))
    for i in range(k):
        if rng.random() < 0.5:
            terms[i] = self_application(calculus, rng, size - 2)
    return MultiDist(tuple(zip(probs, terms)))


def self_application(calculus: str, rng: random.Random, size: int) -> Term:
    """``V V`` for a random abstraction ``V = \\x. B``; these loop, branch and duplicate."""
    (body,) = sample_terms(calculus, size, ("f",), 1, rng.randrange(2**32))
    v = Lam("f", body)
    return App(v, v)


def strategies_agree(m: MultiDist, calculus: str, a: str, b: str, obs_id: str, fuel: int) -> Optional[int]:
    """First step index where the observed distributions differ, or None."""
    obs = ObservationSet(obs_id, calculus)
    shared = Classifier(obs)
    # merging alpha-equal entries leaves the observed distributions of a
    # deterministic full strategy unchanged, and keeps branching runs small
    _, ta = evaluate_limit(m, Strategy(a, calculus), obs, fuel, Fraction(0), compact=True, classifier=shared)
    _, tb = evaluate_limit(m, Strategy(b, calculus), obs, fuel, Fraction(0), compact=True, classifier=shared)
    for i, (da, db) in enumerate(zip(ta.observed, tb.observed)):
        if da.mass != db.mass:
            return i
    if len(ta.observed) != len(tb.observed):
        # one run stopped early: everything is normal there, the other must agree from then on
        shorter, longer = sorted((ta.observed, tb.observed), key=len)
        for i in range(len(shorter), len(longer)):
            if longer[i].mass != shorter[-1].mass:
                return i
    return None


def write_jsonl(results: Iterable, sink: TextIO) -> tuple[int, int]:
    """Stream results as JSON lines; returns (total, failures).

    Budget verdicts are written but not counted as failures.
    """
    total = failures = 0
    for r in results:
        total += 1
        data = r.to_json()
        failures += data["verdict"] == "fail"
        sink.write(json.dumps(data) + "\n")
        sink.flush()
    return total, failures
