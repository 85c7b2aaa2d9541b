"""Executable checks of the rewriting properties, one term or trace at a time.

Every check returns a ``CheckResult`` whose ``verdict`` is ``pass``,
``fail`` or ``budget`` (the search gave up before deciding).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from ..calculi import redexes, redexes_of_class, step
from ..calculi.base import Redex
from ..multidist import HALF, MultiDist
from ..parser import parse
from ..search import reachable
from ..terms import Term, show
from .graph import DEFAULT_BUDGET, ReductionGraph, joinable, one_lifted_step, successor_fn


@dataclass
class CheckResult:
    check: str
    term: str
    verdict: str
    witness: list = field(default_factory=list)
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        out = {"check": self.check, "term": self.term, "verdict": self.verdict, "witness": self.witness}
        if self.detail:
            out["detail"] = self.detail
        return out


def _md_json(m: MultiDist) -> dict:
    return m.to_json()


def _pairs(xs, ys=None):
    if ys is None:
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                yield xs[i], xs[j]
    else:
        for x in xs:
            for y in ys:
                yield x, y


# -------------------------------------------------------------- confluence


def check_confluence(term: Term, calculus: str, budget: int = DEFAULT_BUDGET) -> CheckResult:
    """Every pair of distinct one-step reducts of ``[1 term]`` is joinable."""
    rs = redexes(term, calculus)
    witness, failed, verdict = [], [], "pass"
    for r1, r2 in _pairs(rs):
        v = joinable(step(term, r1, calculus), step(term, r2, calculus), calculus, budget)
        if v.ok:
            witness.append(_md_json(v.witness))
            continue
        failed.append([r1.to_json(), r2.to_json()])
        verdict = "fail" if v.exhausted or verdict == "fail" else "budget"
    if failed:
        return CheckResult("confluence", show(term), verdict, failed, f"{len(failed)} pair(s) not joinable")
    return CheckResult("confluence", show(term), "pass", witness)


# ---------------------------------------------------- one-step closures


def _close_in_one(n: MultiDist, s: MultiDist, calculus: str, cls_n: str, cls_s: str) -> Optional[MultiDist]:
    """A multidistribution one lifted ``cls_n`` step from ``n`` and one ``cls_s`` step from ``s``."""
    common = one_lifted_step(n, calculus, cls_n).keys() & one_lifted_step(s, calculus, cls_s).keys()
    if not common:
        return None
    return max(common, key=lambda m: (len(m), m.canonical))


def check_diamond_oplus(term: Term, calculus: str) -> CheckResult:
    """Two distinct choice steps close in exactly one lifted choice step each."""
    rs = [r for r in redexes(term, calculus) if r.kind == "oplus"]
    witness = []
    for r1, r2 in _pairs(rs):
        n, s = step(term, r1, calculus), step(term, r2, calculus)
        closing = _close_in_one(n, s, calculus, "oplus", "oplus")
        if closing is None:
            return CheckResult("diamond", show(term), "fail", [r1.to_json(), r2.to_json()],
                               f"{n} and {s} have no common one-step reduct")
        witness.append(_md_json(closing))
    return CheckResult("diamond", show(term), "pass", witness)


def check_commute_pointwise(term: Term, calculus: str) -> CheckResult:
    """For ``M ->beta n`` and ``M ->(+) s`` some ``r`` has ``n =>(+) r`` and ``s =>beta r``."""
    rs = redexes(term, calculus)
    betas = [r for r in rs if r.is_beta]
    choices = [r for r in rs if not r.is_beta]
    witness, failed = [], []
    for rb, ro in _pairs(betas, choices):
        n, s = step(term, rb, calculus), step(term, ro, calculus)
        closing = _close_in_one(n, s, calculus, "oplus", "beta")
        if closing is None:
            failed.append([rb.to_json(), ro.to_json()])
        else:
            witness.append(_md_json(closing))
    if failed:
        return CheckResult("commute", show(term), "fail", failed, f"{len(failed)} pair(s) do not commute in one step")
    return CheckResult("commute", show(term), "pass", witness)


# ------------------------------------------------------ entrywise relations


def match_entries(a: MultiDist, b: MultiDist, related: Callable[[Term, Term], bool]) -> Optional[list[int]]:
    """A bijection ``i -> j`` with equal probabilities and ``related(a_i, b_j)``, or None.

    Deep steps never split an entry, so ``a`` relates to ``b`` entrywise
    exactly when such a perfect matching exists.
    """
    if len(a) != len(b) or sorted(p for p, _ in a) != sorted(p for p, _ in b):
        return None
    bt = b.entries
    edges = [[j for j, (q, t) in enumerate(bt) if q == p and related(s, t)] for p, s in a.entries]
    owner: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        for j in edges[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in owner or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in range(len(edges)):
        if not augment(i, set()):
            return None
    out = [0] * len(edges)
    for j, i in owner.items():
        out[i] = j
    return out


class DeepReach:
    """Cached term-level ``->deep*`` reachability sets."""

    def __init__(self, calculus: str, budget: int = DEFAULT_BUDGET) -> None:
        self.calculus = calculus
        self.budget = budget
        self.cache: dict[Term, tuple[set, bool]] = {}

    def succ(self, t: Term) -> list[Term]:
        return [step(t, r, self.calculus).entries[0][1] for r in redexes_of_class(t, self.calculus, "deep")]

    def __call__(self, t: Term) -> tuple[set, bool]:
        if t not in self.cache:
            reach, _ = reachable(t, self.succ, self.budget)
            self.cache[t] = (set(reach.parents), reach.exhausted)
        return self.cache[t]

    def reaches(self, a: Term, b: Term) -> bool:
        return b in self(a)[0]


# --------------------------------------------------------- standardization


@dataclass
class StandardizationResult:
    verdict: str  # "witness" or "none-within-budget"
    r: Optional[MultiDist] = None
    surface_prefix: list[MultiDist] = field(default_factory=list)
    deep_matching: list[int] = field(default_factory=list)
    nodes: int = 0
    exhausted: bool = False

    @property
    def found(self) -> bool:
        return self.verdict == "witness"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "r": None if self.r is None else self.r.to_json(),
            "surface_prefix": [m.to_json() for m in self.surface_prefix],
            "deep_matching": self.deep_matching,
            "nodes": self.nodes,
        }


def standardization_witness(m: MultiDist, n: MultiDist, calculus: str,
                            budget: int = DEFAULT_BUDGET) -> StandardizationResult:
    """Search ``r`` with ``m =>surface* r =>deep* n``.

    Surface reducts of ``m`` are explored breadth first; each candidate is
    tested against ``n`` through a matching of deep reachability sets.
    """
    deep = DeepReach(calculus, budget)
    found: dict = {}

    def stop(r: MultiDist) -> bool:
        match = match_entries(r, n, deep.reaches)
        if match is not None:
            found["match"] = match
            return True
        return False

    reach, hit = reachable(m, successor_fn(calculus, "surface"), budget, stop)
    if hit is None:
        return StandardizationResult("none-within-budget", nodes=len(reach.parents),
                                     exhausted=reach.exhausted and all(e for _, e in deep.cache.values()))
    return StandardizationResult("witness", hit, reach.path_to(hit), found["match"], len(reach.parents))


def check_standardization_witness(trace, budget: int = DEFAULT_BUDGET) -> StandardizationResult:
    """Standardization witness for the endpoints of a recorded trace."""
    return standardization_witness(trace.states[0], trace.states[-1], trace.calculus, budget)


def is_surface_standard(states: list[MultiDist], calculus: str) -> bool:
    """Whether each step of the sequence is a single-entry surface step (checked by search)."""
    succ = successor_fn(calculus, "surface")
    for a, b in zip(states, states[1:]):
        if b not in one_lifted_step(a, calculus, "surface"):
            reach, hit = reachable(a, succ, DEFAULT_BUDGET, lambda x: x == b)
            if hit is None:
                return False
    return True


# ----------------------------------------------------------- regressions

# The two fixtures: a start term, the steps of a trace reaching the target,
# and the left (head) redex whose early firing makes the target unreachable.
FIXTURES = {
    "cbv": {
        "term": r"(\x. x) (\x. x) ((\x. y (+) z) (\x. x))",
        "target": [("1/2", r"(\x. x) y"), ("1/2", r"(\x. x) (\x. x) z")],
        "after_left": r"(\x. x) ((\x. y (+) z) (\x. x))",
    },
    "cbn": {
        "term": r"(\x. (\u. u) (y (+) z)) (\x. x)",
        "target": [("1/2", "y"), ("1/2", r"(\x. z) (\x. x)")],
        "after_left": r"(\u. u) (y (+) z)",
    },
}


def fixture(calculus: str) -> tuple[MultiDist, MultiDist, MultiDist]:
    f = FIXTURES[calculus]
    start = MultiDist.point(parse(f["term"], calculus))
    target = MultiDist(tuple((Fraction(p), parse(t, calculus)) for p, t in f["target"]))
    after = MultiDist.point(parse(f["after_left"], calculus))
    return start, target, after


def fixture_trace(calculus: str) -> list[MultiDist]:
    """The trace displayed for the fixture: surface but not left/head first."""
    start, target, _ = fixture(calculus)
    t = start.terms[0]
    if calculus == "cbv":
        # reduce the argument redex, fire the choice, then the function part of one branch
        m1 = step(t, _at(t, calculus, ("arg",)), calculus)
        (_, t1), = m1.entries
        m2 = step(t1, _at(t1, calculus, ("arg",)), calculus)
        (p, a), (q, b) = m2.entries
        m3 = MultiDist(((p, step(a, _at(a, calculus, ("fun",)), calculus).terms[0]), (q, b)))
    else:
        m1 = step(t, _at(t, calculus, ("fun", "body")), calculus)
        (_, t1), = m1.entries
        m2 = step(t1, _at(t1, calculus, ("fun", "body")), calculus)
        (p, a), (q, b) = m2.entries
        m3 = MultiDist(((p, step(a, _at(a, calculus, ()), calculus).terms[0]), (q, b)))
    return [start, m1, m2, m3]


def _at(t: Term, calculus: str, pos: tuple):
    for r in redexes(t, calculus):
        if r.position == pos:
            return r
    raise LookupError(f"no redex at {pos} in {show(t)}")


@dataclass
class RegressionVerdict:
    calculus: str
    trace_reaches_target: bool
    left_step_is_left: bool
    unreachable_after_left: bool
    exhausted: bool
    nodes: int
    surface_witness: bool

    @property
    def passed(self) -> bool:
        return (self.trace_reaches_target and self.left_step_is_left and self.unreachable_after_left
                and self.exhausted and self.surface_witness)

    def to_json(self) -> dict:
        return {"check": "regressions", "term": FIXTURES[self.calculus]["term"],
                "verdict": "pass" if self.passed else "fail",
                "witness": [], **{k: v for k, v in self.__dict__.items() if k != "calculus"},
                "calculus": self.calculus}


def check_left_standardization_fails(calculus: str = "cbv", budget: int = DEFAULT_BUDGET) -> RegressionVerdict:
    """The fixture target is reachable, but not once the left (head) redex fires first."""
    start, target, after = fixture(calculus)
    trace = fixture_trace(calculus)
    reaches = trace[-1] == target
    t = start.terms[0]
    flag = "left" if calculus == "cbv" else "head"
    firsts = [r for r in redexes(t, calculus) if getattr(r, flag)]
    left_ok = bool(firsts) and step(t, firsts[0], calculus) == after
    graph = ReductionGraph(after, calculus, "any", budget)
    std = standardization_witness(start, target, calculus, budget)
    return RegressionVerdict(calculus, reaches, left_ok, target not in graph, graph.exhausted,
                             len(graph.nodes), std.found)


# ------------------------------------------------- fixed-step sanity checks


def split(t: Term, calculus: str) -> MultiDist:
    """``[1/2 l, 1/2 r]`` for a choice at the root (test helper)."""
    rs = [r for r in redexes(t, calculus) if r.kind == "oplus" and r.position == ()]
    if not rs:
        raise ValueError("no choice at the root")
    m = step(t, rs[0], calculus)
    assert all(p == HALF for p, _ in m)
    return m


# ----------------------------------------------------- erasure diagnostics


def is_frozen_argument_pair(term: Term, a: Redex, b: Redex) -> bool:
    """One redex is a linear beta whose argument holds the other (a choice),
    and the bound variable has no surface occurrence in the body.

    The choice is then erased, or lands under another choice where it cannot
    fire; either way the two orders leave different duplicate entries.
    """
    from ..terms import Lam, subterm_at

    for beta, other in ((a, b), (b, a)):
        if beta.kind != "beta_lin" or other.kind != "oplus":
            continue
        fun = subterm_at(term, beta.position + ("fun",))
        inside = other.position[: len(beta.position) + 1] == beta.position + ("arg",)
        if isinstance(fun, Lam) and inside and not _surface_occurrence(fun.body, fun.var):
            return True
    return False


def _surface_occurrence(t: Term, x: str) -> bool:
    from ..terms import App, BangLam, Lam, Var

    match t:
        case Var(name):
            return name == x
        case Lam(y, body) | BangLam(y, body):
            return y != x and _surface_occurrence(body, x)
        case App(f, a):
            return _surface_occurrence(f, x) or _surface_occurrence(a, x)
    return False  # under '!' or a choice


def joinable_merging_duplicates(a: MultiDist, b: MultiDist, calculus: str,
                                budget: int = DEFAULT_BUDGET) -> bool:
    """Joinability when alpha-equal entries are merged after every step (diagnostic only)."""
    from ..multidist import merge_pairs
    from ..search import join

    def merged(m: MultiDist) -> MultiDist:
        return MultiDist(tuple(merge_pairs(m.entries)))

    succ = successor_fn(calculus)
    return join(merged(a), merged(b), lambda m: (merged(x) for x in succ(m)), budget).found
