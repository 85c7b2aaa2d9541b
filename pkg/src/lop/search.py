"""Bounded breadth-first reachability and bidirectional join search.

Nodes are any hashable values; ``successors`` maps a node to the nodes one
step away. Budgets count distinct nodes discovered, across both sides of a
join search.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Optional, TypeVar

N = TypeVar("N", bound=Hashable)
Successors = Callable[[N], Iterable[N]]


@dataclass
class Reach:
    parents: dict
    exhausted: bool  # frontier emptied before the budget ran out

    def path_to(self, node) -> list:
        return _unwind(self.parents, node)


def _unwind(parents: dict, node) -> list:
    path = [node]
    while (node := parents[node]) is not None:
        path.append(node)
    path.reverse()
    return path


def reachable(start: N, successors: Successors, budget: int,
              stop: Optional[Callable[[N], bool]] = None) -> tuple[Reach, Optional[N]]:
    """BFS from ``start``; returns the search state and the first node satisfying ``stop``."""
    parents: dict = {start: None}
    if stop is not None and stop(start):
        return Reach(parents, False), start
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in successors(node):
            if nxt in parents:
                continue
            parents[nxt] = node
            if stop is not None and stop(nxt):
                return Reach(parents, False), nxt
            if len(parents) >= budget:
                return Reach(parents, False), None
            queue.append(nxt)
    return Reach(parents, True), None


@dataclass
class JoinResult:
    found: bool
    left_path: list   # a = left_path[0] => ... => meet
    right_path: list  # b = right_path[0] => ... => meet
    nodes: int
    exhausted: bool   # both graphs fully explored without meeting

    @property
    def meet(self):
        return self.left_path[-1] if self.found else None


def join(a: N, b: N, successors: Successors, budget: int) -> JoinResult:
    """Bidirectional BFS for a common reduct of ``a`` and ``b``.

    Both directions search forward (we look for a common reduct, not a path
    from one to the other), expanding one whole level of the smaller
    frontier (then the smaller visited set) at a time.
    """
    pa: dict = {a: None}
    pb: dict = {b: None}
    if a in pb:
        return JoinResult(True, [a], [b], 1, False)
    fa, fb = [a], [b]
    while fa or fb:
        if fa and (not fb or (len(fa), len(pa)) <= (len(fb), len(pb))):
            mine, other, frontier, side = pa, pb, fa, "a"
        else:
            mine, other, frontier, side = pb, pa, fb, "b"
        nxt_frontier = []
        for node in frontier:
            for nxt in successors(node):
                if nxt in mine:
                    continue
                mine[nxt] = node
                if nxt in other:
                    lp, rp = _unwind(pa, nxt), _unwind(pb, nxt)
                    return JoinResult(True, lp, rp, len(pa) + len(pb), False)
                if len(pa) + len(pb) >= budget:
                    return JoinResult(False, [], [], len(pa) + len(pb), False)
                nxt_frontier.append(nxt)
        if side == "a":
            fa = nxt_frontier
        else:
            fb = nxt_frontier
    return JoinResult(False, [], [], len(pa) + len(pb), True)
