"""Constant-memory patched routing: greedy depth-first search over the
subgraph of vertices whose objective is at least a threshold Phi, with
recursive restarts whenever a new best objective is encountered.

The message stores only the current threshold, the best objective ever
seen, and the last visited vertex. Each vertex stores at most four
fields: its visited mark for the current threshold, a parent pointer,
a flag marking that it started a new search, and the previous threshold
needed to resume the paused search. When a restarted search completes
without finding the target, it is discarded: the threshold is restored
and the vertices marked during the discarded search count as unvisited
for the resumed one.

A simpler history-in-message variant is also provided: route greedily
when possible, otherwise explore the best unexplored edge leaving any
visited vertex.

Both protocols deliver if and only if source and target share a
component (within the step limit). Conformance of produced runs with
the three sufficiency conditions -- greedy choices, polynomial-time
exploration, polynomial-time exhaustive search -- is checked by
check_p1 / check_p2 / check_p3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import InvalidInputError
from .model import Graph
from .routing import Objective

DELIVERED = "DELIVERED"
EXHAUSTED = "EXHAUSTED"
STEP_LIMIT = "STEP_LIMIT"

EV_EXPLORE = "EXPLORE"
EV_BACKTRACK = "BACKTRACK"
EV_NEW_PHI = "NEW_PHI"
EV_RESET_PHI = "RESET_PHI"

# fields of per-vertex memory: phi mark, parent, started flag, previous phi
VERTEX_MEMORY_WORDS = 4


def default_patch_step_limit(n: float) -> int:
    """Safety-net step budget for patched routing: 50 * n."""
    return max(1, int(50 * max(n, 1)))


@dataclass(frozen=True)
class PatchOutcome:
    path: list[int]
    status: str
    steps: int
    distinct_visited: int
    max_vertex_memory_words: int
    event_log: list[tuple[int, str, int, float]]

    def export_event_log(self) -> str:
        """Line-oriented export: ``<step> <event> <vertex> <phi-or-NA>``."""
        lines = []
        for step, event, vertex, phi in self.event_log:
            tag = (
                "NA"
                if phi is None or math.isnan(phi)
                else format(float(phi), ".17g")
            )
            lines.append(f"{step} {event} {vertex} {tag}")
        return "\n".join(lines) + ("\n" if lines else "")


def _key(scores: np.ndarray, u: int) -> tuple[float, int]:
    """Total order on vertices: higher score first, then smaller id."""
    return (scores[u], -u)


def patch_route(g: Graph, s: int, obj: Objective,
                step_limit: int | None = None) -> PatchOutcome:
    """Route with the constant-memory threshold-DFS protocol."""
    g.check_valid(s)
    t = obj.target
    g.check_valid(t)
    if step_limit is None:
        step_limit = default_patch_step_limit(g.params.n)
    if step_limit < 1:
        raise InvalidInputError("step_limit must be >= 1")

    scores = obj.scores(g)
    n = g.num_vertices
    v_phi = np.full(n, np.nan)  # NaN = unset; NaN equality always fails
    parent = np.full(n, -1, dtype=np.int64)
    started = np.zeros(n, dtype=bool)
    prev_phi = np.full(n, np.nan)

    m_phi = -math.inf
    best = -math.inf
    pos = s
    steps = 0
    path = [s]
    visited_any = {s}
    log: list[tuple[int, str, int, float]] = []

    # pending operation: (kind, target, arrived_from, costs_move)
    op = ("explore", s, s, False)
    status = None
    while status is None:
        kind, v, came_from, moves = op
        if moves:
            steps += 1
            path.append(v)
            visited_any.add(v)
            if steps > step_limit:
                status = STEP_LIMIT
                break
        if kind == "explore":
            log.append((steps, EV_EXPLORE, v, m_phi))
            if v == t:
                status = DELIVERED
                break
            if v_phi[v] == m_phi:
                # already visited in the current threshold-DFS: bounce back
                op = ("backtrack", came_from, v, True)
                continue
            if scores[v] > best:
                best = scores[v]
                nbrs = g.neighbors(v)
                if len(nbrs) and np.max(scores[nbrs]) >= scores[v]:
                    # start a new DFS at threshold phi(v)
                    started[v] = True
                    prev_phi[v] = m_phi
                    m_phi = float(scores[v])
                    log.append((steps, EV_NEW_PHI, v, m_phi))
            v_phi[v] = m_phi
            parent[v] = came_from
            nbrs = g.neighbors(v)
            if len(nbrs) and np.max(scores[nbrs]) >= m_phi:
                u = int(nbrs[int(np.argmax(scores[nbrs]))])
                op = ("explore", u, v, True)
            else:
                if came_from == v:
                    # root with no eligible neighbor: nothing to backtrack over
                    op = ("backtrack", v, v, False)
                else:
                    op = ("backtrack", came_from, v, True)
        else:  # backtrack, arriving at v from came_from
            log.append((steps, EV_BACKTRACK, v, m_phi))
            ck = _key(scores, came_from)
            nbrs = g.neighbors(v)
            best_u = None
            best_k = None
            for u in nbrs:
                u = int(u)
                if u == parent[v]:
                    continue
                if not (scores[u] >= m_phi):
                    continue
                k = _key(scores, u)
                if not (k < ck):
                    continue  # explored earlier in this DFS pass
                if best_k is None or k > best_k:
                    best_k = k
                    best_u = u
            if best_u is not None:
                op = ("explore", best_u, v, True)
            elif started[v]:
                # the DFS started here failed: discard it and resume the
                # previous threshold in the state we left it, as if we had
                # just returned to v from its parent
                started[v] = False
                m_phi = float(prev_phi[v])
                log.append((steps, EV_RESET_PHI, v, m_phi))
                op = ("explore", v, int(parent[v]), False)
            elif parent[v] == v:
                status = EXHAUSTED  # back at the root with nothing left
            else:
                op = ("backtrack", int(parent[v]), v, True)

    return PatchOutcome(
        path=path,
        status=status,
        steps=steps,
        distinct_visited=len(visited_any),
        max_vertex_memory_words=VERTEX_MEMORY_WORDS,
        event_log=log,
    )


def patch_route_history(g: Graph, s: int, obj: Objective,
                        step_limit: int | None = None) -> PatchOutcome:
    """Route with the history-in-message variant.

    The message stores the list of visited vertices and, per visited
    vertex, its best unexplored incident edge. Each step explores one
    edge: greedily from the current vertex when it has a strictly better
    unvisited neighbor, otherwise the best unexplored edge leaving any
    visited vertex. Steps count explored edges; relocating the message
    along known edges is free in this variant.
    """
    g.check_valid(s)
    t = obj.target
    g.check_valid(t)
    if step_limit is None:
        step_limit = default_patch_step_limit(g.params.n)
    if step_limit < 1:
        raise InvalidInputError("step_limit must be >= 1")

    scores = obj.scores(g)
    visited = {s}
    path = [s]
    log: list[tuple[int, str, int, float]] = [(0, EV_EXPLORE, s, math.nan)]
    steps = 0
    pos = s
    if s == t:
        return PatchOutcome(path, DELIVERED, 0, 1, VERTEX_MEMORY_WORDS, log)
    while True:
        # greedy choice from the current vertex when possible
        cand = None
        cand_key = None
        for u in g.neighbors(pos):
            u = int(u)
            if u in visited:
                continue
            k = _key(scores, u)
            if cand_key is None or k > cand_key:
                cand_key = k
                cand = u
        if cand is None or not (scores[cand] > scores[pos]):
            # local optimum: best unexplored edge from any visited vertex
            cand = None
            cand_key = None
            for v in visited:
                for u in g.neighbors(v):
                    u = int(u)
                    if u in visited:
                        continue
                    k = _key(scores, u)
                    if cand_key is None or k > cand_key:
                        cand_key = k
                        cand = u
        if cand is None:
            return PatchOutcome(path, EXHAUSTED, steps, len(visited),
                                VERTEX_MEMORY_WORDS, log)
        steps += 1
        visited.add(cand)
        path.append(cand)
        log.append((steps, EV_EXPLORE, cand, math.nan))
        pos = cand
        if cand == t:
            return PatchOutcome(path, DELIVERED, steps, len(visited),
                                VERTEX_MEMORY_WORDS, log)
        if steps >= step_limit:
            return PatchOutcome(path, STEP_LIMIT, steps, len(visited),
                                VERTEX_MEMORY_WORDS, log)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    first_violation: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_p1(outcome: PatchOutcome, g: Graph, obj: Objective) -> CheckResult:
    """Greedy choices: every move to an unexplored vertex picks the
    unexplored neighbor of largest objective."""
    scores = obj.scores(g)
    visited = {outcome.path[0]}
    for i in range(1, len(outcome.path)):
        src, dst = outcome.path[i - 1], outcome.path[i]
        if dst not in visited:
            k = _key(scores, dst)
            for u in g.neighbors(src):
                u = int(u)
                if u not in visited and _key(scores, u) > k:
                    return CheckResult(
                        False, i,
                        f"move {src}->{dst} skipped better unexplored neighbor {u}",
                    )
            visited.add(dst)
    return CheckResult(True)


def check_p2(outcome: PatchOutcome, poly_constant: float = 4.0,
             poly_exponent: float = 2.0) -> CheckResult:
    """Poly-time exploration: with k vertices explored, a new vertex is
    visited within poly_constant * k**poly_exponent steps."""
    last_new = 0
    k_at_last = 1
    seen = {outcome.path[0]}
    for i in range(1, len(outcome.path)):
        if outcome.path[i] not in seen:
            gap = i - last_new
            if gap > poly_constant * k_at_last ** poly_exponent:
                return CheckResult(
                    False, i,
                    f"{gap} steps without progress at k={k_at_last}",
                )
            seen.add(outcome.path[i])
            last_new = i
            k_at_last = len(seen)
    # trailing steps are allowed only within the same budget
    gap = len(outcome.path) - 1 - last_new
    if outcome.status == DELIVERED and gap > poly_constant * k_at_last ** poly_exponent:
        return CheckResult(False, len(outcome.path) - 1, "stalled tail")
    return CheckResult(True)


def check_p3(outcome: PatchOutcome, g: Graph, obj: Objective,
             poly_constant: float = 4.0, poly_exponent: float = 3.0) -> CheckResult:
    """Poly-time exhaustive search: after visiting a vertex v better than
    everything before, the component of v among vertices scoring at least
    phi(v) is fully visited (or the target found) within
    poly_constant * |S|**poly_exponent steps."""
    scores = obj.scores(g)
    t = obj.target
    best = -math.inf
    for i, v in enumerate(outcome.path):
        if not (scores[v] > best):
            continue
        best = scores[v]
        component = _component_at_least(g, v, scores[v], scores)
        budget = poly_constant * len(component) ** poly_exponent
        pending = set(component)
        pending.discard(v)
        found = v == t
        j = i
        while pending and not found and j + 1 < len(outcome.path):
            j += 1
            pending.discard(outcome.path[j])
            if outcome.path[j] == t:
                found = True
            if j - i > budget:
                return CheckResult(
                    False, j,
                    f"component of {v} (size {len(component)}) not finished "
                    f"within {budget:.0f} steps",
                )
        if pending and not found:
            if outcome.status == DELIVERED:
                return CheckResult(
                    False, len(outcome.path) - 1,
                    f"run ended before exhausting component of {v}",
                )
            # EXHAUSTED / STEP_LIMIT runs may legitimately end mid-search
            # only if the budget was not yet exceeded
            if len(outcome.path) - 1 - i > budget:
                return CheckResult(False, len(outcome.path) - 1, "budget exceeded")
    return CheckResult(True)


def _component_at_least(g: Graph, v: int, phi0: float, scores: np.ndarray) -> list[int]:
    """Connected component of v in the subgraph of scores >= phi0."""
    seen = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for u in g.neighbors(x):
            u = int(u)
            if u not in seen and scores[u] >= phi0:
                seen.add(u)
                stack.append(u)
    return sorted(seen)
