"""Objective functions and greedy geometric routing.

The exact objective of a vertex v toward a target t is

    phi(v) = w_v / (w_min * n * ||x_v - x_t||^d)

with the sentinel TOP (greater than every finite score) at v = t, so the
target is always the unique global maximum. The relaxed objective
multiplies phi by a deterministic per-vertex perturbation

    phi_relaxed(v) = phi(v) * B_v * min(w_v, 1/phi(v))**E_v

where B_v is uniform in a configurable band and E_v uniform in
[-g(n), g(n)] for a vanishing exponent g; both are derived statelessly
from (relax_seed, v). The hyperbolic objective scores by hyperbolic
distance to the target and is handled by the same router.

Greedy routing repeatedly moves to the neighbor of maximal score and
fails at a local maximum; ties break toward the smallest vertex id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import InvalidInputError, torus_distance_arrays
from .model import Graph
from .rngs import PHASE_RELAX, substream

TOP = math.inf

EXACT_PHI = "EXACT_PHI"
RELAXED_PHI = "RELAXED_PHI"
HYPERBOLIC_PHI = "HYPERBOLIC_PHI"

DELIVERED = "DELIVERED"
DEAD_END = "DEAD_END"
STEP_LIMIT = "STEP_LIMIT"


def default_relax_exponent(n: float) -> float:
    """Slowly vanishing exponent bound: 1/ln(ln(max(n, 27)))."""
    return 1.0 / math.log(math.log(max(n, 27.0)))


def default_step_limit(n: float) -> int:
    """Default greedy step budget: 10 * ceil(log2(n) + 1)."""
    return 10 * math.ceil(math.log2(max(n, 2.0)) + 1)


@dataclass
class Objective:
    """A scoring function over vertices for a fixed target."""

    kind: str
    target: int
    relax_factor_band: tuple[float, float] = (1.0, 1.0)
    relax_exponent_fn: object = None  # function n -> bound in [0, 1)
    relax_seed: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in (EXACT_PHI, RELAXED_PHI, HYPERBOLIC_PHI):
            raise InvalidInputError(f"unknown objective kind {self.kind!r}")
        lo, hi = self.relax_factor_band
        if not (0 < lo <= hi):
            raise InvalidInputError("relaxation band bounds must be positive")

    def scores(self, g: Graph) -> np.ndarray:
        """All vertex scores toward the target (cached per graph)."""
        key = id(g)
        if key not in self._cache:
            self._cache.clear()  # one graph at a time is enough
            self._cache[key] = self._compute(g)
        return self._cache[key]

    def score(self, g: Graph, v: int) -> float:
        return float(self.scores(g)[v])

    def _compute(self, g: Graph) -> np.ndarray:
        t = self.target
        g.check_valid(t)
        if self.kind == HYPERBOLIC_PHI:
            from .hyperbolic import phi_hyperbolic_values

            return phi_hyperbolic_values(g, t)
        scores = phi_values(g, t)
        if self.kind == RELAXED_PHI:
            n_vertices = g.num_vertices
            rng = substream(self.relax_seed, PHASE_RELAX)
            lo, hi = self.relax_factor_band
            b = lo + (hi - lo) * rng.random(n_vertices)
            bound = (
                self.relax_exponent_fn(g.params.n)
                if self.relax_exponent_fn is not None
                else default_relax_exponent(g.params.n)
            )
            e = rng.uniform(-bound, bound, n_vertices)
            finite = np.isfinite(scores)
            base = np.minimum(g.weights[finite], 1.0 / scores[finite])
            scores[finite] *= b[finite] * base ** e[finite]
        return scores


def phi_values(g: Graph, t: int) -> np.ndarray:
    """Exact objective of every vertex toward t; TOP (inf) at t."""
    g.check_valid(t)
    dist = torus_distance_arrays(g.positions, g.positions[t])
    with np.errstate(divide="ignore"):
        scores = g.weights / (g.params.w_min * g.params.n * dist ** g.params.d)
    scores[t] = TOP
    return scores


def phi(g: Graph, v: int, t: int) -> float:
    """Exact objective of one vertex; TOP when v = t."""
    g.check_valid(v)
    return float(phi_values(g, t)[v])


def phi_relaxed(g: Graph, v: int, t: int, obj: Objective) -> float:
    """Relaxed objective of one vertex under obj; TOP when v = t."""
    if obj.kind != RELAXED_PHI:
        raise InvalidInputError("objective kind must be RELAXED_PHI")
    if obj.target != t:
        raise InvalidInputError("objective target mismatch")
    g.check_valid(v)
    return float(obj.scores(g)[v])


@dataclass(frozen=True)
class StepTrace:
    chosen: int
    score: float
    neighbors_inspected: int


@dataclass(frozen=True)
class RouteOutcome:
    path: list[int]
    status: str
    steps: int
    trace: list[StepTrace]


def best_neighbor(g: Graph, v: int, scores: np.ndarray) -> int | None:
    """Neighbor of v with maximal score; smallest id on ties; None if none."""
    nbrs = g.neighbors(v)
    if len(nbrs) == 0:
        return None
    # neighbors are sorted by id, so argmax returns the smallest-id maximum
    return int(nbrs[int(np.argmax(scores[nbrs]))])


def greedy_route(g: Graph, s: int, obj: Objective, step_limit: int | None = None) -> RouteOutcome:
    """Follow the maximal-score neighbor until delivery or a dead end."""
    g.check_valid(s)
    g.check_valid(obj.target)
    if step_limit is None:
        step_limit = default_step_limit(g.params.n if g.params else g.num_vertices)
    if step_limit < 1:
        raise InvalidInputError("step_limit must be >= 1")
    t = obj.target
    if s == t:
        return RouteOutcome([s], DELIVERED, 0, [])
    scores = obj.scores(g)
    path = [s]
    trace: list[StepTrace] = []
    current = s
    while True:
        nxt = best_neighbor(g, current, scores)
        if nxt is None or not (scores[nxt] > scores[current]):
            return RouteOutcome(path, DEAD_END, len(path) - 1, trace)
        path.append(nxt)
        trace.append(StepTrace(nxt, float(scores[nxt]), g.degree(current)))
        if nxt == t:
            return RouteOutcome(path, DELIVERED, len(path) - 1, trace)
        if len(path) - 1 >= step_limit:
            return RouteOutcome(path, STEP_LIMIT, len(path) - 1, trace)
        current = nxt
