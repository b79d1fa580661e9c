"""Geometric inhomogeneous random graphs.

Vertices come from a Poisson point process on the torus with power-law
weights; pairs connect independently with a probability that grows with
the weight product and decays with distance. Three regimes are supported:

* alpha < inf   polynomial decay, p = min(1, kernel_c * q**alpha)
* alpha = inf   hard threshold at distance**d <= c1 * w_u*w_v/(w_min*n)
* ep3           short edges deterministic (probability exactly 1 inside
                the c1 threshold), on top of either regime

where q = w_u*w_v / (w_min * n * distance**d).

Edge sampling uses weight buckets crossed with a torus grid per bucket
pair, so expected work is near-linear in n + |E| while the realized edge
distribution is exactly the independent-pair distribution: pairs in
neighboring cells are tested one by one, distant pairs are drawn by
binomial skipping under a dominating probability and rejection-corrected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import InvalidInputError, TorusPoint, torus_distance_arrays
from .rngs import PHASE_EDGES, PHASE_PAIRS, PHASE_VERTICES, PHASE_WEIGHTS, substream

INFINITY = math.inf

# pair-array chunk cap, keeps peak memory bounded during edge sampling
_CHUNK = 4_000_000


@dataclass(frozen=True)
class ModelParams:
    """Free parameters of the graph model plus the RNG seed."""

    n: float
    d: int = 1
    beta: float = 2.5
    w_min: float = 1.0
    alpha: float = INFINITY
    kernel_c: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    ep3: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInputError("n must be non-negative")
        if self.d < 1:
            raise InvalidInputError("d must be a positive integer")
        if not (2.0 < self.beta < 3.0):
            raise InvalidInputError("beta must lie in (2, 3)")
        if self.w_min <= 0:
            raise InvalidInputError("w_min must be positive")
        if not (self.alpha > 1.0):
            raise InvalidInputError("alpha must exceed 1 (or be infinity)")
        if self.kernel_c <= 0:
            raise InvalidInputError("kernel_c must be positive")
        if not (0 < self.c1 <= self.c2):
            raise InvalidInputError("need 0 < c1 <= c2")


@dataclass(frozen=True)
class Vertex:
    id: int
    pos: TorusPoint
    weight: float


@dataclass(frozen=True)
class Graph:
    """Immutable sampled graph: positions, weights, CSR adjacency.

    ``indices[indptr[v]:indptr[v+1]]`` are the neighbors of v in
    increasing id order. ``hyperbolic`` optionally carries the original
    (r, nu) coordinates when the graph came from the hyperbolic sampler.
    """

    params: ModelParams
    positions: np.ndarray
    weights: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    hyperbolic: np.ndarray | None = None
    hyp_params: object | None = None

    @property
    def num_vertices(self) -> int:
        return len(self.weights)

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def vertex(self, v: int) -> Vertex:
        return Vertex(v, TorusPoint(tuple(self.positions[v])), float(self.weights[v]))

    def check_valid(self, v) -> None:
        if not (0 <= v < self.num_vertices):
            raise InvalidInputError(f"vertex id {v} out of range")


def sample_weight(params: ModelParams, uniform) -> float | np.ndarray:
    """Inverse-CDF power-law weight: w_min * u**(-1/(beta-1)).

    The density is the exact probability density
    f(w) = (beta-1) * w_min**(beta-1) * w**(-beta) for w >= w_min,
    so P[W >= w] = (w / w_min)**(1 - beta).
    """
    u = np.asarray(uniform, dtype=float)
    if np.any(u <= 0) or np.any(u > 1):
        raise InvalidInputError("uniform must lie in (0, 1]")
    w = params.w_min * u ** (-1.0 / (params.beta - 1.0))
    return float(w) if np.isscalar(uniform) else w


def sample_vertices(params: ModelParams):
    """Poisson(n) many vertices, uniform positions, power-law weights.

    Returns (positions, weights) as arrays of shape (N, d) and (N,).
    """
    rng_pos = substream(params.seed, PHASE_VERTICES)
    count = int(rng_pos.poisson(params.n))
    positions = rng_pos.random((count, params.d))
    rng_w = substream(params.seed, PHASE_WEIGHTS)
    uniforms = 1.0 - rng_w.random(count)  # in (0, 1]
    weights = sample_weight(params, uniforms) if count else np.empty(0)
    return positions, np.asarray(weights, dtype=float)


def _threshold_dd(params: ModelParams, wu, wv):
    """distance**d below which the pair is inside the c1 ball."""
    return params.c1 * wu * wv / (params.w_min * params.n)


def edge_probability_arrays(params: ModelParams, wu, wv, dist) -> np.ndarray:
    """Vectorized connection probability for weight/distance arrays."""
    wu = np.asarray(wu, dtype=float)
    wv = np.asarray(wv, dtype=float)
    dist = np.asarray(dist, dtype=float)
    dd = dist ** params.d
    ball = _threshold_dd(params, wu, wv)
    if params.alpha == INFINITY:
        p = np.where(dd <= ball, 1.0, 0.0)
    else:
        with np.errstate(divide="ignore", over="ignore"):
            q = wu * wv / (params.w_min * params.n * dd)
            p = np.minimum(1.0, params.kernel_c * q ** params.alpha)
        p = np.where(dd == 0.0, 1.0, p)
        if params.ep3:
            p = np.where(dd <= ball, 1.0, p)
    return p


def edge_probability(params: ModelParams, u: Vertex, v: Vertex) -> float:
    """Connection probability of two concrete vertices."""
    if u.id == v.id:
        raise InvalidInputError("edge probability of a vertex with itself")
    from .geometry import torus_distance

    dist = torus_distance(u.pos, v.pos)
    return float(edge_probability_arrays(params, u.weight, v.weight, dist))


def marginal_edge_probability_estimate(
    params: ModelParams, w_u: float, w_v: float, trials: int, seed: int = 0
) -> float:
    """Monte-Carlo estimate of P[edge] for fixed weights, random positions."""
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    rng = substream(seed, PHASE_PAIRS)
    x = rng.random((trials, params.d))
    y = rng.random((trials, params.d))
    dist = torus_distance_arrays(x, y)
    return float(edge_probability_arrays(params, w_u, w_v, dist).mean())


# ---------------------------------------------------------------------------
# edge sampling
# ---------------------------------------------------------------------------


def _flat_cells(points: np.ndarray, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis and flattened (row-major) cell indices for grid side 1/L."""
    idx = np.minimum((points * L).astype(np.int64), L - 1)
    flat = idx[:, 0].copy()
    for k in range(1, points.shape[1]):
        flat = flat * L + idx[:, k]
    return idx, flat


def _emit_pairs(
    params, weights, positions, u_ids, v_ids, rng, out, same_bucket, deterministic
):
    """Evaluate candidate pairs exactly and append realized edges to out."""
    if same_bucket:
        keep = u_ids < v_ids
        u_ids = u_ids[keep]
        v_ids = v_ids[keep]
    if len(u_ids) == 0:
        return
    dist = torus_distance_arrays(positions[u_ids], positions[v_ids])
    if deterministic:
        hit = dist ** params.d <= _threshold_dd(params, weights[u_ids], weights[v_ids])
    else:
        p = edge_probability_arrays(params, weights[u_ids], weights[v_ids], dist)
        hit = rng.random(len(u_ids)) < p
    if hit.any():
        out.append(np.stack([u_ids[hit], v_ids[hit]], axis=1))


def _bruteforce_pair(params, weights, positions, I, J, same, rng, out, deterministic):
    step = max(1, _CHUNK // max(1, len(J)))
    for lo in range(0, len(I), step):
        block = I[lo:lo + step]
        u = np.repeat(block, len(J))
        v = np.tile(J, len(block))
        _emit_pairs(params, weights, positions, u, v, rng, out, same, deterministic)


def _near_offsets(d: int) -> np.ndarray:
    grids = np.meshgrid(*([np.array([-1, 0, 1])] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _far_offsets(L: int, d: int):
    """Canonical offsets delta in {0..L-1}^d with torus Chebyshev dist >= 2."""
    axes = np.meshgrid(*([np.arange(L)] * d), indexing="ij")
    delta = np.stack([a.ravel() for a in axes], axis=1)
    ring = np.minimum(delta, L - delta).max(axis=1)
    far = ring >= 2
    return delta[far], ring[far]


def _sample_bucket_pair(params, weights, positions, I, J, same, rng, out):
    ni, nj = len(I), len(J)
    if ni == 0 or nj == 0 or (same and ni < 2):
        return
    d = params.d
    wmax_prod = float(weights[I].max() * weights[J].max()) / (params.w_min * params.n)
    threshold_only = params.alpha == INFINITY
    if threshold_only:
        r_star = (params.c1 * wmax_prod) ** (1.0 / d)
        L = int(1.0 / r_star) if r_star > 0 else 10**9
    else:
        r1 = (params.kernel_c ** (1.0 / params.alpha) * wmax_prod) ** (1.0 / d)
        if params.ep3:
            r1 = max(r1, (params.c1 * wmax_prod) ** (1.0 / d))
        # cell side >= 2*r1 keeps the dominating probability of the first
        # far ring at most 2**(-alpha*d) < 1
        L = int(1.0 / (2.0 * r1)) if r1 > 0 else 10**9
    # more cells than points is wasted setup; dominating bounds stay valid
    cap = max(4, int((8.0 * max(ni, nj)) ** (1.0 / d)) + 1)
    L = min(L, cap)
    if L < 4:
        _bruteforce_pair(params, weights, positions, I, J, same, rng, out, threshold_only)
        return

    idx_i, _ = _flat_cells(positions[I], L)
    _, flat_j = _flat_cells(positions[J], L)
    order = np.argsort(flat_j, kind="stable")
    flat_j_sorted = flat_j[order]
    J_sorted = J[order]

    # --- near part: all pairs in cells within Chebyshev distance 1 ---
    for delta in _near_offsets(d):
        shifted = (idx_i + delta) % L
        target = shifted[:, 0].copy()
        for k in range(1, d):
            target = target * L + shifted[:, k]
        left = np.searchsorted(flat_j_sorted, target, side="left")
        right = np.searchsorted(flat_j_sorted, target, side="right")
        cnt = right - left
        total = int(cnt.sum())
        if total == 0:
            continue
        # chunk over source vertices to bound the pair arrays
        csum = np.concatenate(([0], np.cumsum(cnt)))
        lo = 0
        while lo < ni:
            hi = int(np.searchsorted(csum, csum[lo] + _CHUNK, side="right")) - 1
            hi = max(hi, lo + 1)
            c = cnt[lo:hi]
            m = int(c.sum())
            if m:
                u = np.repeat(I[lo:hi], c)
                starts = left[lo:hi]
                offs = np.arange(m) - np.repeat(csum[lo:hi] - csum[lo], c)
                v = J_sorted[np.repeat(starts, c) + offs]
                _emit_pairs(
                    params, weights, positions, u, v, rng, out, same, threshold_only
                )
            lo = hi

    if threshold_only:
        return

    # --- far part: binomial skipping under a dominating probability ---
    delta_far, ring = _far_offsets(L, d)
    if len(delta_far) == 0:
        return
    cell_side = 1.0 / L
    min_dist = (ring - 1) * cell_side
    pbar = np.minimum(
        1.0, params.kernel_c * (wmax_prod / min_dist ** d) ** params.alpha
    )
    counts_per_cell = np.bincount(flat_j, minlength=L ** d)
    mj = int(counts_per_cell.max())
    if mj == 0:
        return
    slots = ni * mj
    n_cand = rng.binomial(slots, pbar)
    hit = np.flatnonzero(n_cand)
    if len(hit) == 0:
        return
    # each hit offset needs a uniform subset of n_cand distinct slots; draw
    # with replacement in bulk and redraw the (rare) offsets with collisions
    cnts = n_cand[hit]
    offs = np.repeat(hit, cnts)
    slotv = rng.integers(0, slots, size=len(offs))
    grp = np.repeat(np.arange(len(hit)), cnts)
    order = np.lexsort((slotv, grp))
    gs, ds = grp[order], slotv[order]
    dup = (gs[1:] == gs[:-1]) & (ds[1:] == ds[:-1])
    for gi in np.unique(gs[1:][dup]):
        # redraw this offset's subset as a uniform k-subset directly; the
        # with-replacement draw conditioned on all-distinct has the same law
        sel = np.flatnonzero(grp == gi)
        slotv[sel] = rng.permutation(slots)[:len(sel)]

    cell_starts = np.concatenate(([0], np.cumsum(counts_per_cell)))
    u_pos = slotv // mj
    b = slotv % mj
    u = I[u_pos]
    shifted = (idx_i[u_pos] + delta_far[offs]) % L
    target = shifted[:, 0].copy()
    for k in range(1, d):
        target = target * L + shifted[:, k]
    real = b < counts_per_cell[target]  # phantom slots beyond cell occupancy
    u, b, target, offs = u[real], b[real], target[real], offs[real]
    if len(u) == 0:
        return
    v = J_sorted[cell_starts[target] + b]
    if same:
        keep = u < v
        u, v, offs = u[keep], v[keep], offs[keep]
    if len(u) == 0:
        return
    dist = torus_distance_arrays(positions[u], positions[v])
    p = edge_probability_arrays(params, weights[u], weights[v], dist)
    acc = rng.random(len(u)) < p / pbar[offs]
    if acc.any():
        out.append(np.stack([u[acc], v[acc]], axis=1))


def sample_edges(params: ModelParams, weights: np.ndarray, positions: np.ndarray,
                 seed: int | None = None) -> np.ndarray:
    """Sample the edge set for given vertices; returns an (E, 2) id array.

    Every unordered pair is realized independently with its exact
    connection probability.
    """
    n_vertices = len(weights)
    if n_vertices < 2:
        return np.empty((0, 2), dtype=np.int64)
    seed = params.seed if seed is None else seed
    bucket_of = np.floor(np.log2(np.maximum(weights / params.w_min, 1.0))).astype(int)
    n_buckets = int(bucket_of.max()) + 1
    buckets = [np.flatnonzero(bucket_of == k) for k in range(n_buckets)]
    out: list[np.ndarray] = []
    for i in range(n_buckets):
        if len(buckets[i]) == 0:
            continue
        for j in range(i, n_buckets):
            if len(buckets[j]) == 0:
                continue
            rng = substream(seed, PHASE_EDGES, i, j)
            _sample_bucket_pair(
                params, weights, positions, buckets[i], buckets[j], i == j, rng, out
            )
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(out, axis=0)


def sample_edges_bruteforce(params: ModelParams, weights, positions,
                            seed: int | None = None) -> np.ndarray:
    """Quadratic reference sampler (oracle for tests): one coin per pair."""
    n_vertices = len(weights)
    seed = params.seed if seed is None else seed
    rng = substream(seed, PHASE_EDGES, 999)
    out = []
    for u in range(n_vertices - 1):
        v = np.arange(u + 1, n_vertices)
        dist = torus_distance_arrays(positions[u], positions[v])
        p = edge_probability_arrays(params, weights[u], weights[v], dist)
        hit = rng.random(len(v)) < p
        if hit.any():
            out.append(np.stack([np.full(int(hit.sum()), u), v[hit]], axis=1))
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(out, axis=0)


def build_graph(params: ModelParams, positions, weights, edges,
                hyperbolic=None, hyp_params=None) -> Graph:
    """Assemble the immutable CSR graph from an (E, 2) edge id array."""
    n_vertices = len(weights)
    if len(edges):
        u = np.concatenate([edges[:, 0], edges[:, 1]])
        v = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((v, u))
        indices = v[order]
        counts = np.bincount(u, minlength=n_vertices)
    else:
        indices = np.empty(0, dtype=np.int64)
        counts = np.zeros(n_vertices, dtype=np.int64)
    indptr = np.concatenate(([0], np.cumsum(counts)))
    return Graph(
        params=params,
        positions=np.ascontiguousarray(positions, dtype=float),
        weights=np.ascontiguousarray(weights, dtype=float),
        indptr=indptr.astype(np.int64),
        indices=indices.astype(np.int64),
        hyperbolic=hyperbolic,
        hyp_params=hyp_params,
    )


def sample_graph(params: ModelParams, fixed_vertices=None) -> Graph:
    """Sample a full GIRG instance.

    ``fixed_vertices`` is an optional list of (weight, coords) pairs that
    are injected with ids 0, 1, ... before the Poisson vertices; edges are
    still drawn independently for every pair.
    """
    positions, weights = sample_vertices(params)
    if fixed_vertices:
        fw = np.array([w for w, _ in fixed_vertices], dtype=float)
        fp = np.array([list(c) for _, c in fixed_vertices], dtype=float)
        if fp.ndim == 1:
            fp = fp.reshape(len(fixed_vertices), params.d)
        positions = np.vstack([fp, positions.reshape(-1, params.d)])
        weights = np.concatenate([fw, weights])
    edges = sample_edges(params, weights, positions)
    return build_graph(params, positions, weights, edges)
