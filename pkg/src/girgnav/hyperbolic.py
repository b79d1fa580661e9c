"""Hyperbolic random graphs and their embedding as 1-dimensional GIRGs.

n vertices get polar coordinates (r, nu) on a hyperbolic disk of radius
R = 2*ln(n) + c_h, with radius density alpha_h*sinh(alpha_h*r) /
(cosh(alpha_h*R) - 1) and uniform angle. A pair at hyperbolic distance
d_H is connected with probability (1 + exp((d_H - R)/(2*t_h)))**-1, or
deterministically iff d_H <= R at temperature t_h = 0.

The embedding into GIRG coordinates maps w_v = n*exp(-r_v/2) and
x_v = nu_v/(2*pi), with d = 1, beta = 2*alpha_h + 1, alpha = 1/t_h and
w_min = exp(-c_h/2). The hyperbolic objective toward a target t is

    phi_h(v) = n / (w_t * w_min * sqrt(cosh(d_H(v, t))))

whose argmax over neighbors equals the argmin of hyperbolic distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import InvalidInputError
from .model import Graph, ModelParams, Vertex, build_graph
from .rngs import PHASE_EDGES, PHASE_VERTICES, PHASE_WEIGHTS, substream

TWO_PI = 2.0 * math.pi
_CHUNK = 4_000_000


@dataclass(frozen=True)
class HyperbolicParams:
    """Free parameters of the hyperbolic model plus the RNG seed."""

    n: int
    alpha_h: float = 0.75
    c_h: float = 0.0
    t_h: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInputError("n must be non-negative")
        if not (0.5 < self.alpha_h < 1.0):
            raise InvalidInputError(
                "alpha_h must lie in (1/2, 1) so the embedded power-law "
                "exponent 2*alpha_h + 1 stays in (2, 3)"
            )
        if self.t_h < 0:
            raise InvalidInputError("temperature t_h must be non-negative")
        if self.R <= 0:
            raise InvalidInputError("disk radius R = 2*ln(n) + c_h must be positive")

    @property
    def R(self) -> float:
        return 2.0 * math.log(max(self.n, 1)) + self.c_h


@dataclass(frozen=True)
class HyperbolicPoint:
    r: float
    nu: float

    def __post_init__(self):
        if self.r < 0:
            raise InvalidInputError("radius must be non-negative")
        if not (0.0 <= self.nu < TWO_PI):
            raise InvalidInputError("angle must lie in [0, 2*pi)")


def sample_radius(params: HyperbolicParams, uniform) -> float | np.ndarray:
    """Inverse-CDF radius: F(r) = (cosh(a*r) - 1)/(cosh(a*R) - 1)."""
    u = np.asarray(uniform, dtype=float)
    if np.any(u <= 0) or np.any(u > 1):
        raise InvalidInputError("uniform must lie in (0, 1]")
    a = params.alpha_h
    r = np.arccosh(1.0 + u * (math.cosh(a * params.R) - 1.0)) / a
    return float(r) if np.isscalar(uniform) else r


def cosh_hyperbolic_distance(rx, nux, ry, nuy) -> np.ndarray:
    """cosh of the hyperbolic distance; clamped to >= 1 for stability."""
    val = np.cosh(rx) * np.cosh(ry) - np.sinh(rx) * np.sinh(ry) * np.cos(nux - nuy)
    return np.maximum(val, 1.0)


def hyperbolic_distance(x: HyperbolicPoint, y: HyperbolicPoint) -> float:
    return float(np.arccosh(cosh_hyperbolic_distance(x.r, x.nu, y.r, y.nu)))


def connection_probability(params: HyperbolicParams, cosh_d) -> np.ndarray:
    """Edge probability as a function of cosh(d_H)."""
    cosh_d = np.asarray(cosh_d, dtype=float)
    cosh_r = math.cosh(params.R)
    if params.t_h == 0:
        return np.where(cosh_d <= cosh_r, 1.0, 0.0)
    d = np.arccosh(np.maximum(cosh_d, 1.0))
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp((d - params.R) / (2.0 * params.t_h)))


def embed_to_girg(params: HyperbolicParams, points) -> tuple[ModelParams, list[Vertex]]:
    """Map hyperbolic points to GIRG parameters and vertices."""
    mp = embedded_model_params(params)
    from .geometry import TorusPoint

    vertices = []
    for i, pt in enumerate(points):
        w = params.n * math.exp(-pt.r / 2.0)
        x = pt.nu / TWO_PI
        vertices.append(Vertex(i, TorusPoint((min(x, math.nextafter(1.0, 0.0)),)), w))
    return mp, vertices


def unembed_from_girg(params: HyperbolicParams, weight: float, x: float) -> HyperbolicPoint:
    """Inverse of embed_to_girg: (w, x) back to (r, nu)."""
    if weight <= 0:
        raise InvalidInputError("weight must be positive")
    r = -2.0 * math.log(weight / params.n)
    return HyperbolicPoint(max(r, 0.0), (x * TWO_PI) % TWO_PI)


def embedded_model_params(params: HyperbolicParams) -> ModelParams:
    return ModelParams(
        n=float(params.n),
        d=1,
        beta=2.0 * params.alpha_h + 1.0,
        w_min=math.exp(-params.c_h / 2.0),
        alpha=math.inf if params.t_h == 0 else 1.0 / params.t_h,
        kernel_c=1.0,
        c1=1.0,
        c2=1.0,
        seed=params.seed,
    )


def _cos_angle_threshold(params: HyperbolicParams, r_u, r_v):
    """cos of the largest angle at which (r_u, r_v) still connect (t_h=0).

    The pair connects iff cos(delta_nu) >= this value; it is increasing
    in each radius, so evaluating it at the smallest radii of two groups
    bounds the connection angle for every pair drawn from them.
    """
    num = np.cosh(r_u) * np.cosh(r_v) - math.cosh(params.R)
    den = np.sinh(r_u) * np.sinh(r_v)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(den > 0, num / den, np.where(num <= 0, -1.0, 2.0))
    return c


def _threshold_edges(params: HyperbolicParams, radii, angles) -> np.ndarray:
    """Exact edge set for t_h = 0 via weight buckets and angular windows."""
    cosh_r_cap = math.cosh(params.R)
    # bucket by the embedded weight scale: powers of two of exp(-r/2)
    # relative to the largest radius, i.e. buckets of r in steps of 2*ln(2)
    bucket_of = np.floor((params.R - radii) / (2.0 * math.log(2.0))).astype(int)
    bucket_of = np.maximum(bucket_of, 0)
    n_buckets = int(bucket_of.max()) + 1
    buckets = [np.flatnonzero(bucket_of == k) for k in range(n_buckets)]
    frac = angles / TWO_PI
    out: list[np.ndarray] = []
    cosh_rad = np.cosh(radii)
    sinh_rad = np.sinh(radii)
    for i in range(n_buckets):
        I = buckets[i]
        if len(I) == 0:
            continue
        for j in range(i, n_buckets):
            J = buckets[j]
            if len(J) == 0 or (i == j and len(I) < 2):
                continue
            same = i == j
            cbound = float(
                _cos_angle_threshold(params, radii[I].min(), radii[J].min())
            )
            if cbound > 1.0:
                continue  # no pair from these groups can connect
            theta_frac = (math.acos(max(cbound, -1.0))) / TWO_PI
            order = np.argsort(frac[J], kind="stable")
            J_sorted = J[order]
            fj = frac[J_sorted]
            ext = np.concatenate([fj, fj + 1.0])
            lo_val = frac[I] - theta_frac + np.where(frac[I] < theta_frac, 1.0, 0.0)
            hi_val = lo_val + 2.0 * theta_frac
            left = np.searchsorted(ext, lo_val, side="left")
            right = np.searchsorted(ext, np.minimum(hi_val, lo_val + 1.0), side="right")
            cnt = right - left
            csum = np.concatenate(([0], np.cumsum(cnt)))
            lo = 0
            while lo < len(I):
                hi = int(np.searchsorted(csum, csum[lo] + _CHUNK, side="right")) - 1
                hi = max(hi, lo + 1)
                c = cnt[lo:hi]
                m = int(c.sum())
                if m:
                    u = np.repeat(I[lo:hi], c)
                    offs = np.arange(m) - np.repeat(csum[lo:hi] - csum[lo], c)
                    v = J_sorted[(np.repeat(left[lo:hi], c) + offs) % len(J)]
                    if same:
                        keep = u < v
                        u, v = u[keep], v[keep]
                    if len(u):
                        cosh_d = cosh_rad[u] * cosh_rad[v] - sinh_rad[u] * sinh_rad[
                            v
                        ] * np.cos(angles[u] - angles[v])
                        hit = cosh_d <= cosh_r_cap
                        if hit.any():
                            out.append(np.stack([u[hit], v[hit]], axis=1))
                lo = hi
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    # windows are closed intervals, so a pair exactly on a wrapped window
    # boundary could be enumerated twice; deduplicate to be safe
    return np.unique(np.concatenate(out, axis=0), axis=0)


def _logistic_edges(params: HyperbolicParams, radii, angles) -> np.ndarray:
    """Quadratic reference sampler for positive temperature (small n)."""
    n = len(radii)
    rng = substream(params.seed, PHASE_EDGES)
    out = []
    for u in range(n - 1):
        v = np.arange(u + 1, n)
        cosh_d = cosh_hyperbolic_distance(radii[u], angles[u], radii[v], angles[v])
        p = connection_probability(params, cosh_d)
        hit = rng.random(len(v)) < p
        if hit.any():
            out.append(np.stack([np.full(int(hit.sum()), u), v[hit]], axis=1))
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(out, axis=0)


def graph_from_hyperbolic(params: HyperbolicParams, coords: np.ndarray,
                          edges: np.ndarray) -> Graph:
    """Assemble a Graph carrying both coordinate systems."""
    mp = embedded_model_params(params)
    radii = coords[:, 0]
    angles = coords[:, 1]
    weights = params.n * np.exp(-radii / 2.0)
    positions = (angles / TWO_PI).reshape(-1, 1)
    positions = np.minimum(positions, np.nextafter(1.0, 0.0))
    return build_graph(mp, positions, weights, edges,
                       hyperbolic=np.stack([radii, angles], axis=1),
                       hyp_params=params)


def sample_hyperbolic_graph(params: HyperbolicParams) -> Graph:
    """Sample a hyperbolic random graph with exactly n vertices."""
    n = params.n
    rng_pos = substream(params.seed, PHASE_VERTICES)
    angles = TWO_PI * rng_pos.random(n)
    rng_r = substream(params.seed, PHASE_WEIGHTS)
    radii = sample_radius(params, 1.0 - rng_r.random(n)) if n else np.empty(0)
    radii = np.asarray(radii, dtype=float)
    if n < 2:
        edges = np.empty((0, 2), dtype=np.int64)
    elif params.t_h == 0:
        edges = _threshold_edges(params, radii, angles)
    else:
        edges = _logistic_edges(params, radii, angles)
    return graph_from_hyperbolic(params, np.stack([radii, angles], axis=1), edges)


def phi_hyperbolic_values(g: Graph, t: int) -> np.ndarray:
    """Hyperbolic objective of every vertex toward t; inf at t itself."""
    if g.hyperbolic is None or g.hyp_params is None:
        raise InvalidInputError("graph carries no hyperbolic coordinates")
    g.check_valid(t)
    hp = g.hyp_params
    radii = g.hyperbolic[:, 0]
    angles = g.hyperbolic[:, 1]
    cosh_d = cosh_hyperbolic_distance(radii, angles, radii[t], angles[t])
    w_t = g.weights[t]
    w_min = g.params.w_min
    scores = hp.n / (w_t * w_min * np.sqrt(cosh_d))
    scores[t] = math.inf
    return scores


def phi_hyperbolic(g: Graph, v: int, t: int) -> float:
    """Hyperbolic objective of one vertex; v = t is rejected."""
    if v == t:
        raise InvalidInputError("objective of the target toward itself")
    g.check_valid(v)
    return float(phi_hyperbolic_values(g, t)[v])


def edges_from_girg_coordinates(g: Graph) -> np.ndarray:
    """Re-derive the t_h = 0 edge set from the GIRG coordinates alone.

    Unembeds (w, x) back to (r, nu) and evaluates the same hyperbolic
    threshold predicate, without touching the stored hyperbolic coords.
    """
    if g.hyp_params is None:
        raise InvalidInputError("graph carries no hyperbolic parameters")
    hp = g.hyp_params
    if hp.t_h != 0:
        raise InvalidInputError("only the threshold model is deterministic")
    radii = -2.0 * np.log(g.weights / hp.n)
    radii = np.maximum(radii, 0.0)
    angles = (g.positions[:, 0] * TWO_PI) % TWO_PI
    return _threshold_edges(hp, radii, angles)
