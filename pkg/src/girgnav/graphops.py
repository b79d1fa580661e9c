"""Read-only graph queries: BFS hop distances, connected components, and
objective-level vertex sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import InvalidInputError
from .model import Graph

UNREACHABLE = -1  # sentinel returned by bfs_distance; never used in arithmetic


@dataclass(frozen=True)
class ComponentLabeling:
    """Partition of the vertex set into connected components.

    Component ids are assigned in order of each component's smallest
    vertex id, so the labeling is deterministic.
    """

    component_id: np.ndarray
    component_sizes: np.ndarray

    def same_component(self, u: int, v: int) -> bool:
        return bool(self.component_id[u] == self.component_id[v])


def bfs_distances_from(g: Graph, s: int) -> np.ndarray:
    """Hop distance from s to every vertex; UNREACHABLE where disconnected."""
    g.check_valid(s)
    dist = np.full(g.num_vertices, UNREACHABLE, dtype=np.int64)
    dist[s] = 0
    frontier = np.array([s], dtype=np.int64)
    level = 0
    while len(frontier):
        level += 1
        # expand the whole frontier at once through the CSR arrays
        counts = g.indptr[frontier + 1] - g.indptr[frontier]
        total = int(counts.sum())
        if total == 0:
            break
        starts = g.indptr[frontier]
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        nbrs = g.indices[np.repeat(starts, counts) + offs]
        fresh = nbrs[dist[nbrs] == UNREACHABLE]
        if len(fresh) == 0:
            break
        frontier = np.unique(fresh)
        dist[frontier] = level
    return dist


def bfs_distance(g: Graph, s: int, t: int) -> int:
    """Shortest hop count from s to t, or UNREACHABLE."""
    g.check_valid(s)
    g.check_valid(t)
    if s == t:
        return 0
    dist = np.full(g.num_vertices, UNREACHABLE, dtype=np.int64)
    dist[s] = 0
    frontier = np.array([s], dtype=np.int64)
    level = 0
    while len(frontier):
        level += 1
        counts = g.indptr[frontier + 1] - g.indptr[frontier]
        total = int(counts.sum())
        if total == 0:
            break
        starts = g.indptr[frontier]
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        nbrs = g.indices[np.repeat(starts, counts) + offs]
        fresh = nbrs[dist[nbrs] == UNREACHABLE]
        if len(fresh) == 0:
            break
        frontier = np.unique(fresh)
        if dist[t] == UNREACHABLE and np.any(frontier == t):
            return level
        dist[frontier] = level
    return UNREACHABLE


def connected_components(g: Graph) -> ComponentLabeling:
    """BFS labeling; component ids ordered by smallest contained vertex."""
    n = g.num_vertices
    comp = np.full(n, -1, dtype=np.int64)
    sizes = []
    next_id = 0
    for s in range(n):
        if comp[s] != -1:
            continue
        comp[s] = next_id
        frontier = np.array([s], dtype=np.int64)
        size = 1
        while len(frontier):
            counts = g.indptr[frontier + 1] - g.indptr[frontier]
            total = int(counts.sum())
            if total == 0:
                break
            starts = g.indptr[frontier]
            offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
            nbrs = g.indices[np.repeat(starts, counts) + offs]
            fresh = np.unique(nbrs[comp[nbrs] == -1])
            comp[fresh] = next_id
            size += len(fresh)
            frontier = fresh
        sizes.append(size)
        next_id += 1
    return ComponentLabeling(comp, np.array(sizes, dtype=np.int64))


def vertices_above_objective(g: Graph, t: int, phi0: float) -> np.ndarray:
    """Ids of all v != t whose objective toward t is >= phi0, plus t."""
    if phi0 <= 0:
        raise InvalidInputError("phi0 must be positive")
    from .routing import phi_values

    scores = phi_values(g, t)  # +inf at t itself, so t always qualifies
    return np.flatnonzero(scores >= phi0)
