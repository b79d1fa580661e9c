"""Line-oriented text serialization for sampled graphs.

Two versioned formats share one container layout:

``girg-graph v1``
    header, params line, ``vertices <count>``, one line per vertex
    (``<id> <weight> <coord_1> ... <coord_d>``), ``edges <count>``, one
    line per edge (``<id_u> <id_v>`` with id_u < id_v).

``hyperbolic-graph v1``
    same container with per-vertex line ``<id> <r> <nu>``.

Floating-point fields are written with 17 significant digits so the
round trip is exact for 64-bit floats.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .geometry import InvalidInputError
from .model import Graph, ModelParams, build_graph

GIRG_HEADER = "girg-graph v1"
HYPERBOLIC_HEADER = "hyperbolic-graph v1"


class FileFormatError(ValueError):
    """Raised when a graph file does not match its declared format."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _params_line(p: ModelParams) -> str:
    alpha = "inf" if math.isinf(p.alpha) else _fmt(p.alpha)
    return (
        f"params n={_fmt(p.n)} d={p.d} beta={_fmt(p.beta)} wmin={_fmt(p.w_min)} "
        f"alpha={alpha} kernel_c={_fmt(p.kernel_c)} c1={_fmt(p.c1)} c2={_fmt(p.c2)} "
        f"ep3={1 if p.ep3 else 0} seed={p.seed}"
    )


def _parse_params(line: str) -> ModelParams:
    parts = line.split()
    if not parts or parts[0] != "params":
        raise FileFormatError(f"expected params line, got: {line!r}")
    kv = {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise FileFormatError(f"malformed params token {tok!r}")
        k, v = tok.split("=", 1)
        kv[k] = v
    try:
        return ModelParams(
            n=float(kv["n"]),
            d=int(kv["d"]),
            beta=float(kv["beta"]),
            w_min=float(kv["wmin"]),
            alpha=math.inf if kv["alpha"] == "inf" else float(kv["alpha"]),
            kernel_c=float(kv["kernel_c"]),
            c1=float(kv["c1"]),
            c2=float(kv["c2"]),
            ep3=kv["ep3"] == "1",
            seed=int(kv["seed"]),
        )
    except KeyError as e:
        raise FileFormatError(f"params line missing field {e}") from e
    except (ValueError, InvalidInputError) as e:
        raise FileFormatError(f"invalid params line: {e}") from e


def _edge_list(g: Graph) -> np.ndarray:
    """Unique edges as an (E, 2) array with id_u < id_v, sorted."""
    u = np.repeat(np.arange(g.num_vertices), np.diff(g.indptr))
    v = g.indices
    keep = u < v
    return np.stack([u[keep], v[keep]], axis=1)


def write_girg_graph(g: Graph, path: str | os.PathLike) -> None:
    lines = [GIRG_HEADER, _params_line(g.params), f"vertices {g.num_vertices}"]
    for i in range(g.num_vertices):
        coords = " ".join(_fmt(c) for c in g.positions[i])
        lines.append(f"{i} {_fmt(g.weights[i])} {coords}")
    edges = _edge_list(g)
    lines.append(f"edges {len(edges)}")
    for a, b in edges:
        lines.append(f"{a} {b}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def _read_lines(path) -> list[str]:
    with open(path) as f:
        return [ln.rstrip("\n") for ln in f if ln.strip()]


def _expect_count(line: str, keyword: str) -> int:
    parts = line.split()
    if len(parts) != 2 or parts[0] != keyword:
        raise FileFormatError(f"expected '{keyword} <count>', got: {line!r}")
    return int(parts[1])


def read_girg_graph(path: str | os.PathLike) -> Graph:
    lines = _read_lines(path)
    if not lines or lines[0] != GIRG_HEADER:
        raise FileFormatError(f"missing header {GIRG_HEADER!r}")
    params = _parse_params(lines[1])
    n_vertices = _expect_count(lines[2], "vertices")
    pos = np.zeros((n_vertices, params.d))
    weights = np.zeros(n_vertices)
    row = 3
    for i in range(n_vertices):
        parts = lines[row + i].split()
        if len(parts) != 2 + params.d or int(parts[0]) != i:
            raise FileFormatError(f"bad vertex line: {lines[row + i]!r}")
        weights[i] = float(parts[1])
        pos[i] = [float(c) for c in parts[2:]]
    row += n_vertices
    n_edges = _expect_count(lines[row], "edges")
    row += 1
    edges = np.zeros((n_edges, 2), dtype=np.int64)
    for k in range(n_edges):
        a, b = lines[row + k].split()
        edges[k] = (int(a), int(b))
    if len(edges) and (edges.min() < 0 or edges.max() >= n_vertices):
        raise FileFormatError("edge endpoint out of range")
    return build_graph(params, pos, weights, edges)


def write_hyperbolic_graph(g: Graph, path: str | os.PathLike) -> None:
    if g.hyperbolic is None or g.hyp_params is None:
        raise InvalidInputError("graph carries no hyperbolic coordinates")
    hp = g.hyp_params
    lines = [
        HYPERBOLIC_HEADER,
        f"params n={hp.n} alpha_h={_fmt(hp.alpha_h)} c_h={_fmt(hp.c_h)} "
        f"t_h={_fmt(hp.t_h)} seed={hp.seed}",
        f"vertices {g.num_vertices}",
    ]
    for i in range(g.num_vertices):
        r, nu = g.hyperbolic[i]
        lines.append(f"{i} {_fmt(r)} {_fmt(nu)}")
    edges = _edge_list(g)
    lines.append(f"edges {len(edges)}")
    for a, b in edges:
        lines.append(f"{a} {b}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def read_hyperbolic_graph(path: str | os.PathLike) -> Graph:
    from .hyperbolic import HyperbolicParams, graph_from_hyperbolic

    lines = _read_lines(path)
    if not lines or lines[0] != HYPERBOLIC_HEADER:
        raise FileFormatError(f"missing header {HYPERBOLIC_HEADER!r}")
    parts = lines[1].split()
    if not parts or parts[0] != "params":
        raise FileFormatError(f"expected params line, got: {lines[1]!r}")
    kv = dict(tok.split("=", 1) for tok in parts[1:])
    try:
        hp = HyperbolicParams(
            n=int(kv["n"]),
            alpha_h=float(kv["alpha_h"]),
            c_h=float(kv["c_h"]),
            t_h=float(kv["t_h"]),
            seed=int(kv["seed"]),
        )
    except (KeyError, ValueError, InvalidInputError) as e:
        raise FileFormatError(f"invalid params line: {e}") from e
    n_vertices = _expect_count(lines[2], "vertices")
    coords = np.zeros((n_vertices, 2))
    row = 3
    for i in range(n_vertices):
        parts = lines[row + i].split()
        if len(parts) != 3 or int(parts[0]) != i:
            raise FileFormatError(f"bad vertex line: {lines[row + i]!r}")
        coords[i] = (float(parts[1]), float(parts[2]))
    row += n_vertices
    n_edges = _expect_count(lines[row], "edges")
    row += 1
    edges = np.zeros((n_edges, 2), dtype=np.int64)
    for k in range(n_edges):
        a, b = lines[row + k].split()
        edges[k] = (int(a), int(b))
    if len(edges) and (edges.min() < 0 or edges.max() >= n_vertices):
        raise FileFormatError("edge endpoint out of range")
    return graph_from_hyperbolic(hp, coords, edges)
