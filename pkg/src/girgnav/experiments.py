"""Trial runner and statistics: samples fresh graphs, routes random or
fixed (source, target) pairs with the requested algorithms, and
aggregates success rates, step counts, and stretch.

Results are written as CSV with a schema-version header row so outputs
are byte-identical across runs with the same configuration.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import InvalidInputError
from .graphops import UNREACHABLE, bfs_distance
from .hyperbolic import HyperbolicParams, sample_hyperbolic_graph
from .model import Graph, ModelParams, sample_graph
from .patching import patch_route, patch_route_history
from .rngs import PHASE_TRIAL, substream
from .routing import (
    EXACT_PHI,
    HYPERBOLIC_PHI,
    RELAXED_PHI,
    Objective,
    greedy_route,
)

CSV_SCHEMA = "girgnav-trials v1"

RANDOM_PAIRS = "RANDOM_PAIRS"
FIXED_SOURCE_TARGET = "FIXED_SOURCE_TARGET"

GREEDY = "GREEDY"
PATCH = "PATCH"
PATCH_HISTORY = "PATCH_HISTORY"

_ALGORITHMS = (GREEDY, PATCH, PATCH_HISTORY)


@dataclass(frozen=True)
class ExperimentConfig:
    model: object  # ModelParams or HyperbolicParams
    trials: int
    pair_selection: str = RANDOM_PAIRS
    fixed_pairs: tuple | None = None  # ((w_s, coords_s), (w_t, coords_t))
    objective_kind: str = EXACT_PHI
    relax_factor_band: tuple[float, float] = (1.0, 1.0)
    algorithms: tuple[str, ...] = (GREEDY,)
    master_seed: int = 0
    step_limit: int | None = None

    def __post_init__(self):
        if self.trials < 0:
            raise InvalidInputError("trials must be non-negative")
        if self.pair_selection not in (RANDOM_PAIRS, FIXED_SOURCE_TARGET):
            raise InvalidInputError(
                f"unknown pair_selection {self.pair_selection!r}"
            )
        if self.pair_selection == FIXED_SOURCE_TARGET and self.fixed_pairs is None:
            raise InvalidInputError("FIXED_SOURCE_TARGET needs fixed_pairs")
        for a in self.algorithms:
            if a not in _ALGORITHMS:
                raise InvalidInputError(f"unknown algorithm {a!r}")
        if self.objective_kind not in (EXACT_PHI, RELAXED_PHI, HYPERBOLIC_PHI):
            raise InvalidInputError(
                f"unknown objective kind {self.objective_kind!r}"
            )


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    n_realized: int
    s: int
    t: int
    w_s: float
    w_t: float
    same_component: bool
    greedy_status: str = "NA"
    greedy_steps: int = -1
    patch_status: str = "NA"
    patch_steps: int = -1
    history_status: str = "NA"
    history_steps: int = -1
    bfs: int = UNREACHABLE
    stretch: float | None = None


def max_workers() -> int:
    """Parallelism cap from the GIRG_NAV_THREADS environment variable.

    Trials are aggregated in index order regardless of this value, so
    results never depend on it. The current executor is sequential,
    which respects any positive cap.
    """
    raw = os.environ.get("GIRG_NAV_THREADS", "")
    if not raw:
        return 1
    try:
        val = int(raw)
    except ValueError as e:
        raise InvalidInputError(f"GIRG_NAV_THREADS must be an integer: {raw!r}") from e
    if val < 1:
        raise InvalidInputError("GIRG_NAV_THREADS must be >= 1")
    return val


def trial_seed(master_seed: int, trial: int) -> int:
    """Deterministic 63-bit seed for one trial."""
    return int(substream(master_seed, PHASE_TRIAL, trial).integers(2 ** 63))


def _sample_trial_graph(cfg: ExperimentConfig, seed: int) -> Graph:
    model = cfg.model
    if isinstance(model, HyperbolicParams):
        return sample_hyperbolic_graph(replace(model, seed=seed))
    fixed = None
    if cfg.pair_selection == FIXED_SOURCE_TARGET:
        fixed = list(cfg.fixed_pairs)
    return sample_graph(replace(model, seed=seed), fixed_vertices=fixed)


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    seed = trial_seed(cfg.master_seed, trial)
    g = _sample_trial_graph(cfg, seed)
    rng = substream(cfg.master_seed, PHASE_TRIAL, trial, 1)
    n_v = g.num_vertices
    if cfg.pair_selection == FIXED_SOURCE_TARGET:
        s, t = 0, 1
    else:
        if n_v < 2:
            return TrialRecord(trial, n_v, -1, -1, math.nan, math.nan, False)
        s = int(rng.integers(n_v))
        t = int(rng.integers(n_v - 1))
        if t >= s:
            t += 1
    bfs = bfs_distance(g, s, t)
    same = bfs != UNREACHABLE
    obj = Objective(
        kind=cfg.objective_kind,
        target=t,
        relax_factor_band=cfg.relax_factor_band,
        relax_seed=seed,
    )
    rec = dict(
        trial=trial, n_realized=n_v, s=s, t=t,
        w_s=float(g.weights[s]), w_t=float(g.weights[t]),
        same_component=same, bfs=bfs,
    )
    if GREEDY in cfg.algorithms:
        out = greedy_route(g, s, obj, cfg.step_limit)
        rec["greedy_status"] = out.status
        rec["greedy_steps"] = out.steps
        if out.status == "DELIVERED" and bfs >= 1:
            rec["stretch"] = out.steps / bfs
    if PATCH in cfg.algorithms:
        out = patch_route(g, s, obj)
        rec["patch_status"] = out.status
        rec["patch_steps"] = out.steps
    if PATCH_HISTORY in cfg.algorithms:
        out = patch_route_history(g, s, obj)
        rec["history_status"] = out.status
        rec["history_steps"] = out.steps
    return TrialRecord(**rec)


def run_experiment(cfg: ExperimentConfig) -> list[TrialRecord]:
    """One fresh graph and one (s, t) pair per trial; deterministic in
    master_seed regardless of the parallelism cap."""
    max_workers()  # validate the environment override early
    return [run_trial(cfg, i) for i in range(cfg.trials)]


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson 95% score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo, hi = max(0.0, center - half), min(1.0, center + half)
    # analytically the bound is tight at the extremes; keep it exact there
    if successes == 0:
        lo = 0.0
    if successes == trials:
        hi = 1.0
    return (lo, hi)


def yardstick(n: float, beta: float) -> float:
    """Predicted greedy path length scale: 2*ln(ln(n)) / |ln(beta - 2)|."""
    return 2.0 * math.log(math.log(n)) / abs(math.log(beta - 2.0))


def refined_yardstick(beta: float, w_s: float, w_t: float,
                      phi_s: float) -> float | None:
    """Endpoint-aware path length scale:

    (log log_{w_s} 1/phi(s) + log log_{w_t} 1/phi(s)) / |ln(beta - 2)|

    Returns None (reported NA) unless both endpoint weights exceed e and
    the inner logarithms are positive, since the bound is asymptotic."""
    if w_s <= math.e or w_t <= math.e or not (0.0 < phi_s < 1.0):
        return None
    a = math.log(1.0 / phi_s) / math.log(w_s)
    b = math.log(1.0 / phi_s) / math.log(w_t)
    if a <= 1.0 or b <= 1.0:
        return None
    return (math.log(a) + math.log(b)) / abs(math.log(beta - 2.0))


@dataclass(frozen=True)
class Summary:
    trials: int
    success_rate: float
    success_ci: tuple[float, float]
    mean_steps: float
    median_steps: float
    mean_stretch: float
    median_stretch: float
    yardstick: float


def summarize(records: list[TrialRecord], n: float, beta: float,
              algorithm: str = GREEDY) -> Summary:
    if not records:
        raise InvalidInputError("cannot summarize an empty record list")
    statuses = {
        GREEDY: lambda r: (r.greedy_status, r.greedy_steps),
        PATCH: lambda r: (r.patch_status, r.patch_steps),
        PATCH_HISTORY: lambda r: (r.history_status, r.history_steps),
    }[algorithm]
    delivered = [r for r in records if statuses(r)[0] == "DELIVERED"]
    steps = np.array([statuses(r)[1] for r in delivered], dtype=float)
    stretches = np.array(
        [r.stretch for r in records if r.stretch is not None], dtype=float
    )
    rate = len(delivered) / len(records)
    return Summary(
        trials=len(records),
        success_rate=rate,
        success_ci=wilson_interval(len(delivered), len(records)),
        mean_steps=float(steps.mean()) if len(steps) else math.nan,
        median_steps=float(np.median(steps)) if len(steps) else math.nan,
        mean_stretch=float(stretches.mean()) if len(stretches) else math.nan,
        median_stretch=float(np.median(stretches)) if len(stretches) else math.nan,
        yardstick=yardstick(n, beta),
    )


@dataclass(frozen=True)
class SweepPoint:
    w_min: float
    trials: int
    failure_rate: float
    failure_ci: tuple[float, float]


def sweep_wmin(cfg: ExperimentConfig, w_min_grid: list[float]) -> list[SweepPoint]:
    """Greedy failure rate as a function of the minimum weight.

    Requires deterministic short edges (ep3 or the threshold regime),
    since the decay guarantee only holds under that condition.
    """
    model = cfg.model
    if not isinstance(model, ModelParams):
        raise InvalidInputError("w_min sweeps require GIRG model parameters")
    if not (model.ep3 or model.alpha == math.inf):
        raise InvalidInputError(
            "w_min sweep requires deterministic short edges (set ep3=true)"
        )
    points = []
    for w in w_min_grid:
        sub = replace(cfg, model=replace(model, w_min=float(w)))
        records = run_experiment(sub)
        fails = sum(1 for r in records if r.greedy_status != "DELIVERED")
        lo, hi = wilson_interval(fails, len(records))
        points.append(SweepPoint(float(w), len(records), fails / max(len(records), 1), (lo, hi)))
    return points


# ---------------------------------------------------------------------------
# CSV persistence
# ---------------------------------------------------------------------------

_FIELDS = [
    "trial", "n_realized", "s", "t", "w_s", "w_t", "same_component",
    "greedy_status", "greedy_steps", "patch_status", "patch_steps",
    "history_status", "history_steps", "bfs", "stretch",
]


def write_records_csv(records: list[TrialRecord], path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([CSV_SCHEMA])
        writer.writerow(_FIELDS)
        for r in records:
            writer.writerow([
                r.trial, r.n_realized, r.s, r.t,
                format(r.w_s, ".17g"), format(r.w_t, ".17g"),
                int(r.same_component),
                r.greedy_status, r.greedy_steps,
                r.patch_status, r.patch_steps,
                r.history_status, r.history_steps,
                r.bfs,
                "NA" if r.stretch is None else format(r.stretch, ".17g"),
            ])


def read_records_csv(path) -> list[TrialRecord]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header or header[0] != CSV_SCHEMA:
            raise InvalidInputError(f"unknown CSV schema in {path}")
        names = next(reader)
        if names != _FIELDS:
            raise InvalidInputError("CSV column mismatch")
        records = []
        for row in reader:
            records.append(TrialRecord(
                trial=int(row[0]), n_realized=int(row[1]),
                s=int(row[2]), t=int(row[3]),
                w_s=float(row[4]), w_t=float(row[5]),
                same_component=row[6] == "1",
                greedy_status=row[7], greedy_steps=int(row[8]),
                patch_status=row[9], patch_steps=int(row[10]),
                history_status=row[11], history_steps=int(row[12]),
                bfs=int(row[13]),
                stretch=None if row[14] == "NA" else float(row[14]),
            ))
        return records
