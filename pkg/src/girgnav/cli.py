"""Command-line interface.

Subcommands:

* ``generate --config <file> --out <graph-file>``
* ``route --graph <file> --source <id|random> --target <id|random>
  --algo greedy|patch|patch-history --objective phi|phi-relaxed|phi-h
  [--trace] [--seed N]``
* ``experiment --config <file> --out <csv>``
* ``stats --in <csv>``
* ``convert --in <hyperbolic-graph> --out <girg-graph>``

Config files are flat ``key=value`` text; blank lines and ``#`` comments
are ignored. Keys:

* ``model``: ``girg`` (default) or ``hyperbolic``
* girg model: ``n d beta w_min alpha kernel_c c1 c2 ep3 seed``
  (``alpha`` accepts ``inf``; ``ep3`` accepts 0/1/true/false)
* hyperbolic model: ``n alpha_h c_h t_h seed``
* experiment: ``trials``, ``master_seed``, ``step_limit``,
  ``pair_selection`` (``random`` or ``fixed``),
  ``s_weight``/``s_coords``/``t_weight``/``t_coords`` (fixed pairs,
  coords comma-separated), ``objective`` (``phi``, ``phi-relaxed``,
  ``phi-h``), ``relax_band`` (``lo,hi``), ``relax_seed``,
  ``algorithms`` (comma-separated subset of greedy,patch,patch-history)

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

from .geometry import InvalidInputError
from .experiments import (
    FIXED_SOURCE_TARGET,
    GREEDY,
    PATCH,
    PATCH_HISTORY,
    RANDOM_PAIRS,
    ExperimentConfig,
    read_records_csv,
    run_experiment,
    summarize,
    write_records_csv,
)
from .hyperbolic import HyperbolicParams, sample_hyperbolic_graph
from .io import (
    FileFormatError,
    read_girg_graph,
    read_hyperbolic_graph,
    write_girg_graph,
    write_hyperbolic_graph,
)
from .model import ModelParams, sample_graph
from .patching import patch_route, patch_route_history
from .routing import EXACT_PHI, HYPERBOLIC_PHI, RELAXED_PHI, Objective, greedy_route
from .rngs import substream

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

_OBJECTIVES = {"phi": EXACT_PHI, "phi-relaxed": RELAXED_PHI, "phi-h": HYPERBOLIC_PHI}
_ALGOS = {"greedy": GREEDY, "patch": PATCH, "patch-history": PATCH_HISTORY}


class ConfigError(ValueError):
    pass


def parse_config_text(text: str) -> dict[str, str]:
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in kv:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        kv[key] = value.strip()
    return kv


def _get(kv, key, cast, default):
    if key not in kv:
        return default
    try:
        return cast(kv.pop(key))
    except ValueError as e:
        raise ConfigError(f"field {key!r}: {e}") from e


def _bool(v: str) -> bool:
    low = v.lower()
    if low in ("1", "true", "yes"):
        return True
    if low in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _alpha(v: str) -> float:
    return math.inf if v.lower() in ("inf", "infinity") else float(v)


def parse_model(kv: dict[str, str]):
    kind = kv.pop("model", "girg").lower()
    try:
        if kind == "girg":
            return ModelParams(
                n=_get(kv, "n", float, 1000.0),
                d=_get(kv, "d", int, 1),
                beta=_get(kv, "beta", float, 2.5),
                w_min=_get(kv, "w_min", float, 1.0),
                alpha=_get(kv, "alpha", _alpha, math.inf),
                kernel_c=_get(kv, "kernel_c", float, 1.0),
                c1=_get(kv, "c1", float, 1.0),
                c2=_get(kv, "c2", float, 1.0),
                ep3=_get(kv, "ep3", _bool, False),
                seed=_get(kv, "seed", int, 0),
            )
        if kind == "hyperbolic":
            return HyperbolicParams(
                n=_get(kv, "n", int, 1000),
                alpha_h=_get(kv, "alpha_h", float, 0.75),
                c_h=_get(kv, "c_h", float, 0.0),
                t_h=_get(kv, "t_h", float, 0.0),
                seed=_get(kv, "seed", int, 0),
            )
    except InvalidInputError as e:
        raise ConfigError(str(e)) from e
    raise ConfigError(f"unknown model {kind!r} (expected girg or hyperbolic)")


def parse_experiment(kv: dict[str, str]) -> ExperimentConfig:
    model = parse_model(kv)
    pair = kv.pop("pair_selection", "random").lower()
    fixed = None
    if pair == "fixed":
        try:
            s_w = float(kv.pop("s_weight"))
            t_w = float(kv.pop("t_weight"))
            s_c = tuple(float(x) for x in kv.pop("s_coords").split(","))
            t_c = tuple(float(x) for x in kv.pop("t_coords").split(","))
        except KeyError as e:
            raise ConfigError(f"fixed pair selection requires field {e}") from e
        except ValueError as e:
            raise ConfigError(f"bad fixed pair field: {e}") from e
        fixed = ((s_w, s_c), (t_w, t_c))
        selection = FIXED_SOURCE_TARGET
    elif pair == "random":
        selection = RANDOM_PAIRS
    else:
        raise ConfigError(f"unknown pair_selection {pair!r}")
    objective = kv.pop("objective", "phi")
    if objective not in _OBJECTIVES:
        raise ConfigError(f"unknown objective {objective!r}")
    band = kv.pop("relax_band", "1,1")
    try:
        lo, hi = (float(x) for x in band.split(","))
    except ValueError as e:
        raise ConfigError(f"relax_band must be 'lo,hi': {band!r}") from e
    algos = kv.pop("algorithms", "greedy")
    try:
        algorithms = tuple(_ALGOS[a.strip()] for a in algos.split(","))
    except KeyError as e:
        raise ConfigError(f"unknown algorithm {e}") from e
    try:
        cfg = ExperimentConfig(
            model=model,
            trials=_get(kv, "trials", int, 100),
            pair_selection=selection,
            fixed_pairs=fixed,
            objective_kind=_OBJECTIVES[objective],
            relax_factor_band=(lo, hi),
            algorithms=algorithms,
            master_seed=_get(kv, "master_seed", int, 0),
            step_limit=_get(kv, "step_limit", int, None),
        )
    except InvalidInputError as e:
        raise ConfigError(str(e)) from e
    if kv:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(kv))}")
    return cfg


def _load_config(path: str) -> dict[str, str]:
    with open(path) as f:
        return parse_config_text(f.read())


def _load_graph(path: str):
    with open(path) as f:
        header = f.readline().strip()
    if header == "hyperbolic-graph v1":
        return read_hyperbolic_graph(path)
    return read_girg_graph(path)


def cmd_generate(args) -> int:
    kv = _load_config(args.config)
    model = parse_model(kv)
    if kv:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(kv))}")
    if isinstance(model, HyperbolicParams):
        g = sample_hyperbolic_graph(model)
        write_hyperbolic_graph(g, args.out)
    else:
        g = sample_graph(model)
        write_girg_graph(g, args.out)
    print(f"wrote {g.num_vertices} vertices, {g.num_edges} edges to {args.out}")
    return EXIT_OK


def _resolve_endpoint(value: str, n: int, rng) -> int:
    if value == "random":
        return int(rng.integers(n))
    try:
        v = int(value)
    except ValueError as e:
        raise ConfigError(f"endpoint must be an id or 'random': {value!r}") from e
    if not (0 <= v < n):
        raise ConfigError(f"endpoint id {v} out of range [0, {n})")
    return v


def cmd_route(args) -> int:
    g = _load_graph(args.graph)
    if g.num_vertices == 0:
        raise ConfigError("cannot route on an empty graph")
    rng = substream(args.seed, 100)
    s = _resolve_endpoint(args.source, g.num_vertices, rng)
    t = _resolve_endpoint(args.target, g.num_vertices, rng)
    kind = _OBJECTIVES[args.objective]
    obj = Objective(kind=kind, target=t, relax_seed=args.seed)
    if args.algo == "greedy":
        out = greedy_route(g, s, obj)
        print(f"status={out.status} steps={out.steps} s={s} t={t}")
        if args.trace:
            print(" -> ".join(str(v) for v in out.path))
            for i, step in enumerate(out.trace, 1):
                print(f"step {i}: vertex {step.chosen} score {step.score:.6g} "
                      f"inspected {step.neighbors_inspected}")
    else:
        fn = patch_route if args.algo == "patch" else patch_route_history
        out = fn(g, s, obj)
        print(f"status={out.status} steps={out.steps} s={s} t={t} "
              f"distinct_visited={out.distinct_visited}")
        if args.trace:
            sys.stdout.write(out.export_event_log())
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = parse_experiment(_load_config(args.config))
    records = run_experiment(cfg)
    write_records_csv(records, args.out)
    print(f"wrote {len(records)} trial records to {args.out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    records = read_records_csv(args.input)
    if not records:
        print("no records")
        return EXIT_OK
    # n and beta are not stored per record; report per-status aggregates
    for algo, status_of in ((GREEDY, lambda r: r.greedy_status),
                            (PATCH, lambda r: r.patch_status),
                            (PATCH_HISTORY, lambda r: r.history_status)):
        ran = [r for r in records if status_of(r) != "NA"]
        if not ran:
            continue
        n_guess = max(r.n_realized for r in ran)
        summary = summarize(ran, n=max(n_guess, 3), beta=2.5, algorithm=algo)
        lo, hi = summary.success_ci
        print(f"{algo}: trials={summary.trials} "
              f"success={summary.success_rate:.4f} [{lo:.4f}, {hi:.4f}] "
              f"mean_steps={summary.mean_steps:.3f} "
              f"median_steps={summary.median_steps:.3f} "
              f"mean_stretch={summary.mean_stretch:.3f} "
              f"median_stretch={summary.median_stretch:.3f} "
              f"yardstick={summary.yardstick:.3f}")
    return EXIT_OK


def cmd_convert(args) -> int:
    g = read_hyperbolic_graph(args.input)
    write_girg_graph(g, args.out)
    print(f"converted {g.num_vertices} vertices, {g.num_edges} edges to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="girgnav", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a graph and write it to a file")
    g.add_argument("--config", required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_generate)

    r = sub.add_parser("route", help="route one message on a stored graph")
    r.add_argument("--graph", required=True)
    r.add_argument("--source", required=True)
    r.add_argument("--target", required=True)
    r.add_argument("--algo", choices=sorted(_ALGOS), default="greedy")
    r.add_argument("--objective", choices=sorted(_OBJECTIVES), default="phi")
    r.add_argument("--trace", action="store_true")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(fn=cmd_route)

    e = sub.add_parser("experiment", help="run trials and write a CSV")
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(fn=cmd_experiment)

    s = sub.add_parser("stats", help="summarize a trial CSV")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(fn=cmd_stats)

    c = sub.add_parser("convert", help="convert hyperbolic-graph to girg-graph")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(fn=cmd_convert)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, InvalidInputError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileFormatError, OSError) as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
