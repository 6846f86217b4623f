"""Batch command-line entry point.

Subcommands: generate | percolate | curve | scan | oracle | fpp | preset.
Results are written atomically with the fully resolved configuration echoed
into the output header, so any result file can be re-run identically.
Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .exact import exact_hitting_table, verify_coupling_bound, verify_monotone
from .fpp import (
    estimate_passage_diameter,
    first_passage,
    variance_bound_report,
)
from .graphs import (
    WeightedGraph,
    make_complete,
    make_coupled_complete,
    make_line_exp,
    make_random_regular,
    make_torus,
    parse_edge_list,
    serialize_edge_list,
)
from .montecarlo import (
    ExperimentSpec,
    SummaryStats,
    concentration_scan,
    estimate_curve,
    hitting_time_samples,
    run_ensemble,
)
from .percolation import sample_open_times, threshold_from_fraction, threshold_from_omega
from .presets import PRESETS, PresetResult, run_preset
from .rng import replicate_rng, philox_key, spawn_generator


class UsageError(Exception):
    """Configuration problem; maps to exit code 2."""


# ---------------------------------------------------------------------------
# graph and family descriptors
# ---------------------------------------------------------------------------


def _parse_kwargs(parts: list[str]) -> dict:
    out = {}
    for part in parts:
        if not part:
            continue
        if "=" not in part:
            raise UsageError(f"generator parameter {part!r} is not key=value")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def resolve_graph(spec: str, seed: int) -> WeightedGraph:
    """Build a graph from 'gen:name,key=value,...' or 'file:path'."""
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        with open(path, "r", encoding="utf-8") as fh:
            return parse_edge_list(fh.read(), label=os.path.basename(path))
    if not spec.startswith("gen:"):
        raise UsageError(f"graph spec must start with 'gen:' or 'file:', got {spec!r}")
    parts = spec[len("gen:"):].split(",")
    name, kwargs = parts[0], _parse_kwargs(parts[1:])
    try:
        if name == "complete":
            m = int(kwargs["m"])
            weight = float(kwargs.get("weight", 1.0 / m))
            return make_complete(m, weight)
        if name == "torus":
            return make_torus(int(kwargs["L"]), float(kwargs.get("weight", 1.0)))
        if name == "line_exp":
            return make_line_exp(int(kwargs["n"]))
        if name == "coupled":
            return make_coupled_complete(
                int(kwargs["m"]), kwargs.get("mode", "bridge")
            )
        if name == "regular":
            return make_random_regular(
                int(kwargs["n"]),
                int(kwargs.get("r", 3)),
                float(kwargs.get("weight", 1.0)),
                spawn_generator(seed, "graphgen"),
            )
    except KeyError as exc:
        raise UsageError(f"generator {name!r} is missing parameter {exc}") from None
    raise UsageError(
        f"unknown generator {name!r}; choose from complete, torus, line_exp, "
        "coupled, regular"
    )


def family_builder(name: str, seed: int):
    """size -> graph builders for the scan families."""
    builders = {
        "complete": lambda m: make_complete(m, 1.0 / m),
        "coupled-bridge": lambda m: make_coupled_complete(m, "bridge"),
        "coupled-transitive": lambda m: make_coupled_complete(m, "transitive"),
        "line_exp": make_line_exp,
        "torus": lambda L: make_torus(L, 1.0),
        "regular": lambda n: make_random_regular(
            n, 3, 1.0, spawn_generator(seed, "family", n)
        ),
    }
    if name not in builders:
        raise UsageError(
            f"unknown family {name!r}; choose from {', '.join(sorted(builders))}"
        )
    return builders[name]


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{flag} must be a comma list of numbers, got {text!r}")
    if not values:
        raise UsageError(f"{flag} must be non-empty")
    return values


def _parse_int_list(text: str, flag: str) -> list[int]:
    return [int(x) for x in _parse_float_list(text, flag)]


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def _config_header_lines(command: str, config: dict) -> list[str]:
    lines = [f"# percolab {__version__}", f"# command = {command}"]
    for k in sorted(config):
        lines.append(f"# {k} = {json.dumps(config[k], default=float)}")
    return lines


def _render_csv(command: str, result: PresetResult) -> str:
    buf = io.StringIO()
    for line in _config_header_lines(command, result.config):
        buf.write(line + "\n")
    for k in sorted(result.extra):
        buf.write(f"# extra.{k} = {json.dumps(result.extra[k], default=float)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    if result.kind == "summary":
        writer.writerow(["param", "count", "mean", "variance", "se", "min", "max"])
        for row in result.rows:
            writer.writerow(
                [
                    row["param"],
                    row["count"],
                    repr(row["mean"]),
                    repr(row["variance"]),
                    repr(row["se"]),
                    repr(row["min"]),
                    repr(row["max"]),
                ]
            )
    else:
        writer.writerow(["check", "graph", "params", "statistic", "pass"])
        for row in result.rows:
            writer.writerow(
                [
                    row["check"],
                    row["graph"],
                    json.dumps(row["params"], default=float),
                    repr(row["statistic"]),
                    row["pass"],
                ]
            )
    return buf.getvalue()


def _render_json(command: str, result: PresetResult) -> str:
    payload = {
        "version": __version__,
        "command": command,
        "config": result.config,
        "kind": result.kind,
        "rows": result.rows,
        "extra": result.extra,
    }
    return json.dumps(payload, indent=2, default=float) + "\n"


def _render_values_csv(command: str, result: PresetResult) -> str:
    buf = io.StringIO()
    for line in _config_header_lines(command, result.config):
        buf.write(line + "\n")
    buf.write("label,replicate,value\n")
    for label in sorted(result.values):
        for r, v in enumerate(result.values[label]):
            buf.write(f"{label},{r},{v!r}\n")
    return buf.getvalue()


def _write_result(args, command: str, result: PresetResult) -> None:
    text = (
        _render_json(command, result)
        if args.format == "json"
        else _render_csv(command, result)
    )
    _emit(args.out, text)
    if getattr(args, "values_out", None):
        _atomic_write(args.values_out, _render_values_csv(command, result))


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_generate(args) -> int:
    if not args.graph:
        raise UsageError("generate needs --graph")
    if not args.out:
        raise UsageError("generate needs --out")
    g = resolve_graph(args.graph, args.seed)
    header = "\n".join(_config_header_lines("generate", {
        "graph": args.graph, "seed": args.seed, "label": g.label,
    }))
    _atomic_write(args.out, header + "\n" + serialize_edge_list(g))
    return 0


def _percolate_result(args, g: WeightedGraph) -> PresetResult:
    n = g.vertex_count
    if args.statistic is None:
        args.statistic = "hitting"
    chosen = [x for x in (args.omega, args.s, args.threshold) if x is not None]
    if args.statistic in ("max_jump", "sup_second"):
        if chosen:
            raise UsageError(f"--statistic {args.statistic} takes no threshold flag")
        stat_name = (
            "max_jump_fraction" if args.statistic == "max_jump" else "sup_second_fraction"
        )
        spec = ExperimentSpec(
            graph=g, statistic=stat_name, replicates=args.replicates, seed=args.seed
        )
        stats, values = run_ensemble(spec, workers=args.threads, return_values=True)
        return PresetResult(
            name="percolate",
            config=_echo(args, graph_label=g.label, statistic=args.statistic),
            kind="summary",
            rows=[{"param": args.statistic, **stats.as_dict()}],
            values={args.statistic: values},
        )
    if len(chosen) != 1:
        raise UsageError("percolate needs exactly one of --omega / --s / --threshold")
    if args.omega is not None:
        threshold = threshold_from_omega(args.omega, n)
        param = args.omega
    elif args.s is not None:
        threshold = threshold_from_fraction(args.s, n)
        param = args.s
    else:
        threshold = args.threshold
        param = args.threshold
    samples = hitting_time_samples(
        g, [threshold], args.replicates, args.seed, workers=args.threads
    )[:, 0]
    stats = SummaryStats.from_values(samples)
    return PresetResult(
        name="percolate",
        config=_echo(args, graph_label=g.label, threshold=threshold),
        kind="summary",
        rows=[{"param": param, **stats.as_dict()}],
        values={"hitting_time": samples},
    )


def _cmd_percolate(args) -> int:
    if not args.graph:
        raise UsageError("percolate needs --graph")
    g = resolve_graph(args.graph, args.seed)
    _write_result(args, "percolate", _percolate_result(args, g))
    return 0


def _cmd_curve(args) -> int:
    if not args.graph:
        raise UsageError("curve needs --graph")
    if not args.grid:
        raise UsageError("curve needs --grid")
    g = resolve_graph(args.graph, args.seed)
    if args.statistic is None:
        args.statistic = "largest"
    grid = _parse_float_list(args.grid, "--grid")
    est = estimate_curve(
        g, grid, args.replicates, args.seed, workers=args.threads, return_values=True
    )
    stats = est.largest if args.statistic != "second" else est.second
    vals = est.largest_values if args.statistic != "second" else est.second_values
    result = PresetResult(
        name="curve",
        config=_echo(args, graph_label=g.label),
        kind="summary",
        rows=[{"param": float(t), **s.as_dict()} for t, s in zip(grid, stats)],
        values={f"t={t:g}": vals[:, j] for j, t in enumerate(grid)},
    )
    _write_result(args, "curve", result)
    return 0


def _cmd_scan(args) -> int:
    if not args.family or not args.sizes:
        raise UsageError("scan needs --family and --sizes")
    if (args.omega is None) == (args.s is None):
        raise UsageError("scan needs exactly one of --omega / --s")
    sizes = _parse_int_list(args.sizes, "--sizes")
    family = family_builder(args.family, args.seed)
    if args.omega is not None:
        statistic, param = "incipient_time", args.omega
    else:
        statistic, param = "time_to_fraction", args.s
    rows_data = concentration_scan(
        family, sizes, statistic, param, args.replicates, args.seed,
        workers=args.threads,
    )
    result = PresetResult(
        name="scan",
        config=_echo(args),
        kind="summary",
        rows=[{"param": r.size, **r.stats.as_dict()} for r in rows_data],
        values={f"size={r.size}": r.values for r in rows_data},
    )
    _write_result(args, "scan", result)
    return 0


def _cmd_oracle(args) -> int:
    rows = []
    if args.graph:
        g = resolve_graph(args.graph, args.seed)
        if args.threshold is not None:
            rows.append(verify_monotone(exact_hitting_table(g, args.threshold)).as_dict())
        if args.omega is not None:
            rows.append(verify_coupling_bound(g, args.omega).as_dict())
        if args.threshold is None and args.omega is None:
            for threshold in range(2, g.vertex_count + 1):
                rows.append(verify_monotone(exact_hitting_table(g, threshold)).as_dict())
            for k1 in range(2, g.vertex_count // 2 + 1):
                rows.append(verify_coupling_bound(g, g.vertex_count / k1).as_dict())
    else:
        rows = run_preset("oracle-verify", seed=args.seed).rows
    result = PresetResult(
        name="oracle", config=_echo(args), kind="reports", rows=rows
    )
    _write_result(args, "oracle", result)
    return 0


def _cmd_fpp(args) -> int:
    if not args.graph:
        raise UsageError("fpp needs --graph")
    g = resolve_graph(args.graph, args.seed)
    source = args.source if args.source is not None else 0
    rows = []
    extra = {}
    if args.target is not None or args.s is not None:
        reports = variance_bound_report(
            g,
            source=source,
            target_vertices=[args.target] if args.target is not None else [],
            fractions=[args.s] if args.s is not None else [],
            replicates=args.replicates,
            seed=args.seed,
        )
        rows += [r.as_dict() for r in reports]
    if args.diameter:
        est = estimate_passage_diameter(
            g, replicates=args.replicates, pair_budget=args.pair_budget, seed=args.seed
        )
        extra["passage_diameter"] = est.as_dict()
    if args.curve_out:
        rng = replicate_rng(philox_key(args.seed, "fpp_curve"), 0)
        field = first_passage(g, sample_open_times(g, rng), source)
        field.infection_curve_csv(args.curve_out)
    if not rows and not args.diameter and not args.curve_out:
        raise UsageError("fpp needs at least one of --target / --s / --diameter / --curve-out")
    result = PresetResult(
        name="fpp", config=_echo(args, source=source), kind="reports",
        rows=rows, extra=extra,
    )
    _write_result(args, "fpp", result)
    return 0


def _cmd_preset(args) -> int:
    if args.list:
        for name in sorted(PRESETS):
            print(f"{name}: {PRESETS[name].description}")
        return 0
    if not args.name:
        raise UsageError("preset needs a name (or --list)")
    if args.name not in PRESETS:
        raise UsageError(
            f"unknown preset {args.name!r}; known: {', '.join(sorted(PRESETS))}"
        )
    result = run_preset(
        args.name, seed=args.seed, replicates=args.replicates, workers=args.threads
    )
    result.config.setdefault("seed", args.seed)
    _write_result(args, f"preset:{args.name}", result)
    return 0


def _echo(args, **extras) -> dict:
    config = {}
    skip = {"func", "config", "list", "name"}
    for k, v in vars(args).items():
        if k in skip or v is None:
            continue
        config[k] = v
    config.update(extras)
    return config


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

_COMMON_DEFAULTS = {
    "seed": 0,
    "format": "csv",
    "threads": max(1, os.cpu_count() or 1),
}

_REPLICATE_DEFAULTS = {
    "percolate": 1000,
    "curve": 100,
    "scan": 200,
    "fpp": 1000,
}

_CONFIG_COERCE = {
    "seed": int,
    "replicates": int,
    "threads": int,
    "threshold": int,
    "source": int,
    "target": int,
    "pair_budget": int,
    "omega": float,
    "s": float,
    "diameter": lambda s: s.lower() in ("1", "true", "yes"),
    "list": lambda s: s.lower() in ("1", "true", "yes"),
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="gen:name,k=v,... or file:path")
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--threads", type=int, default=None, help="worker cap")
    p.add_argument("--values-out", dest="values_out", default=None,
                   help="also write per-replicate values as CSV")
    p.add_argument("--config", default=None,
                   help="flat key=value file supplying defaults for these flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="percolab",
        description="bond percolation / first-passage percolation experiments",
    )
    parser.add_argument("--version", action="version", version=f"percolab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    _add_common(p)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("percolate", help="stopping-time ensemble on one graph")
    _add_common(p)
    p.add_argument("--omega", type=float, default=None,
                   help="target component size n/omega")
    p.add_argument("--s", type=float, default=None,
                   help="target component fraction s")
    p.add_argument("--threshold", type=int, default=None,
                   help="target component size as a count")
    p.add_argument("--statistic", choices=["hitting", "max_jump", "sup_second"],
                   default=None)
    p.set_defaults(func=_cmd_percolate)

    p = sub.add_parser("curve", help="mean component-fraction curve on a time grid")
    _add_common(p)
    p.add_argument("--grid", default=None, help="comma list of times")
    p.add_argument("--statistic", choices=["largest", "second"], default=None)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("scan", help="variance-vs-size scan along a graph family")
    _add_common(p)
    p.add_argument("--family", default=None,
                   help="complete | coupled-bridge | coupled-transitive | line_exp | torus | regular")
    p.add_argument("--sizes", default=None, help="comma list of sizes")
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--s", type=float, default=None)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("oracle", help="exact inequality checks (small graphs)")
    _add_common(p)
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("fpp", help="first-passage variance bounds and diagnostics")
    _add_common(p)
    p.add_argument("--source", type=int, default=None)
    p.add_argument("--target", type=int, default=None)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--diameter", action="store_true")
    p.add_argument("--pair-budget", dest="pair_budget", type=int, default=512)
    p.add_argument("--curve-out", dest="curve_out", default=None,
                   help="dump one realization's infection curve CSV")
    p.set_defaults(func=_cmd_fpp)

    p = sub.add_parser("preset", help="run a named preset experiment")
    _add_common(p)
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--list", action="store_true", help="list presets")
    p.set_defaults(func=_cmd_preset)

    return parser


def _apply_config_file(args) -> None:
    if not args.config:
        return
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    known = set(vars(args))
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise UsageError(
                f"config line {lineno}: expected key = value, got {content!r}"
            )
        key, value = (part.strip() for part in content.split("=", 1))
        dest = key.replace("-", "_")
        if dest == "command":
            if value != args.command:
                raise UsageError(
                    f"config line {lineno}: command {value!r} does not match "
                    f"subcommand {args.command!r}"
                )
            continue
        if dest not in known or dest in ("config", "func"):
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        current = getattr(args, dest)
        if current is None or current is False:
            coerce = _CONFIG_COERCE.get(dest, str)
            try:
                setattr(args, dest, coerce(value))
            except ValueError:
                raise UsageError(
                    f"config line {lineno}: bad value {value!r} for {key!r}"
                ) from None


def _apply_defaults(args) -> None:
    for key, default in _COMMON_DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, default)
    if getattr(args, "replicates", None) is None:
        setattr(args, "replicates", _REPLICATE_DEFAULTS.get(args.command))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        _apply_defaults(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
