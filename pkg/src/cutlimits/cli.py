"""Command line interface.

Every subcommand writes CSV (with ``#`` metadata lines) or JSON, atomically.
Exit codes: 0 success or accept, 1 reject, 2 usage error, 3 infeasible size.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import AssumptionError, limit_sampler
from .cuts import (CutKind, DegeneratePartitionError, EnumerationCapError, cut_value,
                   min_cut_exact)
from .discretization import (DiscretizedSample, ProbabilityGrid, discretize,
                             equal_volume_lambda, named_distribution, normalize_exact,
                             sample_multinomial)
from .graph import Partition, empirical_graph, population_graph
from .maxflow import st_mincut
from .resampling import (STATISTICS, WORKERS_ENV, BootstrapConfig, bootstrap_distribution,
                         default_workers, mc_statistic)
from .stats import (ReferenceLimit, clustering_test, ks_distance, ks_test,
                    kolmogorov_quantile, qq_data)
from .xist import xist

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3
FIGURES = ("fig5-qq", "fig7-ks", "fig9-bootstrap", "fig11-test", "ex1-probabilities")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- input parsing

def parse_grid(spec: str) -> ProbabilityGrid:
    """Grid from a name such as ``uniform3x3``, inline JSON, or a JSON file path."""
    text = spec.strip()
    m = re.fullmatch(r"(uniform|bimodal|band)(\d+)x(\d+)", text)
    if m:
        kind, r, c = m.group(1), int(m.group(2)), int(m.group(3))
        if kind == "uniform":
            return named_distribution("uniform", shape=(r, c))
        return _named({"named": f"{kind}{r}x{c}"})
    if text in ("bimodal3x3", "band4x4"):
        return _named({"named": text})
    if not text.startswith("{"):
        path = Path(text)
        if not path.is_file():
            raise UsageError(f"grid {spec!r} is neither a known name, JSON, nor a file")
        text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise UsageError(f"malformed grid JSON: {err}") from None
    try:
        if "named" in obj:
            return _named(obj)
        weights = obj["weights"]
        shape = tuple(obj.get("shape", (1, len(weights))))
        return ProbabilityGrid(shape, normalize_exact(weights))
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError(f"invalid grid spec: {err}") from None


def _named(obj) -> ProbabilityGrid:
    name = obj["named"]
    if name == "uniform":
        return named_distribution("uniform", shape=tuple(obj.get("shape", (3, 3))))
    if name == "bimodal3x3":
        eps = float(obj.get("eps", 0.4))
        lam = obj.get("lambda", "auto")
        lam = equal_volume_lambda(eps) if lam == "auto" else float(lam)
        return named_distribution("bimodal3x3", eps=eps, lam=lam)
    if name == "band4x4":
        return named_distribution("band4x4", eps=float(obj.get("eps", 1.0)))
    raise UsageError(f"unknown named grid {name!r}")


def parse_t(text: str) -> float:
    """Distance threshold, accepting ``sqrt(k)`` as well as plain numbers."""
    m = re.fullmatch(r"\s*sqrt\(\s*([0-9.]+)\s*\)\s*", text)
    try:
        t = math.sqrt(float(m.group(1))) if m else float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid distance {text!r}") from None
    if not t > 0:
        raise argparse.ArgumentTypeError("t must be positive")
    return t


def parse_nodes(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid node list {text!r}") from None


def read_column(path: str, column: str = "value") -> np.ndarray:
    """Numbers from a CSV file: the named column if there is a header, else the last one."""
    rows = [r for r in csv.reader(_lines(path)) if r]
    if not rows:
        return np.empty(0)
    idx = -1
    try:
        float(rows[0][-1])
    except ValueError:
        header = rows.pop(0)
        idx = header.index(column) if column in header else -1
    try:
        return np.array([float(r[idx]) for r in rows])
    except (ValueError, IndexError):
        raise UsageError(f"{path}: non-numeric data") from None


def _lines(path):
    with open(path, newline="") as fh:
        return [ln for ln in fh.read().splitlines() if ln and not ln.startswith("#")]


def read_counts(path: str, grid: ProbabilityGrid) -> DiscretizedSample:
    counts = read_column(path, "count").astype(np.int64)
    if counts.size != grid.m:
        raise UsageError(f"{path}: expected {grid.m} counts, found {counts.size}")
    return DiscretizedSample(counts, int(counts.sum()))


# ---------------------------------------------------------------- output

def config_hash(args) -> str:
    skip = {"out", "workers", "func", "format", "notes"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest()[:16]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def render_csv(args, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# tool: cutlimits {__version__}\n")
    buf.write(f"# command: {args.command}\n")
    buf.write(f"# config_hash: {config_hash(args)}\n")
    buf.write(f"# seed: {getattr(args, 'seed', None)}\n")
    for note in getattr(args, "notes", []):
        buf.write(f"# {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_json(args, payload) -> str:
    meta = {"tool": f"cutlimits {__version__}", "command": args.command,
            "config_hash": config_hash(args), "seed": getattr(args, "seed", None)}
    return json.dumps({"meta": meta, "result": payload}, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def emit(args, text: str):
    """Write to ``--out`` through a temporary file and rename, or to stdout."""
    if not args.out or args.out == "-":
        sys.stdout.write(text)
        return
    target = Path(args.out)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def emit_table(args, header, rows, payload=None):
    if args.format == "json":
        emit(args, render_json(args, payload if payload is not None
                               else [dict(zip(header, r)) for r in rows]))
    else:
        emit(args, render_csv(args, header, rows))


# ---------------------------------------------------------------- subcommands

def _graph_for(args):
    grid = parse_grid(args.grid)
    if getattr(args, "counts", None):
        sample = read_counts(args.counts, grid)
        return grid, empirical_graph(sample, grid, args.t), sample.counts
    return grid, population_graph(grid, args.t), grid.p


def cmd_discretize(args):
    grid = parse_grid(args.grid)
    rows = [r for r in csv.reader(_lines(args.points)) if r]
    try:
        pts = np.array([[float(v) for v in r] for r in rows])
    except ValueError:
        pts = np.array([[float(v) for v in r] for r in rows[1:]])
    try:
        sample = discretize(pts, grid)
    except ValueError as err:
        raise UsageError(str(err)) from None
    emit_table(args, ["bin", "count"], list(enumerate(sample.counts)),
               {"n": sample.n, "counts": sample.counts})
    return EXIT_OK


def cmd_graph(args):
    grid, g, _ = _graph_for(args)
    args.format = "json"
    emit(args, render_json(args, g.to_dict(grid)))
    return EXIT_OK


def cmd_cut(args):
    _, g, _ = _graph_for(args)
    kind = CutKind.parse(args.kind)
    if args.partition:
        value = cut_value(g, args.partition, kind)
        payload = {"kind": kind.value, "partition": list(Partition.of(args.partition, g.m).members),
                   "value": value}
        emit_table(args, ["kind", "partition", "value"],
                   [[kind.value, str(Partition.of(args.partition, g.m)), value]], payload)
        return EXIT_OK
    report = min_cut_exact(g, kind)
    rows = [[kind.value, str(s), report.value] for s in report.minimizers]
    emit_table(args, ["kind", "minimizer", "value"], rows, report.to_dict())
    return EXIT_OK


def cmd_stcut(args):
    _, g, _ = _graph_for(args)
    res = st_mincut(g, args.s, args.t_node)
    payload = {"s": res.s, "t": res.t, "value": res.value, "flow": res.flow,
               "source_side": list(res.source_side)}
    emit_table(args, ["s", "t", "value", "source_side"],
               [[res.s, res.t, res.value, " ".join(map(str, res.source_side))]], payload)
    return EXIT_OK


def cmd_xist(args):
    _, g, masses = _graph_for(args)
    override = range(g.m) if args.vloc_all else None
    res = xist(g, masses, args.kind, override)
    args.format = "json"
    emit(args, render_json(args, res.to_dict()))
    return EXIT_OK


def cmd_limit_sample(args):
    grid = parse_grid(args.grid)
    g = population_graph(grid, args.t)
    report = min_cut_exact(g, args.kind)
    draws = limit_sampler(args.kind, g, report, args.draws, args.seed,
                          ccut_side=args.ccut_side) if args.draws > 0 else np.empty(0)
    emit_table(args, ["draw", "value"], list(enumerate(draws)), {"values": draws})
    return EXIT_OK


def cmd_simulate(args):
    grid = parse_grid(args.grid)
    ens = mc_statistic(grid, args.t, args.kind, args.statistic, args.n, args.R, args.seed,
                       partition=args.partition, pair=args.pair, workers=args.workers)
    args.notes = ["replicate r draws from SeedSequence(seed, spawn_key=(r,))"]
    rows = [(r, args.seed, v) for r, v in enumerate(ens.values)]
    emit_table(args, ["replicate", "seed", "value"], rows)
    return EXIT_OK


def cmd_bootstrap(args):
    grid = parse_grid(args.grid)
    if args.counts:
        sample = read_counts(args.counts, grid)
    elif args.n:
        sample = sample_multinomial(grid, args.n, np.random.SeedSequence(args.seed, spawn_key=(0,)))
    else:
        raise UsageError("bootstrap needs --counts or --n")
    cfg = BootstrapConfig(args.M_rule, args.B, args.seed, args.M)
    vals = bootstrap_distribution(sample, grid, args.t, args.kind, cfg)
    args.notes = [f"n={sample.n} M={cfg.resample_size(sample.n)}"]
    emit_table(args, ["replicate", "seed", "value"], [(b, args.seed, v) for b, v in enumerate(vals)])
    return EXIT_OK


def cmd_ks(args):
    a, b = read_column(args.a), read_column(args.b)
    if a.size == 0 or b.size == 0:
        raise UsageError("both samples must be nonempty")
    rep = ks_test(a, b, args.alpha, two_sample=args.two_sample)
    args.notes = ["critical value uses q_(1-alpha)/sqrt(n_eff); n_eff is the first sample size"
                  " unless --two-sample"]
    emit_table(args, ["D", "n_eff", "critical", "alpha", "reject"],
               [[rep.D, rep.n_eff, rep.critical, rep.alpha, rep.reject]])
    return EXIT_REJECT if rep.reject else EXIT_OK


def cmd_qq(args):
    table = qq_data(read_column(args.sample), read_column(args.reference), args.quantiles,
                    args.lower, args.upper)
    emit_table(args, ["level", "sample", "reference"], table.tolist())
    return EXIT_OK


def cmd_cluster_test(args):
    grid = parse_grid(args.grid)
    if args.counts:
        sample = read_counts(args.counts, grid)
    elif args.n:
        sample = sample_multinomial(grid, args.n, np.random.SeedSequence(args.seed, spawn_key=(0,)))
    else:
        raise UsageError("cluster-test needs --counts or --n")
    ref = parse_grid(args.reference) if args.reference else None
    rep = clustering_test(sample, grid, args.t, args.kind, args.alpha, ref, args.draws,
                          np.random.SeedSequence(args.seed, spawn_key=(1,)))
    emit_table(args, ["statistic", "lo", "hi", "reject", "alpha", "q_lo", "q_hi"],
               [[rep.statistic, rep.lo, rep.hi, rep.reject, rep.alpha, *rep.quantiles]],
               rep.to_dict())
    return EXIT_REJECT if rep.reject else EXIT_OK


def cmd_reproduce(args):
    header, rows = REPRODUCERS[args.figure](args)
    emit_table(args, header, rows)
    return EXIT_OK


# ---------------------------------------------------------------- reproductions

def _sub(seed, *key):
    return np.random.SeedSequence(seed, spawn_key=key)


def _seed_int(seed, *key) -> int:
    return int(_sub(seed, *key).generate_state(1, np.uint64)[0] >> np.uint64(1))


def reproduce_ex1(args):
    grid = named_distribution("uniform", shape=(2, 2))
    n, R = args.n or 10_000, args.R or 20_000
    attain = mc_statistic(grid, 1, "mcut", "stmincut_attainer", n, R, args.seed, pair=(0, 1),
                          workers=args.workers).values
    vloc = mc_statistic(grid, 1, "mcut", "vloc_count", n, R, _seed_int(args.seed, 1),
                        workers=args.workers).values
    rows = []
    for label, members, limit in (("S13", [0, 2], 0.25), ("S1", [0], 0.375),
                                  ("S2_complement", [0, 2, 3], 0.375)):
        rows.append([label, float(np.mean(attain == Partition.of(members, 4).code)), limit])
    rows.append(["tie", float(np.mean(attain == -1)), 0.0])
    rows.append(["vloc_count_1", float(np.mean(vloc == 1)), 2 / 3])
    return ["quantity", "estimate", "limit"], rows


def _bimodal(args):
    return named_distribution("bimodal3x3", eps=args.eps)


def reproduce_qq(args):
    grid = _bimodal(args)
    n, R = args.n or 10_000, args.R or 2_000
    rows = []
    for k, kind in enumerate(("mcut", "rcut", "ncut", "ccut")):
        g = population_graph(grid, args.t)
        ens = mc_statistic(grid, args.t, kind, "xc_min", n, R, _seed_int(args.seed, k),
                           workers=args.workers)
        ref = limit_sampler(kind, g, min_cut_exact(g, kind), args.draws, _sub(args.seed, 100 + k))
        for lev, a, b in qq_data(ens.values, ref, args.quantiles, 0.01, 0.99):
            rows.append([kind, lev, a, b])
    return ["kind", "level", "empirical", "limit"], rows


def reproduce_ks(args):
    grid = _bimodal(args)
    R = args.R or 500
    sizes = [args.n] if args.n else [250, 500, 1000, 2000]
    rows = []
    for ti, t in enumerate((1.0, math.sqrt(2), 2.0)):
        g = population_graph(grid, t)
        for k, kind in enumerate(("rcut", "ncut", "ccut")):
            ref = limit_sampler(kind, g, min_cut_exact(g, kind), args.draws,
                                _sub(args.seed, ti, k))
            for n in sizes:
                Ds = [ks_distance(mc_statistic(grid, t, kind, "xc_min", n, R,
                                               _seed_int(args.seed, ti, k, n, o),
                                               workers=args.workers).values, ref)
                      for o in range(args.outer)]
                rows.append([kind, t, n, float(np.median(Ds)),
                             kolmogorov_quantile(0.05) / math.sqrt(R)])
    return ["kind", "t", "n", "median_ks", "critical"], rows


def reproduce_bootstrap(args):
    grid = _bimodal(args)
    g = population_graph(grid, args.t)
    ref = limit_sampler("ccut", g, min_cut_exact(g, "ccut"), args.draws, _sub(args.seed, 0))
    sizes = [args.n] if args.n else [1_000, 10_000, 100_000]
    rows = []
    for rule in ("sqrt_n", "equal_n"):
        for n in sizes:
            Ds = []
            for o in range(args.outer):
                sample = sample_multinomial(grid, n, _sub(args.seed, 1, n, o))
                cfg = BootstrapConfig(rule, args.B, _seed_int(args.seed, 2, n, o))
                Ds.append(ks_distance(bootstrap_distribution(sample, grid, args.t, "ccut", cfg),
                                      ref))
            rows.append([rule, n, BootstrapConfig(rule).resample_size(n), float(np.median(Ds))])
    return ["M_rule", "n", "M", "median_ks"], rows


def reproduce_test(args):
    n, R = args.n or 10_000, args.R or 200
    uniform = named_distribution("uniform", shape=(4, 4))
    ref = ReferenceLimit.build(uniform, args.t, "ncut", args.draws, _sub(args.seed, 0))
    rows = []
    for e, eps in enumerate((1.0, 0.8, 0.6, 0.4, 0.2)):
        grid = named_distribution("band4x4", eps=eps)
        rej = [clustering_test(sample_multinomial(grid, n, _sub(args.seed, 1, e, r)), grid,
                               args.t, "ncut", args.alpha, reference=ref).reject
               for r in range(R)]
        rows.append([eps, float(np.mean(rej))])
    return ["eps", "rejection_rate"], rows


REPRODUCERS = {
    "fig5-qq": reproduce_qq,
    "fig7-ks": reproduce_ks,
    "fig9-bootstrap": reproduce_bootstrap,
    "fig11-test": reproduce_test,
    "ex1-probabilities": reproduce_ex1,
}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cutlimits", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cutlimits {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, grid=True, seed=False, kind=False, fmt="csv"):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        if grid:
            p.add_argument("--grid", required=True,
                           help="grid name (uniform3x3, bimodal3x3, band4x4), JSON, or JSON file")
            p.add_argument("--t", type=parse_t, default=1.0, help="neighbourhood radius")
        if kind:
            p.add_argument("--kind", type=str.lower, default="ncut",
                           choices=[k.value for k in CutKind])
        if seed:
            p.add_argument("--seed", type=int, required=True)
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt)
        return p

    p = add("discretize", cmd_discretize, "count points per bin")
    p.add_argument("--points", required=True, help="CSV file of point coordinates")

    p = add("graph", cmd_graph, "dump the neighbourhood graph", fmt="json")
    p.add_argument("--counts", help="CSV of bin counts for an empirical graph")

    p = add("cut", cmd_cut, "evaluate or minimize a balanced cut", kind=True, fmt="json")
    p.add_argument("--counts")
    p.add_argument("--exact", action="store_true", help="minimize by enumeration (default)")
    p.add_argument("--partition", type=parse_nodes, help="evaluate this node set instead")

    p = add("stcut", cmd_stcut, "minimum s-t cut", fmt="json")
    p.add_argument("s", type=int)
    p.add_argument("t_node", metavar="t", type=int)
    p.add_argument("--counts")

    p = add("xist", cmd_xist, "run Xist", kind=True, fmt="json")
    p.add_argument("--counts")
    p.add_argument("--vloc-all", action="store_true", help="use every node as a terminal")

    p = add("limit-sample", cmd_limit_sample, "draw from the limit law", seed=True, kind=True)
    p.add_argument("--draws", type=int, default=10_000)
    p.add_argument("--ccut-side", choices=("auto", "fixed"), default="auto")

    p = add("simulate", cmd_simulate, "Monte Carlo replicates of a statistic", seed=True, kind=True)
    p.add_argument("--statistic", choices=STATISTICS, default="xc_min")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--partition", type=parse_nodes)
    p.add_argument("--pair", type=parse_nodes)
    p.add_argument("--workers", type=int, default=None,
                   help=f"process count (default ${WORKERS_ENV} or 1)")

    p = add("bootstrap", cmd_bootstrap, "M-out-of-n bootstrap of the optimal cut", seed=True,
            kind=True)
    p.add_argument("--counts")
    p.add_argument("--n", type=int)
    p.add_argument("--B", type=int, default=100)
    p.add_argument("--M-rule", dest="M_rule", choices=("sqrt_n", "equal_n", "fixed"),
                   default="sqrt_n")
    p.add_argument("--M", type=int)

    p = add("ks", cmd_ks, "Kolmogorov-Smirnov distance between two samples", grid=False)
    p.add_argument("--a", required=True, help="CSV sample")
    p.add_argument("--b", required=True, help="CSV reference sample")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--two-sample", action="store_true")

    p = add("qq", cmd_qq, "paired quantiles", grid=False)
    p.add_argument("--sample", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--quantiles", type=int, default=99)
    p.add_argument("--lower", type=float, default=0.01)
    p.add_argument("--upper", type=float, default=0.99)

    p = add("cluster-test", cmd_cluster_test, "asymptotic test against a reference grid",
            seed=True, kind=True)
    p.add_argument("--counts")
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--reference", help="reference grid (default uniform of the same shape)")
    p.add_argument("--draws", type=int, default=50_000)

    p = add("reproduce", cmd_reproduce, "scaled-down simulation studies", grid=False, seed=True)
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--t", type=parse_t, default=1.0)
    p.add_argument("--eps", type=float, default=0.4)
    p.add_argument("--n", type=int)
    p.add_argument("--R", type=int)
    p.add_argument("--B", type=int, default=100)
    p.add_argument("--outer", type=int, default=5)
    p.add_argument("--draws", type=int, default=50_000)
    p.add_argument("--quantiles", type=int, default=99)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--workers", type=int, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", None) is None and hasattr(args, "workers"):
        args.workers = default_workers()
    for name in ("n", "R", "B", "draws"):
        v = getattr(args, name, None)
        if v is not None and v < (0 if name == "draws" else 1):
            print(f"cutlimits: error: --{name} must be positive", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except EnumerationCapError as err:
        print(f"cutlimits: infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, DegeneratePartitionError, AssumptionError, OSError) as err:
        print(f"cutlimits: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"cutlimits: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
