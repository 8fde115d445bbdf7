"""Command-line driver.

Subcommands: generate, extremes, ipdg, solve, evaluate, oracle, bench.
Exit codes: 0 ok, 2 bad configuration, 3 origin not inside the hull,
4 timeout.  ``GRMR_THREADS`` sets the default number of bench workers.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import itertools
import json
import logging
import math
import multiprocessing as mp
import os
import signal
import sys
import time
from typing import Optional

import numpy as np

from . import __version__
from .datasets import DISTRIBUTIONS, generate
from .egrmr import dual_min_regret_2d, egrmr
from .errors import ConditionOneError, ConfigError, GrmrError, TimeoutExceeded
from .extremes import extreme_points, load_extremes, write_extremes
from .geometry import Dataset, check_interior_origin, read_csv, write_csv
from .hgrmr import dual_min_regret, hgrmr, hgrmr_reuse
from .ipdg import IpdgGraph, empty_ipdg, ipdg_approx, ipdg_exact_2d
from .oracle import brute_force_grmr
from .regret import estimate_max_regret, exact_max_regret

log = logging.getLogger("grmr")

EXIT_OK, EXIT_CONFIG, EXIT_CONDITION, EXIT_TIMEOUT = 0, 2, 3, 4
THREADS_ENV = "GRMR_THREADS"

BENCH_FIELDS = ["method", "dist", "n", "d", "eps", "k", "m", "seed", "status", "size", "extremes",
                "exact_regret", "sampled_regret", "wall_ms", "delta", "error"]


def _threads_default():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if v < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1")
    return v


def _float_list(s):
    return [float(v) for v in s.split(",") if v.strip()] if s else []


def _int_list(s):
    return [int(v) for v in s.split(",") if v.strip()] if s else []


def _str_list(s):
    return [v.strip() for v in s.split(",") if v.strip()] if s else []


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg["version"] = __version__
    return cfg


def _check_eps(eps):
    if eps is not None and not 0.0 < eps < 1.0:
        raise ConfigError(f"epsilon must lie in (0, 1), got {eps}")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def _emit(payload, out: Optional[str]):
    text = json.dumps(_jsonable(payload), indent=2)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------- data loading

def _add_data_args(p, need=True):
    g = p.add_argument_group("data")
    g.add_argument("--input", "-i", help="CSV file of points (row-major)")
    g.add_argument("--header", action=argparse.BooleanOptionalAction, default=None,
                   help="first CSV row holds column names (default: detect)")
    g.add_argument("--columns", help="comma-separated column names or 0-based indices")
    g.add_argument("--no-normalize", action="store_true",
                   help="use coordinates as given (they must already lie in [-1, 1])")
    g.add_argument("--dist", choices=DISTRIBUTIONS, help="generate data instead of reading a file")
    g.add_argument("--n", type=int, default=10000)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--extremes", help="precomputed extreme-point index file")


def _load(args) -> Dataset:
    if args.input and args.dist:
        raise ConfigError("give either --input or --dist, not both")
    if args.input:
        cols = _str_list(args.columns) or None
        return read_csv(args.input, header=args.header, columns=cols, normalize=not args.no_normalize)
    if args.dist:
        return generate(args.dist, args.n, args.d, args.seed)
    raise ConfigError("no data: pass --input FILE or --dist {normal,uniform}")


def _extremes(args, data):
    if getattr(args, "extremes", None):
        return load_extremes(args.extremes, data)
    return extreme_points(data)


def _require_interior(data, seed=42):
    rep = check_interior_origin(data, seed=seed)
    if not rep.ok:
        raise ConditionOneError(
            f"origin is not strictly inside the convex hull (min top score {rep.worst_omega:.3g})",
            direction=rep.worst_direction, omega=rep.worst_omega)
    return rep


def _one_dim(data):
    col = data.points[:, 0]
    lo, hi = int(np.argmin(col)), int(np.argmax(col))
    raise ConfigError(f"d = 1: every linear ranking is answered exactly by rows {sorted({lo, hi})} "
                      "(the minimum and the maximum); nothing to solve")


@contextlib.contextmanager
def _deadline(seconds):
    if not seconds:
        yield
        return

    def fire(signum, frame):
        raise TimeoutExceeded(f"exceeded the {seconds:g}s time limit")

    old = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


# ---------------------------------------------------------------- commands

def cmd_generate(args):
    data = generate(args.dist or "normal", args.n, args.d, args.seed)
    cfg = {"dist": args.dist or "normal", "n": args.n, "d": args.d, "seed": args.seed, "version": __version__}
    write_csv(args.out, data, comment=json.dumps(cfg))
    print(json.dumps({"written": args.out, **cfg}))
    return EXIT_OK


def cmd_extremes(args):
    data = _load(args)
    t0 = time.perf_counter()
    X = extreme_points(data)
    dt = time.perf_counter() - t0
    if args.out:
        write_extremes(args.out, X)
    _emit({"config": _config(args), "count": len(X), "indices": X.indices,
           "wall_time_ms": 1000 * dt}, None if args.out else args.json)
    return EXIT_OK


def _make_ipdg(args, data, X):
    if getattr(args, "ipdg", None):
        g = IpdgGraph.read(args.ipdg)
        if not np.array_equal(np.sort(g.vertices), np.sort(X.indices)) or len(g) != len(X):
            raise ConfigError(f"{args.ipdg}: vertex list does not match the extreme points")
        if not np.array_equal(g.vertices, X.indices):
            raise ConfigError(f"{args.ipdg}: vertex order differs from the extreme-point order")
        return g
    if args.m == 0:
        return empty_ipdg(X)
    if data.d == 2 and not args.approx:
        return ipdg_exact_2d(X)
    return ipdg_approx(data, X, m=args.m, k=args.k, seed=args.ipdg_seed)


def cmd_ipdg(args):
    data = _load(args)
    if data.d == 1:
        _one_dim(data)
    X = _extremes(args, data)
    t0 = time.perf_counter()
    g = _make_ipdg(args, data, X)
    dt = time.perf_counter() - t0
    if args.out:
        g.write(args.out)
    summary = {"config": _config(args), "vertices": len(g), "edges": g.n_edges,
               "max_degree": g.max_degree, "exact": g.exact, "wall_time_ms": 1000 * dt}
    print(json.dumps(_jsonable(summary)))
    return EXIT_OK


def _evaluate(data, X, rows, samples, seed, exact=True):
    out = {}
    if exact:
        out["exact_max_regret"] = exact_max_regret(data, rows, X).to_dict()
    if samples:
        out["sampled_max_regret"] = estimate_max_regret(data, rows, m=samples, seed=seed, X=X).to_dict()
    return out


def _solve(args, data):
    _check_eps(args.eps)
    if data.d == 1:
        _one_dim(data)
    if (args.eps is None) == (args.r is None):
        raise ConfigError("give exactly one of --eps and --r")
    timings = {}
    t0 = time.perf_counter()
    interior = _require_interior(data, seed=args.seed)
    X = _extremes(args, data)
    timings["extremes"] = time.perf_counter() - t0
    method = args.method
    if method == "auto":
        method = "egrmr" if data.d == 2 else "hgrmr"
    if method == "egrmr" and data.d != 2:
        raise ConfigError("egrmr only handles d = 2; use --method hgrmr or reuse")
    if method == "egrmr":
        if args.r is not None:
            value, rows = dual_min_regret_2d(data, args.r, X)
            res = {"epsilon": value, "size": len(rows), "indices": rows, "dual": True}
        else:
            r = egrmr(data, args.eps, X, search=args.search)
            res = r.to_dict()
            timings.update(r.timings)
    else:
        t1 = time.perf_counter()
        g = _make_ipdg(args, data, X)
        timings["ipdg"] = time.perf_counter() - t1
        if args.r is not None:
            r = dual_min_regret(data, X, g, r=args.r, cap=args.cap)
        elif method == "reuse":
            r = hgrmr_reuse(data, X, g, args.eps, eta=min(args.eta_mult * args.eps, 0.99),
                            validate=args.validate, m=args.eval_samples or 100_000, seed=args.seed)
        elif method == "hgrmr":
            r = hgrmr(data, X, g, args.eps)
        else:
            raise ConfigError(f"unknown method {method!r}")
        res = r.to_dict()
        timings.update(r.timings)
    rows = res["indices"]
    t2 = time.perf_counter()
    res.update(_evaluate(data, X, rows, args.eval_samples, args.seed, exact=not args.no_exact))
    timings["evaluate"] = time.perf_counter() - t2
    res["method"] = method
    res["extreme_count"] = len(X)
    res["timings_ms"] = {k: 1000 * v for k, v in timings.items()}
    res["interior"] = interior.to_dict()
    return res


def cmd_solve(args):
    data = _load(args)
    with _deadline(args.timeout):
        res = _solve(args, data)
    _emit({"config": _config(args), "result": res}, args.out)
    return EXIT_OK


def _parse_subset(args, n):
    if args.subset_file:
        with open(args.subset_file, encoding="utf-8") as fh:
            text = fh.read().replace("\n", ",")
    else:
        text = args.subset or ""
    rows = _int_list(text)
    if not rows:
        raise ConfigError("empty subset: pass --subset 0,3,5 or --subset-file")
    bad = [r for r in rows if not 0 <= r < n]
    if bad:
        raise ConfigError(f"subset indices out of range: {bad}")
    return rows


def cmd_evaluate(args):
    data = _load(args)
    _require_interior(data, seed=args.seed)
    X = _extremes(args, data)
    rows = _parse_subset(args, data.n)
    res = _evaluate(data, X, rows, args.eval_samples, args.seed, exact=not args.no_exact)
    _emit({"config": _config(args), "subset": rows, **res}, args.out)
    return EXIT_OK


def cmd_oracle(args):
    _check_eps(args.eps)
    data = _load(args)
    if data.d == 1:
        _one_dim(data)
    _require_interior(data, seed=args.seed)
    with _deadline(args.timeout):
        res = brute_force_grmr(data, args.eps, size_cap=args.size_cap)
    _emit({"config": _config(args), "result": res.to_dict()}, args.out)
    return EXIT_OK


# ---------------------------------------------------------------- bench

def _bench_cells(args):
    methods = _str_list(args.methods)
    for m in methods:
        if m not in ("egrmr", "hgrmr", "reuse"):
            raise ConfigError(f"unknown bench method {m!r}")
    eps_list = _float_list(args.eps_list)
    for e in eps_list:
        _check_eps(e)
    grid = itertools.product(methods, _str_list(args.dists), _int_list(args.n_list), _int_list(args.d_list),
                             eps_list, _int_list(args.k_list), _int_list(args.seeds))
    cells = []
    for method, dist, n, d, eps, k, seed in grid:
        if dist not in DISTRIBUTIONS:
            raise ConfigError(f"unknown distribution {dist!r}")
        if method == "egrmr" and d != 2:
            continue
        cells.append({"method": method, "dist": dist, "n": n, "d": d, "eps": eps, "k": k,
                      "m": args.m, "seed": seed})
    return cells


_CACHE = {}


def _cell_inputs(dist, n, d, seed, k, m, approx):
    key = (dist, n, d, seed)
    if key not in _CACHE:
        _CACHE.clear()
        data = generate(dist, n, d, seed)
        _require_interior(data, seed=seed)
        _CACHE[key] = {"data": data, "X": extreme_points(data)}
    entry = _CACHE[key]
    gk = ("ipdg", k, m, approx)
    if gk not in entry:
        X = entry["X"]
        if m == 0:
            entry[gk] = empty_ipdg(X)
        elif d == 2 and not approx:
            entry[gk] = ipdg_exact_2d(X)
        else:
            entry[gk] = ipdg_approx(entry["data"], X, m=m, k=k, seed=seed)
    return entry["data"], entry["X"], entry[gk]


def run_cell(cell, eval_samples=0, exact=True, approx=False):
    row = dict(cell)
    row.update(status="ok", size="", extremes="", exact_regret="", sampled_regret="", wall_ms="",
               delta="", error="")
    try:
        t0 = time.perf_counter()
        data, X, g = _cell_inputs(cell["dist"], cell["n"], cell["d"], cell["seed"], cell["k"],
                                  cell["m"], approx)
        t1 = time.perf_counter()
        if cell["method"] == "egrmr":
            res = egrmr(data, cell["eps"], X)
        elif cell["method"] == "hgrmr":
            res = hgrmr(data, X, g, cell["eps"])
        else:
            res = hgrmr_reuse(data, X, g, cell["eps"])
        t2 = time.perf_counter()
        row["size"] = res.size
        row["extremes"] = len(X)
        row["wall_ms"] = round(1000 * (t2 - t1), 3)
        row["delta"] = getattr(res, "delta", cell["eps"])
        if exact:
            row["exact_regret"] = exact_max_regret(data, res.indices, X).value
        if eval_samples:
            row["sampled_regret"] = estimate_max_regret(data, res.indices, m=eval_samples,
                                                        seed=cell["seed"], X=X).value
    except ConditionOneError as exc:
        row.update(status="condition-1", error=str(exc))
    except GrmrError as exc:
        row.update(status="error", error=str(exc))
    return row


def _cell_worker(conn, cell, eval_samples, exact, approx):
    try:
        conn.send(run_cell(cell, eval_samples, exact, approx))
    except Exception as exc:   # report instead of dying silently
        row = dict(cell)
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
        conn.send(row)
    finally:
        conn.close()


def _timeout_row(cell, limit):
    row = {f: "" for f in BENCH_FIELDS}
    row.update(cell)
    row.update(status="timed-out", error=f"exceeded {limit:g}s")
    return row


def run_bench(cells, workers=1, timeout=None, eval_samples=0, exact=True, approx=False):
    """Rows in grid order; with a timeout or several workers every cell runs in its own process."""
    if workers <= 1 and not timeout:
        return [run_cell(c, eval_samples, exact, approx) for c in cells]
    ctx = mp.get_context("fork")
    results = [None] * len(cells)
    pending = list(range(len(cells)))
    running = {}
    while pending or running:
        while pending and len(running) < workers:
            idx = pending.pop(0)
            recv, send = ctx.Pipe(duplex=False)
            p = ctx.Process(target=_cell_worker, args=(send, cells[idx], eval_samples, exact, approx))
            p.start()
            send.close()
            running[idx] = (p, recv, time.monotonic())
        for idx, (p, recv, started) in list(running.items()):
            if recv.poll():
                results[idx] = recv.recv()
                p.join()
                del running[idx]
            elif not p.is_alive():
                p.join()
                row = _timeout_row(cells[idx], 0)
                row.update(status="error", error=f"worker exited with code {p.exitcode}")
                results[idx] = row
                del running[idx]
            elif timeout and time.monotonic() - started > timeout:
                p.terminate()
                p.join()
                results[idx] = _timeout_row(cells[idx], timeout)
                del running[idx]
        time.sleep(0.005)
    return results


def write_bench_csv(path, rows, config):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + json.dumps(_jsonable(config)) + "\n")
        w = csv.DictWriter(fh, fieldnames=BENCH_FIELDS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)


def plot_bench(rows, path, x=None):
    """Mean result size and wall time per method against one grid axis, as a PNG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ok = [r for r in rows if r.get("status") == "ok"]
    axes = ("eps", "n", "d", "k")
    if x is None:
        x = max(axes, key=lambda a: len({r[a] for r in ok}) if ok else 0)
    # one line per method and per value of any other axis that varies; seeds are averaged
    split = [a for a in ("dist",) + axes if a != x and len({r[a] for r in ok}) > 1]
    series = {}
    for r in ok:
        label = " ".join([r["method"]] + [f"{a}={r[a]}" for a in split])
        series.setdefault(label, {}).setdefault(r[x], []).append((float(r["size"]), float(r["wall_ms"])))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    for label in sorted(series):
        pts = series[label]
        xs = sorted(pts)
        ax1.plot(xs, [np.mean([s for s, _ in pts[v]]) for v in xs], marker="o", label=label)
        ax2.plot(xs, [np.mean([t for _, t in pts[v]]) for v in xs], marker="o", label=label)
    for ax, ylab in ((ax1, "result size"), (ax2, "wall time (ms)")):
        ax.set_xlabel(x)
        ax.set_ylabel(ylab)
        if x in ("eps", "n"):
            ax.set_xscale("log")
        ax.grid(alpha=0.3)
    ax2.set_yscale("log")
    if ok:
        ax1.legend(frameon=False, fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def cmd_bench(args):
    cells = _bench_cells(args)
    rows = run_bench(cells, workers=args.threads, timeout=args.timeout, eval_samples=args.eval_samples,
                     exact=not args.no_exact, approx=args.approx)
    config = _config(args)
    write_bench_csv(args.out, rows, config)
    summary = {"written": args.out, "cells": len(rows),
               "timed_out": sum(r["status"] == "timed-out" for r in rows)}
    if args.plot:
        path = args.plot if args.plot != "auto" else os.path.splitext(args.out)[0] + ".png"
        summary["plot"] = plot_bench(rows, path, x=args.plot_x)
    print(json.dumps(summary))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="grmr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic Normal/Uniform dataset")
    g.add_argument("--dist", choices=DISTRIBUTIONS, default="normal")
    g.add_argument("--n", type=int, default=10000)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--out", "-o", required=True)
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("extremes", help="extreme points (convex-hull vertices)")
    _add_data_args(e)
    e.add_argument("--out", "-o", help="index file to write (one row index per line)")
    e.add_argument("--json", help="write the summary JSON here instead of stdout")
    e.set_defaults(func=cmd_extremes)

    def ipdg_args(q):
        q.add_argument("--m", type=int, default=1_000_000, help="sampled directions (0: empty graph)")
        q.add_argument("--k", type=int, default=16, help="top-k size per direction")
        q.add_argument("--ipdg-seed", type=int, default=42)
        q.add_argument("--approx", action="store_true", help="sample the graph even in 2-d")

    q = sub.add_parser("ipdg", help="build the inner-product Delaunay graph")
    _add_data_args(q)
    ipdg_args(q)
    q.add_argument("--out", "-o", help="edge-list file")
    q.set_defaults(func=cmd_ipdg)

    def eval_args(q):
        q.add_argument("--eval-samples", type=int, default=1_000_000,
                       help="directions for the sampled estimate (0 to skip)")
        q.add_argument("--no-exact", action="store_true", help="skip the exact evaluator")

    s = sub.add_parser("solve", help="minimum eps-regret set (or the size-budget dual)")
    _add_data_args(s)
    ipdg_args(s)
    eval_args(s)
    s.add_argument("--eps", type=float)
    s.add_argument("--r", type=int, help="size budget: minimise the regret instead")
    s.add_argument("--method", choices=("auto", "egrmr", "hgrmr", "reuse"), default="auto")
    s.add_argument("--search", choices=("scan", "bisect"), default="scan",
                   help="candidate test in the exact 2-d solver")
    s.add_argument("--eta-mult", type=float, default=3.0, help="reuse: build level = eta-mult * eps")
    s.add_argument("--validate", choices=("exact", "sampled"), default="exact")
    s.add_argument("--cap", type=float, default=0.99, help="dual: build level of the dominance graph")
    s.add_argument("--ipdg", help="edge-list file from the ipdg command")
    s.add_argument("--timeout", type=float, help="seconds before giving up (exit code 4)")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("evaluate", help="max regret ratio of a given subset")
    _add_data_args(v)
    eval_args(v)
    v.add_argument("--subset", help="comma-separated 0-based row indices")
    v.add_argument("--subset-file")
    v.add_argument("--out", "-o")
    v.set_defaults(func=cmd_evaluate)

    o = sub.add_parser("oracle", help="exhaustive search on a small instance")
    _add_data_args(o)
    o.add_argument("--eps", type=float, required=True)
    o.add_argument("--size-cap", type=int)
    o.add_argument("--timeout", type=float)
    o.add_argument("--out", "-o")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="grid of runs written as one CSV row per cell")
    b.add_argument("--methods", default="hgrmr")
    b.add_argument("--dists", default="normal")
    b.add_argument("--n-list", default="2000")
    b.add_argument("--d-list", default="3")
    b.add_argument("--eps-list", default="0.1")
    b.add_argument("--k-list", default="16")
    b.add_argument("--seeds", default="42")
    b.add_argument("--m", type=int, default=1_000_000)
    b.add_argument("--approx", action="store_true", help="sampled IPDG even in 2-d")
    eval_args(b)
    b.add_argument("--timeout", type=float, help="per-cell limit in seconds")
    b.add_argument("--threads", type=int, default=None, help=f"worker processes (default ${THREADS_ENV} or 1)")
    b.add_argument("--out", "-o", required=True)
    b.add_argument("--plot", nargs="?", const="auto",
                   help="also render a PNG (default path: the CSV path with .png)")
    b.add_argument("--plot-x", choices=("eps", "n", "d", "k"))
    b.set_defaults(func=cmd_bench)
    return p


def _fail(code, message, **extra):
    print(json.dumps(_jsonable({"error": message, "exit_code": code, **extra})), file=sys.stderr)
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                         format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "threads", "unset") is None:
            args.threads = _threads_default()
        return args.func(args)
    except ConditionOneError as exc:
        return _fail(EXIT_CONDITION, str(exc), witness_direction=exc.direction, omega=exc.omega)
    except TimeoutExceeded as exc:
        return _fail(EXIT_TIMEOUT, str(exc))
    except (ConfigError, OSError) as exc:
        return _fail(EXIT_CONFIG, str(exc))


if __name__ == "__main__":
    sys.exit(main())
