"""Command-line interface.

Every subcommand emits flat rows with the same columns
(p, quantity, value, n_or_dim, N, K, tol, seed) as CSV (RFC 4180 line
endings) or JSON, so downstream plotting never needs per-command parsing.
Numeric values are serialized with repr, making emission deterministic and
read/re-emit round trips byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import numpy as np

from .evolution import evolve_cdf, montecarlo_cdf
from .funcspace import DEFAULT_DEGREE
from .gauss import MapParam
from .operators import TruncationPolicy
from .spectral import (bounds, lambda_by_power, lambda_by_ratio,
                       spectrum_collocation, verify_sandwich)
from .verify import verify_all

COLUMNS = ("p", "quantity", "value", "n_or_dim", "N", "K", "tol", "seed")

_DEFAULTS = dict(degree=DEFAULT_DEGREE, K=10_000, tol=1e-10, steps=30,
                 samples=1_000_000, fmt="json", grid=1001, dim=64,
                 method="ratio", n=10, suite="all")


def _parse_p_range(text: str) -> List[int]:
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("expected A..B with integers A <= B")
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError("need 1 <= A <= B")
    return list(range(lo, hi + 1))


def _load_config(path: str) -> Dict[str, str]:
    cfg = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            k = k.strip().replace("-", "_")
            cfg["fmt" if k == "format" else k] = v.strip()
    return cfg


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from --config, then from built-in defaults."""
    cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    casts = dict(p=int, degree=int, K=int, steps=int, samples=int, seed=int,
                 grid=int, dim=int, n=int, tol=float, fmt=str, method=str,
                 output=str, suite=str)
    if "p_range" in cfg and getattr(args, "p_range", None) is None \
            and hasattr(args, "p_range"):
        args.p_range = _parse_p_range(cfg.pop("p_range"))
    for key, cast in casts.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            if key in cfg:
                setattr(args, key, cast(cfg[key]))
            elif key in _DEFAULTS:
                setattr(args, key, _DEFAULTS[key])
    return args


def _p_list(args) -> List[int]:
    if getattr(args, "p_range", None):
        return args.p_range
    if getattr(args, "p", None):
        return [args.p]
    return [2]


def _policy(args) -> TruncationPolicy:
    return TruncationPolicy(cutoff=args.K, target_tol=args.tol)


def _workers(n_tasks: int) -> int:
    cap = os.environ.get("GKW_THREADS", "")
    limit = int(cap) if cap.strip() else (os.cpu_count() or 1)
    return max(1, min(n_tasks, limit))


def _pmap(fn, ps):
    w = _workers(len(ps))
    if w == 1:
        return [fn(p) for p in ps]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, ps))


def _row(p, quantity, value, n_or_dim, args, seed="") -> Dict:
    return {"p": p, "quantity": quantity, "value": value,
            "n_or_dim": n_or_dim, "N": args.degree, "K": args.K,
            "tol": args.tol, "seed": seed}


def emit(rows: List[Dict], fmt: str, fh) -> None:
    if fmt == "csv":
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow(["" if r[c] is None else str(r[c]) for c in COLUMNS])
    elif fmt == "json":
        json.dump(rows, fh, indent=2)
        fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _output(rows: List[Dict], args) -> None:
    rows = sorted(rows, key=lambda r: (r["p"], str(r["quantity"]),
                                       str(r["n_or_dim"])))
    buf = io.StringIO()
    emit(rows, args.fmt, buf)
    text = buf.getvalue()
    if getattr(args, "output", None):
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_lambda(args) -> int:
    solver = lambda_by_ratio if args.method == "ratio" else lambda_by_power
    policy = _policy(args)

    def one(p):
        eig = solver(MapParam(p), policy=policy, degree=args.degree)
        return _row(p, "lambda", eig.lam, eig.iterations, args)

    _output(_pmap(one, _p_list(args)), args)
    return 0


def _cmd_bounds(args) -> int:
    rows = []
    for p in _p_list(args):
        v, w = bounds(MapParam(p))
        rows.append(_row(p, "bounds", f"{v!r};{w!r}", 0, args))
    _output(rows, args)
    return 0


def _cmd_sandwich(args) -> int:
    policy = _policy(args)

    def one(p):
        res = verify_sandwich(MapParam(p), args.grid, policy, args.degree)
        return [_row(p, "sandwich_min_ratio", res.min_ratio, 0, args),
                _row(p, "sandwich_max_ratio", res.max_ratio, 0, args)]

    rows = [r for chunk in _pmap(one, _p_list(args)) for r in chunk]
    _output(rows, args)
    return 0


def _cmd_evolve(args) -> int:
    policy = _policy(args)
    rows = []
    for p in _p_list(args):
        trace = evolve_cdf(MapParam(p), n=args.steps, policy=policy,
                           degree=args.degree, grid_size=args.grid)
        for k, d in enumerate(trace.deltas):
            rows.append(_row(p, "sup_delta",
                             float(np.abs(d.values(trace.grid)).max()),
                             k, args))
    _output(rows, args)
    return 0


def _cmd_spectrum(args) -> int:
    policy = _policy(args)
    rows = []
    for p in _p_list(args):
        spec = spectrum_collocation(MapParam(p), args.dim, policy)
        for i, ev in enumerate(spec.eigenvalues[: args.dim // 4], start=1):
            rows.append(_row(p, "eigenvalue_re", float(ev.real), i, args))
        for i, r in enumerate(spec.conjecture_ratios, start=1):
            rows.append(_row(p, "conjecture_ratio", float(r), i, args))
    _output(rows, args)
    return 0


def _cmd_montecarlo(args) -> int:
    if args.seed is None:
        raise ValueError("montecarlo requires --seed for reproducibility")
    xs = np.linspace(0.0, 1.0, 21)
    rows = []
    for p in _p_list(args):
        emp = montecarlo_cdf(MapParam(p), args.n, args.samples, args.seed, xs)
        for x, f in zip(xs, emp):
            rows.append(_row(p, f"mc_cdf[x={x:.3f}]", float(f), args.n, args,
                             seed=args.seed))
    _output(rows, args)
    return 0


def _cmd_verify(args) -> int:
    from . import verify as _v
    ps = (args.p_range if getattr(args, "p_range", None)
          else ([args.p] if getattr(args, "p", None) else list(range(2, 11))))
    policy = _policy(args)
    ps2 = [p for p in ps if p >= 2]
    suites = {
        "all": lambda: verify_all(ps, policy),
        "bounds": lambda: _v.suite_bounds(ps),
        "sandwich": lambda: _v.suite_sandwich(ps2, policy),
        "estimators": lambda: _v.suite_estimators(ps, policy),
        "identities": lambda: _v.suite_identities(
            [p for p in (2, 3, 5) if p in ps] or (2, 3, 5), policy),
        "tail": lambda: _v.suite_tail_control(
            [p for p in (2, 5) if p in ps] or ps2[:1], policy),
        "anchor": lambda: _v.suite_anchor(policy),
        "spectrum": lambda: _v.suite_spectrum(
            [p for p in (1, 2) if p in ps] or ps2[:1], policy),
    }
    if args.suite not in suites:
        raise ValueError(f"unknown suite {args.suite!r}")
    checks = suites[args.suite]()
    rows = [_row(c.p, c.name, c.value, int(c.passed), args) for c in checks]
    _output(rows, args)
    failed = [c for c in checks if not c.passed]
    for c in failed:
        print(f"FAIL {c.name} (p={c.p}): value {c.value:.3e} "
              f"exceeds {c.threshold:.3e}", file=sys.stderr)
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed",
          file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gkw",
        description="Spectral constants and distribution dynamics of the "
                    "maps x -> {p/x}.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, extra=()):
        sp.add_argument("--p", type=int)
        sp.add_argument("--p-range", type=_parse_p_range, dest="p_range",
                        metavar="A..B")
        sp.add_argument("--degree", type=int)
        sp.add_argument("--K", type=int, help="series truncation cutoff")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"))
        sp.add_argument("--output")
        sp.add_argument("--config", help="flat key=value file; flags win")
        for name, kw in extra:
            sp.add_argument(name, **kw)
        return sp

    common(sub.add_parser("lambda", help="second eigenvalue lambda_p"),
           [("--method", dict(choices=("ratio", "power")))])
    common(sub.add_parser("bounds", help="closed-form sandwich v_p, w_p"))
    common(sub.add_parser("sandwich", help="grid check of the sandwich"),
           [("--grid", dict(type=int))])
    common(sub.add_parser("evolve", help="CDF recursion deviations"),
           [("--steps", dict(type=int)), ("--grid", dict(type=int))])
    common(sub.add_parser("spectrum", help="collocation eigenvalues"),
           [("--dim", dict(type=int))])
    common(sub.add_parser("montecarlo", help="empirical iterate CDF"),
           [("--n", dict(type=int)), ("--samples", dict(type=int)),
            ("--seed", dict(type=int))])
    common(sub.add_parser("verify", help="self-check suites (exit 1 on fail)"),
           [("--suite", dict(choices=("all", "bounds", "sandwich",
                                      "estimators", "identities", "tail",
                                      "anchor", "spectrum")))])
    return ap


_DISPATCH = {"lambda": _cmd_lambda, "bounds": _cmd_bounds,
             "sandwich": _cmd_sandwich, "evolve": _cmd_evolve,
             "spectrum": _cmd_spectrum, "montecarlo": _cmd_montecarlo,
             "verify": _cmd_verify}


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = _resolve(ap.parse_args(argv))
        return _DISPATCH[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
