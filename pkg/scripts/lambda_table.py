"""Tabulate lambda_p with its closed-form sandwich and the tau_p bound.

Usage:
    python scripts/lambda_table.py --p-max 20 --output lambda_table.csv
"""

import argparse
import csv
import sys
from dataclasses import dataclass

from gkw import MapParam, bounds, lambda_by_power, tau_bound


@dataclass
class Config:
    p_min: int = 1
    p_max: int = 20
    degree: int = 64
    output: str = ""


def run(cfg: Config):
    rows = []
    for p in range(cfg.p_min, cfg.p_max + 1):
        param = MapParam(p)
        eig = lambda_by_power(param, degree=cfg.degree)
        v, w = bounds(param)
        tau = tau_bound(param, eig) if p >= 2 else float("nan")
        rows.append((p, v, eig.lam, w, tau, eig.residual))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-min", type=int, default=1)
    ap.add_argument("--p-max", type=int, default=20)
    ap.add_argument("--degree", type=int, default=64)
    ap.add_argument("--output", default="")
    ns = ap.parse_args()
    cfg = Config(ns.p_min, ns.p_max, ns.degree, ns.output)
    rows = run(cfg)
    fh = open(cfg.output, "w", newline="") if cfg.output else sys.stdout
    w = csv.writer(fh)
    w.writerow(["p", "v_p", "lambda_p", "w_p", "tau_bound", "eig_residual"])
    for r in rows:
        w.writerow(r)
    if cfg.output:
        fh.close()
        print(f"wrote {len(rows)} rows to {cfg.output}")


if __name__ == "__main__":
    main()
