#!/usr/bin/env python
"""Run the 2-D example from many random initial points and tabulate the outcome."""

import argparse
import csv
import sys
import time

import numpy as np

from grls.objective import PenaltyParams, paper_instance, squared_center_distance
from grls.oracles import line_angle
from grls.solver import SolverConfig, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    args = ap.parse_args()

    inst = paper_instance()
    params = PenaltyParams(70.0, 0.01)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["seed", "converged", "iters", "grad_norm", "center_distance", "phi_star", "seconds"])
    ok = 0
    for seed in range(args.seeds):
        t0 = time.perf_counter()
        res = solve(inst, params, SolverConfig(seed=seed))
        dt = time.perf_counter() - t0
        d = float(np.sqrt(squared_center_distance(res.final.y, inst)))
        ok += res.grad_norm <= 1e-3 and d <= inst.rho + 0.01
        w.writerow([seed, res.converged, res.iters_run, f"{res.grad_norm:.3e}", f"{d:.6f}",
                    f"{line_angle(res.final.y):.6f}", f"{dt:.3f}"])
    print(f"# {ok}/{args.seeds} runs reached grad_norm <= 1e-3 with d(y*, y_hat) <= rho + 0.01", file=sys.stderr)


if __name__ == "__main__":
    main()
