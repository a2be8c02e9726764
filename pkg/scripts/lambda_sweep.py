#!/usr/bin/env python
"""Final ball violation of the 2-D example as a function of the penalty weight."""

import argparse

from grls.objective import paper_instance
from grls.oracles import penalty_exactness_sweep, violation_nonincreasing
from grls.solver import SolverConfig

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--lambdas", type=float, nargs="+", default=[0, 1, 10, 70, 1000, 1e4])
ap.add_argument("--u", type=float, default=0.01)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--max-iters", type=int, default=50_000)
args = ap.parse_args()

rows = penalty_exactness_sweep(paper_instance(), SolverConfig(seed=args.seed, max_iters=args.max_iters),
                               args.lambdas, u=args.u)
print("lambda,converged,diverged,iters,center_distance,violation,grad_norm")
for r in rows:
    print(f"{r.lam:g},{r.converged},{r.diverged},{r.iters_run},{r.center_distance:.6f},{r.violation:.6f},{r.grad_norm:.3e}")
print(f"# nonincreasing within 1e-3: {violation_nonincreasing(rows)}")
