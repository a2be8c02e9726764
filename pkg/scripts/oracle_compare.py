#!/usr/bin/env python
"""Solver output versus brute-force minimax for the 2-D example, plus the local minimax probe
evaluated on both the constrained cost and the smoothed penalized objective."""

import argparse

from grls.objective import PenaltyParams, cost, paper_instance
from grls.oracles import GridSpec, ProbeConfig, inner_max_2d, line_angle, local_minimax_probe, minimax_2d
from grls.solver import SolverConfig, solve

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--x-resolution", type=float, default=0.01)
args = ap.parse_args()

inst = paper_instance()
params = PenaltyParams(70.0, 0.01)
res = solve(inst, params, SolverConfig(seed=args.seed))
x_o, phi_o, v_o = minimax_2d(inst, GridSpec(x_resolution=args.x_resolution))
print(f"brute force : value {v_o:.6f}  phi {phi_o:+.6f}  x {x_o}")
print(f"solver      : cost  {cost(res.final, inst):.6f}  phi {line_angle(res.final.y):+.6f}  x {res.final.x}")
print(f"solver x*, worst case over the ball: {inner_max_2d(res.final.x, inst)[1]:.6f}")
for obj in ("constrained", "penalized"):
    rep = local_minimax_probe(res.final, inst, ProbeConfig(), objective=obj, params=params)
    print(f"probe [{obj:11s}]: y-violations {rep.y_violations}/{rep.y_samples}, x-violations {rep.x_violations}/{rep.x_samples}")
