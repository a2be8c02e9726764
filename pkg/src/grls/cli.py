"""Command line front end.

    grls [--seed N] [--dump-config] solve CONFIG [--out DIR]
    grls [--seed N] [--dump-config] reproduce-example [--out DIR]
    grls [--seed N] [--dump-config] check-grad CONFIG
    grls [--seed N] [--dump-config] oracle CONFIG [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 divergence, 3 failed check.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .config import RunConfig, dump_config, load_config
from .errors import ConfigError, DivergenceError, UnsupportedInstanceError
from .geometry import HorizontalTangent, chordal_distance
from .objective import (
    baseline_ls_solve,
    constraint_violation,
    cost,
    penalized_grads,
    penalized_value,
    squared_center_distance,
)
from .oracles import (
    GridSpec,
    ProbeConfig,
    check_gradients,
    constrained_cost_2d,
    instance_cases,
    line,
    line_angle,
    local_minimax_probe,
    minimax_2d,
)
from .solver import solve

log = logging.getLogger("grls")

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_CHECK = 0, 1, 2, 3

# acceptance thresholds for reproduce-example and oracle
REPRO_GRAD_TOL = 1e-3
REPRO_BALL_SLACK = 0.01
ORACLE_VALUE_TOL = 1e-2
ORACLE_Y_TOL = 5e-2


def fmt(v: float) -> str:
    return f"{v:.17g}"


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_csv(path: Path, header: str, rows):
    lines = [header] + [",".join(fmt(float(v)) for v in row) for row in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def write_kv(path: Path, items: dict):
    _atomic_write(path, "".join(f"{k} = {v}\n" for k, v in items.items()))


def _vec(a) -> str:
    return ", ".join(fmt(float(v)) for v in np.ravel(a))


def _segment(phi: float, half: float):
    d = np.array([math.cos(phi), math.sin(phi)])
    return [-half * d, half * d]


def write_outputs(out: Path, cfg: RunConfig, inst, result, status: str) -> dict:
    """Trace, summary and (for n=2, k=1) the figure data files."""
    trace = result.trace
    write_csv(out / "gradient_norm.csv", "iter,grad_norm", [(r.iter, r.grad_norm) for r in trace])
    write_csv(out / "trace.csv", "iter,grad_norm,grad_x_norm,grad_y_norm,center_distance",
              [(r.iter, r.grad_norm, r.grad_x_norm, r.grad_y_norm, r.center_distance) for r in trace])

    p = result.final
    params = cfg.penalty()
    Y = p.y.Y
    dist = math.sqrt(squared_center_distance(p.y, inst))
    violation = constraint_violation(p.y, inst)
    Yh = inst.y_hat.Y
    x_ls = Yh @ baseline_ls_solve(Yh, inst.b)
    summary = {
        "status": status,
        "converged": str(result.converged).lower(),
        "iters_run": result.iters_run,
        "grad_norm": fmt(result.grad_norm),
        "seed": cfg.seed,
        "lambda": repr(cfg.lam),
        "u": repr(cfg.u),
        "rho": fmt(inst.rho),
        "x_star": _vec(p.x),
        "y_star": "; ".join(_vec(c) for c in Y.T),
        "projected_x_star": _vec(Y @ (Y.T @ p.x)),
        "cost": fmt(cost(p, inst)),
        "penalized_value": fmt(penalized_value(p, inst, params)),
        "center_distance": fmt(dist),
        "constraint_violation": fmt(violation),
        "constraint_violated": str(violation > 0).lower(),
        "ls_baseline_x": _vec(x_ls),
        "ls_baseline_cost": fmt(float(np.sum((x_ls - inst.b) ** 2))),
    }
    write_kv(out / "summary.txt", summary)

    if (inst.n, inst.k) == (2, 1):
        half = cfg.plot_range
        phi_hat = line_angle(inst.y_hat)
        arc = math.asin(min(inst.rho, 1.0))
        write_csv(out / "S.csv", "x,y", _segment(phi_hat, half))
        write_csv(out / "S_star.csv", "x,y", _segment(line_angle(p.y), half))
        write_csv(out / "ball_boundary_upper.csv", "x,y", _segment(phi_hat + arc, half))
        write_csv(out / "ball_boundary_lower.csv", "x,y", _segment(phi_hat - arc, half))
        write_csv(out / "b.csv", "x,y", [inst.b])
        write_csv(out / "x_iterates.csv", "x,y", [r.projected_point for r in trace])
        write_csv(out / "x_star.csv", "x,y", [Y @ (Y.T @ p.x)])
    return summary


def _run_solve(cfg: RunConfig, out: Path):
    """Returns (exit code, result or None)."""
    inst = cfg.instance()
    try:
        result = solve(inst, cfg.penalty(), cfg.solver())
    except DivergenceError as exc:
        log.error("diverged at iteration %d", exc.iteration)
        if exc.partial is not None:
            write_outputs(out, cfg, inst, exc.partial, "diverged")
        return EXIT_DIVERGED, None
    summary = write_outputs(out, cfg, inst, result, "ok")
    print(f"converged={summary['converged']} iters={result.iters_run} grad_norm={result.grad_norm:.3e} "
          f"d(y*,y_hat)={summary['center_distance']} rho={summary['rho']}")
    if summary["constraint_violated"] == "true":
        print(f"warning: y* lies outside the ball (violation {summary['constraint_violation']})")
    return EXIT_OK, result


def cmd_solve(cfg: RunConfig, out: Path) -> int:
    return _run_solve(cfg, out)[0]


def cmd_reproduce_example(cfg: RunConfig, out: Path) -> int:
    code, result = _run_solve(cfg, out)
    if code != EXIT_OK:
        return code
    inst = cfg.instance()
    dist = math.sqrt(squared_center_distance(result.final.y, inst))
    ok = result.trace[-1].grad_norm <= REPRO_GRAD_TOL and dist <= inst.rho + REPRO_BALL_SLACK
    print("reproduction " + ("PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_CHECK


def _corrupted(grads):
    def wrapped(p, inst, params):
        gx, gy = grads(p, inst, params)
        return gx * 1.01, HorizontalTangent(gy.base, gy.matrix * 1.01)
    return wrapped


def cmd_check_grad(cfg: RunConfig, points: int = 20, directions: int = 10, corrupt: bool = False) -> int:
    inst, params = cfg.instance(), cfg.penalty()
    grads = _corrupted(penalized_grads) if corrupt else penalized_grads
    rep = check_gradients(instance_cases(inst, params, points, cfg.seed), directions, cfg.seed, grads)
    print(f"grad_x: max relative error {rep.max_rel_err_x:.3e} (tol {rep.tol_x:g})")
    print(f"grad_y: max relative error {rep.max_rel_err_y:.3e} (tol {rep.tol_y:g})")
    if rep.passed:
        print(f"PASS ({rep.checks} points x {directions} directions)")
        return EXIT_OK
    worst = rep.worst_x if rep.max_rel_err_x > rep.tol_x else rep.worst_y
    print(f"FAIL: worst configuration {worst}")
    return EXIT_CHECK


def cmd_oracle(cfg: RunConfig, out: Path, grid: GridSpec = GridSpec(), probe: ProbeConfig = ProbeConfig()) -> int:
    inst = cfg.instance()
    if (inst.n, inst.k) != (2, 1):
        raise UnsupportedInstanceError(f"oracle needs n=2, k=1, got n={inst.n}, k={inst.k}")
    code, result = _run_solve(cfg, out)
    if code != EXIT_OK:
        return code
    x_o, phi_o, v_o = minimax_2d(inst, grid)
    p = result.final
    phi_s = line_angle(p.y)
    v_s = constrained_cost_2d(p.x, phi_s, inst)
    gap = v_s - v_o
    y_gap = chordal_distance(p.y, line(phi_o))
    rep = local_minimax_probe(p, inst, probe)
    table = {
        "oracle_value": fmt(v_o),
        "oracle_x": _vec(x_o),
        "oracle_phi": fmt(phi_o),
        "solver_value": fmt(v_s),
        "solver_phi": fmt(phi_s),
        "value_gap": fmt(gap),
        "y_chordal_gap": fmt(y_gap),
        "probe_y_violations": rep.y_violations,
        "probe_x_violations": rep.x_violations,
        "probe_worst_y_margin": fmt(rep.worst_y_margin),
        "probe_worst_x_margin": fmt(rep.worst_x_margin),
    }
    write_kv(out / "oracle.txt", table)
    for k, v in table.items():
        print(f"{k} = {v}")
    ok = abs(gap) <= ORACLE_VALUE_TOL and y_gap <= ORACLE_Y_TOL and rep.violations == 0
    print("oracle comparison " + ("PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grls", description="Geometrically robust least squares by Riemannian GDA.")
    ap.add_argument("--seed", type=int, help="override the solver seed")
    ap.add_argument("--dump-config", action="store_true", help="print the effective configuration and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("solve", help="solve the instance described by a config file")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (default: output_dir from the config)")

    p = sub.add_parser("reproduce-example", help="run the 2-D worked example and write figure data")
    p.add_argument("--out")

    p = sub.add_parser("check-grad", help="compare closed-form gradients with finite differences")
    p.add_argument("config")
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--directions", type=int, default=10)
    p.add_argument("--corrupt-gradient", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("oracle", help="compare the solver with a brute-force grid search (n=2, k=1)")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--angle-count", type=int, default=GridSpec.angle_count)
    p.add_argument("--x-resolution", type=float, default=GridSpec.x_resolution)
    p.add_argument("--x-halfwidth", type=float, default=GridSpec.x_box_halfwidth)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        if args.dump_config:
            sys.stdout.write(dump_config(cfg))
            return EXIT_OK
        if args.command is None:
            build_parser().print_usage(sys.stderr)
            return EXIT_CONFIG
        out = Path(getattr(args, "out", None) or cfg.output_dir)
        if args.command == "solve":
            return cmd_solve(cfg, out)
        if args.command == "reproduce-example":
            return cmd_reproduce_example(cfg, out)
        if args.command == "check-grad":
            return cmd_check_grad(cfg, args.points, args.directions, args.corrupt_gradient)
        grid = GridSpec(args.angle_count, args.x_halfwidth, args.x_resolution)
        return cmd_oracle(cfg, out, grid)
    except ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnsupportedInstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
