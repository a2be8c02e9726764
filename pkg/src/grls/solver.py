"""Timescale-separated Riemannian gradient descent ascent (TSRGDA).

One iteration moves along the product-manifold exponential map of
(-eta_x grad_x, +eta_y grad_y), both gradients evaluated at the current
point. On R^n the exponential map is vector addition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError
from .geometry import exp_map, random_point
from .objective import (
    ObjectivePoint,
    PenaltyParams,
    ProblemInstance,
    penalized_grads,
    squared_center_distance,
)


@dataclass(frozen=True)
class SolverConfig:
    eta_x: float = 0.01
    eta_y: float = 0.1
    max_iters: int = 50_000
    grad_tol: float = 1e-6
    seed: int = 0
    record_every: int = 1

    def __post_init__(self):
        # zero step sizes are allowed here so that one player can be frozen
        if not (self.eta_x >= 0 and self.eta_y >= 0):
            raise ValueError("step sizes must be nonnegative")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.max_iters < 0 or self.record_every < 1:
            raise ValueError("need max_iters >= 0 and record_every >= 1")


@dataclass(frozen=True, eq=False)
class SolverState:
    iter: int
    point: ObjectivePoint
    grad_x_norm: float
    grad_y_norm: float
    # gradients at ``point``, kept so the next step does not recompute them
    grads: tuple = field(default=None, repr=False)

    @property
    def grad_norm(self) -> float:
        return float(np.hypot(self.grad_x_norm, self.grad_y_norm))


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    grad_norm: float
    projected_point: tuple
    center_distance: float
    grad_x_norm: float
    grad_y_norm: float


@dataclass(frozen=True, eq=False)
class SolveResult:
    final: ObjectivePoint
    converged: bool
    iters_run: int
    trace: tuple
    grad_norm: float


def stationarity(p: ObjectivePoint, inst: ProblemInstance, params: PenaltyParams):
    """(||grad_x||, ||grad_y||_F, sqrt of the sum of squares) of the penalized objective."""
    gx, gy = penalized_grads(p, inst, params)
    nx = float(np.linalg.norm(gx))
    ny = gy.norm()
    return nx, ny, float(np.hypot(nx, ny))


def _state_at(iteration, point, inst, params) -> SolverState:
    with np.errstate(over="ignore", invalid="ignore"):
        gx, gy = penalized_grads(point, inst, params)
    nx, ny = float(np.linalg.norm(gx)), gy.norm()
    if not (np.isfinite(nx) and np.isfinite(ny)):
        raise DivergenceError(iteration)
    return SolverState(iteration, point, nx, ny, (gx, gy))


def initial_state(inst, params, point: ObjectivePoint) -> SolverState:
    return _state_at(0, point, inst, params)


def step(state: SolverState, inst: ProblemInstance, params: PenaltyParams, config: SolverConfig) -> SolverState:
    """One simultaneous TSRGDA update; raises DivergenceError on non-finite values."""
    if state.grads is None:
        state = _state_at(state.iter, state.point, inst, params)
    gx, gy = state.grads
    with np.errstate(over="ignore", invalid="ignore"):
        x_new = state.point.x - config.eta_x * gx
    if not np.all(np.isfinite(x_new)):
        raise DivergenceError(state.iter + 1)
    y_new = exp_map(state.point.y.rep, gy.scaled(config.eta_y))
    return _state_at(state.iter + 1, ObjectivePoint(x_new, y_new), inst, params)


def random_init(inst: ProblemInstance, seed) -> ObjectivePoint:
    """Standard normal x0 and uniform y0, drawn from independent streams of ``seed``."""
    sx, sy = np.random.SeedSequence(seed).spawn(2)
    x0 = np.random.default_rng(sx).standard_normal(inst.n)
    return ObjectivePoint(x0, random_point(inst.n, inst.k, sy))


def _record(state: SolverState, inst) -> TraceRecord:
    Y, x = state.point.y.Y, state.point.x
    return TraceRecord(
        iter=state.iter,
        grad_norm=state.grad_norm,
        projected_point=tuple(float(v) for v in Y @ (Y.T @ x)),
        center_distance=float(np.sqrt(squared_center_distance(state.point.y, inst))),
        grad_x_norm=state.grad_x_norm,
        grad_y_norm=state.grad_y_norm,
    )


def solve(
    inst: ProblemInstance,
    params: PenaltyParams,
    config: SolverConfig = SolverConfig(),
    init: ObjectivePoint | None = None,
) -> SolveResult:
    """Iterate :func:`step` until the combined gradient norm drops to ``grad_tol``.

    The trace holds every iterate whose index is a multiple of
    ``record_every`` plus the final iterate.
    """
    if init is None:
        init = random_init(inst, config.seed)
    trace = []

    def partial(state, converged=False):
        if state is not None and (not trace or trace[-1].iter != state.iter):
            trace.append(_record(state, inst))
        last = state.point if state is not None else init
        gn = state.grad_norm if state is not None else float("nan")
        return SolveResult(last, converged, state.iter if state else 0, tuple(trace), gn)

    state = None
    try:
        state = initial_state(inst, params, init)
        trace.append(_record(state, inst))
        while state.grad_norm > config.grad_tol and state.iter < config.max_iters:
            state = step(state, inst, params, config)
            if state.iter % config.record_every == 0:
                trace.append(_record(state, inst))
    except DivergenceError as exc:
        raise DivergenceError(exc.iteration, partial=partial(state)) from None
    return partial(state, converged=state.grad_norm <= config.grad_tol)
