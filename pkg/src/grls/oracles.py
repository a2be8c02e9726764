"""Independent reference computations used to validate the closed forms and the solver.

Finite-difference gradients, brute-force grid search for the 2-D problem
(n = 2, k = 1, where Gr(1, 2) is parametrized by an angle), a sampling probe
of the local minimax property, and a sweep over the penalty weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, InfeasibleError, UnsupportedInstanceError
from .geometry import GrassmannPoint, exp_map, random_point, random_tangent
from .objective import (
    ObjectivePoint,
    PenaltyParams,
    ProblemInstance,
    constraint_violation,
    penalized_grads,
    penalized_value,
    smoothed_penalty,
    squared_center_distance,
)
from .solver import SolverConfig, solve


@dataclass(frozen=True)
class GridSpec:
    angle_count: int = 4001
    x_box_halfwidth: float = 2.0
    x_resolution: float = 0.01

    def __post_init__(self):
        if self.angle_count < 3:
            raise ValueError("angle_count must be >= 3")
        if not 0 < self.x_resolution < self.x_box_halfwidth:
            raise ValueError("need 0 < x_resolution < x_box_halfwidth")


@dataclass(frozen=True)
class ProbeConfig:
    delta: float = 0.05
    sample_count: int = 500
    h_delta: float = 0.05
    tol: float = 1e-8
    inner_angle_count: int = 2001
    seed: int = 0

    def __post_init__(self):
        if not (self.delta > 0 and self.h_delta > 0):
            raise ValueError("delta and h_delta must be positive")


# -- finite differences -------------------------------------------------------


def fd_grad_x(p: ObjectivePoint, inst, params, h: float = 1e-6, value=penalized_value) -> np.ndarray:
    """Central-difference gradient in x."""
    g = np.empty(inst.n)
    for i in range(inst.n):
        e = np.zeros(inst.n)
        e[i] = h
        fp = value(ObjectivePoint(p.x + e, p.y), inst, params)
        fm = value(ObjectivePoint(p.x - e, p.y), inst, params)
        g[i] = (fp - fm) / (2 * h)
    return g


def fd_dirderiv_y(p: ObjectivePoint, H, inst, params, h: float = 1e-5, value=penalized_value) -> float:
    """Central difference of t -> value(x, Exp_y(t H)) at t = 0."""
    fp = value(ObjectivePoint(p.x, exp_map(p.y.rep, H.scaled(h))), inst, params)
    fm = value(ObjectivePoint(p.x, exp_map(p.y.rep, H.scaled(-h))), inst, params)
    return (fp - fm) / (2 * h)


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_err_x: float
    max_rel_err_y: float
    worst_x: str
    worst_y: str
    tol_x: float
    tol_y: float
    checks: int

    @property
    def passed(self) -> bool:
        return self.max_rel_err_x <= self.tol_x and self.max_rel_err_y <= self.tol_y


def check_gradients(cases, directions: int = 10, seed=0, grads=penalized_grads,
                    h_x: float = 1e-6, h_y: float = 1e-5, tol_x: float = 1e-5, tol_y: float = 1e-4) -> GradCheckReport:
    """Compare closed-form gradients with finite differences.

    ``cases`` yields (label, point, instance, params). The x error is
    ||g - g_fd|| / ||g_fd||; the y error along a unit horizontal direction H is
    |<g, H> - fd| / ||g||_F, i.e. relative to the largest possible directional
    derivative, so directions nearly orthogonal to g are not penalized.
    """
    rng = np.random.default_rng(seed)
    worst_x = worst_y = 0.0
    lab_x = lab_y = ""
    n_checks = 0
    for label, p, inst, params in cases:
        gx, gy = grads(p, inst, params)
        fx = fd_grad_x(p, inst, params, h_x)
        ex = np.linalg.norm(gx - fx) / max(np.linalg.norm(fx), 1e-12)
        if not ex <= worst_x:
            worst_x, lab_x = ex, label
        scale = max(gy.norm(), 1e-12)
        for _ in range(directions):
            H = random_tangent(p.y.rep, rng, 1.0)
            ey = abs(np.sum(gy.matrix * H.matrix) - fd_dirderiv_y(p, H, inst, params, h_y)) / scale
            if not ey <= worst_y:
                worst_y, lab_y = ey, label
        n_checks += 1
    return GradCheckReport(float(worst_x), float(worst_y), lab_x, lab_y, tol_x, tol_y, n_checks)


def random_cases(count: int, seed=0, n_range=(2, 8), k_max: int = 3,
                 lambdas=(0.0, 1.0, 70.0), us=(0.01, 0.1)):
    """Random (label, point, instance, params) tuples spanning dimensions and penalties."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        k = int(rng.integers(1, min(k_max, n - 1) + 1))
        y_hat = random_point(n, k, rng)
        inst = ProblemInstance(rng.standard_normal(n), y_hat, float(rng.uniform(0.05, 0.95)) * np.sqrt(k))
        params = PenaltyParams(float(rng.choice(lambdas)), float(rng.choice(us)))
        p = ObjectivePoint(rng.standard_normal(n), random_point(n, k, rng))
        yield f"case {i}: n={n} k={k} lam={params.lam:g} u={params.u:g} rho={inst.rho:.4f}", p, inst, params


def instance_cases(inst, params, count: int, seed=0):
    """Random points for one fixed instance."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        p = ObjectivePoint(rng.standard_normal(inst.n), random_point(inst.n, inst.k, rng))
        yield f"point {i}: n={inst.n} k={inst.k} lam={params.lam:g} u={params.u:g}", p, inst, params


# -- brute force for Gr(1, 2) -------------------------------------------------


def _require_2d(inst):
    if (inst.n, inst.k) != (2, 1):
        raise UnsupportedInstanceError(f"brute force needs n=2, k=1, got n={inst.n}, k={inst.k}")


def line_angle(y: GrassmannPoint) -> float:
    """Angle in (-pi/2, pi/2] of a line in R^2."""
    a = float(np.arctan2(y.Y[1, 0], y.Y[0, 0]))
    if a <= -np.pi / 2:
        a += np.pi
    elif a > np.pi / 2:
        a -= np.pi
    return a


def line(phi: float) -> GrassmannPoint:
    return GrassmannPoint.from_matrix(np.array([[np.cos(phi)], [np.sin(phi)]]))


def feasible_angles(inst, count: int) -> np.ndarray:
    """``count`` uniform samples of the arc {phi : |sin(phi - phi_hat)| <= rho}."""
    _require_2d(inst)
    if not inst.rho > 0:
        raise InfeasibleError("empty feasible arc")
    half = np.arcsin(min(inst.rho, 1.0))
    return line_angle(inst.y_hat) + np.linspace(-half, half, count)


def _values(X, phis, b):
    # f(x, phi) = a^2 - 2 a c + ||b||^2 with a = u.x, c = u.b, u = (cos phi, sin phi)
    U = np.stack([np.cos(phis), np.sin(phis)], axis=1)
    a = U @ X
    c = (U @ b)[:, None]
    return a * (a - 2 * c) + b @ b


def inner_max_2d(x, inst, grid: GridSpec = GridSpec()):
    """Maximize ||P_phi x - b||^2 over the feasible arc by exhaustive sampling.

    Returns (phi_star, value).
    """
    phis = feasible_angles(inst, grid.angle_count)
    v = _values(np.asarray(x, dtype=float).reshape(2, 1), phis, inst.b)[:, 0]
    i = int(np.argmax(v))
    return float(phis[i]), float(v[i])


def _grid_min(xs, ys, phis, b, chunk=2048):
    X = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=0).reshape(2, -1)
    best = (np.inf, None, None)
    for s in range(0, X.shape[1], chunk):
        V = _values(X[:, s:s + chunk], phis, b)
        imax = np.argmax(V, axis=0)
        vmax = V[imax, np.arange(V.shape[1])]
        j = int(np.argmin(vmax))
        if vmax[j] < best[0]:
            best = (float(vmax[j]), X[:, s + j].copy(), float(phis[imax[j]]))
    return best


def minimax_2d(inst, grid: GridSpec = GridSpec()):
    """Brute-force min over a box of x of the max over the feasible arc.

    A pass at ``x_resolution`` is followed by one pass at a tenth of it in
    the cell around the incumbent. Returns (x_star, phi_star, value).
    """
    phis = feasible_angles(inst, grid.angle_count)
    w, h = grid.x_box_halfwidth, grid.x_resolution
    m = int(round(w / h))
    coarse = np.linspace(-m * h, m * h, 2 * m + 1)
    _, xc, _ = _grid_min(coarse, coarse, phis, inst.b)
    fine = np.linspace(-h, h, 21)
    value, x_star, phi_star = _grid_min(xc[0] + fine, xc[1] + fine, phis, inst.b)
    return x_star, phi_star, value


def constrained_cost_2d(x, phi, inst) -> float:
    """The unpenalized cost at (x, span(cos phi, sin phi)), for phi inside the ball."""
    return float(_values(np.asarray(x, dtype=float).reshape(2, 1), np.array([phi]), inst.b)[0, 0])


# -- local minimax probe ------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    y_violations: int
    x_violations: int
    worst_y_margin: float
    worst_x_margin: float
    y_samples: int
    x_samples: int
    objective: str

    @property
    def violations(self) -> int:
        return self.y_violations + self.x_violations


def local_minimax_probe(p_star: ObjectivePoint, inst, probe: ProbeConfig = ProbeConfig(),
                        objective: str = "constrained", params: PenaltyParams | None = None) -> ProbeReport:
    """Sample the two inequalities defining a local minimax point around ``p_star``.

    (a) f(x*, y) <= f(x*, y*) for y with d(y, y*) <= delta;
    (b) f(x*, y*) <= max over d(y', y*) <= h_delta of f(x, y') for x with ||x - x*|| <= delta.

    With ``objective="constrained"`` f is the plain cost and every y, y' is
    restricted to the ball; with ``"penalized"`` f is the smoothed penalized
    objective over all of Gr(1, 2). Margins are positive when violated.
    """
    _require_2d(inst)
    if objective not in ("constrained", "penalized"):
        raise ValueError(f"unknown objective {objective!r}")
    if objective == "penalized" and params is None:
        raise ValueError("penalized probe needs params")
    rng = np.random.default_rng(probe.seed)
    phi_hat = line_angle(inst.y_hat)
    phi_star = line_angle(p_star.y)
    x_star = p_star.x
    b = inst.b

    def f(X, phis):
        V = _values(X, phis, b)
        if objective == "penalized":
            d2 = np.sin(phis - phi_hat) ** 2
            V = V - smoothed_penalty(d2, params, inst.rho)[:, None]
        return V

    def feasible(phis):
        if objective == "penalized":
            return np.ones(phis.shape, dtype=bool)
        return np.abs(np.sin(phis - phi_hat)) <= inst.rho

    f_star = float(f(x_star.reshape(2, 1), np.array([phi_star]))[0, 0])

    # (a): chordal distance between lines is |sin(phi - phi*)|
    s = np.arcsin(min(probe.delta, 1.0))
    phis = phi_star + rng.uniform(-s, s, probe.sample_count)
    phis = phis[feasible(phis)]
    margin_a = f(x_star.reshape(2, 1), phis)[:, 0] - f_star
    y_viol = int(np.sum(margin_a > probe.tol))

    # (b)
    r = probe.delta * np.sqrt(rng.uniform(0, 1, probe.sample_count))
    t = rng.uniform(0, 2 * np.pi, probe.sample_count)
    X = x_star[:, None] + np.stack([r * np.cos(t), r * np.sin(t)])
    sh = np.arcsin(min(probe.h_delta, 1.0))
    inner = phi_star + np.linspace(-sh, sh, probe.inner_angle_count | 1)
    inner = inner[feasible(inner)]
    inner = np.append(inner, phi_star)
    margin_b = f_star - f(X, inner).max(axis=0)
    x_viol = int(np.sum(margin_b > probe.tol))

    return ProbeReport(
        y_violations=y_viol,
        x_violations=x_viol,
        worst_y_margin=float(margin_a.max()) if margin_a.size else float("-inf"),
        worst_x_margin=float(margin_b.max()),
        y_samples=int(phis.size),
        x_samples=probe.sample_count,
        objective=objective,
    )


# -- penalty sweep ------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    lam: float
    converged: bool
    iters_run: int
    center_distance: float
    violation: float
    grad_norm: float
    diverged: bool = False


def penalty_exactness_sweep(inst, config: SolverConfig, lambdas, u: float = 0.01, init=None):
    """Solve once per penalty weight and record the final ball violation max(0, d - rho).

    A diverged run is recorded with ``diverged=True`` and the violation of its
    last finite iterate.
    """
    lambdas = list(lambdas)
    if not lambdas:
        raise ValueError("need at least one penalty weight")
    rows = []
    for lam in lambdas:
        params = PenaltyParams(float(lam), u)
        try:
            res = solve(inst, params, config, init)
            diverged = False
        except DivergenceError as exc:
            res, diverged = exc.partial, True
        y = res.final.y
        rows.append(SweepRow(
            lam=float(lam),
            converged=res.converged,
            iters_run=res.iters_run,
            center_distance=float(np.sqrt(squared_center_distance(y, inst))),
            violation=constraint_violation(y, inst),
            grad_norm=res.grad_norm,
            diverged=diverged,
        ))
    return rows


def violation_nonincreasing(rows, noise: float = 1e-3) -> bool:
    """True when violations never rise by more than ``noise`` as lam increases."""
    ordered = sorted(rows, key=lambda r: r.lam)
    return all(b.violation <= a.violation + noise for a, b in zip(ordered, ordered[1:]))
