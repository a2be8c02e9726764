"""Robust least squares cost, ball penalties, and their Riemannian gradients.

The minimax problem is

    min_x max_y  ||P_y x - b||^2 - lam * u * softplus((d(y, y_hat)^2 - rho^2) / u)

over x in R^n and y in Gr(k, n), with d the chordal distance. Projections
are applied as Y (Y^T x); the n x n projector is never formed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionError, RankDeficiencyError
from .geometry import RANK_TOL, GrassmannPoint, HorizontalTangent, tangent_project


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Observations ``b``, nominal subspace ``y_hat`` and chordal ball radius ``rho``."""

    b: np.ndarray
    y_hat: GrassmannPoint
    rho: float

    def __post_init__(self):
        b = np.array(self.b, dtype=float)
        if b.ndim != 1 or b.shape[0] != self.y_hat.n:
            raise DimensionError(f"b has shape {b.shape}, expected ({self.y_hat.n},)")
        if not 0 < self.rho < np.sqrt(self.y_hat.k):
            raise ValueError(f"rho must lie in (0, sqrt(k)) = (0, {np.sqrt(self.y_hat.k):.6g}), got {self.rho}")
        b.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def n(self) -> int:
        return self.y_hat.n

    @property
    def k(self) -> int:
        return self.y_hat.k


@dataclass(frozen=True)
class PenaltyParams:
    """Penalty weight ``lam`` (lambda) and softplus smoothing parameter ``u``."""

    lam: float = 70.0
    u: float = 0.01

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if not self.u > 0:
            raise ValueError(f"u must be > 0, got {self.u}")


@dataclass(frozen=True, eq=False)
class ObjectivePoint:
    """A point (x, y) of R^n x Gr(k, n)."""

    x: np.ndarray
    y: GrassmannPoint

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim != 1 or x.shape[0] != self.y.n:
            raise DimensionError(f"x has shape {x.shape}, expected ({self.y.n},)")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)


def paper_instance() -> ProblemInstance:
    """The 2-D worked example: y_hat = span(e1), b at angle pi/16, rho = sin(pi/8)."""
    return ProblemInstance(
        b=np.array([np.cos(np.pi / 16), np.sin(np.pi / 16)]),
        y_hat=GrassmannPoint.from_matrix(np.array([[1.0], [0.0]])),
        rho=np.sin(np.pi / 8),
    )


def _check(p: ObjectivePoint, inst: ProblemInstance):
    if (p.y.n, p.y.k) != (inst.n, inst.k):
        raise DimensionError(f"point on Gr({p.y.k},{p.y.n}) but instance is on Gr({inst.k},{inst.n})")


def _residual(x, Y, b):
    return Y @ (Y.T @ x) - b


def cost(p: ObjectivePoint, inst: ProblemInstance) -> float:
    """||P_y x - b||^2."""
    _check(p, inst)
    r = _residual(p.x, p.y.Y, inst.b)
    return float(r @ r)


def grad_x_cost(p: ObjectivePoint, inst: ProblemInstance) -> np.ndarray:
    _check(p, inst)
    Y = p.y.Y
    r = _residual(p.x, Y, inst.b)
    return 2.0 * (Y @ (Y.T @ r))


def rgrad_y_cost(p: ObjectivePoint, inst: ProblemInstance) -> HorizontalTangent:
    """Riemannian gradient of the cost in y.

    The Euclidean gradient of Y -> ||Y Y^T x - b||^2 is 2 (r x^T + x r^T) Y
    with r the residual; the Riemannian one is its horizontal projection.
    """
    _check(p, inst)
    Y, x = p.y.Y, p.x
    r = _residual(x, Y, inst.b)
    G = 2.0 * (np.outer(r, x @ Y) + np.outer(x, r @ Y))
    return tangent_project(p.y.rep, G)


def squared_center_distance(y: GrassmannPoint, inst: ProblemInstance) -> float:
    """d(y, y_hat)^2 evaluated as k - ||Y_hat^T Y||_F^2, clipped to [0, k]."""
    if (y.n, y.k) != (inst.n, inst.k):
        raise DimensionError("point and instance dimensions differ")
    M = inst.y_hat.Y.T @ y.Y
    return float(np.clip(inst.k - np.sum(M * M), 0.0, inst.k))


def rgrad_y_center_distance(y: GrassmannPoint, inst: ProblemInstance) -> HorizontalTangent:
    Yh = inst.y_hat.Y
    return tangent_project(y.rep, -2.0 * (Yh @ (Yh.T @ y.Y)))


def softplus(z):
    """log(1 + e^z) as max(z, 0) + log1p(e^-|z|); finite for all finite z."""
    z = np.asarray(z, dtype=float)
    out = np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))
    return out if out.ndim else float(out)


def logistic(z):
    """1 / (1 + e^-z) without overflow."""
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    out = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out if out.ndim else float(out)


def smoothed_penalty(t, params: PenaltyParams, rho: float):
    """lam * u * softplus((t - rho^2) / u), the nonnegative term subtracted from the cost.

    ``t`` is a squared distance; accepts scalars or arrays.
    """
    return params.lam * params.u * softplus((np.asarray(t, dtype=float) - rho**2) / params.u)


def hinge_penalty(t, lam: float, rho: float):
    """lam * max(0, t - rho^2), the unsmoothed exact penalty."""
    out = lam * np.maximum(0.0, np.asarray(t, dtype=float) - rho**2)
    return out if np.ndim(out) else float(out)


def penalized_value(p: ObjectivePoint, inst: ProblemInstance, params: PenaltyParams) -> float:
    """Smoothed penalized objective (minimized in x, maximized in y)."""
    return cost(p, inst) - smoothed_penalty(squared_center_distance(p.y, inst), params, inst.rho)


def penalized_grads(p: ObjectivePoint, inst: ProblemInstance, params: PenaltyParams):
    """(grad_x, grad_y) of :func:`penalized_value`; grad_y is a HorizontalTangent."""
    gx = grad_x_cost(p, inst)
    gy = rgrad_y_cost(p, inst)
    if params.lam == 0:
        return gx, gy
    weight = params.lam * logistic((squared_center_distance(p.y, inst) - inst.rho**2) / params.u)
    gd = rgrad_y_center_distance(p.y, inst)
    return gx, HorizontalTangent(gy.base, gy.matrix - weight * gd.matrix)


def constraint_violation(y: GrassmannPoint, inst: ProblemInstance) -> float:
    """max(0, d(y, y_hat) - rho)."""
    return max(0.0, float(np.sqrt(squared_center_distance(y, inst))) - inst.rho)


def baseline_ls_solve(A, b) -> np.ndarray:
    """Ordinary least squares min ||A c - b||^2 by thin QR."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise DimensionError(f"incompatible shapes A {A.shape}, b {b.shape}")
    if A.shape[1] > A.shape[0] or np.linalg.svd(A, compute_uv=False)[-1] < RANK_TOL:
        raise RankDeficiencyError("A does not have full column rank")
    Q, R = np.linalg.qr(A)
    return solve_triangular(R, Q.T @ b)
