"""Grassmann manifold Gr(k, n) through orthonormal Stiefel representatives.

A subspace is stored as an n x k matrix Y with orthonormal columns; any
Y Q with Q orthogonal represents the same point. Tangent vectors live in the
horizontal space {H : Y^T H = 0}. All objects are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RankDeficiencyError

ORTHONORMAL_TOL = 1e-10
HORIZONTAL_TOL = 1e-10
RANK_TOL = 1e-12
# Two points are the same subspace iff their chordal distance is below this.
SUBSPACE_EQ_TOL = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StiefelRepresentative:
    """An n x k matrix with orthonormal columns."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[1] == 0 or m.shape[1] > m.shape[0]:
            raise DimensionError(f"expected an n x k matrix with 1 <= k <= n, got shape {m.shape}")
        err = np.linalg.norm(m.T @ m - np.eye(m.shape[1]))
        if not err <= ORTHONORMAL_TOL:
            raise ValueError(f"columns are not orthonormal (||Y^T Y - I||_F = {err:.3e})")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True, eq=False)
class GrassmannPoint:
    """A k-dimensional subspace of R^n.

    Equality is representative-independent: two points compare equal when
    their chordal distance is at most ``SUBSPACE_EQ_TOL``.
    """

    rep: StiefelRepresentative

    @classmethod
    def from_matrix(cls, Y) -> GrassmannPoint:
        """Wrap an orthonormal matrix without re-orthonormalizing it."""
        return cls(StiefelRepresentative(Y))

    @classmethod
    def span(cls, M) -> GrassmannPoint:
        """Column span of an arbitrary full-rank matrix (or a single vector)."""
        M = np.asarray(M, dtype=float)
        if M.ndim == 1:
            M = M[:, None]
        return cls(orthonormalize(M))

    @property
    def Y(self) -> np.ndarray:
        return self.rep.matrix

    @property
    def n(self) -> int:
        return self.rep.n

    @property
    def k(self) -> int:
        return self.rep.k

    def __eq__(self, other):
        if not isinstance(other, GrassmannPoint):
            return NotImplemented
        if (self.n, self.k) != (other.n, other.k):
            return False
        return chordal_distance(self, other) <= SUBSPACE_EQ_TOL

    __hash__ = None


@dataclass(frozen=True, eq=False)
class HorizontalTangent:
    """A tangent vector at ``base``, stored as an n x k matrix H with Y^T H = 0."""

    base: StiefelRepresentative
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != self.base.matrix.shape:
            raise DimensionError(f"tangent shape {m.shape} does not match base {self.base.matrix.shape}")
        if not np.all(np.isfinite(m)):
            # passed through unchecked so iterative callers can report divergence
            object.__setattr__(self, "matrix", m)
            return
        err = np.linalg.norm(self.base.matrix.T @ m)
        # relative to ||H|| so that large tangents are not rejected for roundoff
        if not err <= HORIZONTAL_TOL * max(1.0, np.linalg.norm(m)):
            raise ValueError(f"tangent is not horizontal (||Y^T H||_F = {err:.3e})")
        object.__setattr__(self, "matrix", m)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def scaled(self, c: float) -> HorizontalTangent:
        return HorizontalTangent(self.base, c * self.matrix)


@dataclass(frozen=True)
class PrincipalAngles:
    """Principal angles in radians, nondecreasing, each in [0, pi/2]."""

    angles: tuple

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if np.any(a < 0) or np.any(a > np.pi / 2) or np.any(np.diff(a) < 0):
            raise ValueError(f"invalid principal angles {a}")
        object.__setattr__(self, "angles", tuple(float(t) for t in a))

    def __len__(self):
        return len(self.angles)

    def __iter__(self):
        return iter(self.angles)


def _as_rep(y) -> StiefelRepresentative:
    if isinstance(y, StiefelRepresentative):
        return y
    if isinstance(y, GrassmannPoint):
        return y.rep
    return StiefelRepresentative(y)


def orthonormalize(M) -> StiefelRepresentative:
    """Orthonormal basis of the column span of ``M``.

    Thin QR with the diagonal of R made nonnegative, so the result is a
    deterministic function of ``M``. Raises RankDeficiencyError when the
    smallest singular value of ``M`` is below 1e-12.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[1] == 0 or M.shape[1] > M.shape[0]:
        raise DimensionError(f"expected an n x k matrix with 1 <= k <= n, got shape {M.shape}")
    smin = np.linalg.svd(M, compute_uv=False)[-1]
    if not smin >= RANK_TOL:
        raise RankDeficiencyError(f"matrix is rank deficient (smallest singular value {smin:.3e})")
    Q, R = np.linalg.qr(M)
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    return StiefelRepresentative(Q * signs)


def tangent_project(Y, G) -> HorizontalTangent:
    """Orthogonal projection (I - Y Y^T) G onto the horizontal space at Y."""
    rep = _as_rep(Y)
    G = np.asarray(G, dtype=float)
    if G.shape != rep.matrix.shape:
        raise DimensionError(f"G has shape {G.shape}, expected {rep.matrix.shape}")
    Ym = rep.matrix
    H = G - Ym @ (Ym.T @ G)
    # second pass removes the vertical residue left by cancellation when G is nearly vertical
    H -= Ym @ (Ym.T @ H)
    return HorizontalTangent(rep, H)


def exp_map(Y, H: HorizontalTangent) -> GrassmannPoint:
    """Endpoint of the unit-time geodesic from span(Y) with initial velocity H.

    With the thin SVD H = U S V^T the geodesic endpoint is represented by
    Y V cos(S) V^T + U sin(S) V^T, which is re-orthonormalized to stop drift.
    """
    rep = _as_rep(Y)
    if H.matrix.shape != rep.matrix.shape:
        raise DimensionError(f"tangent shape {H.matrix.shape} does not match base {rep.matrix.shape}")
    if H.base is not rep and not np.array_equal(H.base.matrix, rep.matrix):
        raise ValueError("tangent is not based at Y")
    U, s, Vt = np.linalg.svd(H.matrix, full_matrices=False)
    Ym = rep.matrix
    moved = (Ym @ Vt.T * np.cos(s) + U * np.sin(s)) @ Vt
    return GrassmannPoint(orthonormalize(moved))


def _check_pair(y1: GrassmannPoint, y2: GrassmannPoint):
    if (y1.n, y1.k) != (y2.n, y2.k):
        raise DimensionError(f"Gr({y1.k},{y1.n}) and Gr({y2.k},{y2.n}) points are not comparable")


def principal_angles(y1: GrassmannPoint, y2: GrassmannPoint) -> PrincipalAngles:
    """Principal angles between two subspaces, nondecreasing.

    Angles up to pi/4 come from arcsin of the singular values of
    (I - Y1 Y1^T) Y2, the rest from arccos of the singular values of Y1^T Y2
    (clamped to [0, 1]); arccos alone is only accurate to ~1e-8 near zero.
    """
    _check_pair(y1, y2)
    cos = np.clip(np.linalg.svd(y1.Y.T @ y2.Y, compute_uv=False), 0.0, 1.0)
    resid = y2.Y - y1.Y @ (y1.Y.T @ y2.Y)
    sin = np.clip(np.sort(np.linalg.svd(resid, compute_uv=False)), 0.0, 1.0)
    angles = np.where(sin**2 < 0.5, np.arcsin(sin), np.arccos(cos))
    return PrincipalAngles(np.maximum.accumulate(angles))


def chordal_distance(y1: GrassmannPoint, y2: GrassmannPoint) -> float:
    """Chordal distance (1/sqrt 2) ||Y1 Y1^T - Y2 Y2^T||_F, in [0, sqrt k]."""
    _check_pair(y1, y2)
    return float(np.linalg.norm(y1.Y @ y1.Y.T - y2.Y @ y2.Y.T) / np.sqrt(2.0))


def chordal_distance_from_angles(angles: PrincipalAngles) -> float:
    """sqrt(sum sin^2 theta_i)."""
    return float(np.sqrt(np.sum(np.sin(np.asarray(angles.angles)) ** 2)))


def projection_matrix(y: GrassmannPoint) -> np.ndarray:
    """The n x n orthogonal projector Y Y^T onto the subspace."""
    return y.Y @ y.Y.T


def random_point(n: int, k: int, seed=None) -> GrassmannPoint:
    """Uniformly distributed point of Gr(k, n).

    ``seed`` is anything ``numpy.random.default_rng`` accepts.
    """
    if not 1 <= k <= n:
        raise DimensionError(f"need 1 <= k <= n, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    return GrassmannPoint(orthonormalize(rng.standard_normal((n, k))))


def random_tangent(Y, seed=None, scale: float = 1.0) -> HorizontalTangent:
    """Random horizontal tangent at Y with Frobenius norm ``scale``."""
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    rep = _as_rep(Y)
    rng = np.random.default_rng(seed)
    H = tangent_project(rep, rng.standard_normal(rep.matrix.shape)).matrix
    nrm = np.linalg.norm(H)
    if scale == 0 or nrm == 0:
        return HorizontalTangent(rep, np.zeros_like(H))
    return HorizontalTangent(rep, H * (scale / nrm))


def inner(Z1, Z2) -> float:
    """Trace inner product trace(Z1^T Z2)."""
    a = Z1.matrix if isinstance(Z1, HorizontalTangent) else np.asarray(Z1)
    b = Z2.matrix if isinstance(Z2, HorizontalTangent) else np.asarray(Z2)
    return float(np.sum(a * b))
