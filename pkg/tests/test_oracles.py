import numpy as np
import pytest

from grls.errors import UnsupportedInstanceError
from grls.geometry import GrassmannPoint, random_point
from grls.objective import ObjectivePoint, grad_x_cost, PenaltyParams, ProblemInstance, paper_instance
from grls.oracles import (
    GridSpec,
    ProbeConfig,
    check_gradients,
    fd_grad_x,
    inner_max_2d,
    instance_cases,
    line_angle,
    local_minimax_probe,
    minimax_2d,
    penalty_exactness_sweep,
    random_cases,
    violation_nonincreasing,
)
from grls.solver import SolverConfig

from .conftest import e_line

E1 = GrassmannPoint.from_matrix(np.array([[1.0], [0.0]]))
PAPER = PenaltyParams(70.0, 0.01)
COARSE = GridSpec(angle_count=801, x_box_halfwidth=1.5, x_resolution=0.05)


def _cost_value(p, inst, params):
    r = p.y.Y @ (p.y.Y.T @ p.x) - inst.b
    return r @ r


class TestFiniteDifferences:
    @pytest.mark.parametrize("h", [1e-1, 1e-3, 1e-6])
    def test_exact_on_quadratic(self, rng, h):
        inst = paper_instance()
        p = ObjectivePoint(rng.standard_normal(2), e_line(0.9))
        np.testing.assert_allclose(fd_grad_x(p, inst, PAPER, h, _cost_value), grad_x_cost(p, inst),
                                   rtol=1e-8, atol=1e-9)

    def test_stationary_point(self):
        y = e_line(0.4)
        inst = ProblemInstance(y.Y[:, 0], E1, 0.5)
        p = ObjectivePoint(inst.b, y)
        assert np.linalg.norm(fd_grad_x(p, inst, PenaltyParams(0.0, 0.1), 1e-5)) <= 1e-8

    def test_suite_passes(self):
        rep = check_gradients(random_cases(20, seed=3), directions=5)
        assert rep.passed and rep.checks == 20

    def test_suite_detects_corruption(self):
        from grls.objective import penalized_grads

        def bad(p, inst, params):
            gx, gy = penalized_grads(p, inst, params)
            return gx * 1.001, gy
        rep = check_gradients(instance_cases(paper_instance(), PAPER, 5), grads=bad)
        assert not rep.passed and rep.max_rel_err_x > 1e-5


class TestInnerMax:
    def test_at_b(self):
        inst = paper_instance()
        phi, v = inner_max_2d(inst.b, inst)
        assert phi == pytest.approx(-np.pi / 8, abs=1e-12)
        assert v == pytest.approx(np.sin(3 * np.pi / 16) ** 2, abs=1e-12)

    def test_zero_x(self):
        inst = paper_instance()
        phi, v = inner_max_2d(np.zeros(2), inst)
        assert v == pytest.approx(1.0) and abs(np.sin(phi)) <= inst.rho + 1e-12

    def test_nearly_full_ball(self):
        inst = ProblemInstance(paper_instance().b, E1, 1 - 1e-9)
        assert inner_max_2d(inst.b, inst)[1] == pytest.approx(1.0, abs=1e-6)

    def test_grid_refinement(self):
        inst = paper_instance()
        x = np.array([0.4, -0.9])
        vals = [inner_max_2d(x, inst, GridSpec(angle_count=c))[1] for c in (51, 101, 201, 401, 801)]
        changes = np.abs(np.diff(vals))
        assert np.all(changes[1:] <= changes[:-1] + 1e-15)

    def test_unsupported(self):
        inst = ProblemInstance(np.ones(3), random_point(3, 1, 0), 0.5)
        with pytest.raises(UnsupportedInstanceError):
            inner_max_2d(np.ones(3), inst)

    def test_rotated_center(self):
        # same geometry rotated by 0.7 rad
        c, s = np.cos(0.7), np.sin(0.7)
        R = np.array([[c, -s], [s, c]])
        base = paper_instance()
        inst = ProblemInstance(R @ base.b, GrassmannPoint.from_matrix(R @ E1.Y), base.rho)
        phi, v = inner_max_2d(inst.b, inst)
        assert v == pytest.approx(np.sin(3 * np.pi / 16) ** 2, abs=1e-12)
        assert phi == pytest.approx(0.7 - np.pi / 8, abs=1e-12)


class TestMinimax:
    def test_paper_instance(self):
        x, phi, v = minimax_2d(paper_instance(), COARSE)
        assert v == pytest.approx(np.sin(3 * np.pi / 16) ** 2, abs=1e-3)
        assert phi == pytest.approx(-np.pi / 8, abs=1e-9)
        assert v <= 1.0

    def test_vanishing_radius(self):
        inst = ProblemInstance(paper_instance().b, E1, 1e-6)
        _, _, v = minimax_2d(inst, COARSE)
        assert v == pytest.approx(np.sin(np.pi / 16) ** 2, abs=1e-4)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            GridSpec(angle_count=2)
        with pytest.raises(ValueError):
            GridSpec(x_box_halfwidth=0.1, x_resolution=0.2)


class TestProbe:
    def _toy(self):
        # b in span(y_hat); the minimax point is x* = b with y* on the ball boundary
        rho = 0.3
        inst = ProblemInstance(np.array([1.0, 0.0]), E1, rho)
        return inst, ObjectivePoint(inst.b, e_line(np.arcsin(rho)))

    def test_known_minimax_point(self):
        inst, p = self._toy()
        rep = local_minimax_probe(p, inst, ProbeConfig(delta=0.05, h_delta=0.05, sample_count=500))
        assert rep.violations == 0

    def test_center_is_not_minimax(self):
        inst, p = self._toy()
        rep = local_minimax_probe(ObjectivePoint(p.x, E1), inst)
        assert rep.y_violations > 0

    def test_random_point(self, rng):
        inst = paper_instance()
        rep = local_minimax_probe(ObjectivePoint(rng.standard_normal(2), e_line(0.1)), inst)
        assert rep.violations > 0

    def test_margins_shrink_with_delta(self, rng):
        inst = paper_instance()
        p = ObjectivePoint(np.array([0.3, 0.5]), e_line(0.1))
        m = [local_minimax_probe(p, inst, ProbeConfig(delta=d, h_delta=d)).worst_y_margin for d in (0.04, 0.02, 0.01)]
        assert m[0] > m[1] > m[2] > 0
        assert m[1] / m[0] == pytest.approx(0.5, rel=0.2)

    def test_penalized_objective_requires_params(self):
        inst, p = self._toy()
        with pytest.raises(ValueError):
            local_minimax_probe(p, inst, objective="penalized")


class TestSweep:
    def test_trend_on_paper_instance(self):
        inst = paper_instance()
        rows = penalty_exactness_sweep(inst, SolverConfig(seed=0), [0.0, 70.0])
        assert rows[0].violation > 0.1
        assert rows[1].violation <= 0.01
        assert violation_nonincreasing(rows)

    def test_very_large_penalty(self):
        rows = penalty_exactness_sweep(paper_instance(), SolverConfig(seed=0, max_iters=5000), [1e4])
        assert rows[0].diverged or rows[0].violation <= 0.01

    def test_divergence_is_recorded(self):
        rows = penalty_exactness_sweep(paper_instance(), SolverConfig(eta_x=1e300), [0.0, 1.0])
        assert all(r.diverged for r in rows)

    def test_empty(self):
        with pytest.raises(ValueError):
            penalty_exactness_sweep(paper_instance(), SolverConfig(), [])


def test_line_angle_range():
    for phi in np.linspace(-3, 3, 13):
        a = line_angle(e_line(phi))
        assert -np.pi / 2 < a <= np.pi / 2
        assert abs(np.sin(a - phi)) <= 1e-12


class TestSolverAgainstOracles:
    """Where the penalized TSRGDA solution sits relative to the brute-force one."""

    def test_penalized_probe_at_solver_output(self):
        from grls.solver import solve

        inst = paper_instance()
        res = solve(inst, PAPER, SolverConfig(seed=0))
        rep = local_minimax_probe(res.final, inst, ProbeConfig(), objective="penalized", params=PAPER)
        assert rep.violations == 0

    def test_solution_is_interior_to_ball(self):
        from grls.objective import squared_center_distance
        from grls.solver import solve

        inst = paper_instance()
        res = solve(inst, PAPER, SolverConfig(seed=0))
        d = np.sqrt(squared_center_distance(res.final.y, inst))
        # softplus smoothing keeps the ascent player strictly inside the ball
        assert 0.25 < d < inst.rho - 0.05

    def test_far_side_equilibrium_is_unstable(self):
        from grls.solver import solve

        inst = paper_instance()
        init = ObjectivePoint(inst.b, e_line(-0.34))
        res = solve(inst, PAPER, SolverConfig(max_iters=5000), init=init)
        assert res.converged
        assert line_angle(res.final.y) > 0
