import math

import numpy as np
import pytest

from echelon.baselines.powell import minimize_powell


class TestQuadratics:
    def test_one_dimensional(self):
        res = minimize_powell(lambda x: (x[0] - 3.0) ** 2, np.array([0.0]))
        assert res.converged
        assert abs(res.x[0] - 3.0) < 1e-4

    def test_two_dimensional_anisotropic(self):
        fn = lambda x: (x[0] - 1.0) ** 2 + 10.0 * (x[1] + 2.0) ** 2
        res = minimize_powell(fn, np.array([0.0, 0.0]))
        assert res.converged
        assert abs(res.x[0] - 1.0) < 1e-3
        assert abs(res.x[1] + 2.0) < 1e-3

    def test_already_at_minimum(self):
        res = minimize_powell(lambda x: float((x**2).sum()), np.array([0.0, 0.0]))
        assert res.fun == 0.0


class TestRosenbrock:
    def test_classic_start(self):
        fn = lambda x: (1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2
        res = minimize_powell(fn, np.array([-1.2, 1.0]), max_sweeps=500)
        assert res.fun < 1e-4


class TestRobustness:
    def test_never_worse_than_start(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = rng.normal(size=3)
            fn = lambda x: float(np.abs(x - a).sum() + math.sin(x[0]) * 0.3)
            x0 = rng.normal(size=3) * 5
            res = minimize_powell(fn, x0, max_sweeps=10)
            assert res.fun <= fn(x0) + 1e-12

    def test_non_finite_objective_raises(self):
        def fn(x):
            return float("nan") if x[0] > 0.5 else float(x[0] ** 2)

        with pytest.raises(ValueError, match="non-finite"):
            minimize_powell(fn, np.array([0.0]))

    def test_projection_constrains_result(self):
        # minimum of (x+5)^2 subject to x >= 0 sits on the boundary
        res = minimize_powell(
            lambda x: float(((x + 5.0) ** 2).sum()),
            np.array([2.0]),
            project=lambda x: np.maximum(x, 0.0),
        )
        assert res.x[0] == 0.0
        assert res.fun == 25.0

    def test_returned_point_is_always_projected(self):
        # flat-along-negative objective: unconstrained line search wanders
        # below zero while the projected value stays equal; the reported
        # minimizer must still be feasible
        fn = lambda x: float((np.maximum(x, 0.0) ** 2).sum()) + 1.0
        res = minimize_powell(
            fn, np.array([3.0, 4.0]), project=lambda x: np.maximum(x, 0.0)
        )
        assert (res.x >= 0.0).all()

    def test_reports_evaluation_count(self):
        calls = 0

        def fn(x):
            nonlocal calls
            calls += 1
            return float((x**2).sum())

        res = minimize_powell(fn, np.array([4.0, -2.0]))
        assert res.evaluations == calls
        assert res.evaluations > 0
