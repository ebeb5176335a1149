import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from subgrad_newton.exceptions import (NonFiniteIterate, NotDescentDirection, ScriptViolation,
                                       Unsupported)
from subgrad_newton.harness import RateClass, estimate_rate
from subgrad_newton.problems import (abs_square_2d, klatte_kummer, oscillatory,
                                     quadratic_problem, zero_map)
from subgrad_newton.solver_c11 import (SolverConfig, backtracking_linesearch, check_direction,
                                       limiting_hessians, newton_c11, semismooth_newton,
                                       semismoothstar_residual, singular_convex_combination)
from subgrad_newton.trace import Status


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(tol=0), dict(c=1.0), dict(shrink=0.0),
                                    dict(max_iter=-1), dict(selection="best"),
                                    dict(selection="scripted")])
    def test_rejects_bad_settings(self, kw):
        with pytest.raises(ValueError):
            SolverConfig(**kw)


class TestNewtonC11:
    def test_scripted_cycle_and_min_norm(self):
        r = 0.7
        p = abs_square_2d()
        cfg = SolverConfig(selection="scripted", script=[(1, -r), (-1, r)])
        tr = newton_c11(p, [0, r], cfg)
        assert tr.status is Status.CYCLE
        assert np.linalg.norm(tr.iterates[2] - tr.iterates[0]) <= 1e-12
        tr = newton_c11(p, [0, r])
        assert tr.status is Status.CONVERGED and tr.n_iter <= 2
        npt.assert_allclose(tr.x, [0, 0], atol=1e-12)

    def test_script_violation(self):
        with pytest.raises(ScriptViolation):
            newton_c11(abs_square_2d(), [0, 0.7],
                       SolverConfig(selection="scripted", script=[(1, 1)]))

    def test_every_step_rechecks(self, rng):
        p = klatte_kummer()
        for x0 in rng.uniform(-0.1, 0.1, size=(10, 2)):
            tr = newton_c11(p, x0)
            for rec in tr.records[:-1]:
                assert check_direction(p, rec.x, rec.direction)

    def test_klatte_kummer_finite_termination(self, rng):
        p = klatte_kummer()
        for x0 in rng.uniform(-1, 1, size=(20, 2)):
            tr = newton_c11(p, x0)
            assert tr.converged and tr.n_iter <= 2
            assert estimate_rate(tr, [0, 0]).classification is RateClass.FINITE

    @pytest.mark.parametrize("k", range(8))
    def test_klatte_kummer_boundary_starts(self, k):
        x0 = 0.05 * np.array([np.cos(k * np.pi / 4), np.sin(k * np.pi / 4)])
        tr = newton_c11(klatte_kummer(), x0)
        assert tr.converged

    def test_classical_reduction(self, rng):
        for n in (1, 2, 3, 4):
            B = rng.normal(size=(n, n))
            Q = B @ B.T + n * np.eye(n)
            q = rng.normal(size=n)
            p = quadratic_problem(Q, q)
            tr = newton_c11(p, rng.normal(size=n))
            assert tr.n_iter == 1 and tr.converged
            npt.assert_allclose(tr.x, np.linalg.solve(Q, q), atol=1e-10)

    def test_max_iterations_status(self):
        tr = newton_c11(klatte_kummer(), [0.3, 0.2], SolverConfig(max_iter=0))
        assert tr.status is Status.MAX_ITERATIONS and tr.n_iter == 0

    def test_non_finite_start(self):
        with pytest.raises(NonFiniteIterate):
            newton_c11(klatte_kummer(), [np.nan, 0])

    def test_oscillatory_two_cycle_at_critical_points(self):
        # at x = 1/(2 pi j) the Newton step maps x to -x and back
        x0 = 1 / (2 * np.pi * 10)
        tr = newton_c11(oscillatory(), [x0], SolverConfig(tol=1e-8))
        assert tr.status is Status.CYCLE
        npt.assert_allclose(tr.iterates[1], [-x0], rtol=1e-9)

    def test_deterministic(self):
        a = newton_c11(klatte_kummer(), [0.03, -0.07])
        b = newton_c11(klatte_kummer(), [0.03, -0.07])
        assert a == b


class TestLineSearch:
    def test_full_step_on_quadratic(self):
        p = quadratic_problem(np.eye(2), np.ones(2))
        assert backtracking_linesearch(p, [0, 0], [1, 1]) == 1.0

    def test_shrinks_with_strict_constant(self):
        # phi = x^2 / 2 from 1 along -2: phi(1 - 2t) <= 1/2 - 1.98 t holds iff t <= 1/100
        p = quadratic_problem([[1.0]])
        assert backtracking_linesearch(p, [1.0], [-2.0], c=0.99) == 1 / 128

    @pytest.mark.parametrize("c,expected", [(0.5, 1.0), (0.99, 1 / 64)])
    def test_unit_quadratic_examples(self, c, expected):
        # (1 - t)^2 / 2 <= 1/2 - c t  iff  t <= 2 (1 - c)
        p = quadratic_problem(np.eye(2))
        assert backtracking_linesearch(p, [1, 0], [-1, 0], c=c) == expected

    def test_rejects_ascent(self):
        p = quadratic_problem(np.eye(2))
        with pytest.raises(NotDescentDirection):
            backtracking_linesearch(p, [1, 0], [1, 0])

    def test_solver_with_line_search_on_convex_problem(self, rng):
        Q = np.array([[3.0, 1.0], [1.0, 2.0]])
        tr = newton_c11(quadratic_problem(Q, [1, -1]), rng.normal(size=2),
                        SolverConfig(line_search=True))
        assert tr.converged and tr.records[0].step == 1.0

    def test_solver_line_search_on_saddle_raises(self):
        # the Newton direction of a saddle-type objective need not be a descent direction
        with pytest.raises(NotDescentDirection):
            newton_c11(klatte_kummer(), [0.04, 0.01], SolverConfig(line_search=True))

    @given(x=st.floats(-10, 10), d=st.floats(-10, 10), c=st.floats(0.01, 0.99),
           shrink=st.floats(0.1, 0.9))
    @settings(max_examples=200, deadline=None)
    def test_armijo_invariant(self, x, d, c, shrink):
        assume(abs(x) > 1e-3 and abs(d) > 1e-3 and x * d < 0)
        p = quadratic_problem([[1.0]])
        t = backtracking_linesearch(p, [x], [d], c, shrink)
        assert p.value([x + t * d]) <= p.value([x]) + c * t * (x * d)


class TestSemismoothBaseline:
    def test_limiting_hessians_at_origin(self):
        mats = limiting_hessians(klatte_kummer(), [0, 0])
        assert len(mats) == 4
        npt.assert_array_equal(mats[0], [[-2, 1], [1, 0]])
        npt.assert_array_equal(mats[1], [[0, -1], [-1, -2]])

    def test_abs_square_converges(self):
        tr = semismooth_newton(abs_square_2d(), [1, 1])
        assert tr.status is Status.CONVERGED

    def test_zero_map_solution_immediately(self):
        tr = semismooth_newton(zero_map(2), [1, 1])
        assert tr.status is Status.CONVERGED and tr.n_iter == 0

    def test_singular_hessian_stops(self):
        p = quadratic_problem(np.zeros((1, 1)), [1.0])
        tr = semismooth_newton(p, [0.0])
        assert tr.status is Status.BASELINE_SINGULAR

    def test_requires_pieces(self):
        with pytest.raises(Unsupported):
            semismooth_newton(oscillatory(), [0.1])


class TestSingularCombination:
    def test_no_singular_combination(self):
        assert singular_convex_combination([np.eye(2), 2 * np.eye(2)]) is None

    def test_midpoint(self):
        w = singular_convex_combination([np.eye(2), -np.eye(2)])
        assert w.pair == (0, 1) and w.weight == pytest.approx(0.5)
        assert abs(w.det) <= 1e-10

    def test_klatte_kummer_witness(self):
        w = singular_convex_combination(limiting_hessians(klatte_kummer(), [0, 0]))
        assert w.pair == (0, 1)
        assert w.weight == pytest.approx((2 - np.sqrt(2)) / 4, abs=1e-9)
        assert abs(w.det) <= 1e-10

    def test_shape_check(self):
        with pytest.raises(ValueError):
            singular_convex_combination([np.eye(2), np.eye(3)])


class TestSemismoothStarResidual:
    @pytest.mark.parametrize("j", [10, 100, 1000])
    def test_oscillatory(self, j):
        x = 1 / (2 * np.pi * j)
        expected = abs(np.cos(1 / x) - x * np.sin(1 / x))
        assert semismoothstar_residual(oscillatory(), [x], [0.0]) == pytest.approx(expected)

    def test_piecewise_affine_is_zero(self, rng):
        p = klatte_kummer()
        for x in rng.uniform(-0.1, 0.1, size=(20, 2)):
            assert semismoothstar_residual(p, x, [0, 0]) <= 1e-12

    def test_requires_distinct_points(self):
        with pytest.raises(ValueError):
            semismoothstar_residual(klatte_kummer(), [0, 0], [0, 0])
