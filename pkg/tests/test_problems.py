import numpy as np
import numpy.testing as npt
import pytest

from subgrad_newton.exceptions import Unsupported
from subgrad_newton.geometry import graphical_derivative_kernel_trivial
from subgrad_newton.problems import (KK_JACOBIANS, abs_square_2d, convex_quadratic, dpsi,
                                     fixture_interval_constant, fixture_isolated_union,
                                     get_problem, kk_cone, klatte_kummer,
                                     mech_start_intervals, mechanical_equilibrium, oscillatory,
                                     problem_names, psi)


def central_difference(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (f(x + e) - f(x - e)) / (2 * h)
    return out


@pytest.mark.parametrize("make", [klatte_kummer, abs_square_2d])
class TestC11Invariants:
    def test_gradient_matches_finite_differences(self, make, rng):
        p = make()
        for x in rng.uniform(-2, 2, size=(100, 2)):
            npt.assert_allclose(p.gradient(x), central_difference(p.value, x), atol=1e-5)

    def test_graph_contains_gradient_pairs(self, make, rng):
        p = make()
        for x in rng.uniform(-2, 2, size=(100, 2)):
            assert p.graph.contains(np.r_[x, p.gradient(x)])


class TestKlatteKummer:
    def test_table_values(self):
        kk = klatte_kummer()
        t = 0.3
        npt.assert_allclose(kk.gradient([0, t]), [t, 0])
        npt.assert_allclose(kk.gradient([-2 * t, -t]), [t, 0])
        npt.assert_allclose(kk.gradient([0, 0]), [0, 0])

    def test_objective_formulas(self):
        # function values per cone, straight from the piecewise formulas
        kk = klatte_kummer()
        formulas = [lambda x, y: y * (y - x), lambda x, y: x * (y - x),
                    lambda x, y: x * (y + x), lambda x, y: -y * (y + x)]
        for k in range(8):
            theta = (k + 0.5) * np.pi / 4
            x, y = 0.7 * np.cos(theta), 0.7 * np.sin(theta)
            assert kk.value([x, y]) == pytest.approx(formulas[k % 4](x, y))

    def test_gradient_continuity_on_boundaries(self, rng):
        for k in range(8):
            ray = np.array([np.cos(k * np.pi / 4), np.sin(k * np.pi / 4)])
            J_left, J_right = KK_JACOBIANS[(k - 1) % 4], KK_JACOBIANS[k % 4]
            for r in rng.uniform(0, 5, 25):
                z = r * ray
                npt.assert_allclose(J_left @ z, J_right @ z, atol=1e-12)

    def test_cones_tile_the_plane(self, rng):
        for z in rng.normal(size=(200, 2)):
            assert sum(kk_cone(k).contains(z) for k in range(1, 9)) >= 1

    def test_not_injective_yet_graphical_kernel_trivial(self):
        kk = klatte_kummer()
        t = 0.3
        assert not np.allclose([0, t], [-2 * t, -t])
        npt.assert_allclose(kk.gradient([0, t]), kk.gradient([-2 * t, -t]))
        assert graphical_derivative_kernel_trivial(kk.graph, [0, 0], [0, 0])


class TestAbsSquare:
    def test_values(self):
        a = abs_square_2d()
        npt.assert_allclose(a.gradient([1, 0]), [1, 0])
        npt.assert_allclose(a.gradient([-2, 3]), [2, 3])
        assert a.value([1, -1]) == 0.0

    @pytest.mark.parametrize("z,rule", [
        # at (0, r): D*(u1, u2) contains (w1, u2) with w1 from the |.| kink
        ((0.0, 0.7), lambda u, w: np.isclose(w[1], u[1]) and (
            (u[0] >= 0 and (np.isclose(w[0], u[0]) or np.isclose(w[0], -u[0]) or abs(w[0]) <= u[0]))
            or (u[0] < 0 and (np.isclose(w[0], u[0]) or np.isclose(w[0], -u[0]))))),
        ((1.0, 0.0), lambda u, w: np.isclose(w[0], u[0]) and (
            (u[1] >= 0 and (np.isclose(w[1], u[1]) or np.isclose(w[1], -u[1]) or abs(w[1]) <= u[1]))
            or (u[1] < 0 and (np.isclose(w[1], u[1]) or np.isclose(w[1], -u[1]))))),
    ])
    def test_second_order_subdifferential(self, z, rule, rng):
        # w in d2phi(z)(u)  <=>  (w, -u) in N_gph(z, grad(z))
        from subgrad_newton.geometry import limiting_normal_cone
        a = abs_square_2d()
        z = np.array(z)
        N = limiting_normal_cone(a.graph, np.r_[z, a.gradient(z)])
        for _ in range(100):
            u = rng.normal(size=2)
            # candidates: the sign-limits of the kink coordinate and a sample in between
            k = 0 if z[0] == 0 else 1
            cands = []
            for wk in (u[k], -u[k], rng.uniform(-abs(u[k]), abs(u[k])), 2 * abs(u[k]) + 1):
                w = u.copy()
                w[k] = wk
                cands.append(w)
            for w in cands:
                assert N.contains(np.r_[w, -u], 1e-9) == bool(rule(u, w))


class TestOscillatory:
    def test_values(self):
        assert psi(1 / np.pi) == pytest.approx(2 / np.pi, abs=1e-15)
        assert psi(0.0) == 0.0
        assert dpsi(1 / (2 * np.pi)) == pytest.approx(1.0, abs=1e-12)

    def test_derivative_matches_finite_differences(self, rng):
        for x in rng.uniform(0.05, 1, 50) * rng.choice([-1, 1], 50):
            assert dpsi(x) == pytest.approx((psi(x + 1e-7) - psi(x - 1e-7)) / 2e-7, abs=1e-5)

    def test_no_objective(self):
        with pytest.raises(Unsupported):
            oscillatory().value([0.1])

    def test_directions(self):
        o = oscillatory()
        G = o.direction_oracle([0.0])
        assert G.contains([0.0]) and not G.contains([0.1])
        x = 0.01
        assert o.direction_oracle([x]).contains([-psi(x) / dpsi(x)])


class TestMechanicalEquilibrium:
    def subdiff(self, x):
        p = mechanical_equilibrium()
        return [v for v in np.linspace(-6, 6, 1201) if p.graph.contains([x, v])]

    def test_subdifferential_branches(self):
        p = mechanical_equilibrium()
        assert p.graph.contains([0, -1]) and p.graph.contains([0, 1])
        assert not p.graph.contains([0, 1.01])
        assert p.graph.contains([0.5, 1.5]) and not p.graph.contains([0.5, 1.4])
        assert p.graph.contains([-0.5, -0.5])
        assert p.graph.contains([1, 2]) and p.graph.contains([1, 50])
        assert p.graph.contains([-1, 0]) and p.graph.contains([-1, -50])
        assert not p.graph.contains([1.5, 2.5])

    def test_prox_matches_brute_force(self, rng):
        p = mechanical_equilibrium()
        ys = np.linspace(-1, 1, 200001)
        theta = np.abs(ys) + 0.5 * ys * np.abs(ys)
        for lam in (0.25, 0.5, 0.9):
            for x in rng.uniform(-3, 4, 30):
                obj = theta + (ys - x) ** 2 / (2 * lam)
                y = p.prox([x], lam)[0]
                assert theta[np.argmin(obj)] + (ys[np.argmin(obj)] - x) ** 2 / (2 * lam) \
                    == pytest.approx(p.fun([y]) + (y - x) ** 2 / (2 * lam), abs=1e-8)

    def test_prox_example(self):
        p = mechanical_equilibrium()
        npt.assert_allclose(p.prox([1 / 3], 0.5), [0.0])
        npt.assert_allclose(p.prox([0.0], 0.5), [0.0])

    def test_prox_first_order_condition(self, rng):
        p = mechanical_equilibrium()
        for lam in (0.2, 0.5, 0.8):
            for x in rng.uniform(-4, 5, 60):
                y = p.prox([x], lam)[0]
                assert p.graph.contains([y, (x - y) / lam], 1e-9)

    def test_prox_regularity_inequality(self):
        p = mechanical_equilibrium()
        grid = np.linspace(-1, 1, 41)
        for u in grid:
            for v in np.linspace(-5, 5, 81):
                if not p.graph.contains([u, v]):
                    continue
                for x in grid:
                    lhs = p.fun([x])
                    rhs = p.fun([u]) + v * (x - u) - 0.5 * (x - u) ** 2
                    assert lhs >= rhs - 1e-12

    def test_start_region_is_exact_branch_image(self, rng):
        lam = 0.5
        p = mechanical_equilibrium()
        intervals = mech_start_intervals(lam)
        # images of y + lam * dphi(y) on sampled graph points land in the union
        for y in rng.uniform(-1, 1, 200):
            for v in np.linspace(-3, 3, 61):
                if p.graph.contains([y, v]):
                    x = y + lam * v
                    assert any(lo <= x <= hi for lo, hi in intervals)
        assert p.in_start_region([1 / 3], lam)
        # the union covers the real line for every lam in (0, 1)
        for lam in (0.1, 0.5, 0.99):
            for x in np.linspace(-10, 10, 2001):
                assert p.in_start_region([x], lam)


class TestConvexQuadratic:
    def test_prox_nonexpansive(self, rng):
        p = convex_quadratic(3)
        for _ in range(50):
            x, y = rng.normal(size=(2, 3))
            lam = rng.uniform(0.1, 5)
            px, py = p.prox(x, lam), p.prox(y, lam)
            assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-12
            assert p.graph.contains(np.r_[px, (x - px) / lam], 1e-9)


class TestFixtures:
    def test_interval_constant(self):
        S = fixture_interval_constant()
        assert S.contains([5, 0.5]) and S.contains([-3, 1]) and not S.contains([0, 1.1])

    def test_isolated_union(self):
        S = fixture_isolated_union()
        assert S.contains([0, 0]) and S.contains([2, 1]) and not S.contains([0, 0.5])

    def test_registry(self):
        for name in ("klatte-kummer", "abs-square", "oscillatory", "mech-eq",
                     "fixture-3-2", "fixture-3-3"):
            assert name in problem_names()
            get_problem(name)
        with pytest.raises(KeyError):
            get_problem("nope")
