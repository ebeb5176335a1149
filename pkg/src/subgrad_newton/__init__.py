"""Coderivative-based generalized Newton methods on exact polyhedral geometry.

Modules are organised bottom-up: :mod:`geometry` computes tangent and
normal cones of finite unions of polyhedra, :mod:`problems` holds the test
problems, :mod:`solver_c11` and :mod:`solver_prox` implement the Newton
methods, :mod:`lasso` specializes them to the Lasso, and :mod:`harness` /
:mod:`cli` measure convergence.
"""
from .exceptions import *  # noqa: F401,F403
from .geometry import (ConeUnion, DirectionSet, Polyhedron, PolyhedralUnion,
                       coderivative_kernel_trivial, direction_set,
                       graphical_derivative_kernel_trivial, limiting_normal_cone,
                       regular_normal_cone, select_direction, tangent_cone)
from .problems import (C11Problem, ProxRegularProblem, abs_square_2d, convex_quadratic,
                       fixture_interval_constant, fixture_isolated_union, klatte_kummer,
                       mechanical_equilibrium, oscillatory, quadratic_problem)
from .solver_c11 import (SolverConfig, backtracking_linesearch, limiting_hessians,
                         newton_c11, semismooth_newton, semismoothstar_residual,
                         singular_convex_combination)
from .solver_prox import (ProxConfig, check_start_region, moreau_envelope,
                          moreau_gradient, newton_prox, prox)
from .lasso import (LassoInstance, lasso_G, lasso_diagonalize, lasso_direction_general,
                    lasso_newton_step_diagonal, lasso_objective, lasso_prox,
                    lasso_prox_diagonal, lasso_second_order_contains, lasso_solve,
                    lasso_subdifferential, stationarity_certificate)
from .harness import RateClass, RateReport, compare_solvers, estimate_rate
from .trace import SolveTrace, Status, parse_trace, serialize_trace
from .estimator import NewtonLasso

__version__ = "0.1.0"
