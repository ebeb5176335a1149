"""Coderivative-based Newton method for subgradient inclusions ``0 in dphi(x)``.

For a prox-regular ``phi`` the residual at ``x`` is the Moreau gradient
``v = (x - prox(x)) / lam``, which vanishes exactly at solutions.  The
direction ``d`` solves ``(-v, -lam v - d) in N_gph dphi(prox(x), v)``, i.e.
``d = w - lam v`` with ``w`` in the coderivative direction set of ``dphi``
at ``(prox(x), v)``.  This is the C^{1,1} Newton step applied to the Moreau
envelope, whose gradient graph is the image of ``gph dphi`` under
``(p, v) -> (p + lam v, v)``.

Convergence is local: the start region only guarantees that the proximal
mapping is well defined, not that ``x0`` is close enough to a solution.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import Infeasible, NonFiniteIterate, OutsideStartRegion
from .geometry import SELECTION_RULES, direction_set, limiting_normal_cone, select_direction
from .problems import C11Problem, ProxRegularProblem
from .trace import IterateRecord, SolveTrace, Status


@dataclass(frozen=True)
class ProxConfig:
    """Settings for :func:`newton_prox`.

    ``lam=None`` selects 1 for convex problems and ``1 / (2 r)`` otherwise.
    """

    lam: Optional[float] = None
    tol: float = 1e-10
    max_iter: int = 100
    selection: str = "min-norm"
    script: Optional[tuple] = None
    cycle_window: int = 8

    def __post_init__(self):
        if self.lam is not None and not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.selection not in SELECTION_RULES:
            raise ValueError(f"unknown selection rule {self.selection!r}")
        if self.selection == "scripted" and not self.script:
            raise ValueError("scripted selection needs a direction script")

    def resolve_lambda(self, problem: ProxRegularProblem) -> float:
        if self.lam is None:
            return default_lambda(problem)
        return validate_lambda(problem, self.lam)


def default_lambda(problem: ProxRegularProblem) -> float:
    if problem.convex or problem.r <= 0:
        return 1.0
    return 1.0 / (2.0 * problem.r)


def validate_lambda(problem: ProxRegularProblem, lam: float) -> float:
    lam = float(lam)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if not problem.convex and problem.r > 0 and not lam < 1.0 / problem.r:
        raise ValueError(f"lambda must lie in (0, {1.0 / problem.r:g}) for {problem.name!r}")
    return lam


def check_start_region(problem: ProxRegularProblem, x0, lam) -> bool:
    """Whether ``x0`` lies in ``rge(I + lam dphi)``; always true if convex."""
    return problem.in_start_region(x0, lam)


def prox(problem: ProxRegularProblem, x, lam) -> np.ndarray:
    """Proximal point ``argmin_y phi(y) + ||y - x||^2 / (2 lam)``."""
    lam = validate_lambda(problem, lam)
    x = np.asarray(x, dtype=float).reshape(-1)
    if not problem.in_start_region(x, lam):
        raise OutsideStartRegion(f"{x.tolist()} is outside rge(I + {lam:g} dphi)")
    return np.asarray(problem.prox(x, lam), dtype=float).reshape(-1)


def moreau_envelope(problem: ProxRegularProblem, x, lam) -> float:
    """Moreau envelope ``phi(p) + ||p - x||^2 / (2 lam)`` with ``p = prox(x)``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    p = prox(problem, x, lam)
    return problem.value(p) + float(np.dot(p - x, p - x)) / (2.0 * lam)


def moreau_gradient(problem: ProxRegularProblem, x, lam) -> np.ndarray:
    """Gradient ``(x - prox(x)) / lam`` of the Moreau envelope."""
    x = np.asarray(x, dtype=float).reshape(-1)
    return (x - prox(problem, x, lam)) / lam


def moreau_graph(problem: ProxRegularProblem, lam):
    """Image of ``gph dphi`` under ``(p, v) -> (p + lam v, v)``."""
    n = problem.dim
    M = np.eye(2 * n)
    M[:n, n:] = lam * np.eye(n)
    return problem.graph.linear_image(M)


def moreau_problem(problem: ProxRegularProblem, lam=None) -> C11Problem:
    """The envelope ``e_lam phi`` packaged as a C^{1,1} problem."""
    lam = default_lambda(problem) if lam is None else validate_lambda(problem, lam)
    fun = None
    if problem.fun is not None:
        def fun(x):
            return moreau_envelope(problem, x, lam)
    return C11Problem(f"moreau({problem.name})", problem.dim,
                      lambda x: moreau_gradient(problem, x, lam), fun,
                      graph=moreau_graph(problem, lam), solution=problem.solution)


def prox_directions(problem: ProxRegularProblem, x, v, lam):
    """Admissible ``d`` at ``x``: the direction set at ``(x - lam v, v)`` shifted by ``-lam v``."""
    p = x - lam * v
    return direction_set(problem.graph, p, v).translate(-lam * v)


def check_prox_direction(problem: ProxRegularProblem, x, v, d, lam, tol=1e-9) -> bool:
    """Recheck ``(-v, -lam v - d) in N_gph dphi(x - lam v, v)``."""
    x, v, d = (np.asarray(a, dtype=float).reshape(-1) for a in (x, v, d))
    cone = limiting_normal_cone(problem.graph, np.concatenate([x - lam * v, v]))
    return cone.contains(np.concatenate([-v, -lam * v - d]), tol)


def newton_prox(problem: ProxRegularProblem, x0, config: ProxConfig = ProxConfig()) -> SolveTrace:
    """Run the Newton method for ``0 in dphi(x)`` from ``x0``.

    The direction is the minimum-norm admissible ``d`` (not the minimum-norm
    ``w``), which makes the iterates coincide with those of the C^{1,1}
    method on the Moreau envelope.

    Raises
    ------
    OutsideStartRegion
        If ``x0`` is not in ``rge(I + lam dphi)``.
    NonFiniteIterate
        If an iterate overflows.
    """
    lam = config.resolve_lambda(problem)
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    if not np.all(np.isfinite(x)):
        raise NonFiniteIterate("starting point is not finite")
    if not check_start_region(problem, x, lam):
        raise OutsideStartRegion(f"{x.tolist()} is outside rge(I + {lam:g} dphi)")
    cfg = {"lambda": lam, "tol": config.tol, "max_iter": config.max_iter,
           "selection": config.selection}
    trace = SolveTrace(problem.name, "prox", cfg, solution=problem.solution)
    for k in itertools.count():
        v = (x - prox(problem, x, lam)) / lam
        rec = IterateRecord(k, x.copy(), v)
        trace.records.append(rec)
        if rec.residual_norm <= config.tol:
            trace.status = Status.CONVERGED
            break
        if any(np.linalg.norm(r.x - x) <= 1e-12 for r in trace.records[-config.cycle_window - 1:-1]):
            trace.status = Status.CYCLE
            break
        if k >= config.max_iter:
            trace.status = Status.MAX_ITERATIONS
            break
        try:
            gamma = prox_directions(problem, x, v, lam)
            d = select_direction(gamma, config.selection, k, config.script)
        except Infeasible as exc:
            trace.status = Status.DIRECTION_INFEASIBLE
            trace.message = str(exc)
            break
        rec.direction = d
        x = x + d
        if not np.all(np.isfinite(x)):
            raise NonFiniteIterate(f"iterate became non-finite: {x.tolist()}")
    return trace
