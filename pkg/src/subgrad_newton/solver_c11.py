"""Coderivative-based Newton method for gradient equations ``grad phi(x) = 0``.

At each iterate the direction ``d`` is taken from the set of ``d`` with
``(-grad phi(x), -d)`` in the limiting normal cone of ``gph grad phi`` at
``(x, grad phi(x))``; for piecewise-affine gradients this set is computed
exactly by the geometry kernel.  A semismooth Newton baseline built on
limiting Hessians and a residual diagnostic for semismoothness* are provided
for comparison.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, asdict
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .exceptions import (Infeasible, LineSearchStalled, NonFiniteIterate,
                         NotDescentDirection, Unsupported)
from .geometry import (SELECTION_RULES, direction_set, limiting_normal_cone,
                       select_direction)
from .problems import C11Problem
from .trace import IterateRecord, SolveTrace, Status

CYCLE_DISTANCE = 1e-12
SINGULAR_DET = 1e-12
MAX_SHRINKS = 60


@dataclass(frozen=True)
class SolverConfig:
    """Stopping, selection and globalization settings for the C^{1,1} solvers."""

    tol: float = 1e-10
    max_iter: int = 100
    selection: str = "min-norm"
    script: Optional[tuple] = None
    line_search: bool = False
    c: float = 0.5
    shrink: float = 0.5
    cycle_window: int = 8

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.c < 1:
            raise ValueError("line-search constant c must lie in (0, 1)")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink factor must lie in (0, 1)")
        if self.max_iter < 0:
            raise ValueError("max_iter must be non-negative")
        if self.selection not in SELECTION_RULES:
            raise ValueError(f"unknown selection rule {self.selection!r}")
        if self.selection == "scripted" and not self.script:
            raise ValueError("scripted selection needs a direction script")
        if self.script is not None:
            object.__setattr__(self, "script",
                               tuple(np.asarray(s, dtype=float).reshape(-1) for s in self.script))

    def as_dict(self):
        return {"lambda": None, "tol": self.tol, "max_iter": self.max_iter,
                "selection": self.selection}


def _check_finite(x):
    if not np.all(np.isfinite(x)):
        raise NonFiniteIterate(f"iterate became non-finite: {np.asarray(x).tolist()}")


def _is_cycle(records, x, window):
    for r in records[-window - 1:-1]:
        if np.linalg.norm(r.x - x) <= CYCLE_DISTANCE:
            return True
    return False


def newton_directions(problem: C11Problem, x, g):
    """Direction set of the generalized Newton step at ``x``."""
    if problem.graph is not None:
        return direction_set(problem.graph, x, g)
    if problem.direction_oracle is not None:
        return problem.direction_oracle(x)
    raise Unsupported(f"problem {problem.name!r} has neither a graph nor a direction oracle")


def newton_c11(problem: C11Problem, x0, config: SolverConfig = SolverConfig()) -> SolveTrace:
    """Run the generalized Newton method from ``x0``.

    Returns
    -------
    SolveTrace
        With status ``Converged`` once ``||grad phi(x)|| <= tol``, ``Cycle``
        when an iterate revisits one of the last ``cycle_window`` iterates,
        ``DirectionInfeasible`` when no direction exists, and
        ``MaxIterations`` otherwise.
    """
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    _check_finite(x)
    trace = SolveTrace(problem.name, "c11", config.as_dict(), solution=problem.solution)
    for k in itertools.count():
        g = problem.gradient(x)
        _check_finite(g)
        rec = IterateRecord(k, x.copy(), g)
        trace.records.append(rec)
        if rec.residual_norm <= config.tol:
            trace.status = Status.CONVERGED
            break
        if _is_cycle(trace.records, x, config.cycle_window):
            trace.status = Status.CYCLE
            break
        if k >= config.max_iter:
            trace.status = Status.MAX_ITERATIONS
            break
        try:
            gamma = newton_directions(problem, x, g)
            d = select_direction(gamma, config.selection, k, config.script)
        except Infeasible as exc:
            trace.status = Status.DIRECTION_INFEASIBLE
            trace.message = str(exc)
            break
        t = 1.0
        if config.line_search:
            t = backtracking_linesearch(problem, x, d, config.c, config.shrink)
        rec.direction, rec.step = d, t
        x = x + t * d
        _check_finite(x)
    return trace


def check_direction(problem: C11Problem, x, d, tol=1e-9) -> bool:
    """Recheck ``(-grad phi(x), -d)`` against the limiting normal cone."""
    g = problem.gradient(x)
    cone = limiting_normal_cone(problem.graph, np.concatenate([x, g]))
    w = np.concatenate([-g, -np.asarray(d, dtype=float)])
    return cone.contains(w, tol)


def backtracking_linesearch(problem: C11Problem, x, d, c=0.5, shrink=0.5) -> float:
    """Largest ``t`` in ``{1, shrink, shrink**2, ...}`` with the Armijo decrease.

    Raises
    ------
    NotDescentDirection
        If ``<grad phi(x), d> >= 0``.
    LineSearchStalled
        If no admissible ``t`` is found after 60 shrinks.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    slope = float(problem.gradient(x) @ d)
    if not slope < 0:
        raise NotDescentDirection(f"<grad, d> = {slope!r} is not negative")
    f0 = problem.value(x)
    t = 1.0
    for _ in range(MAX_SHRINKS + 1):
        if problem.value(x + t * d) <= f0 + c * t * slope:
            return t
        t *= shrink
    raise LineSearchStalled(f"no Armijo step after {MAX_SHRINKS} shrinks")


def limiting_hessians(problem: C11Problem, x, tol=1e-10):
    """Jacobians of the affine gradient pieces whose cell contains ``x``.

    Duplicates are removed and the matrices are sorted lexicographically by
    their row-major entries, which fixes the baseline's choice and the pair
    order searched by :func:`singular_convex_combination`.
    """
    if problem.pieces is None:
        raise Unsupported(f"problem {problem.name!r} is not piecewise affine")
    x = np.asarray(x, dtype=float).reshape(-1)
    mats = []
    for p in problem.pieces:
        if p.cell.contains(x, tol) and not any(np.array_equal(p.jacobian, m) for m in mats):
            mats.append(p.jacobian)
    mats.sort(key=lambda m: tuple(m.ravel()))
    return mats


def semismooth_newton(problem: C11Problem, x0, config: SolverConfig = SolverConfig()) -> SolveTrace:
    """Semismooth Newton baseline ``x+ = x - A^{-1} grad phi(x)``.

    ``A`` is the lexicographically first limiting Hessian at the iterate;
    the run stops with ``BaselineSingular`` when ``|det A| < 1e-12``.
    """
    if problem.pieces is None:
        raise Unsupported(f"problem {problem.name!r} is not piecewise affine")
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    _check_finite(x)
    trace = SolveTrace(problem.name, "ssn", config.as_dict(), solution=problem.solution)
    for k in itertools.count():
        g = problem.gradient(x)
        _check_finite(g)
        rec = IterateRecord(k, x.copy(), g)
        trace.records.append(rec)
        if rec.residual_norm <= config.tol:
            trace.status = Status.CONVERGED
            break
        if _is_cycle(trace.records, x, config.cycle_window):
            trace.status = Status.CYCLE
            break
        if k >= config.max_iter:
            trace.status = Status.MAX_ITERATIONS
            break
        A = limiting_hessians(problem, x)[0]
        if abs(np.linalg.det(A)) < SINGULAR_DET:
            trace.status = Status.BASELINE_SINGULAR
            trace.message = f"singular limiting Hessian {A.tolist()}"
            break
        d = -np.linalg.solve(A, g)
        rec.direction = d
        x = x + d
        _check_finite(x)
    return trace


class SingularWitness(NamedTuple):
    """Pair ``(i, j)`` and weight ``lam`` with ``det(lam M_i + (1-lam) M_j) ~ 0``."""

    pair: tuple
    weight: float
    det: float
    matrix: np.ndarray


def _det_poly(A, B):
    """Coefficients of ``lam -> det(lam A + (1 - lam) B)`` (degree n)."""
    n = A.shape[0]
    # Chebyshev nodes on [0, 1] keep the interpolation well conditioned
    nodes = 0.5 + 0.5 * np.cos(np.pi * (2 * np.arange(n + 1) + 1) / (2 * n + 2))
    vals = [np.linalg.det(t * A + (1 - t) * B) for t in nodes]
    return np.polynomial.Polynomial.fit(nodes, vals, n, domain=[0, 1], window=[0, 1])


def singular_convex_combination(matrices: Sequence, tol=1e-10) -> Optional[SingularWitness]:
    """Search pairs of matrices for a singular convex combination.

    Pairs are visited in index order ``(0, 1), (0, 2), ..., (1, 2), ...`` and
    roots in ``[0, 1]`` in increasing order; the first combination with
    ``|det| <= tol`` is returned, or ``None`` if there is none.
    """
    mats = [np.atleast_2d(np.asarray(m, dtype=float)) for m in matrices]
    if mats and any(m.shape != mats[0].shape or m.shape[0] != m.shape[1] for m in mats):
        raise ValueError("matrices must be square and of equal size")
    for i, j in itertools.combinations(range(len(mats)), 2):
        A, B = mats[i], mats[j]
        poly = _det_poly(A, B)
        coef = poly.coef
        if np.all(np.abs(coef) <= tol):
            cands = [0.0]
        else:
            cands = []
            for r in poly.roots():
                if abs(r.imag) <= 1e-6 and -1e-9 <= r.real <= 1 + 1e-9:
                    cands.append(_polish(A, B, min(max(r.real, 0.0), 1.0)))
        for lam in sorted(cands):
            M = lam * A + (1 - lam) * B
            det = float(np.linalg.det(M))
            if abs(det) <= tol:
                return SingularWitness((i, j), float(lam), det, M)
    return None


def _polish(A, B, lam, steps=3):
    """A few secant-free Newton steps on the determinant (Jacobi's formula)."""
    D = A - B
    for _ in range(steps):
        M = lam * A + (1 - lam) * B
        det = np.linalg.det(M)
        if det == 0.0:
            break
        try:
            slope = det * np.trace(np.linalg.solve(M, D))
        except np.linalg.LinAlgError:
            break
        if slope == 0.0:
            break
        new = lam - det / slope
        if not 0.0 <= new <= 1.0:
            break
        lam = new
    return lam


def semismoothstar_residual(problem: C11Problem, x, xbar) -> float:
    """Largest ``||grad(x) - grad(xbar) - J (x - xbar)|| / ||x - xbar||``.

    ``J`` ranges over the limiting Hessians at ``x`` (or the problem's
    Jacobian oracle), a subset of the generalized Hessian, so the value is a
    lower bound for the supremum in the semismooth* characterization.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    h = x - xbar
    nh = np.linalg.norm(h)
    if nh == 0:
        raise ValueError("x and xbar must differ")
    if problem.pieces is not None:
        mats = limiting_hessians(problem, x)
    elif problem.jacobian_oracle is not None:
        mats = problem.jacobian_oracle(x)
    else:
        raise Unsupported(f"problem {problem.name!r} provides no Jacobian data")
    diff = problem.gradient(x) - problem.gradient(xbar)
    return max(float(np.linalg.norm(diff - J @ h)) / nh for J in mats)
