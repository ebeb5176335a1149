"""Convergence-rate estimation and solver comparison."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import SubgradNewtonError, Unsupported
from .problems import C11Problem, ProxRegularProblem
from .solver_c11 import (SolverConfig, limiting_hessians, newton_c11, semismooth_newton,
                         singular_convex_combination)
from .solver_prox import ProxConfig, newton_prox
from .trace import SolveTrace, Status, error_ratios

FINITE_TOL = 1e-13
SUPERLINEAR_FINAL = 0.1
TAIL = 4


class RateClass(str, enum.Enum):
    FINITE = "FiniteTermination"
    SUPERLINEAR = "Superlinear"
    LINEAR = "Linear"
    NONE = "None"

    def __str__(self):
        return self.value


@dataclass
class RateReport:
    ratios: list
    classification: RateClass
    window: int

    def to_dict(self):
        return {"ratios": self.ratios, "classification": str(self.classification),
                "window": self.window}


def classify_ratios(ratios, finite=False):
    """Classify a ratio sequence; ``None`` entries are ignored.

    The tail is the last ``min(4, available)`` ratios.  Superlinear needs
    at least two tail ratios, strictly decreasing, with the last at most
    0.1; Linear needs every tail ratio below 1.
    """
    defined = [r for r in ratios if r is not None]
    window = min(TAIL, len(defined))
    if finite:
        return RateClass.FINITE, window
    tail = defined[len(defined) - window:]
    if (len(tail) >= 2 and all(b < a for a, b in zip(tail, tail[1:]))
            and tail[-1] <= SUPERLINEAR_FINAL):
        return RateClass.SUPERLINEAR, window
    if tail and all(r < 1.0 for r in tail):
        return RateClass.LINEAR, window
    return RateClass.NONE, window


def estimate_rate(trace_or_iterates, xstar) -> RateReport:
    """Error ratios of a run against ``xstar`` and their classification.

    ``FiniteTermination`` is reported when some iterate is within 1e-13 of
    ``xstar``.
    """
    if isinstance(trace_or_iterates, SolveTrace):
        iterates = trace_or_iterates.iterates
    else:
        iterates = np.atleast_2d(np.asarray(trace_or_iterates, dtype=float))
        if iterates.shape[0] == 1 and np.ndim(trace_or_iterates) == 1:
            iterates = iterates.T
    if len(iterates) == 0:
        raise ValueError("need at least one iterate")
    xstar = np.asarray(xstar, dtype=float).reshape(-1)
    ratios = error_ratios(iterates, xstar)
    finite = any(np.linalg.norm(x - xstar) <= FINITE_TOL for x in iterates)
    cls, window = classify_ratios(ratios, finite)
    return RateReport(ratios, cls, window)


@dataclass
class ComparisonRow:
    solver: str
    status: Optional[str]
    iterations: Optional[int] = None
    final_residual: Optional[float] = None
    rate: Optional[str] = None
    witness: Optional[dict] = None
    error: Optional[str] = None
    trace: Optional[SolveTrace] = field(default=None, repr=False)

    def to_dict(self):
        return {"solver": self.solver, "status": self.status, "iterations": self.iterations,
                "final_residual": self.final_residual, "rate": self.rate,
                "witness": self.witness, "error": self.error}


def run_solver(problem, solver: str, x0, config=None) -> SolveTrace:
    """Dispatch a named solver; raises :class:`Unsupported` for bad pairings."""
    if solver in ("c11", "ssn"):
        if not isinstance(problem, C11Problem):
            raise Unsupported(f"solver {solver!r} needs a C^{{1,1}} problem")
        config = config if isinstance(config, SolverConfig) else SolverConfig()
        fn = newton_c11 if solver == "c11" else semismooth_newton
        return fn(problem, x0, config)
    if solver == "prox":
        if not isinstance(problem, ProxRegularProblem):
            raise Unsupported("solver 'prox' needs a prox-regular problem")
        config = config if isinstance(config, ProxConfig) else ProxConfig()
        return newton_prox(problem, x0, config)
    raise Unsupported(f"unknown solver {solver!r}")


def _witness(problem, trace):
    ref = problem.solution if problem.solution is not None else trace.x
    try:
        w = singular_convex_combination(limiting_hessians(problem, ref))
    except Unsupported:
        return None
    if w is None:
        return None
    return {"point": [float(t) for t in ref], "pair": list(w.pair), "lambda": w.weight,
            "det": w.det, "matrix": w.matrix.tolist()}


def compare_solvers(problem, solvers: Sequence[str], x0, config=None):
    """Run each solver from ``x0``; one :class:`ComparisonRow` per solver.

    Failures of a single solver (unsupported pairing, solver errors) are
    reported in its row.  Rows of the semismooth Newton baseline carry a
    singular convex combination of limiting Hessians at the reference point
    when one exists.
    """
    rows = []
    for name in solvers:
        try:
            trace = run_solver(problem, name, x0, config)
        except SubgradNewtonError as exc:
            status = "Unsupported" if isinstance(exc, Unsupported) else type(exc).__name__
            rows.append(ComparisonRow(name, status, error=str(exc)))
            continue
        rate = None
        if problem.solution is not None:
            rate = str(estimate_rate(trace, problem.solution).classification)
        row = ComparisonRow(name, str(trace.status), trace.n_iter, trace.final_residual,
                            rate, trace=trace)
        if name == "ssn":
            row.witness = _witness(problem, trace)
        rows.append(row)
    return rows
