"""Iterate histories of solver runs and their JSON/CSV serialization."""
from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    CYCLE = "Cycle"
    DIRECTION_INFEASIBLE = "DirectionInfeasible"
    BASELINE_SINGULAR = "BaselineSingular"

    def __str__(self):
        return self.value


@dataclass
class IterateRecord:
    """One row of a trace.

    ``residual`` is the gradient (C^{1,1} solvers) or the Moreau gradient
    ``v^k`` (prox solvers); ``direction`` is ``None`` on the final record.
    """

    k: int
    x: np.ndarray
    residual: np.ndarray
    direction: Optional[np.ndarray] = None
    step: float = 1.0

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residual))


@dataclass
class SolveTrace:
    problem: str
    solver: str
    config: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    status: Optional[Status] = None
    solution: Optional[np.ndarray] = None
    message: str = ""
    stored_ratios: Optional[list] = None
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def n_iter(self) -> int:
        """Number of steps taken (records minus the initial point)."""
        return max(len(self.records) - 1, 0)

    @property
    def x(self) -> np.ndarray:
        return self.records[-1].x

    @property
    def iterates(self) -> np.ndarray:
        return np.array([r.x for r in self.records])

    @property
    def final_residual(self) -> float:
        return self.records[-1].residual_norm if self.records else float("nan")

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def ratios(self, xstar=None):
        if xstar is None and self.solution is None and self.stored_ratios is not None:
            return list(self.stored_ratios)
        xstar = self.solution if xstar is None else xstar
        if xstar is None or not self.records:
            return []
        return error_ratios(self.iterates, xstar)

    def __eq__(self, other):
        if not isinstance(other, SolveTrace):
            return NotImplemented
        return to_dict(self) == to_dict(other)


RATIO_FLOOR = 1e-15


def error_ratios(iterates, xstar):
    """``||x^{k+1} - x*|| / ||x^k - x*||`` while the denominator exceeds 1e-15.

    Entries are ``None`` once the denominator has vanished.
    """
    xstar = np.asarray(xstar, dtype=float).reshape(-1)
    errs = [float(np.linalg.norm(np.asarray(x) - xstar)) for x in iterates]
    out = []
    for a, b in zip(errs[:-1], errs[1:]):
        out.append(b / a if a > RATIO_FLOOR else None)
    return out


def _floats(a):
    return [float(t) for t in np.asarray(a, dtype=float).reshape(-1)]


def _clean(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return _floats(v)
    if isinstance(v, (list, tuple)):
        return [_clean(t) for t in v]
    return v


def to_dict(trace: SolveTrace) -> dict:
    cfg = {key: _clean(trace.config.get(key)) for key in ("lambda", "tol", "max_iter", "selection")}
    return {
        "problem": trace.problem,
        "solver": trace.solver,
        "config": cfg,
        "status": str(trace.status) if trace.status is not None else None,
        "iterations": [
            {"k": int(r.k), "x": _floats(r.x), "residual": _floats(r.residual),
             "direction": None if r.direction is None else _floats(r.direction),
             "residual_norm": r.residual_norm}
            for r in trace.records
        ],
        "ratios": trace.ratios(),
    }


def serialize_trace(trace: SolveTrace, fmt: str = "json") -> str:
    """Render a trace as JSON or CSV text.

    Python's ``repr`` of floats is the shortest round-trip decimal, so the
    output is deterministic and parses back to identical doubles.
    """
    if fmt == "json":
        return json.dumps(to_dict(trace), indent=2, sort_keys=False, allow_nan=True) + "\n"
    if fmt == "csv":
        n = len(trace.records[0].x) if trace.records else 0
        ratios = trace.ratios()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k"] + [f"x_{i + 1}" for i in range(n)] + ["residual_norm", "ratio"])
        for i, r in enumerate(trace.records):
            ratio = ratios[i - 1] if 0 < i <= len(ratios) else None
            w.writerow([r.k] + [repr(float(t)) for t in r.x]
                       + [repr(r.residual_norm), "" if ratio is None else repr(ratio)])
        return buf.getvalue()
    raise ValueError(f"unknown trace format {fmt!r}")


class TraceFormatError(ValueError):
    """Raised when a trace document cannot be parsed."""


def parse_trace(text: str) -> SolveTrace:
    """Inverse of ``serialize_trace(trace, "json")``."""
    try:
        doc = json.loads(text)
        status = doc["status"]
        trace = SolveTrace(
            problem=doc["problem"], solver=doc["solver"], config=dict(doc["config"]),
            status=Status(status) if status is not None else None,
            stored_ratios=[None if r is None else float(r) for r in doc.get("ratios", [])])
        for it in doc["iterations"]:
            d = it.get("direction")
            trace.records.append(IterateRecord(
                int(it["k"]), np.asarray(it["x"], dtype=float),
                np.asarray(it["residual"], dtype=float),
                None if d is None else np.asarray(d, dtype=float)))
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceFormatError(f"malformed trace: {exc}") from exc
    if not trace.records:
        raise TraceFormatError("malformed trace: no iterations")
    return trace
