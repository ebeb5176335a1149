"""Newton method for the Lasso ``0.5 ||A x - b||^2 + mu ||x||_1``.

The subdifferential is ``A^T (A x - b) + mu F(x)`` with ``F`` the
subdifferential of the l1 norm.  Its coderivative decomposes per coordinate
through the normal cone ``G`` to the graph of the subdifferential of
``|.|``; when ``A^T A`` is diagonal the proximal mapping is a soft threshold
and the Newton direction has a closed form, otherwise the direction is found
by enumerating the branches of ``G``.
"""
from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import Lasso

from .exceptions import (DimensionMismatch, EnumerationCapExceeded, Infeasible,
                         NonFiniteIterate, NotDiagonal, NotDiagonalizable,
                         PointNotOnGraph)
from .geometry import ConeUnion, Polyhedron, PolyhedralUnion, select_direction, DirectionSet
from .problems import ProxRegularProblem
from .solver_prox import ProxConfig
from .trace import IterateRecord, SolveTrace, Status

ENUMERATION_CAP = 12
BRANCH_TOL = 1e-12
GRAPH_TOL = 1e-9
DIAGONAL_TOL = 1e-12
CERTIFICATE_TOL = 1e-8


@dataclass(frozen=True)
class LassoInstance:
    """Data ``(A, b, mu)`` of a Lasso problem."""

    A: np.ndarray
    b: np.ndarray
    mu: float

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        if not float(self.mu) > 0:
            raise ValueError("mu must be positive")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def Q(self) -> np.ndarray:
        return self.A.T @ self.A

    def smooth_gradient(self, x):
        return self.A.T @ (self.A @ x - self.b)

    @classmethod
    def from_dict(cls, doc):
        return cls(np.asarray(doc["A"], dtype=float), np.asarray(doc["b"], dtype=float),
                   float(doc["mu"]))

    def to_dict(self):
        return {"A": self.A.tolist(), "b": self.b.tolist(), "mu": self.mu}


def _vec(inst, x):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != inst.n:
        raise DimensionMismatch(f"point has {x.shape[0]} entries, instance has {inst.n} columns")
    return x


def lasso_objective(inst: LassoInstance, x) -> float:
    x = _vec(inst, x)
    r = inst.A @ x - inst.b
    return 0.5 * float(r @ r) + inst.mu * float(np.abs(x).sum())


@dataclass(frozen=True)
class LassoSubdifferential:
    """``dphi(x)`` as a box ``[lower, upper]`` (degenerate where ``x_i != 0``)."""

    smooth: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def contains(self, y, tol=0.0) -> bool:
        y = np.asarray(y, dtype=float).reshape(-1)
        return bool(np.all(y >= self.lower - tol) and np.all(y <= self.upper + tol))

    def contains_zero(self, tol=0.0) -> bool:
        return self.contains(np.zeros_like(self.smooth), tol)

    def distance(self, y=None) -> float:
        """Euclidean distance from ``y`` (default 0) to the box."""
        y = np.zeros_like(self.smooth) if y is None else np.asarray(y, dtype=float).reshape(-1)
        return float(np.linalg.norm(y - np.clip(y, self.lower, self.upper)))


def lasso_subdifferential(inst: LassoInstance, x) -> LassoSubdifferential:
    x = _vec(inst, x)
    g = inst.smooth_gradient(x)
    s = np.sign(x)
    lower = np.where(x != 0, g + inst.mu * s, g - inst.mu)
    upper = np.where(x != 0, g + inst.mu * s, g + inst.mu)
    return LassoSubdifferential(g, lower, upper)


def stationarity_certificate(inst: LassoInstance, x, tol=CERTIFICATE_TOL) -> bool:
    """Componentwise optimality check with absolute tolerance ``tol``.

    ``|g_i| <= mu + tol`` where ``x_i = 0`` and ``|g_i + mu sgn(x_i)| <= tol``
    elsewhere, with ``g = A^T (A x - b)``.
    """
    x = _vec(inst, x)
    g = inst.smooth_gradient(x)
    zero = x == 0
    ok_zero = np.abs(g[zero]) <= inst.mu + tol
    ok_nz = np.abs(g[~zero] + inst.mu * np.sign(x[~zero])) <= tol
    return bool(np.all(ok_zero) and np.all(ok_nz))


# ---------------------------------------------------------------------------
# second-order structure


class SignBranch(enum.Enum):
    SMOOTH_POSITIVE = "smooth-positive"
    SMOOTH_NEGATIVE = "smooth-negative"
    INACTIVE_INTERIOR = "inactive-interior"
    BOUNDARY_LOW = "boundary-low"
    BOUNDARY_HIGH = "boundary-high"


_VERTICAL = Polyhedron(2, A_eq=[[1.0, 0.0]])        # {0} x R
_HORIZONTAL = Polyhedron(2, A_eq=[[0.0, 1.0]])      # R x {0}
_QUADRANT_LOW = Polyhedron(2, A_ub=[[-1.0, 0.0], [0.0, 1.0]])   # R+ x R-
_QUADRANT_HIGH = Polyhedron(2, A_ub=[[1.0, 0.0], [0.0, -1.0]])  # R- x R+


def classify(t, p, tol=BRANCH_TOL) -> Optional[SignBranch]:
    """Case of ``G(t, p)``; ``None`` when ``G`` is empty."""
    if abs(t) > tol:
        if abs(p - 1.0) <= tol:
            return SignBranch.SMOOTH_POSITIVE
        if abs(p + 1.0) <= tol:
            return SignBranch.SMOOTH_NEGATIVE
        return None
    if abs(p + 1.0) <= tol:
        return SignBranch.BOUNDARY_LOW
    if abs(p - 1.0) <= tol:
        return SignBranch.BOUNDARY_HIGH
    if abs(p) < 1.0:
        return SignBranch.INACTIVE_INTERIOR
    return None


def lasso_G(t: float, p: float, tol=BRANCH_TOL) -> ConeUnion:
    """Normal cone to ``gph d|.|`` at ``(t, p)``; empty off the graph."""
    case = classify(t, p, tol)
    if case in (SignBranch.SMOOTH_POSITIVE, SignBranch.SMOOTH_NEGATIVE):
        pieces = [_VERTICAL]
    elif case is SignBranch.INACTIVE_INTERIOR:
        pieces = [_HORIZONTAL]
    elif case is SignBranch.BOUNDARY_LOW:
        pieces = [_QUADRANT_LOW, _VERTICAL, _HORIZONTAL]
    elif case is SignBranch.BOUNDARY_HIGH:
        pieces = [_QUADRANT_HIGH, _VERTICAL, _HORIZONTAL]
    else:
        pieces = []
    return ConeUnion(2, pieces)


def _scaled_subgradient(inst, x, y):
    """``(y - A^T (A x - b)) / mu``; checks ``(x, y)`` lies on the graph."""
    s = (np.asarray(y, dtype=float).reshape(-1) - inst.smooth_gradient(x)) / inst.mu
    on = np.where(np.abs(x) > BRANCH_TOL, np.abs(s - np.sign(x)) <= GRAPH_TOL,
                  np.abs(s) <= 1.0 + GRAPH_TOL)
    if not np.all(on):
        raise PointNotOnGraph(f"({x.tolist()}, {np.asarray(y).tolist()}) is not on gph dphi")
    return s


def _snap(x, s):
    """Round the scaled subgradient onto the graph of ``d|.|``."""
    s = s.copy()
    nz = np.abs(x) > BRANCH_TOL
    s[nz] = np.sign(x[nz])
    near = ~nz & (np.abs(np.abs(s) - 1.0) <= GRAPH_TOL)
    s[near] = np.sign(s[near])
    return s


def lasso_second_order_contains(inst: LassoInstance, x, y, v, w, tol=1e-10) -> bool:
    """Whether ``w`` belongs to the second-order subdifferential at ``(x, y)`` in direction ``v``."""
    x, y, v, w = (_vec(inst, a) for a in (x, y, v, w))
    s = _snap(x, _scaled_subgradient(inst, x, y))
    first = (w - inst.Q @ v) / inst.mu
    for i in range(inst.n):
        if not lasso_G(x[i], s[i]).contains([first[i], -v[i]], tol):
            return False
    return True


# ---------------------------------------------------------------------------
# proximal mappings


def diagonal_entries(inst: LassoInstance) -> np.ndarray:
    """Diagonal of a square diagonal ``A`` with positive entries."""
    A = inst.A
    if A.shape[0] != A.shape[1] or np.any(A - np.diag(np.diag(A))):
        raise NotDiagonal("A must be a square diagonal matrix")
    a = np.diag(A).copy()
    if np.any(a <= 0):
        raise NotDiagonal("diagonal entries of A must be positive")
    return a


def lasso_prox_diagonal(inst: LassoInstance, x, lam=1.0) -> np.ndarray:
    """Soft-threshold proximal point for diagonal ``A``.

    ``y_i = [|c_i| - lam mu / (lam a_i^2 + 1)]_+ sgn(c_i)`` with
    ``c_i = (x_i + lam a_i b_i) / (lam a_i^2 + 1)``.
    """
    a = diagonal_entries(inst)
    x = _vec(inst, x)
    den = lam * a * a + 1.0
    c = (x + lam * a * inst.b) / den
    return np.maximum(np.abs(c) - lam * inst.mu / den, 0.0) * np.sign(c)


def _augmented(inst, x, lam):
    s = 1.0 / np.sqrt(lam)
    X = np.vstack([inst.A, s * np.eye(inst.n)])
    y = np.concatenate([inst.b, s * x])
    return X, y


def _polish(inst, x, lam, y0):
    """Exact KKT point on the support and signs suggested by ``y0``."""
    H = inst.Q + np.eye(inst.n) / lam
    c = inst.A.T @ inst.b + x / lam
    scale = max(1.0, float(np.abs(y0).max()))
    S = np.abs(y0) > 1e-9 * scale
    sgn = np.sign(y0)
    y = np.zeros(inst.n)
    if S.any():
        y[S] = np.linalg.solve(H[np.ix_(S, S)], c[S] - inst.mu * sgn[S])
    r = c - H @ y
    ok = (np.all(np.sign(y[S]) == sgn[S])
          and np.all(np.abs(r[~S]) <= inst.mu * (1 + 1e-9) + 1e-12))
    return y if ok else None


def lasso_prox(inst: LassoInstance, x, lam=1.0) -> np.ndarray:
    """Proximal point of the Lasso objective for a general ``A``.

    The strongly convex subproblem is itself a Lasso on the stacked data
    ``[A; I/sqrt(lam)]``; scikit-learn's coordinate descent locates the
    support and signs, and the point is then recomputed exactly from the
    optimality system on that support.
    """
    x = _vec(inst, x)
    try:
        a = diagonal_entries(inst)
    except NotDiagonal:
        a = None
    if a is not None:
        return lasso_prox_diagonal(inst, x, lam)
    X, y = _augmented(inst, x, lam)
    m = X.shape[0]
    tol = 1e-12
    for _ in range(3):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            model = Lasso(alpha=inst.mu / m, fit_intercept=False, tol=tol,
                          max_iter=100000, selection="cyclic")
            model.fit(X, y)
        out = _polish(inst, x, lam, model.coef_)
        if out is not None:
            return out
        tol *= 1e-2
    return np.asarray(model.coef_, dtype=float)


def lasso_diagonalize(inst: LassoInstance, tol=DIAGONAL_TOL) -> LassoInstance:
    """Equivalent instance with ``A~ = sqrt(A^T A)`` diagonal.

    ``b~ = A~^{-1} A^T b``; the objectives differ by the constant
    ``0.5 (||b||^2 - ||b~||^2)``.  The off-diagonal entries of ``A^T A`` must
    be below ``tol`` relative to its largest diagonal entry.
    """
    Q = inst.Q
    q = np.diag(Q).copy()
    scale = max(1.0, float(np.abs(q).max())) if q.size else 1.0
    off = Q - np.diag(q)
    if np.any(np.abs(off) > tol * scale):
        raise NotDiagonalizable("A^T A is not diagonal")
    if np.any(q <= 0):
        raise NotDiagonalizable("A^T A has a non-positive diagonal entry")
    a = np.sqrt(q)
    b = (inst.A.T @ inst.b) / a
    return LassoInstance(np.diag(a), b, inst.mu)


def is_diagonalizable(inst: LassoInstance) -> bool:
    try:
        lasso_diagonalize(inst)
    except NotDiagonalizable:
        return False
    return True


# ---------------------------------------------------------------------------
# Newton directions


def lasso_newton_step_diagonal(inst: LassoInstance, x, lam=1.0):
    """Moreau gradient ``v`` and closed-form direction ``d`` for diagonal ``A``.

    ``d_i = -lam v_i - v_i / a_i^2`` where the proximal coordinate is nonzero,
    ``d_i = -lam v_i`` where it vanishes (``|x_i - lam v_i| <= 1e-12``).
    """
    a = diagonal_entries(inst)
    x = _vec(inst, x)
    v = (x - lasso_prox_diagonal(inst, x, lam)) / lam
    zero = np.abs(x - lam * v) <= BRANCH_TOL
    d = np.where(zero, -lam * v, -lam * v - v / (a * a))
    return v, d


_OPTIONS = {
    SignBranch.SMOOTH_POSITIVE: ("eq",),
    SignBranch.SMOOTH_NEGATIVE: ("eq",),
    SignBranch.INACTIVE_INTERIOR: ("zero",),
    SignBranch.BOUNDARY_LOW: ("eq", "zero", "cone"),
    SignBranch.BOUNDARY_HIGH: ("eq", "zero", "cone"),
}


def branch_pieces(inst: LassoInstance, p, s, v, lam):
    """Polyhedra in ``d``-space, one per branch assignment."""
    n = inst.n
    Q = inst.Q
    rhs = -v - lam * (Q @ v)          # (Q d)_i must match this on "eq" rows
    cases = [classify(p[i], s[i]) for i in range(n)]
    if any(c is None for c in cases):
        raise PointNotOnGraph("point is not on gph dphi")
    for assignment in itertools.product(*(_OPTIONS[c] for c in cases)):
        A_eq, b_eq, A_ub, b_ub = [], [], [], []
        for i, opt in enumerate(assignment):
            e = np.zeros(n)
            e[i] = 1.0
            if opt == "eq":
                A_eq.append(Q[i])
                b_eq.append(rhs[i])
            elif opt == "zero":
                A_eq.append(e)
                b_eq.append(-lam * v[i])
            elif cases[i] is SignBranch.BOUNDARY_LOW:
                A_ub += [Q[i], -e]
                b_ub += [rhs[i], lam * v[i]]
            else:
                A_ub += [-Q[i], e]
                b_ub += [-rhs[i], -lam * v[i]]
        yield assignment, Polyhedron(n, A_ub or None, b_ub or None, A_eq or None, b_eq or None)


def lasso_direction_general(inst: LassoInstance, x, v, lam=1.0) -> np.ndarray:
    """Minimum-norm ``d`` with ``-v`` in the second-order subdifferential at
    ``(x - lam v, v)`` applied to ``lam v + d``.

    Raises
    ------
    EnumerationCapExceeded
        For more than 12 variables.
    Infeasible
        When no branch assignment admits a direction.
    """
    if inst.n > ENUMERATION_CAP:
        raise EnumerationCapExceeded(f"branch enumeration is capped at n = {ENUMERATION_CAP}")
    x, v = _vec(inst, x), _vec(inst, v)
    p = x - lam * v
    s = _snap(p, _scaled_subgradient(inst, p, v))
    pieces = tuple(P for _, P in branch_pieces(inst, p, s, v, lam))
    return select_direction(DirectionSet(inst.n, pieces), "min-norm")


def lasso_problem(inst: LassoInstance) -> ProxRegularProblem:
    """The Lasso as a generic prox-regular problem with a ``3^n``-piece graph.

    Intended for small ``n`` cross-checks against the geometry kernel.
    """
    n = inst.n
    Q, c = inst.Q, inst.A.T @ inst.b
    pieces = []
    for signs in itertools.product((1, 0, -1), repeat=n):
        A_ub, b_ub, A_eq, b_eq = [], [], [], []
        for i, sg in enumerate(signs):
            # row i of y - Q x  (+ c) in (x, y) coordinates
            row = np.concatenate([-Q[i], np.eye(n)[i]])
            ex = np.concatenate([np.eye(n)[i], np.zeros(n)])
            if sg == 0:
                A_eq.append(ex)
                b_eq.append(0.0)
                A_ub += [row, -row]
                b_ub += [inst.mu - c[i], inst.mu + c[i]]
            else:
                A_ub.append(-sg * ex)
                b_ub.append(0.0)
                A_eq.append(row)
                b_eq.append(sg * inst.mu - c[i])
        pieces.append(Polyhedron(2 * n, A_ub, b_ub, A_eq, b_eq))
    return ProxRegularProblem("lasso", n, lambda x: lasso_objective(inst, x),
                              PolyhedralUnion(2 * n, pieces),
                              lambda x, lam: lasso_prox(inst, x, lam),
                              r=0.0, convex=True)


# ---------------------------------------------------------------------------
# solver


def lasso_solve(inst: LassoInstance, x0, config: ProxConfig = ProxConfig(lam=1.0)) -> SolveTrace:
    """Newton iterations for the Lasso from ``x0``.

    Instances with diagonal ``A^T A`` are first transformed to diagonal form
    and use the closed-form prox and direction; other instances use the
    general prox and branch enumeration (``n <= 12``).  The proximal point
    of the final iterate is checked with :func:`stationarity_certificate`;
    the outcome is stored in ``trace.extras``.
    """
    lam = 1.0 if config.lam is None else float(config.lam)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    x = _vec(inst, x0).copy()
    if is_diagonalizable(inst):
        work, diagonal = lasso_diagonalize(inst), True
    elif inst.n <= ENUMERATION_CAP:
        work, diagonal = inst, False
    else:
        raise NotDiagonalizable(
            f"A^T A is not diagonal and n = {inst.n} exceeds the enumeration cap")
    cfg = {"lambda": lam, "tol": config.tol, "max_iter": config.max_iter,
           "selection": "closed-form" if diagonal else "min-norm"}
    trace = SolveTrace("lasso", "prox", cfg)
    p = None
    for k in itertools.count():
        if diagonal:
            v, d = lasso_newton_step_diagonal(work, x, lam)
            p = x - lam * v
        else:
            p = lasso_prox(work, x, lam)
            v = (x - p) / lam
            d = None
        rec = IterateRecord(k, x.copy(), v)
        trace.records.append(rec)
        if rec.residual_norm <= config.tol:
            trace.status = Status.CONVERGED
            break
        if k >= config.max_iter:
            trace.status = Status.MAX_ITERATIONS
            break
        if d is None:
            try:
                d = lasso_direction_general(work, x, v, lam)
            except Infeasible as exc:
                trace.status = Status.DIRECTION_INFEASIBLE
                trace.message = str(exc)
                break
        rec.direction = d
        x = x + d
        if not np.all(np.isfinite(x)):
            raise NonFiniteIterate(f"iterate became non-finite: {x.tolist()}")
    minimizer = lasso_prox_diagonal(work, x, lam) if diagonal else lasso_prox(work, x, lam)
    trace.extras["minimizer"] = minimizer
    trace.extras["certified"] = stationarity_certificate(inst, minimizer)
    return trace
