"""Problem library: C^{1,1} gradient equations and prox-regular inclusions.

Two oracle flavours are provided.  A :class:`C11Problem` solves
``grad(x) = 0`` for a function with Lipschitz gradient; its gradient graph is
given either as a finite union of affine pieces or through a pointwise
direction oracle.  A :class:`ProxRegularProblem` solves ``0 in subdiff(x)``
for a prox-regular function with a polyhedral subgradient graph and a closed
form proximal mapping.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import Unsupported
from .geometry import DirectionSet, Polyhedron, PolyhedralUnion


@dataclass(frozen=True)
class AffinePiece:
    """Gradient ``x -> J x + c`` on the polyhedral cell ``cell``."""

    cell: Polyhedron
    jacobian: np.ndarray
    offset: np.ndarray = None

    def __post_init__(self):
        J = np.atleast_2d(np.asarray(self.jacobian, dtype=float))
        c = (np.zeros(J.shape[0]) if self.offset is None
             else np.asarray(self.offset, dtype=float).reshape(-1))
        object.__setattr__(self, "jacobian", J)
        object.__setattr__(self, "offset", c)

    def value(self, x):
        return self.jacobian @ np.asarray(x, dtype=float) + self.offset

    def graph(self) -> Polyhedron:
        """``{(x, J x + c) : x in cell}`` in ``R^n x R^n``."""
        n = self.cell.dim
        cell = self.cell
        A_ub = np.hstack([cell.A_ub, np.zeros((len(cell.b_ub), n))])
        A_eq = np.vstack([np.hstack([cell.A_eq, np.zeros((len(cell.b_eq), n))]),
                          np.hstack([self.jacobian, -np.eye(n)])])
        b_eq = np.concatenate([cell.b_eq, -self.offset])
        return Polyhedron(2 * n, A_ub, cell.b_ub, A_eq, b_eq)


def graph_from_pieces(pieces: Sequence[AffinePiece]) -> PolyhedralUnion:
    n = pieces[0].cell.dim
    return PolyhedralUnion(2 * n, [p.graph() for p in pieces])


@dataclass(frozen=True)
class C11Problem:
    """Gradient equation ``grad(x) = 0`` with C^{1,1} data.

    Parameters
    ----------
    name : str
    dim : int
    grad : callable
        Gradient evaluator.
    fun : callable, optional
        Objective evaluator; ``None`` when values are not available.
    pieces : sequence of AffinePiece, optional
        Piecewise-affine description of the gradient.  The gradient graph is
        derived from it.
    direction_oracle : callable, optional
        ``x -> DirectionSet`` for problems without a polyhedral graph.
    jacobian_oracle : callable, optional
        ``x -> list of matrices`` used by residual diagnostics.
    solution : array_like, optional
        Known solution.
    """

    name: str
    dim: int
    grad: Callable
    fun: Optional[Callable] = None
    pieces: Optional[tuple] = None
    direction_oracle: Optional[Callable] = None
    jacobian_oracle: Optional[Callable] = None
    solution: Optional[np.ndarray] = None
    graph: Optional[PolyhedralUnion] = field(default=None)

    def __post_init__(self):
        if self.pieces is not None:
            object.__setattr__(self, "pieces", tuple(self.pieces))
            if self.graph is None:
                object.__setattr__(self, "graph", graph_from_pieces(self.pieces))
        if self.solution is not None:
            object.__setattr__(self, "solution",
                               np.asarray(self.solution, dtype=float).reshape(-1))

    @property
    def has_graph(self):
        return self.graph is not None

    def value(self, x):
        if self.fun is None:
            raise Unsupported(f"problem {self.name!r} has no objective evaluator")
        return float(self.fun(np.asarray(x, dtype=float)))

    def gradient(self, x):
        return np.atleast_1d(np.asarray(self.grad(np.asarray(x, dtype=float)), dtype=float))


@dataclass(frozen=True)
class ProxRegularProblem:
    """Subgradient inclusion ``0 in subdiff phi(x)`` for prox-regular ``phi``.

    ``prox(x, lam)`` returns a proximal point, ``start_region(x, lam)``
    decides membership of ``x`` in ``rge(I + lam * subdiff phi)``.
    """

    name: str
    dim: int
    fun: Optional[Callable]
    graph: PolyhedralUnion
    prox: Callable
    r: float = 0.0
    eps: float = np.inf
    start_region: Optional[Callable] = None
    convex: bool = False
    solution: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.solution is not None:
            object.__setattr__(self, "solution",
                               np.asarray(self.solution, dtype=float).reshape(-1))

    def value(self, x):
        if self.fun is None:
            raise Unsupported(f"problem {self.name!r} has no objective evaluator")
        return float(self.fun(np.asarray(x, dtype=float)))

    def in_start_region(self, x, lam):
        if self.convex or self.start_region is None:
            return True
        return bool(self.start_region(np.asarray(x, dtype=float), lam))


# ---------------------------------------------------------------------------
# C^{1,1} problems

# boundary rays of the eight cones, at angles k * pi / 4
_RAYS = np.array([[1, 0], [1, 1], [0, 1], [-1, 1],
                  [-1, 0], [-1, -1], [0, -1], [1, -1]], dtype=float)

KK_JACOBIANS = (
    np.array([[0.0, -1.0], [-1.0, 2.0]]),
    np.array([[-2.0, 1.0], [1.0, 0.0]]),
    np.array([[2.0, 1.0], [1.0, 0.0]]),
    np.array([[0.0, -1.0], [-1.0, -2.0]]),
)


def kk_cone(k: int) -> Polyhedron:
    """Closed cone between the boundary rays ``k - 1`` and ``k`` (1-based)."""
    a = _RAYS[(k - 1) % 8]
    b = _RAYS[k % 8]
    rows = np.array([[a[1], -a[0]], [-b[1], b[0]]])
    return Polyhedron(2, A_ub=rows, b_ub=np.zeros(2))


def _kk_index(x):
    theta = np.arctan2(x[1], x[0]) % (2 * np.pi)
    return int(theta // (np.pi / 4)) % 8


def klatte_kummer() -> C11Problem:
    """Piecewise-quadratic function on eight cones with a linear gradient on each.

    On the cone ``C(k)`` the function is ``0.5 x^T J x`` with ``J`` cycling
    through four matrices, so cones ``k`` and ``k + 4`` share their formula.
    The gradient is continuous, metrically regular at the origin, and the
    origin is the only zero.
    """
    pieces = tuple(AffinePiece(kk_cone(k), KK_JACOBIANS[(k - 1) % 4]) for k in range(1, 9))

    def grad(x):
        return KK_JACOBIANS[_kk_index(x) % 4] @ x

    def fun(x):
        J = KK_JACOBIANS[_kk_index(x) % 4]
        return 0.5 * x @ J @ x

    return C11Problem("klatte-kummer", 2, grad, fun, pieces=pieces, solution=np.zeros(2))


def abs_square_2d() -> C11Problem:
    """``phi(x, y) = x|x|/2 + y|y|/2`` with gradient ``(|x|, |y|)``."""
    pieces = []
    for sx in (1.0, -1.0):
        for sy in (1.0, -1.0):
            cell = Polyhedron(2, A_ub=[[-sx, 0.0], [0.0, -sy]], b_ub=[0.0, 0.0])
            pieces.append(AffinePiece(cell, np.diag([sx, sy])))

    def grad(x):
        return np.abs(x)

    def fun(x):
        return 0.5 * float(np.sum(x * np.abs(x)))

    return C11Problem("abs-square", 2, grad, fun, pieces=pieces, solution=np.zeros(2))


def psi(x):
    x = float(x)
    if x == 0.0:
        return 0.0
    return x * x * np.sin(1.0 / x) + 2.0 * x


def dpsi(x):
    x = float(x)
    if x == 0.0:
        # the Clarke generalized derivative at 0 is [1, 3]; 2 is its centre
        return 2.0
    return 2.0 * x * np.sin(1.0 / x) - np.cos(1.0 / x) + 2.0


def oscillatory() -> C11Problem:
    """One-dimensional equation ``x^2 sin(1/x) + 2x = 0``.

    The gradient is Lipschitz near the origin but not semismooth there.
    No objective values are provided.
    """

    def grad(x):
        return np.array([psi(np.asarray(x).reshape(-1)[0])])

    def directions(x):
        x0 = float(np.asarray(x).reshape(-1)[0])
        q = dpsi(x0)
        if q == 0.0:
            return DirectionSet(1, (), False)
        return DirectionSet.singleton([-psi(x0) / q])

    def jacobians(x):
        return [np.array([[dpsi(np.asarray(x).reshape(-1)[0])]])]

    return C11Problem("oscillatory", 1, grad, None, direction_oracle=directions,
                      jacobian_oracle=jacobians, solution=np.zeros(1))


def quadratic_problem(Q, q=None, name="quadratic") -> C11Problem:
    """``phi(x) = 0.5 <Q x, x> - <q, x>`` with a single-piece gradient graph."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    n = Q.shape[0]
    q = np.zeros(n) if q is None else np.asarray(q, dtype=float).reshape(-1)
    Qs = 0.5 * (Q + Q.T)
    piece = AffinePiece(Polyhedron.whole_space(n), Qs, -q)
    try:
        sol = np.linalg.solve(Qs, q)
    except np.linalg.LinAlgError:
        sol = None
    return C11Problem(name, n, lambda x: Qs @ x - q, lambda x: 0.5 * x @ Qs @ x - q @ x,
                      pieces=(piece,), solution=sol)


def zero_map(n=1) -> C11Problem:
    """Constant-zero gradient; every point is a solution, all Jacobians singular."""
    piece = AffinePiece(Polyhedron.whole_space(n), np.zeros((n, n)))
    return C11Problem("zero-map", n, lambda x: np.zeros(n), lambda x: 0.0, pieces=(piece,))


# ---------------------------------------------------------------------------
# prox-regular problems


def _mech_theta(x):
    return abs(x) + 0.5 * x * abs(x)


def mechanical_equilibrium() -> ProxRegularProblem:
    """Nonconvex prox-regular function ``|x| + x|x|/2`` restricted to ``[-1, 1]``.

    The subgradient graph has five pieces: the two vertical rays at the
    interval ends, the two sloped segments and the vertical segment at 0.
    Prox-regularity holds with ``r = 1``.
    """
    pieces = [
        Polyhedron(2, A_ub=[[0, 1]], b_ub=[0], A_eq=[[1, 0]], b_eq=[-1]),
        Polyhedron(2, A_ub=[[-1, 0], [1, 0]], b_ub=[1, 0], A_eq=[[1, 1]], b_eq=[-1]),
        Polyhedron(2, A_ub=[[0, 1], [0, -1]], b_ub=[1, 1], A_eq=[[1, 0]], b_eq=[0]),
        Polyhedron(2, A_ub=[[-1, 0], [1, 0]], b_ub=[0, 1], A_eq=[[-1, 1]], b_eq=[1]),
        Polyhedron(2, A_ub=[[0, -1]], b_ub=[-2], A_eq=[[1, 0]], b_eq=[1]),
    ]
    graph = PolyhedralUnion(2, pieces)

    def fun(x):
        x = float(np.asarray(x).reshape(-1)[0])
        if abs(x) > 1.0:
            return np.inf
        return _mech_theta(x)

    def prox(x, lam):
        x = float(np.asarray(x).reshape(-1)[0])
        cands = [-1.0, 0.0, 1.0]
        # for lam >= 1 the model is concave on [-1, 0]; endpoints suffice
        if lam < 1.0:
            cands.append(min(max((lam + x) / (1.0 - lam), -1.0), 0.0))
        cands.append(min(max((x - lam) / (1.0 + lam), 0.0), 1.0))
        vals = [_mech_theta(y) + (y - x) ** 2 / (2.0 * lam) for y in cands]
        best = int(np.argmin(vals))
        return np.array([cands[best]])

    def start_region(x, lam):
        x = float(np.asarray(x).reshape(-1)[0])
        return any(lo <= x <= hi for lo, hi in mech_start_intervals(lam))

    return ProxRegularProblem("mech-eq", 1, fun, graph, prox, r=1.0, eps=1.0,
                              start_region=start_region, convex=False,
                              solution=np.zeros(1))


def mech_start_intervals(lam):
    """Images of the five graph branches under ``y -> y + lam * v``.

    Intervals are returned closed; the open ends of the middle branches are
    covered by the neighbouring closed images.
    """
    return [
        (-np.inf, -1.0),
        (-1.0, -lam),
        (-lam, lam),
        (lam, 1.0 + 2.0 * lam),
        (1.0 + 2.0 * lam, np.inf),
    ]


def convex_quadratic(n=1) -> ProxRegularProblem:
    """``phi = 0.5 ||x||^2``; prox is ``x / (1 + lam)``."""
    graph = PolyhedralUnion(2 * n, [Polyhedron(2 * n, A_eq=np.hstack([np.eye(n), -np.eye(n)]))])
    return ProxRegularProblem(
        "convex-quadratic", n, lambda x: 0.5 * float(np.dot(x, x)), graph,
        lambda x, lam: np.asarray(x, dtype=float).reshape(-1) / (1.0 + lam),
        r=0.0, convex=True, solution=np.zeros(n))


def abs_subgradient_graph() -> PolyhedralUnion:
    """Graph of the subdifferential of ``|x|`` as three polyhedra."""
    return PolyhedralUnion(2, [
        Polyhedron(2, A_ub=[[1, 0]], b_ub=[0], A_eq=[[0, 1]], b_eq=[-1]),
        Polyhedron(2, A_ub=[[0, 1], [0, -1]], b_ub=[1, 1], A_eq=[[1, 0]], b_eq=[0]),
        Polyhedron(2, A_ub=[[-1, 0]], b_ub=[0], A_eq=[[0, 1]], b_eq=[1]),
    ])


def abs_value() -> ProxRegularProblem:
    """``phi = |x|``; prox is soft thresholding."""
    return ProxRegularProblem(
        "abs-value", 1, lambda x: float(abs(np.asarray(x).reshape(-1)[0])),
        abs_subgradient_graph(),
        lambda x, lam: np.sign(x) * np.maximum(np.abs(x) - lam, 0.0) * np.ones(1),
        r=0.0, convex=True, solution=np.zeros(1))


# ---------------------------------------------------------------------------
# set-valued fixtures


def fixture_interval_constant() -> PolyhedralUnion:
    """Graph of ``F(x) = [0, 1]``: the strip ``R x [0, 1]``."""
    return PolyhedralUnion(2, [Polyhedron(2, A_ub=[[0, 1], [0, -1]], b_ub=[1, 0])])


def fixture_isolated_union() -> PolyhedralUnion:
    """Graph ``{(0, 0)} U (R x [1, inf))``."""
    return PolyhedralUnion(2, [Polyhedron.point([0.0, 0.0]),
                               Polyhedron(2, A_ub=[[0, -1]], b_ub=[-1])])


C11_PROBLEMS = {
    "klatte-kummer": klatte_kummer,
    "abs-square": abs_square_2d,
    "oscillatory": oscillatory,
}
PROX_PROBLEMS = {
    "mech-eq": mechanical_equilibrium,
    "convex-quadratic": convex_quadratic,
    "abs-value": abs_value,
}
SET_FIXTURES = {
    "fixture-3-2": fixture_interval_constant,
    "fixture-3-3": fixture_isolated_union,
    "abs-subgradient": abs_subgradient_graph,
}


def problem_names():
    return sorted({**C11_PROBLEMS, **PROX_PROBLEMS, **SET_FIXTURES})


def get_problem(name):
    """Look up a problem or fixture by its CLI name."""
    for table in (C11_PROBLEMS, PROX_PROBLEMS, SET_FIXTURES):
        if name in table:
            return table[name]()
    raise KeyError(f"unknown problem {name!r}; known: {', '.join(problem_names())}")


def problem_graph(obj):
    """The polyhedral graph carried by a problem or fixture, if any."""
    if isinstance(obj, PolyhedralUnion):
        return obj
    return getattr(obj, "graph", None)
