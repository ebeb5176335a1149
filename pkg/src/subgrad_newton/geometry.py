"""Variational geometry of finite unions of convex polyhedra.

Every set handled here is a finite union of closed convex polyhedra given in
halfspace form.  Locally around a point such a set coincides with the point
plus a union of polyhedral cones, so tangent cones, regular (Frechet) normal
cones and limiting (Mordukhovich) normal cones can all be computed exactly by
finite enumeration.

The limiting normal cone is assembled from the cells of the central
hyperplane arrangement spanned by the constraints of the active tangent
cones: the regular normal cone is constant on each relatively open cell, and
the limiting cone is the union of these constant values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .exceptions import Infeasible, PointNotInSet, PointNotOnGraph, ScriptViolation

TOL = 1e-10
# Strict inequalities in the cell search are relaxed to a margin.  Cells are
# cones, so "margin 1e-8 inside the unit box" is the same test as "margin 1
# inside a box of radius 1e8"; the latter stays well above LP tolerances.
CELL_MARGIN = 1.0
CELL_BOX = 1e8
_ZERO_ROW = 1e-14
_RANK_TOL = 1e-10


def _as_rows(a, dim):
    if a is None:
        return np.zeros((0, dim))
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return np.zeros((0, dim))
    return np.atleast_2d(a).reshape(-1, dim)


def _as_vec(c, n):
    if c is None:
        return np.zeros(n)
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.shape[0] != n:
        raise ValueError(f"expected {n} offsets, got {c.shape[0]}")
    return c


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class Polyhedron:
    """Closed convex polyhedron ``{z : A_ub z <= b_ub, A_eq z = b_eq}``.

    Rows whose normal vector vanishes are resolved at construction: satisfied
    ones are dropped, a violated one makes the polyhedron empty.  Instances
    are immutable.
    """

    def __init__(self, dim: int, A_ub=None, b_ub=None, A_eq=None, b_eq=None):
        self.dim = int(dim)
        A_ub = _as_rows(A_ub, self.dim)
        A_eq = _as_rows(A_eq, self.dim)
        b_ub = _as_vec(b_ub, A_ub.shape[0])
        b_eq = _as_vec(b_eq, A_eq.shape[0])
        self._void = False

        keep = np.linalg.norm(A_ub, axis=1) > _ZERO_ROW
        if np.any(b_ub[~keep] < -TOL):
            self._void = True
        A_ub, b_ub = A_ub[keep], b_ub[keep]

        keep = np.linalg.norm(A_eq, axis=1) > _ZERO_ROW
        if np.any(np.abs(b_eq[~keep]) > TOL):
            self._void = True
        A_eq, b_eq = A_eq[keep], b_eq[keep]

        self.A_ub, self.b_ub = _frozen(A_ub), _frozen(b_ub)
        self.A_eq, self.b_eq = _frozen(A_eq), _frozen(b_eq)
        self._empty = True if self._void else None
        self._gens = None

    # -- construction helpers -------------------------------------------
    @classmethod
    def whole_space(cls, dim):
        return cls(dim)

    @classmethod
    def point(cls, z):
        z = np.asarray(z, dtype=float).reshape(-1)
        return cls(z.size, A_eq=np.eye(z.size), b_eq=z)

    @classmethod
    def empty(cls, dim):
        return cls(dim, A_ub=np.zeros((1, dim)), b_ub=[-1.0])

    def __repr__(self):
        return (f"Polyhedron(dim={self.dim}, n_ub={len(self.b_ub)}, "
                f"n_eq={len(self.b_eq)})")

    @property
    def is_cone(self):
        return bool(np.all(self.b_ub == 0) and np.all(self.b_eq == 0))

    # -- membership ------------------------------------------------------
    def contains(self, z, tol=TOL):
        if self._void:
            return False
        z = np.asarray(z, dtype=float).reshape(-1)
        if z.size != self.dim:
            raise ValueError(f"point has dimension {z.size}, expected {self.dim}")
        if len(self.b_ub) and np.any(self.A_ub @ z - self.b_ub > tol):
            return False
        if len(self.b_eq) and np.any(np.abs(self.A_eq @ z - self.b_eq) > tol):
            return False
        return True

    def is_empty(self):
        """Decide emptiness; the answer is cached."""
        if self._empty is None:
            self._empty = self._decide_empty()
        return self._empty

    def _decide_empty(self):
        if len(self.b_ub) == 0:
            if len(self.b_eq) == 0:
                return False
            z = np.linalg.lstsq(self.A_eq, self.b_eq, rcond=None)[0]
            return not np.all(np.abs(self.A_eq @ z - self.b_eq) <= TOL)
        res = linprog(np.zeros(self.dim),
                      A_ub=self.A_ub, b_ub=self.b_ub + TOL,
                      A_eq=self.A_eq if len(self.b_eq) else None,
                      b_eq=self.b_eq if len(self.b_eq) else None,
                      bounds=[(None, None)] * self.dim, method="highs")
        return res.status == 2

    # -- derived sets ----------------------------------------------------
    def active_rows(self, z, tol=TOL):
        z = np.asarray(z, dtype=float).reshape(-1)
        if len(self.b_ub) == 0:
            return np.zeros(0, dtype=int)
        return np.flatnonzero(np.abs(self.A_ub @ z - self.b_ub) <= tol)

    def tangent_cone(self, z, tol=TOL):
        """Tangent cone at a member point: relax the active constraints."""
        act = self.active_rows(z, tol)
        return Polyhedron(self.dim, A_ub=self.A_ub[act], A_eq=self.A_eq)

    def translate(self, t):
        """The set ``{z + t : z in self}``."""
        t = np.asarray(t, dtype=float).reshape(-1)
        if self._void:
            return Polyhedron.empty(self.dim)
        return Polyhedron(self.dim, self.A_ub, self.b_ub + self.A_ub @ t,
                          self.A_eq, self.b_eq + self.A_eq @ t)

    def linear_image(self, M):
        """Image under an invertible linear map ``z -> M z``."""
        Minv = np.linalg.inv(np.asarray(M, dtype=float))
        if self._void:
            return Polyhedron.empty(self.dim)
        return Polyhedron(self.dim, self.A_ub @ Minv, self.b_ub,
                          self.A_eq @ Minv, self.b_eq)

    # -- cones -----------------------------------------------------------
    def generators(self):
        """Lineality basis and extreme rays of a polyhedral cone.

        Returns ``(lineality, rays)`` as row arrays so that the cone equals
        ``span(lineality) + cone(rays)``.
        """
        if not self.is_cone:
            raise ValueError("generators are defined for cones only")
        if self._gens is None:
            if self._void:
                self._gens = (np.zeros((0, self.dim)), np.zeros((0, self.dim)))
            else:
                self._gens = cone_generators(self.A_ub, self.A_eq)
        return self._gens

    def polar(self):
        """Polar cone ``{y : <y, w> <= 0 for all w in self}``."""
        lin, rays = self.generators()
        return Polyhedron(self.dim, A_ub=rays, A_eq=lin)

    def is_trivial_cone(self):
        lin, rays = self.generators()
        return len(lin) == 0 and len(rays) == 0

    def recession_cone(self):
        return Polyhedron(self.dim, A_ub=self.A_ub, A_eq=self.A_eq)

    def sample(self, rng, size=1, scale=1.0):
        """Random members of a cone, drawn from its generators."""
        lin, rays = self.generators()
        out = np.zeros((size, self.dim))
        if len(lin):
            out += rng.normal(size=(size, len(lin))) @ lin
        if len(rays):
            # random sub-faces so that boundary rays are hit as well
            coef = rng.exponential(size=(size, len(rays)))
            coef *= rng.random((size, len(rays))) < 0.7
            out += coef @ rays
        return scale * out

    # -- projection ------------------------------------------------------
    def min_norm_point(self, tol=TOL):
        """Exact minimum-norm element by enumeration of active sets.

        Returns ``None`` when the polyhedron is empty.
        """
        if self._void:
            return None
        m = len(self.b_ub)
        best = None
        best_norm = np.inf
        max_k = min(m, self.dim)
        for k in range(max_k + 1):
            for S in itertools.combinations(range(m), k):
                M = np.vstack([self.A_eq, self.A_ub[list(S)]])
                r = np.concatenate([self.b_eq, self.b_ub[list(S)]])
                if len(r) == 0:
                    z = np.zeros(self.dim)
                else:
                    z = np.linalg.lstsq(M, r, rcond=None)[0]
                    if np.any(np.abs(M @ z - r) > tol * max(1.0, np.abs(r).max())):
                        continue
                if not self.contains(z, tol=1e3 * tol):
                    continue
                nz = np.linalg.norm(z)
                if nz < best_norm - 1e-12 or (
                        abs(nz - best_norm) <= 1e-12 and _lex_less(z, best)):
                    best, best_norm = z, nz
        if best is not None:
            self._empty = False
        elif self._empty is None:
            self._empty = True
        return best


def _lex_less(a, b):
    if b is None:
        return True
    for x, y in zip(a, b):
        if x < y - 1e-12:
            return True
        if x > y + 1e-12:
            return False
    return False


def cone_generators(B, E):
    """Generators of the cone ``{w : B w <= 0, E w = 0}``.

    The lineality space is split off; extreme rays of the pointed remainder
    are the feasible directions where ``k - 1`` linearly independent
    constraints are active (``k`` the dimension of the remainder).
    """
    B = np.asarray(B, dtype=float)
    E = np.asarray(E, dtype=float)
    s = B.shape[1] if B.ndim == 2 and B.shape[1] else E.shape[1]
    B = B.reshape(-1, s)
    E = E.reshape(-1, s)
    M = np.vstack([B, E])
    L = null_space(M, rcond=_RANK_TOL) if len(M) else np.eye(s)
    V = null_space(np.vstack([E, L.T]), rcond=_RANK_TOL) if (len(E) or L.shape[1]) else np.eye(s)
    k = V.shape[1]
    rays = []
    if k:
        Bv = B @ V
        if k == 1:
            cands = [np.ones(1), -np.ones(1)]
        else:
            cands = []
            for S in itertools.combinations(range(len(Bv)), k - 1):
                sub = Bv[list(S)]
                if np.linalg.matrix_rank(sub, tol=_RANK_TOL) != k - 1:
                    continue
                y = null_space(sub, rcond=_RANK_TOL)[:, 0]
                cands.extend((y, -y))
        for y in cands:
            if len(Bv) and np.any(Bv @ y > 1e-10 * np.linalg.norm(y)):
                continue
            w = V @ y
            w = w / np.linalg.norm(w)
            if not any(np.allclose(w, r, atol=1e-9) for r in rays):
                rays.append(w)
    lin = L.T.copy()
    rays = np.array(rays).reshape(-1, s)
    return lin, rays


class PolyhedralUnion:
    """Finite union of closed convex polyhedra sharing a dimension."""

    def __init__(self, dim: int, pieces: Iterable[Polyhedron]):
        self.dim = int(dim)
        self.pieces = tuple(pieces)
        for p in self.pieces:
            if p.dim != self.dim:
                raise ValueError(f"piece of dimension {p.dim} in a union of dimension {self.dim}")

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, pieces={len(self.pieces)})"

    def __len__(self):
        return len(self.pieces)

    def contains(self, z, tol=TOL):
        return any(p.contains(z, tol) for p in self.pieces)

    def active_pieces(self, z, tol=TOL):
        return [p for p in self.pieces if p.contains(z, tol)]

    def is_empty(self):
        return all(p.is_empty() for p in self.pieces)

    def linear_image(self, M):
        return type(self)(self.dim, [p.linear_image(M) for p in self.pieces])

    def swap_blocks(self, n):
        """Exchange the two coordinate blocks of a graph in ``R^n x R^n``."""
        M = np.zeros((2 * n, 2 * n))
        M[:n, n:] = np.eye(n)
        M[n:, :n] = np.eye(n)
        return self.linear_image(M)


class ConeUnion(PolyhedralUnion):
    """Finite union of polyhedral cones.  The empty union has no pieces."""

    def __init__(self, dim, pieces):
        pieces = [p for p in pieces if not p._void]
        super().__init__(dim, pieces)
        for p in self.pieces:
            if not p.is_cone:
                raise ValueError("ConeUnion pieces must have zero offsets")

    def generators(self):
        return [p.generators() for p in self.pieces]

    def sample(self, rng, size=1):
        if not self.pieces:
            raise ValueError("cannot sample from an empty cone union")
        idx = rng.integers(len(self.pieces), size=size)
        return np.vstack([self.pieces[i].sample(rng, 1) for i in idx])

    def swap_blocks(self, n):
        return ConeUnion(self.dim, [p.linear_image(_swap_matrix(n)) for p in self.pieces])


def _swap_matrix(n):
    M = np.zeros((2 * n, 2 * n))
    M[:n, n:] = np.eye(n)
    M[n:, :n] = np.eye(n)
    return M


def cone_contains_cone(outer, inner, tol=1e-9):
    """Generator test for ``inner subset outer`` (both convex cones)."""
    lin, rays = inner.generators()
    for g in itertools.chain(rays, lin, -lin):
        if not outer.contains(g, tol):
            return False
    return True


def union_contains_cone(union, cone, tol=1e-9):
    """Sufficient test: ``cone`` is contained in a single piece of ``union``."""
    return any(cone_contains_cone(p, cone, tol) for p in union.pieces)


def sets_agree(a, b, rng, samples=200, tol=TOL):
    """Mutual sampled membership plus generator containment for cone unions."""
    if not a.pieces or not b.pieces:
        return not a.pieces and not b.pieces
    for p in a.pieces:
        if not union_contains_cone(b, p, 1e-9):
            return False
    for p in b.pieces:
        if not union_contains_cone(a, p, 1e-9):
            return False
    for z in a.sample(rng, samples):
        if not b.contains(z, tol * max(1.0, np.abs(z).max())):
            return False
    for z in b.sample(rng, samples):
        if not a.contains(z, tol * max(1.0, np.abs(z).max())):
            return False
    return True


# ---------------------------------------------------------------------------
# cones at a point


def _check_member(union, z, tol, graph=False):
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.size != union.dim:
        raise ValueError(f"point has dimension {z.size}, expected {union.dim}")
    active = union.active_pieces(z, tol)
    if not active:
        err = PointNotOnGraph if graph else PointNotInSet
        raise err(f"point {z.tolist()} lies on no piece (tol={tol:g})")
    return z, active


def _distinct(cones):
    out = []
    for c in cones:
        if not any(cone_contains_cone(c, o) and cone_contains_cone(o, c) for o in out):
            out.append(c)
    return out


def tangent_cone(union: PolyhedralUnion, z, tol=TOL) -> ConeUnion:
    """Union over pieces containing ``z`` of their tangent cones at ``z``."""
    z, active = _check_member(union, z, tol)
    return ConeUnion(union.dim, _distinct([p.tangent_cone(z, tol) for p in active]))


def _polar_of_union(cones, dim):
    lins, rays = [], []
    for c in cones:
        lin, ray = c.generators()
        lins.append(lin)
        rays.append(ray)
    A_eq = np.vstack(lins) if lins else np.zeros((0, dim))
    A_ub = np.vstack(rays) if rays else np.zeros((0, dim))
    return Polyhedron(dim, A_ub=A_ub, A_eq=A_eq)


def regular_normal_cone(union: PolyhedralUnion, z, tol=TOL) -> Polyhedron:
    """Polar of the tangent cone; a single convex polyhedral cone."""
    z, active = _check_member(union, z, tol)
    return _polar_of_union([p.tangent_cone(z, tol) for p in active], union.dim)


def limiting_normal_cone(union: PolyhedralUnion, z, tol=TOL) -> ConeUnion:
    """Limiting normal cone, as a union of regular normal cones over strata."""
    z, active = _check_member(union, z, tol)
    return _limiting_from_tangents([p.tangent_cone(z, tol) for p in active], union.dim)


def _limiting_from_tangents(tangents, dim):
    tangents = _distinct(tangents)
    if len(tangents) == 1:
        # convex locally: limiting and regular cones coincide
        return ConeUnion(dim, [tangents[0].polar()])

    hyper, allowed = _arrangement(tangents, dim)
    cones = {}
    for signs, alive in _cells(hyper, allowed, dim):
        key = []
        local = []
        for j in alive:
            T = tangents[j]
            act = [i for i, (h, sgn) in enumerate(_row_map(T, hyper)) if signs[h] == 0]
            key.append((j, tuple(act)))
            local.append(Polyhedron(dim, A_ub=T.A_ub[act], A_eq=T.A_eq))
        key = tuple(key)
        if key not in cones:
            cones[key] = _polar_of_union(local, dim)
    return ConeUnion(dim, _prune_contained(list(cones.values())))


def _prune_contained(cones):
    cones = _distinct(cones)
    keep = []
    for i, c in enumerate(cones):
        if not any(j != i and cone_contains_cone(o, c) for j, o in enumerate(cones)):
            keep.append(c)
    return keep


def _normalize(a):
    a = a / np.linalg.norm(a)
    # canonical sign: first significant entry positive
    k = np.flatnonzero(np.abs(a) > 1e-12)[0]
    return a if a[k] > 0 else -a


def _row_map(T, hyper):
    """For each inequality row of T: (hyperplane index, orientation sign)."""
    out = []
    for a in T.A_ub:
        u = _normalize(a)
        h = _find(hyper, u)
        out.append((h, 1 if np.dot(u, a) > 0 else -1))
    return out


def _find(hyper, u):
    for i, h in enumerate(hyper):
        if np.allclose(h, u, atol=1e-9):
            return i
    return -1


def _arrangement(tangents, dim):
    hyper = []
    for T in tangents:
        for a in itertools.chain(T.A_eq, T.A_ub):
            u = _normalize(a)
            if _find(hyper, u) < 0:
                hyper.append(u)
    # equality hyperplanes first: they prune pieces early
    allowed = []
    for T in tangents:
        sets = [{-1, 0, 1} for _ in hyper]
        for a in T.A_eq:
            sets[_find(hyper, _normalize(a))] = {0}
        for h, orient in _row_map(T, hyper):
            # a.w <= 0 with a = orient * hyper[h]
            sets[h] &= {-1, 0} if orient > 0 else {0, 1}
        allowed.append(sets)
    return np.array(hyper), allowed


def _cells(hyper, allowed, dim):
    """Yield (sign vector, alive pieces) for nonempty cells inside the union."""
    H = len(hyper)
    order = sorted(range(H), key=lambda h: -sum(len(a[h]) == 1 for a in allowed))
    results = []

    def lp(fixed):
        A_eq = [hyper[h] for h, s in fixed if s == 0]
        A_ub = [-s * hyper[h] for h, s in fixed if s != 0]
        res = linprog(np.zeros(dim),
                      A_ub=np.array(A_ub) if A_ub else None,
                      b_ub=-CELL_MARGIN * np.ones(len(A_ub)) if A_ub else None,
                      A_eq=np.array(A_eq) if A_eq else None,
                      b_eq=np.zeros(len(A_eq)) if A_eq else None,
                      bounds=[(-CELL_BOX, CELL_BOX)] * dim, method="highs")
        return res.x if res.status == 0 else None

    def sign_of(val):
        if abs(val) <= 1e-12:
            return 0
        if val >= CELL_MARGIN * 0.5:
            return 1
        if val <= -CELL_MARGIN * 0.5:
            return -1
        return None

    def dfs(pos, fixed, alive, witness):
        if pos == H:
            signs = dict(fixed)
            results.append((signs, alive))
            return
        h = order[pos]
        wsign = sign_of(hyper[h] @ witness)
        for s in (0, -1, 1):
            nxt = [j for j in alive if s in allowed[j][h]]
            if not nxt:
                continue
            cand = fixed + [(h, s)]
            w = witness if wsign == s else lp(cand)
            if w is None:
                continue
            dfs(pos + 1, cand, nxt, w)

    dfs(0, [], list(range(len(allowed))), np.zeros(dim))
    return results


# ---------------------------------------------------------------------------
# coderivative-based objects on graphs in R^n x R^n


@dataclass(frozen=True)
class DirectionSet:
    """Newton directions ``{d : (-v, -d) in N_gph(x, v)}`` as a union of pieces."""

    dim: int
    pieces: tuple = field(default_factory=tuple)
    unbounded: bool = False

    def is_empty(self):
        return len(self.pieces) == 0

    def contains(self, d, tol=1e-9):
        return any(p.contains(d, tol) for p in self.pieces)

    def translate(self, t):
        return DirectionSet(self.dim, tuple(p.translate(t) for p in self.pieces),
                            self.unbounded)

    @classmethod
    def singleton(cls, d):
        d = np.asarray(d, dtype=float).reshape(-1)
        return cls(d.size, (Polyhedron.point(d),), False)


def _split_graph_point(graph, x, v):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    n = x.size
    if v.size != n or graph.dim != 2 * n:
        raise ValueError(f"graph of dimension {graph.dim} cannot host points of size {n}+{v.size}")
    return x, v, n


def slice_cone(cone: Polyhedron, first, n):
    """``{u : (first, -u) in cone}`` as a polyhedron in ``R^n``."""
    M1, M2 = cone.A_ub[:, :n], cone.A_ub[:, n:]
    E1, E2 = cone.A_eq[:, :n], cone.A_eq[:, n:]
    return Polyhedron(n, A_ub=-M2, b_ub=-(M1 @ first), A_eq=-E2, b_eq=-(E1 @ first))


def direction_set(graph: PolyhedralUnion, x, v, tol=TOL) -> DirectionSet:
    """Feasible Newton directions at ``(x, v)`` on the graph."""
    x, v, n = _split_graph_point(graph, x, v)
    z = np.concatenate([x, v])
    if not graph.contains(z, tol):
        raise PointNotOnGraph(f"({x.tolist()}, {v.tolist()}) is not on the graph")
    cone = limiting_normal_cone(graph, z, tol)
    pieces = []
    unbounded = False
    for P in cone.pieces:
        S = slice_cone(P, -v, n)
        if S.is_empty():
            continue
        pieces.append(S)
        if not S.recession_cone().is_trivial_cone():
            unbounded = True
    return DirectionSet(n, tuple(pieces), unbounded)


SELECTION_RULES = ("min-norm", "first", "scripted")


def select_direction(gamma: DirectionSet, rule="min-norm", k=0, script=None):
    """Pick a direction from ``gamma``.

    ``min-norm`` returns the minimum-norm element over all pieces (ties by
    lexicographic order), ``first`` the minimum-norm element of the first
    nonempty piece, ``scripted`` entry ``k`` of ``script`` (cycled) once it
    passes the membership recheck.
    """
    if rule == "scripted":
        if not script:
            raise ValueError("scripted selection needs a non-empty script")
        d = np.asarray(script[k % len(script)], dtype=float).reshape(-1)
        if gamma.is_empty():
            raise Infeasible("direction set is empty")
        if not gamma.contains(d):
            raise ScriptViolation(f"scripted direction {d.tolist()} is not admissible at step {k}")
        return d
    if rule not in SELECTION_RULES:
        raise ValueError(f"unknown selection rule {rule!r}")
    best, best_norm = None, np.inf
    for P in gamma.pieces:
        d = P.min_norm_point()
        if d is None:
            continue
        if rule == "first":
            return d
        nd = np.linalg.norm(d)
        if nd < best_norm - 1e-12 or (abs(nd - best_norm) <= 1e-12 and _lex_less(d, best)):
            best, best_norm = d, nd
    if best is None:
        raise Infeasible("direction set is empty")
    return best


def coderivative_kernel_trivial(graph: PolyhedralUnion, x, v, tol=TOL) -> bool:
    """Whether ``{u : 0 in D*F(x, v)(u)} = {0}`` (Mordukhovich criterion)."""
    x, v, n = _split_graph_point(graph, x, v)
    z = np.concatenate([x, v])
    if not graph.contains(z, tol):
        raise PointNotOnGraph(f"({x.tolist()}, {v.tolist()}) is not on the graph")
    for P in limiting_normal_cone(graph, z, tol).pieces:
        if not slice_cone(P, np.zeros(n), n).is_trivial_cone():
            return False
    return True


def graphical_derivative_kernel_trivial(graph: PolyhedralUnion, x, v, tol=TOL) -> bool:
    """Whether ``ker DF(x, v) = {0}`` (Levy-Rockafellar criterion)."""
    x, v, n = _split_graph_point(graph, x, v)
    z = np.concatenate([x, v])
    if not graph.contains(z, tol):
        raise PointNotOnGraph(f"({x.tolist()}, {v.tolist()}) is not on the graph")
    for T in tangent_cone(graph, z, tol).pieces:
        K = Polyhedron(n, A_ub=T.A_ub[:, :n], A_eq=T.A_eq[:, :n])
        if not K.is_trivial_cone():
            return False
    return True


def cone_to_dict(cone: Polyhedron) -> dict:
    """JSON-friendly description of a cone piece."""
    lin, rays = cone.generators()
    return {"A_ub": cone.A_ub.tolist(), "A_eq": cone.A_eq.tolist(),
            "lineality": lin.tolist(), "rays": rays.tolist()}
