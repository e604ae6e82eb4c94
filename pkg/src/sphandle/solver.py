"""Quandle colorings of knot diagrams.

Finite targets are enumerated exactly by backtracking.  Spherical targets
S^2(r) are searched numerically: each crossing contributes the residual

    R(-2 r eps, x_over / r) x_in - x_out

(``R(angle, axis)`` a rotation, ``eps`` the crossing sign) and the sum of
squares is minimized by Levenberg-Marquardt steps in the tangent spaces of
the spheres, followed by re-projection to radius r.  Multi-start search is
not a completeness proof: it finds the orbits whose basins the random
starts happen to hit.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import spherical
from .errors import ConfigError, MixedRadiusError
from .knots import KnotDiagram, QuandleRelationSet, quandle_relations
from .quandle import FiniteQuandle

log = logging.getLogger(__name__)

THREADS_ENV = "SPHANDLE_THREADS"


@dataclass(frozen=True)
class FiniteColoring:
    assignment: tuple[int, ...]


def _propagate(assign, triples, q: FiniteQuandle) -> bool:
    changed = True
    while changed:
        changed = False
        for t in triples:
            a, o, u = assign[t.in_arc], assign[t.over_arc], assign[t.out_arc]
            if o < 0:
                continue
            if a >= 0:
                val = int(q.op(a, o) if t.sign > 0 else q.op_inv(a, o))
                if u < 0:
                    assign[t.out_arc] = val
                    changed = True
                elif u != val:
                    return False
            elif u >= 0:
                assign[t.in_arc] = int(q.op_inv(u, o) if t.sign > 0 else q.op(u, o))
                changed = True
    return True


def enumerate_finite(d: KnotDiagram, q: FiniteQuandle) -> list[FiniteColoring]:
    """All colorings of ``d`` by ``q``, in lexicographic order."""
    triples = quandle_relations(d).triples
    n = d.n_arcs
    out = []

    def search(assign):
        if not _propagate(assign, triples, q):
            return
        try:
            k = assign.index(-1)
        except ValueError:
            out.append(FiniteColoring(tuple(assign)))
            return
        for v in range(q.n):
            nxt = list(assign)
            nxt[k] = v
            search(nxt)

    search([-1] * n)
    out.sort(key=lambda c: c.assignment)
    return out


class ColoringClass(Enum):
    TRIVIAL = "TRIVIAL"
    NONTRIVIAL = "NONTRIVIAL"


@dataclass(frozen=True, eq=False)
class SphericalColoring:
    assignment: np.ndarray
    r: float
    residual: float
    hits: int = field(default=0, compare=False)

    def __post_init__(self):
        a = np.array(self.assignment, dtype=float)
        if a.ndim != 2 or a.shape[1] != 3:
            raise ValueError(f"assignment must have shape (n_arcs, 3), got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    @property
    def n_arcs(self) -> int:
        return self.assignment.shape[0]

    def rotated(self, m) -> "SphericalColoring":
        return SphericalColoring(self.assignment @ np.asarray(m).T, self.r, self.residual, self.hits)

    def to_json(self) -> dict:
        return {
            "arcs": [{"v": [float(c) for c in v]} for v in self.assignment],
            "residual": float(self.residual),
            "class": classify(self).value,
        }

    @classmethod
    def from_json(cls, d: dict, r: float) -> "SphericalColoring":
        return cls(np.array([a["v"] for a in d["arcs"]], dtype=float), float(r), float(d.get("residual", 0.0)))


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 64
    max_iters: int = 500
    tol_residual: float = 1e-12
    tol_accept: float = 1e-9
    seed: int = 0
    dedupe_eps: float = 1e-6
    # converged points this close (relative to r) to a constant coloring are
    # merged into the analytically injected constant orbit
    snap_eps: float = 1e-3

    def __post_init__(self):
        if self.starts < 1:
            raise ConfigError("starts must be at least 1")
        for name in ("max_iters", "tol_residual", "tol_accept", "dedupe_eps", "snap_eps"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _relation_arrays(rels: QuandleRelationSet):
    t = rels.triples
    return (
        np.array([x.in_arc for x in t], dtype=int),
        np.array([x.over_arc for x in t], dtype=int),
        np.array([x.out_arc for x in t], dtype=int),
        np.array([x.sign for x in t], dtype=float),
    )


def _skew(x):
    z = np.zeros(x.shape[:-1])
    return np.stack([
        np.stack([z, -x[..., 2], x[..., 1]], axis=-1),
        np.stack([x[..., 2], z, -x[..., 0]], axis=-1),
        np.stack([-x[..., 1], x[..., 0], z], axis=-1),
    ], axis=-2)


def _rotation_matrices(axis, angle):
    c = np.cos(angle)[:, None, None]
    s = np.sin(angle)[:, None, None]
    outer = axis[:, :, None] * axis[:, None, :]
    return c * np.eye(3) + s * _skew(axis) + (1.0 - c) * outer


def residual_vector(X, rels: QuandleRelationSet, r: float) -> np.ndarray:
    """Stacked crossing residuals, shape ``(3 * n_crossings,)``; ambient formula."""
    I, O, U, S = _relation_arrays(rels)
    if len(I) == 0:
        return np.zeros(0)
    X = np.asarray(X, dtype=float)
    pred = spherical.rotate(X[I], X[O] / r, -2.0 * r * S)
    return (pred - X[U]).reshape(-1)


def jacobian(X, rels: QuandleRelationSet, r: float) -> np.ndarray:
    """Analytic Jacobian of :func:`residual_vector` in ambient coordinates, ``(3m, 3n)``."""
    I, O, U, S = _relation_arrays(rels)
    X = np.asarray(X, dtype=float)
    n, m = X.shape[0], len(I)
    J = np.zeros((3 * m, 3 * n))
    if m == 0:
        return J
    theta = -2.0 * r * S
    a = X[O] / r
    x = X[I]
    c = np.cos(theta)[:, None, None]
    s = np.sin(theta)[:, None, None]
    R = _rotation_matrices(a, theta)
    ax = np.sum(a * x, axis=-1)[:, None, None]
    dA = -s * _skew(x) + (1.0 - c) * (ax * np.eye(3) + a[:, :, None] * x[:, None, :])
    dO = dA / r
    for k in range(m):
        rows = slice(3 * k, 3 * k + 3)
        J[rows, 3 * I[k]:3 * I[k] + 3] += R[k]
        J[rows, 3 * O[k]:3 * O[k] + 3] += dO[k]
        J[rows, 3 * U[k]:3 * U[k] + 3] -= np.eye(3)
    return J


def coloring_residual(X, rels: QuandleRelationSet, r: float) -> float:
    """Max crossing error, recomputed with the quaternion form of the quandle operation."""
    I, O, U, S = _relation_arrays(rels)
    if len(I) == 0:
        return 0.0
    X = np.asarray(X, dtype=float)
    pos = S > 0
    pred = np.empty((len(I), 3))
    if pos.any():
        pred[pos] = spherical.op_augmented(X[I[pos]], X[O[pos]])
    if (~pos).any():
        pred[~pos] = spherical.op_augmented_inv(X[I[~pos]], X[O[~pos]])
    return float(np.max(np.linalg.norm(pred - X[U], axis=-1)))


def _tangent_bases(X):
    u = X / np.linalg.norm(X, axis=-1, keepdims=True)
    helper = np.where(np.abs(u[:, :1]) < 0.9, np.array([[1.0, 0, 0]]), np.array([[0, 1.0, 0]]))
    b1 = np.cross(u, helper)
    b1 /= np.linalg.norm(b1, axis=-1, keepdims=True)
    b2 = np.cross(u, b1)
    return np.stack([b1, b2], axis=-1)  # (n, 3, 2)


def _max_norm(f):
    return float(np.max(np.linalg.norm(f.reshape(-1, 3), axis=-1))) if f.size else 0.0


def _project(X, r):
    return r * X / np.linalg.norm(X, axis=-1, keepdims=True)


def refine(X0, rels: QuandleRelationSet, r: float, cfg: SolverConfig):
    """Damped Gauss-Newton from ``X0``; returns ``(X, max crossing error)``."""
    X = _project(np.asarray(X0, dtype=float), r)
    n = X.shape[0]
    f = residual_vector(X, rels, r)
    cost = f @ f
    lam = 1e-3
    history = []
    for it in range(cfg.max_iters):
        err = _max_norm(f)
        if err < cfg.tol_residual:
            break
        # linear convergence onto a degenerate zero: stop once acceptable
        history.append(cost)
        if it >= 20 and err < cfg.tol_accept and cost > 1e-3 * history[-21]:
            break
        B = _tangent_bases(X)
        J = jacobian(X, rels, r)
        Jt = np.einsum("mkj,kjt->mkt", J.reshape(-1, n, 3), B).reshape(J.shape[0], 2 * n)
        H = Jt.T @ Jt
        g = Jt.T @ f
        while True:
            step = np.linalg.solve(H + lam * np.eye(2 * n), -g)
            Xn = _project(X + np.einsum("kjt,kt->kj", B, step.reshape(n, 2)), r)
            fn = residual_vector(Xn, rels, r)
            cn = fn @ fn
            if cn < cost:
                X, f, cost = Xn, fn, cn
                lam = max(lam / 3.0, 1e-12)
                break
            lam *= 4.0
            if lam > 1e10:
                return X, _max_norm(f)
    return X, _max_norm(f)


def classify(c: SphericalColoring, tol: float = 1e-9) -> ColoringClass:
    """TRIVIAL iff every color equals the first one or its antipode."""
    A = c.assignment
    p = A[0]
    same = np.linalg.norm(A - p, axis=-1) <= tol
    anti = np.linalg.norm(A + p, axis=-1) <= tol
    return ColoringClass.TRIVIAL if np.all(same | anti) else ColoringClass.NONTRIVIAL


def gauge_frame(A, collinear_tol: float = 1e-6) -> np.ndarray:
    """Rotation taking the first color to the north pole and the first color
    not collinear with it into the half-plane ``y = 0, x > 0``."""
    A = np.asarray(A, dtype=float)
    p = A[0] / np.linalg.norm(A[0])
    for v in A[1:]:
        u = v / np.linalg.norm(v)
        perp = u - np.dot(u, p) * p
        if np.linalg.norm(perp) > collinear_tol:
            e1 = perp / np.linalg.norm(perp)
            return np.stack([e1, np.cross(p, e1), p])
    # all colors on the line through p: minimal rotation p -> e3
    e3 = np.array([0.0, 0.0, 1.0])
    axis = np.cross(p, e3)
    s, c = np.linalg.norm(axis), float(np.dot(p, e3))
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    return _rotation_matrices((axis / s)[None], np.array([np.arctan2(s, c)]))[0]


def gauge_fix(c: SphericalColoring) -> SphericalColoring:
    out = c.rotated(gauge_frame(c.assignment))
    # re-project so |v| = r holds exactly up to rounding
    return SphericalColoring(_project(out.assignment, c.r), c.r, c.residual, c.hits)


def procrustes_rotation(A, B) -> np.ndarray:
    """Rotation ``R`` (det +1) minimizing ``sum |R a_k - b_k|^2``."""
    H = np.asarray(A, dtype=float).T @ np.asarray(B, dtype=float)
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T)) or 1.0
    return Vt.T @ np.diag([1.0, 1.0, d]) @ U.T


def same_orbit(a: SphericalColoring, b: SphericalColoring, eps: float) -> bool:
    if a.n_arcs != b.n_arcs:
        return False
    R = procrustes_rotation(a.assignment, b.assignment)
    return bool(np.max(np.linalg.norm(a.assignment @ R.T - b.assignment, axis=-1)) < eps)


def orbit_reduce(cs: list[SphericalColoring], eps: float = 1e-6) -> tuple[list[SphericalColoring], list[int]]:
    """Group colorings into SO(3)-orbits; returns gauge-fixed representatives and orbit sizes."""
    if not cs:
        return [], []
    r0 = cs[0].r
    if any(abs(c.r - r0) > 1e-12 for c in cs):
        raise MixedRadiusError("colorings with different r cannot share orbits")
    reps: list[SphericalColoring] = []
    sizes: list[int] = []
    for c in cs:
        for k, rep in enumerate(reps):
            if same_orbit(rep, c, eps):
                sizes[k] += 1
                break
        else:
            reps.append(c)
            sizes.append(1)
    return [gauge_fix(c) for c in reps], sizes


def constant_coloring(n_arcs: int, r: float) -> SphericalColoring:
    return SphericalColoring(np.tile([0.0, 0.0, r], (n_arcs, 1)), r, 0.0)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "")))
    except ValueError:
        return min(4, os.cpu_count() or 1)


def _run_start(seed_seq, n, rels, r, cfg):
    rng = np.random.default_rng(seed_seq)
    X0 = rng.standard_normal((n, 3))
    X, res = refine(X0, rels, r, cfg)
    return X, res


def solve_spherical(d: KnotDiagram, r: float, cfg: SolverConfig | None = None) -> list[SphericalColoring]:
    """Orbit representatives of numerically found S^2(r)-colorings of ``d``.

    The constant orbit comes first; the others follow in order of the
    lowest-indexed start that reached them.  ``hits`` counts the starts
    landing in each orbit.
    """
    cfg = cfg or SolverConfig()
    spherical.check_r(r)
    rels = quandle_relations(d)
    n = d.n_arcs
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.starts)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        runs = list(pool.map(lambda s: _run_start(s, n, rels, r, cfg), seeds))

    const_hits = 0
    found = []
    for X, res in runs:
        if res >= cfg.tol_accept:
            continue
        if np.max(np.linalg.norm(X - X[0], axis=-1)) < cfg.snap_eps * r:
            const_hits += 1
            continue
        exact = coloring_residual(X, rels, r)
        if exact < cfg.tol_accept:
            found.append(SphericalColoring(X, r, exact))
    log.debug("%d/%d starts converged to nonconstant colorings", len(found), cfg.starts)

    reps, sizes = orbit_reduce(found, cfg.dedupe_eps)
    const = constant_coloring(n, r)
    out = [SphericalColoring(const.assignment, r, 0.0, hits=const_hits)]
    for rep, size in zip(reps, sizes):
        if classify(rep) is ColoringClass.TRIVIAL:
            out[0] = SphericalColoring(const.assignment, r, 0.0, hits=out[0].hits + size)
            continue
        out.append(SphericalColoring(rep.assignment, r, coloring_residual(rep.assignment, rels, r), hits=size))
    return out
