"""Closed-form arithmetic in SU(2) and su(2).

A unit quaternion ``q = (w, x, y, z)`` stands for the SU(2) matrix

    [[ w + i x,  y + i z],
     [-y + i z,  w - i x]]

and a tangent vector ``v = (v1, v2, v3)`` for the su(2) matrix

    [[ i v1,        v2 + i v3],
     [-v2 + i v3,  -i v1     ]]

so su(2) is literally the space of pure quaternions.  The radius ``|v|``
is the parameter ``r`` of the orbit S^2(r).  Every function broadcasts
over leading axes: quaternions are ``(..., 4)`` arrays, vectors ``(..., 3)``.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateLogarithmError, OutOfDomainError, TraceMismatchError

LOG_TRACE_TOL = 1e-9

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])
I_UNIT = np.array([0.0, 1.0, 0.0, 0.0])
J_UNIT = np.array([0.0, 0.0, 1.0, 0.0])
K_UNIT = np.array([0.0, 0.0, 0.0, 1.0])


def normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def _raw_mul(a, b):
    aw, av = a[..., :1], a[..., 1:]
    bw, bv = b[..., :1], b[..., 1:]
    w = aw * bw - np.sum(av * bv, axis=-1, keepdims=True)
    v = aw * bv + bw * av + np.cross(av, bv)
    return np.concatenate([w, v], axis=-1)


def qmul(a, b):
    """Hamilton product, renormalized to unit length."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return normalize(_raw_mul(a, b))


def qconj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


qinv = qconj


def trace(q):
    """Matrix trace of the SU(2) element, ``2 w``."""
    return 2.0 * np.asarray(q, dtype=float)[..., 0]


def radius(v):
    return np.linalg.norm(np.asarray(v, dtype=float), axis=-1)


def pure(v):
    """Embed a 3-vector as the pure quaternion ``(0, v)`` (no normalization)."""
    v = np.asarray(v, dtype=float)
    return np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)


def exp_tangent(v):
    """``exp(v) = cos r + sin(r) v/r`` with ``r = |v|``; zero maps to the identity."""
    v = np.asarray(v, dtype=float)
    r = radius(v)[..., None]
    safe = np.where(r > 0, r, 1.0)
    # sinc keeps tiny radii accurate
    scale = np.where(r > 0, np.sin(r) / safe, 1.0)
    return np.concatenate([np.cos(r), scale * v], axis=-1)


def log_unit(g, r: float, tol: float = LOG_TRACE_TOL):
    """Inverse of ``exp_tangent`` restricted to the radius-``r`` sphere.

    Raises :class:`TraceMismatchError` when ``tr g`` is not ``2 cos r`` and
    :class:`DegenerateLogarithmError` for ``g = ±1``.
    """
    if not 0.0 < r < np.pi:
        raise OutOfDomainError(f"r must lie in (0, pi), got {r}")
    g = np.asarray(g, dtype=float)
    err = np.abs(trace(g) - 2.0 * np.cos(r))
    if np.any(err > tol):
        raise TraceMismatchError(f"trace differs from 2cos(r) by {np.max(err):.3g}")
    vec = g[..., 1:]
    n = np.linalg.norm(vec, axis=-1, keepdims=True)
    # |vector part| = sin r for a genuine point of exp S^2(r)
    if np.any(n <= 1e-12):
        raise DegenerateLogarithmError("vector part vanishes; g = +-identity")
    return r * vec / n


def adjoint(v, g):
    """Right adjoint action ``v . g = g^-1 v g``, renormalized to ``|v|``."""
    v = np.asarray(v, dtype=float)
    g = np.asarray(g, dtype=float)
    out = _raw_mul(_raw_mul(qconj(g), pure(v)), g)[..., 1:]
    r = radius(v)[..., None]
    n = np.linalg.norm(out, axis=-1, keepdims=True)
    return np.where(n > 0, out * (r / np.where(n > 0, n, 1.0)), out)


def rotation_matrix(g):
    """3x3 matrix ``M`` with ``adjoint(v, g) = M @ v``."""
    g = np.asarray(g, dtype=float)
    basis = np.eye(3)
    cols = _raw_mul(_raw_mul(qconj(g)[..., None, :], pure(basis)), g[..., None, :])[..., 1:]
    return np.swapaxes(cols, -1, -2)


def from_rotation_matrix(m):
    """Return ``g`` with ``rotation_matrix(g) == m`` (one of the two lifts ``±g``)."""
    m = np.asarray(m, dtype=float)
    # q v q^-1 = m v for q = g^-1; standard Shepperd extraction of q
    t = np.trace(m)
    cands = np.array([
        1.0 + t,
        1.0 + 2 * m[0, 0] - t,
        1.0 + 2 * m[1, 1] - t,
        1.0 + 2 * m[2, 2] - t,
    ])
    k = int(np.argmax(cands))
    s = 2.0 * np.sqrt(max(cands[k], 0.0))
    if k == 0:
        q = [s / 4, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
    elif k == 1:
        q = [(m[2, 1] - m[1, 2]) / s, s / 4, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
    elif k == 2:
        q = [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, s / 4, (m[1, 2] + m[2, 1]) / s]
    else:
        q = [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, s / 4]
    return qconj(normalize(np.array(q)))


def to_matrix(q):
    """Complex 2x2 matrix of a quaternion."""
    w, x, y, z = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack([
        np.stack([w + 1j * x, y + 1j * z], axis=-1),
        np.stack([-y + 1j * z, w - 1j * x], axis=-1),
    ], axis=-2)


def tangent_to_matrix(v):
    v1, v2, v3 = np.moveaxis(np.asarray(v, dtype=float), -1, 0)
    return np.stack([
        np.stack([1j * v1, v2 + 1j * v3], axis=-1),
        np.stack([-v2 + 1j * v3, -1j * v1], axis=-1),
    ], axis=-2)


def quat_distance(a, b):
    return np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), axis=-1)


def D(r: float):
    """The diagonal point ``diag(i r, -i r)`` of S^2(r)."""
    return np.array([float(r), 0.0, 0.0])


def random_unit_quaternions(rng: np.random.Generator, size):
    return normalize(rng.standard_normal(tuple(np.atleast_1d(size)) + (4,)))


def random_sphere(rng: np.random.Generator, size, r: float = 1.0):
    v = rng.standard_normal(tuple(np.atleast_1d(size)) + (3,))
    return r * v / np.linalg.norm(v, axis=-1, keepdims=True)


def isotropy_is_diagonal(r: float, samples: int = 200, seed: int = 0) -> bool:
    """Sample-check that the stabilizers of D(r) and exp D(r) are the diagonal subgroup.

    Diagonal elements ``cos t + sin t i`` must fix both; random elements with
    a non-negligible off-diagonal part must move both.
    """
    if np.isclose(np.sin(r), 0.0, atol=1e-12):
        raise OutOfDomainError(f"r = {r} lies in pi*Z")
    rng = np.random.default_rng(seed)
    X = D(r)
    gX = exp_tangent(X)

    t = rng.uniform(-np.pi, np.pi, samples)
    diag = np.stack([np.cos(t), np.sin(t), np.zeros_like(t), np.zeros_like(t)], axis=-1)
    fixes_X = np.all(np.linalg.norm(adjoint(np.broadcast_to(X, (samples, 3)), diag) - X, axis=-1) < 1e-12)
    conj = _raw_mul(_raw_mul(qconj(diag), gX), diag)
    fixes_gX = np.all(quat_distance(conj, gX) < 1e-12)

    g = random_unit_quaternions(rng, samples)
    g = g[np.linalg.norm(g[:, 2:], axis=-1) > 0.1]
    moved_X = np.linalg.norm(adjoint(np.broadcast_to(X, g.shape[:1] + (3,)), g) - X, axis=-1)
    moved_gX = quat_distance(_raw_mul(_raw_mul(qconj(g), gX), g), gX)
    # movement of exp D(r) scales with sin r
    floor = 1e-6 * abs(np.sin(r))
    moves = bool(np.all(moved_X > 1e-6 * abs(r)) and np.all(moved_gX > floor))
    return bool(fixes_X and fixes_gX and moves)


def quat_to_json(q) -> dict:
    w, x, y, z = (float(c) for c in q)
    return {"w": w, "x": x, "y": y, "z": z}


def quat_from_json(d: dict):
    return np.array([d["w"], d["x"], d["y"], d["z"]], dtype=float)


def matrix_to_json(q) -> list:
    """Matrix entries row-major as ``[re, im]`` pairs."""
    m = to_matrix(q)
    return [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
