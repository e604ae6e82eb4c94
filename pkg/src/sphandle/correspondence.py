"""Colorings by S^2(r) versus SU(2) representations of the knot group.

A coloring ``c`` of the arcs by S^2(r) becomes the representation sending
the Wirtinger generator of each arc to ``exp c(arc)``; the inverse takes
the radius-r logarithm of each generator image.  Both directions are
re-verified numerically rather than trusted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import su2
from .errors import CorrespondenceViolation, DegenerateLogarithmError, NotInRepresentationSpace, SphandleError
from .knots import QuandleRelationSet, WirtingerPresentation
from .solver import ColoringClass, SphericalColoring, classify, coloring_residual, procrustes_rotation

TRACE_TOL = 1e-9
RELATION_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class SU2Representation:
    images: np.ndarray
    presentation: WirtingerPresentation
    max_relation_error: float

    def __post_init__(self):
        a = np.array(self.images, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "images", a)

    @property
    def traces(self) -> np.ndarray:
        return su2.trace(self.images)

    def meridian_image(self) -> np.ndarray:
        return self.images[self.presentation.meridian_index]

    def to_json(self, matrix: bool = False) -> dict:
        gens = []
        for k, q in enumerate(self.images):
            g = {"arc": k, "q": su2.quat_to_json(q)}
            if matrix:
                g["matrix"] = su2.matrix_to_json(q)
            gens.append(g)
        return {"generators": gens, "max_relation_error": float(self.max_relation_error)}


def relation_errors(images, p: WirtingerPresentation) -> np.ndarray:
    """Per-relation ``|over^-eps in over^eps - out|`` in quaternion distance."""
    images = np.asarray(images, dtype=float)
    errs = []
    for rel in p.relations:
        o = images[rel.over_arc]
        a, b = (su2.qconj(o), o) if rel.sign > 0 else (o, su2.qconj(o))
        pred = su2.qmul(su2.qmul(a, images[rel.in_arc]), b)
        errs.append(su2.quat_distance(pred, images[rel.out_arc]))
    return np.array(errs)


def _max(a) -> float:
    return float(np.max(a)) if len(a) else 0.0


def coloring_to_rep(c: SphericalColoring, p: WirtingerPresentation, strict: bool = True) -> SU2Representation:
    if c.n_arcs != p.n_generators:
        raise SphandleError(f"coloring has {c.n_arcs} arcs, presentation has {p.n_generators} generators")
    images = su2.exp_tangent(c.assignment)
    err = _max(relation_errors(images, p))
    if strict and err > max(10.0 * np.sqrt(c.residual), RELATION_FLOOR):
        raise CorrespondenceViolation(f"relation error {err:.3g} exceeds bound for coloring residual {c.residual:.3g}")
    return SU2Representation(images, p, err)


def rep_to_coloring(rho: SU2Representation, r: float, tol: float = TRACE_TOL) -> SphericalColoring:
    if not 0.0 < r < np.pi:
        raise NotInRepresentationSpace(f"r must lie in (0, pi), got {r}")
    dev = np.abs(rho.traces - 2.0 * np.cos(r))
    if np.any(dev > tol):
        raise NotInRepresentationSpace(f"generator trace differs from 2cos(r) by {np.max(dev):.3g}")
    if np.any(np.linalg.norm(rho.images[:, 1:], axis=-1) < 1e-12):
        raise DegenerateLogarithmError("a generator image is +-identity")
    X = su2.log_unit(rho.images, r, tol)
    rels = QuandleRelationSet(rho.presentation.n_generators, rho.presentation.relations)
    return SphericalColoring(X, r, coloring_residual(X, rels, r))


def commutator(a, b):
    return su2.qmul(su2.qmul(a, b), su2.qmul(su2.qconj(a), su2.qconj(b)))


def is_abelian(rho: SU2Representation, tol: float = 1e-9) -> bool:
    """True iff every pair of generator images commutes (commutator within ``tol`` of +1)."""
    imgs = rho.images
    n = len(imgs)
    for i in range(n):
        for j in range(i + 1, n):
            if su2.quat_distance(commutator(imgs[i], imgs[j]), su2.IDENTITY) > tol:
                return False
    return True


def conjugation_defect(rho: SU2Representation, sigma: SU2Representation, g) -> float:
    """max over generators of ``|g^-1 rho(x) g - sigma(x)|``."""
    conj = su2.qmul(su2.qmul(su2.qconj(g), rho.images), g)
    return float(np.max(su2.quat_distance(conj, sigma.images)))


def lift_rotation(c: SphericalColoring, c_rot: SphericalColoring, eps: float = 1e-9):
    """Recover the rotation between two colorings and lift it to SU(2).

    Returns ``(g, point_error)`` with ``adjoint(c, g) ≈ c_rot``; ``-g`` is the
    other lift.
    """
    R = procrustes_rotation(c.assignment, c_rot.assignment)
    point_err = float(np.max(np.linalg.norm(c.assignment @ R.T - c_rot.assignment, axis=-1)))
    return su2.from_rotation_matrix(R), point_err


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    return su2.rotation_matrix(su2.random_unit_quaternions(rng, 1)[0])


@dataclass
class AuditReport:
    r: float
    clauses: dict = field(default_factory=dict)

    def record(self, name: str, ok: bool, residual: float | None = None, **extra):
        self.clauses[name] = {"ok": bool(ok), "residual": None if residual is None else float(residual), **extra}

    @property
    def failed(self) -> list[str]:
        return [k for k, v in self.clauses.items() if not v["ok"]]

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_json(self) -> dict:
        return {"r": self.r, "ok": self.ok, "clauses": self.clauses}


def equivalence_audit(
    c: SphericalColoring,
    p: WirtingerPresentation,
    seed: int = 0,
    trace_tol: float = 1e-10,
    relation_tol: float = 1e-9,
    round_trip_tol: float = 1e-10,
    conjugacy_tol: float = 1e-9,
) -> AuditReport:
    """Run every clause and record the outcome of each; never raises on a failed clause."""
    r = c.r
    report = AuditReport(r)
    rho = coloring_to_rep(c, p, strict=False)

    tr_dev = float(np.max(np.abs(rho.traces - 2.0 * np.cos(r))))
    report.record("trace", tr_dev < trace_tol, tr_dev)

    report.record("relations", rho.max_relation_error < relation_tol, rho.max_relation_error)

    trivial = classify(c) is ColoringClass.TRIVIAL
    abelian = is_abelian(rho)
    report.record("triviality", trivial == abelian, None, trivial=trivial, abelian=abelian)

    try:
        back = rep_to_coloring(rho, r)
        d1 = float(np.max(np.linalg.norm(back.assignment - c.assignment, axis=-1)))
        rho2 = coloring_to_rep(back, p, strict=False)
        d2 = float(np.max(su2.quat_distance(rho2.images, rho.images)))
        report.record("round_trip", max(d1, d2) < round_trip_tol, max(d1, d2))
    except SphandleError as exc:
        report.record("round_trip", False, None, error=str(exc))

    rng = np.random.default_rng(seed)
    R = random_rotation(rng)
    c_rot = c.rotated(R)
    rho_rot = coloring_to_rep(c_rot, p, strict=False)
    g, point_err = lift_rotation(c, c_rot)
    defect = min(conjugation_defect(rho, rho_rot, g), conjugation_defect(rho, rho_rot, -g))
    report.record("conjugacy", defect < conjugacy_tol and point_err < conjugacy_tol, defect, point_error=point_err)
    return report
