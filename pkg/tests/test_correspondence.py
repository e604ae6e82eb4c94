import numpy as np
import pytest

from sphandle import knots, su2
from sphandle.correspondence import (
    SU2Representation,
    coloring_to_rep,
    commutator,
    equivalence_audit,
    is_abelian,
    relation_errors,
    rep_to_coloring,
)
from sphandle.errors import CorrespondenceViolation, DegenerateLogarithmError, NotInRepresentationSpace
from sphandle.solver import SolverConfig, SphericalColoring, constant_coloring, solve_spherical

RNG = np.random.default_rng(5)
TREFOIL = knots.builtin("trefoil")
P3 = knots.wirtinger(TREFOIL)


def test_constant_coloring_is_abelian():
    r = 0.9
    c = SphericalColoring(np.tile(su2.D(r), (3, 1)), r, 0.0)
    rho = coloring_to_rep(c, P3)
    assert np.allclose(rho.images, su2.exp_tangent(su2.D(r)))
    assert rho.max_relation_error < 1e-15
    assert is_abelian(rho)
    back = rep_to_coloring(rho, r)
    assert np.allclose(back.assignment, su2.D(r))


def test_equatorial_trefoil_rep(equatorial_trefoil):
    rho = coloring_to_rep(equatorial_trefoil, P3)
    assert np.max(np.abs(rho.traces)) < 1e-15
    assert rho.max_relation_error < 1e-12
    # oracle: for pure units a, b, [a, b] = -1 + ... with w = 2<a,b>^2 - 1 = -1/2 at 120 degrees
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = rho.images[i], rho.images[j]
            assert commutator(a, b)[0] == pytest.approx(2 * np.dot(a[1:], b[1:]) ** 2 - 1, abs=1e-14)
            assert commutator(a, b)[0] == pytest.approx(-0.5, abs=1e-14)
    assert not is_abelian(rho)


def test_unknot_single_image():
    p = knots.wirtinger(knots.builtin("unknot"))
    rho = coloring_to_rep(constant_coloring(1, 1.0), p)
    assert rho.images.shape == (1, 4) and rho.max_relation_error == 0.0


def test_two_valued_rep_is_abelian():
    r = 1.2
    imgs = su2.exp_tangent(np.stack([su2.D(r), -su2.D(r), su2.D(r)]))
    # diagonal matrices commute
    M = su2.to_matrix(imgs)
    assert np.allclose(M[0] @ M[1], M[1] @ M[0])
    assert is_abelian(SU2Representation(imgs, P3, 0.0))


def test_anticommuting_images_are_not_abelian():
    imgs = np.stack([su2.I_UNIT, su2.J_UNIT, su2.I_UNIT])
    assert not is_abelian(SU2Representation(imgs, P3, 0.0))


def test_rep_to_coloring_rejects_wrong_trace():
    imgs = su2.exp_tangent(su2.random_sphere(RNG, 3, np.pi / 2))
    imgs[1] = [0.15, np.sqrt(1 - 0.15**2), 0.0, 0.0]
    assert su2.trace(imgs[1]) == pytest.approx(0.3)
    with pytest.raises(NotInRepresentationSpace):
        rep_to_coloring(SU2Representation(imgs, P3, 0.0), np.pi / 2)


def test_rep_to_coloring_rejects_identity():
    imgs = np.tile(su2.IDENTITY, (3, 1))
    with pytest.raises(DegenerateLogarithmError):
        rep_to_coloring(SU2Representation(imgs, P3, 0.0), 1e-12)


def test_broken_coloring_is_rejected():
    X = su2.random_sphere(RNG, 3, 1.0)
    with pytest.raises(CorrespondenceViolation):
        coloring_to_rep(SphericalColoring(X, 1.0, 1e-14), P3)


def test_relation_errors_match_quandle_residual():
    d = knots.builtin("6_1")
    p = knots.wirtinger(d)
    X = su2.random_sphere(RNG, d.n_arcs, 0.7)
    errs = relation_errors(su2.exp_tangent(X), p)
    assert errs.shape == (6,) and np.all(errs > 0)


@pytest.mark.parametrize("name", ["trefoil", "figure8", "5_2"])
@pytest.mark.parametrize("r", [np.pi / 3, 2.0])
def test_round_trips(name, r):
    d = knots.builtin(name)
    p = knots.wirtinger(d)
    for c in solve_spherical(d, r, SolverConfig(starts=24, seed=1)):
        rho = coloring_to_rep(c, p)
        back = rep_to_coloring(rho, r)
        assert np.max(np.abs(back.assignment - c.assignment)) < 1e-10
        again = coloring_to_rep(back, p)
        assert np.max(su2.quat_distance(again.images, rho.images)) < 1e-10


def test_audit_examples(equatorial_trefoil):
    r = 0.8
    rep = equivalence_audit(constant_coloring(3, r), P3, seed=2)
    assert rep.ok and rep.clauses["triviality"]["trivial"] and rep.clauses["triviality"]["abelian"]
    rep = equivalence_audit(equatorial_trefoil, P3, seed=2)
    assert rep.ok
    assert not rep.clauses["triviality"]["trivial"] and not rep.clauses["triviality"]["abelian"]
    assert rep.clauses["conjugacy"]["residual"] < 1e-9


def test_audit_flags_tampered_coloring(equatorial_trefoil):
    A = equatorial_trefoil.assignment.copy()
    A[1] *= 1.1
    rep = equivalence_audit(SphericalColoring(A, equatorial_trefoil.r, 0.0), P3)
    assert "trace" in rep.failed and not rep.ok


def test_representation_json(equatorial_trefoil):
    js = coloring_to_rep(equatorial_trefoil, P3).to_json(matrix=True)
    assert [g["arc"] for g in js["generators"]] == [0, 1, 2]
    assert set(js["generators"][0]["q"]) == {"w", "x", "y", "z"}
    assert len(js["generators"][0]["matrix"]) == 4
