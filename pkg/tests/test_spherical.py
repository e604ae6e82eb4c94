import numpy as np
import pytest

from sphandle import spherical as sph
from sphandle import su2
from sphandle.errors import MixedRadiusError, OutOfDomainError

RNG = np.random.default_rng(7)
R_GRID = np.linspace(0.1, np.pi - 0.1, 20)


def test_azcan_fenn_examples():
    assert np.allclose(sph.op_azcan_fenn([1, 0, 0], [0, 1, 0]), [-1, 0, 0])
    s = 1 / np.sqrt(2)
    assert np.allclose(sph.op_azcan_fenn([1, 0, 0], [s, s, 0]), [0, 1, 0])
    x = su2.random_sphere(RNG, 100)
    assert np.allclose(sph.op_azcan_fenn(x, x), x, atol=1e-15)


def test_azcan_fenn_is_involutory():
    x, y = su2.random_sphere(RNG, (2, 10_000))
    assert np.max(np.abs(sph.op_azcan_fenn(sph.op_azcan_fenn(x, y), y) - x)) < 1e-12


def test_augmented_examples():
    X = su2.random_sphere(RNG, 100, 1.3)
    assert np.allclose(sph.op_augmented(X, X), X, atol=1e-14)
    out = sph.op_augmented(su2.D(np.pi / 2), [0, np.pi / 2, 0])
    # oracle: conjugate the su(2) matrix by the j-unit matrix
    J = su2.to_matrix(su2.J_UNIT)
    expected = np.linalg.inv(J) @ su2.tangent_to_matrix(su2.D(np.pi / 2)) @ J
    assert np.allclose(su2.tangent_to_matrix(out), expected)
    assert np.allclose(out, [-np.pi / 2, 0, 0])


def test_augmented_is_involutory_at_quarter_turn():
    X, Y = su2.random_sphere(RNG, (2, 1000), np.pi / 2)
    twice = sph.op_augmented(sph.op_augmented(X, Y), Y)
    assert np.max(np.abs(twice - X)) < 1e-12


def test_augmented_not_involutory_elsewhere():
    X, Y = su2.random_sphere(RNG, (2, 100), 1.0)
    assert np.max(np.abs(sph.op_augmented(sph.op_augmented(X, Y), Y) - X)) > 0.1


def test_mixed_radius_rejected():
    with pytest.raises(MixedRadiusError):
        sph.op_augmented([1.0, 0, 0], [0, 1.1, 0])


def test_augmented_inverse():
    X, Y = su2.random_sphere(RNG, (2, 500), 2.2)
    assert np.allclose(sph.op_augmented_inv(sph.op_augmented(X, Y), Y), X, atol=1e-12)


def test_clark_saito_examples():
    u = su2.random_sphere(RNG, 50)
    assert np.allclose(sph.op_clark_saito(u, u, 1.0), u, atol=1e-15)
    assert np.allclose(sph.op_clark_saito([1, 0, 0], [0, 0, 1], np.pi), [-1, 0, 0], atol=1e-15)
    assert np.allclose(sph.op_clark_saito([1, 0, 0], [0, 0, 1], np.pi / 2), [0, 1, 0], atol=1e-15)


@pytest.mark.parametrize("psi", [0.0, -0.5, 2 * np.pi, 7.0])
def test_clark_saito_domain(psi):
    with pytest.raises(OutOfDomainError):
        sph.op_clark_saito([1, 0, 0], [0, 1, 0], psi)


def test_orientation_calibration_keeps_right_hand_rule():
    assert sph.calibrate_orientation() == sph.ROTATION_SIGN == 1


@pytest.mark.parametrize("r", R_GRID)
def test_clark_saito_matches_augmented(r):
    assert sph.clark_saito_consistency(r, 1000, seed=3) < 1e-10
    assert sph.clark_saito_consistency(r, 200, seed=3, sign=-1) > 1e-3


def test_h_map():
    assert np.allclose(sph.h_map([1, 0, 0]), su2.D(np.pi / 2))
    y = su2.random_sphere(RNG, 1000)
    g = su2.exp_tangent(sph.h_map(y))
    assert np.allclose(g[:, 0], 0, atol=1e-15)
    assert np.allclose(g[:, 1:], y, atol=1e-15)
    assert np.max(np.abs(sph.h_inverse(sph.h_map(y)) - y)) < 1e-14
    assert sph.h_homomorphism_residual(10_000, seed=5) < 1e-12
    assert sph.exp_h_residual(10_000, seed=5) < 1e-12


def test_h_matrix_layout():
    x = su2.random_sphere(RNG, 1)[0]
    x1, x2, x3 = x
    expected = (np.pi / 2) * np.array([[1j * x1, x2 + 1j * x3], [-x2 + 1j * x3, -1j * x1]])
    assert np.allclose(su2.tangent_to_matrix(sph.h_map(x)), expected)


@pytest.mark.parametrize("r", [np.pi / 2, 1.2, 0.05, 3.0])
def test_inner_rotation_check(r):
    assert sph.inner_rotation_check(r, 100, seed=1)


@pytest.mark.parametrize("r", R_GRID)
def test_inner_map_is_never_identity(r):
    Y = su2.random_sphere(RNG, 1, r)[0]
    m = sph.inner_map_matrix(Y)
    angle = np.arccos(np.clip((np.trace(m) - 1) / 2, -1, 1))
    assert angle == pytest.approx(min(2 * r, 2 * np.pi - 2 * r), abs=1e-7)
    assert np.max(np.abs(m - np.eye(3))) > 1e-3


@pytest.mark.parametrize("r", R_GRID)
def test_faithfulness(r):
    assert sph.faithfulness_margin(r, 10_000, seed=2) > 1e-9


@pytest.mark.parametrize("q", [sph.AzcanFenn(), sph.Augmented(0.7), sph.Augmented(np.pi / 2),
                               sph.ClarkSaito(1.0), sph.ClarkSaito(np.pi)])
def test_quandle_axioms_sampled(q):
    res = sph.axiom_residuals(q, 10_000, seed=4)
    assert max(res["q1"], res["q2"], res["q3"]) < 1e-10


def test_tag_json():
    tag = sph.SphericalQuandleTag(sph.Presentation.AUGMENTED_R, 1.0)
    assert sph.SphericalQuandleTag.from_json(tag.to_json()) == tag
    with pytest.raises(OutOfDomainError):
        sph.SphericalQuandleTag(sph.Presentation.AUGMENTED_R, 3.5)
