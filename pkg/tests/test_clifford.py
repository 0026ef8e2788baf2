import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from spinc_geom.clifford import (
    Sigma4_PLUS,
    chirality_split,
    clifford_mul,
    clifford_rep,
    conjugate,
    herm_product,
    two_form_action,
    volume_action,
    volume_element,
)
from spinc_geom.errors import DimensionError, ValidationError
from spinc_geom.spinor_restriction import ambient_clifford, intrinsic_clifford

from conftest import random_spinor


@pytest.mark.parametrize("n", [2, 3, 4])
def test_anticommutation(n):
    g = clifford_rep(n).gamma
    k = g.shape[-1]
    for i in range(n):
        for j in range(n):
            ac = g[i] @ g[j] + g[j] @ g[i]
            np.testing.assert_allclose(ac, -2 * (i == j) * np.eye(k), atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_skew_hermitian(n, rng):
    rep = clifford_rep(n)
    for g in rep.gamma:
        np.testing.assert_allclose(g.conj().T, -g, atol=0)
    psi = random_spinor(rng, rep.spinor_dim)
    X = rng.normal(size=n)
    assert abs(np.real(herm_product(clifford_mul(rep, X, psi), psi))) < 1e-13


def test_volume_element():
    np.testing.assert_allclose(volume_element(clifford_rep(3)), np.eye(2), atol=1e-15)
    w4 = volume_element(clifford_rep(4))
    np.testing.assert_allclose(w4 @ w4, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(w4, np.diag([1, 1, -1, -1]), atol=1e-15)


def test_small_products(rng):
    r2, r3 = clifford_rep(2), clifford_rep(3)
    psi = random_spinor(rng, 2)
    e = np.eye(3)
    np.testing.assert_allclose(clifford_mul(r2, e[0, :2], clifford_mul(r2, e[0, :2], psi)), -psi, atol=1e-15)
    plus = np.array([1, 0], dtype=complex)
    np.testing.assert_allclose(volume_action(r2, plus), plus)
    np.testing.assert_allclose(clifford_mul(r2, e[0, :2], clifford_mul(r2, e[1, :2], plus)), -1j * plus)
    triple = clifford_mul(r3, e[0], clifford_mul(r3, e[1], clifford_mul(r3, e[2], psi)))
    np.testing.assert_allclose(triple, -psi, atol=1e-15)


def test_chirality_and_conjugation(rng):
    rep = clifford_rep(4)
    psi = random_spinor(rng, 4)
    p, m = chirality_split(rep, psi)
    np.testing.assert_allclose(p + m, psi)
    assert abs(herm_product(p, m)) < 1e-14
    np.testing.assert_allclose(conjugate(rep, conjugate(rep, psi)), psi, atol=1e-14)
    np.testing.assert_allclose(conjugate(rep, Sigma4_PLUS[:, 0]), Sigma4_PLUS[:, 0])


def test_two_form_action(rng):
    rep = clifford_rep(3)
    psi = random_spinor(rng, 2)
    assert np.allclose(two_form_action(rep, np.zeros((3, 3)), psi), 0)
    Om = np.zeros((3, 3))
    Om[0, 1], Om[1, 0] = -6.0, 6.0
    e = np.eye(3)
    expected = -6.0 * clifford_mul(rep, e[0], clifford_mul(rep, e[1], psi))
    np.testing.assert_allclose(two_form_action(rep, Om, psi), expected, atol=1e-14)
    with pytest.raises(ValidationError):
        two_form_action(rep, np.ones((3, 3)), psi)


def test_surface_conjugation_is_i_t1_t2(rng):
    frames = Rotation.random(20, random_state=3).as_matrix()
    for cl in (intrinsic_clifford(), ambient_clifford(frames)):
        phi = random_spinor(rng, 2, 20)
        e = np.eye(2)
        lhs = cl.bar(phi)
        rhs = 1j * cl.mul(e[0], cl.mul(e[1], phi))
        np.testing.assert_allclose(lhs, rhs, atol=1e-13)


def test_errors():
    with pytest.raises(DimensionError):
        clifford_rep(5)
    with pytest.raises(DimensionError):
        clifford_mul(clifford_rep(3), np.ones(2), np.ones(2))
    with pytest.raises(ValidationError):
        conjugate(clifford_rep(3), np.ones(2))
