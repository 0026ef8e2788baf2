import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from spinc_geom.catalog import builtin, builtin_catalog
from spinc_geom.clifford import clifford_rep, vector_matrix
from spinc_geom.errors import FrameError, ZeroSpinorError
from spinc_geom.spinor_restriction import (
    ambient_clifford,
    curvature_residual,
    dirac_contraction_residual,
    dirac_gauss_residual,
    dirac_surface,
    energy_momentum_identities,
    energy_momentum_residuals,
    extract_f_T,
    f_T_residuals,
    intrinsic_clifford,
    killing_derivative,
    restrict_ambient_spinor,
    restricted_killing_residual,
    restricted_spinor_field,
    spin_lift,
    theta_identity_residual,
    to_sigma2,
)
from spinc_geom.surfaces_ekt import Grid, induce_surface_data

from conftest import random_spinor

REP2, REP3 = clifford_rep(2), clifford_rep(3)
FRAMES = Rotation.random(25, random_state=11).as_matrix()


def test_spin_lift_rotates_gammas():
    S = spin_lift(FRAMES)
    Sinv = np.linalg.inv(S)
    for a in range(3):
        lhs = S @ REP3.gamma[a] @ Sinv
        np.testing.assert_allclose(lhs, vector_matrix(REP3, FRAMES[:, a, :]), atol=1e-13)


def test_sigma2_map_intertwines():
    P = to_sigma2(FRAMES)
    Pinv = np.linalg.inv(P)
    cl = ambient_clifford(FRAMES)
    for a in range(2):
        np.testing.assert_allclose(P @ cl.c[:, a] @ Pinv, np.broadcast_to(REP2.gamma[a], (25, 2, 2)), atol=1e-13)
    np.testing.assert_allclose(P @ cl.w @ Pinv, np.broadcast_to(np.diag([1, -1]), (25, 2, 2)), atol=1e-13)
    r = restrict_ambient_spinor(FRAMES, [1, 0])
    np.testing.assert_allclose(np.linalg.norm(r.phi, axis=-1), 1.0)


def test_bad_frame():
    with pytest.raises(FrameError):
        restrict_ambient_spinor(np.diag([1.0, 1.0, -1.0]), [1, 0])


def test_f_T_of_simple_spinors():
    f, T = extract_f_T(np.array([1.0 + 0j, 0.0]))
    assert f == pytest.approx(1.0) and np.allclose(T, 0)
    f, T = extract_f_T(np.array([1.0, 1.0 + 0j]) / np.sqrt(2))
    assert abs(f) < 1e-15 and np.linalg.norm(T) == pytest.approx(1.0)
    with pytest.raises(ZeroSpinorError):
        extract_f_T(np.zeros(2, dtype=complex))


def test_pointwise_algebra(rng):
    n = 200
    for cl, phi in (
        (intrinsic_clifford(), random_spinor(rng, 2, n)),
        (ambient_clifford(Rotation.random(n, random_state=2).as_matrix()), random_spinor(rng, 2, n)),
    ):
        assert theta_identity_residual(phi, cl) < 1e-13
        f, T = extract_f_T(phi, cl)
        np.testing.assert_allclose(f**2 + np.sum(T**2, -1), 1.0, atol=1e-13)
        E = rng.normal(size=(n, 2, 2))
        E = E + np.swapaxes(E, -1, -2)
        tau = 0.7
        assert dirac_contraction_residual(E, tau, phi, cl) < 1e-12
        nab = killing_derivative(E, tau, phi, cl)
        H = 0.5 * np.trace(E, axis1=-2, axis2=-1)
        ids = energy_momentum_identities(nab, phi, H, tau, cl)
        assert max(ids.values()) < 1e-12, ids


@pytest.fixture(scope="module")
def fields():
    out = {}
    for e in builtin_catalog():
        d = induce_surface_data(e.spec, e.chart, e.domain, Grid(16, 16))
        out[e.name] = (e.spec, d, restricted_spinor_field(e.spec, d))
    return out


@pytest.mark.parametrize("name", [e.name for e in builtin_catalog()])
def test_restricted_killing_on_catalog(fields, name):
    spec, d, sf = fields[name]
    assert restricted_killing_residual(sf) < 5e-4
    dr = dirac_surface(sf)
    assert dr["dirac"] < 5e-4 and dr["norm_drift"] < 5e-4
    assert curvature_residual(spec, sf) < 5e-4
    assert max(f_T_residuals(sf).values()) < 5e-4
    assert max(energy_momentum_residuals(sf).values()) < 5e-4
    assert dirac_gauss_residual(spec, d, sf) < 5e-4


def test_non_killing_field_is_detected():
    e = builtin("berger-chart-disk")
    d = induce_surface_data(e.spec, e.chart, e.domain, Grid(16, 16))
    base = np.array([1.0, 0.0])
    sf = restricted_spinor_field(e.spec, d, field=lambda u, v: (1 + u)[..., None] * base)
    assert restricted_killing_residual(sf) > 1e-1
