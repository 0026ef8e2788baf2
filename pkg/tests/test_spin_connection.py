import numpy as np
import pytest

from spinc_geom.clifford import clifford_rep, vector_matrix
from spinc_geom.models import ModelSpec, canonical_frame, chart_frame
from spinc_geom.spin_connection import (
    aux_connection,
    aux_curvature_action,
    aux_curvature_form,
    killing_spinor,
    lichnerowicz_residual,
    ricci_identity_residual,
    spinor_ricci_identity_residual,
    verify_killing,
)

REP3 = clifford_rep(3)
SPECS = [(1.0, 1.0), (-1.0, 0.0), (0.0, 0.5), (4.0, 0.5), (-2.0, -0.7), (1.0, 0.0)]


@pytest.mark.parametrize("kappa,tau", SPECS)
@pytest.mark.parametrize("chirality", [1, -1])
def test_killing_default_frame(kappa, tau, chirality):
    spec = ModelSpec.ekt(kappa, tau)
    assert verify_killing(spec, chirality).max_residual < 1e-12
    assert aux_curvature_action(spec, chirality=chirality) < 1e-12
    assert lichnerowicz_residual(spec, chirality) < 1e-12
    assert spinor_ricci_identity_residual(spec, chirality) < 1e-12
    for X in np.eye(3):
        assert ricci_identity_residual(spec, X, chirality) < 1e-12


@pytest.mark.parametrize("kappa,tau", SPECS)
def test_killing_chart_frame(kappa, tau):
    spec = ModelSpec.ekt(kappa, tau)
    fr = chart_frame(spec, np.array([[0.3, -0.2, 0.5], [0.0, 0.1, -2.0]]))
    assert verify_killing(spec, 1, fr).max_residual < 1e-12
    assert lichnerowicz_residual(spec, 1, fr) < 1e-12
    assert spinor_ricci_identity_residual(spec, 1, fr) < 1e-12


def test_killing_spinor_is_vertical_eigenvector():
    for ch in (1, -1):
        psi = killing_spinor(ch)
        np.testing.assert_allclose(REP3.gamma[2] @ psi, -1j * ch * psi)


def test_curvature_form_of_aux():
    spec = ModelSpec.ekt(1.0, 1.0)
    fr = canonical_frame(spec)
    Om = aux_curvature_form(fr, aux_connection(spec, fr, 1))
    # Omega(e1, e2) . psi = i (kappa - 4 tau^2) psi with e1 e2 psi = -i psi
    assert Om[0, 1] == pytest.approx(-(spec.kappa - 4 * spec.tau**2))
    assert abs(Om[0, 2]) < 1e-15 and abs(Om[1, 2]) < 1e-15


def test_wrong_chirality_spinor_fails():
    # negative control: the other eigenspinor of e3
    spec = ModelSpec.ekt(1.0, 1.0)
    r = aux_curvature_action(spec, psi=killing_spinor(-1), chirality=1)
    assert r == pytest.approx(2 * abs(spec.bundle_defect))
