import numpy as np
import pytest

from spinc_geom.errors import ChartError, ValidationError
from spinc_geom.models import (
    J4,
    ModelSpec,
    canonical_frame,
    chart_christoffel_coords,
    chart_frame,
    chart_frame_christoffel_fd,
    christoffel_ekt,
    coordinate_chart_ekt,
    curvature_csf,
    frame_curvature,
    ricci_ekt,
    ricci_from_frame,
    scalar_from_frame,
    vertical_derivative_check,
)

PAIRS = [(1.0, 1.0), (-1.0, 0.0), (0.0, 0.5), (4.0, 0.5), (-2.0, -0.7), (3.0, 0.2)]


def test_spec_validation():
    with pytest.raises(ValidationError):
        ModelSpec.ekt(4.0, 1.0)
    with pytest.raises(ValidationError):
        ModelSpec.csf(0.0)
    assert ModelSpec.ekt(1.0, 1.0).bundle_defect == -3.0


def test_christoffel_table():
    G = christoffel_ekt(ModelSpec.ekt(1.0, 1.0))
    assert G[0, 1, 2] == 1.0 and G[1, 0, 2] == -1.0
    assert G[2, 1, 0] == 0.5 and G[2, 0, 1] == -0.5
    assert not christoffel_ekt(ModelSpec.ekt(-1.0, 0.0)).any()
    # metric compatibility: antisymmetric in the last two slots
    np.testing.assert_array_equal(G, -np.swapaxes(G, 1, 2))


@pytest.mark.parametrize("kappa,tau", PAIRS)
def test_ricci_in_chart_frame(kappa, tau):
    spec = ModelSpec.ekt(kappa, tau)
    p = np.array([0.3, -0.2, 0.7])
    fr = chart_frame(spec, p)
    expected = np.diag([kappa - 2 * tau**2, kappa - 2 * tau**2, 2 * tau**2])
    np.testing.assert_allclose(ricci_from_frame(fr), expected, atol=1e-12)
    np.testing.assert_allclose(scalar_from_frame(fr), 2 * (kappa - tau**2), atol=1e-12)
    np.testing.assert_allclose(ricci_ekt(spec, [1.0, 2.0, 3.0]), expected @ [1.0, 2.0, 3.0])
    assert vertical_derivative_check(spec, fr) < 1e-12


@pytest.mark.parametrize("kappa,tau", [p for p in PAIRS if p[1] != 0])
def test_ricci_in_canonical_frame(kappa, tau):
    fr = canonical_frame(ModelSpec.ekt(kappa, tau))
    expected = np.diag([kappa - 2 * tau**2, kappa - 2 * tau**2, 2 * tau**2])
    np.testing.assert_allclose(ricci_from_frame(fr), expected, atol=1e-13)


def test_sectional_curvature_of_horizontal_plane():
    # K(e1, e2) = kappa - 3 tau^2 for E(kappa, tau)
    for kappa, tau in PAIRS:
        R = frame_curvature(chart_frame(ModelSpec.ekt(kappa, tau), np.array([0.1, 0.2, 0.0])))
        assert abs(R[0, 1, 1, 0] - (kappa - 3 * tau**2)) < 1e-12


def test_chart_christoffel_matches_finite_differences():
    spec = ModelSpec.ekt(2.0, 0.6)
    p = np.array([0.4, 0.3, -1.0])
    fd = chart_frame_christoffel_fd(spec, p)
    np.testing.assert_allclose(chart_frame(spec, p).gamma, fd, atol=1e-8)


def test_chart_metric_symmetry():
    spec = ModelSpec.ekt(-1.0, 0.5)
    pt = coordinate_chart_ekt(spec, np.array([0.2, 0.1, 0.0]))
    np.testing.assert_allclose(np.einsum("ai,ab,bj->ij", pt.frame, pt.metric, pt.frame), np.eye(3), atol=1e-14)
    Gam = chart_christoffel_coords(spec, np.array([0.2, 0.1, 0.0]))
    np.testing.assert_allclose(Gam, np.swapaxes(Gam, -1, -2), atol=1e-14)


def test_chart_domain():
    with pytest.raises(ChartError):
        chart_frame(ModelSpec.ekt(4.0, 0.5), np.array([1.0, 0.0, 0.0]))


def test_csf_curvature():
    spec = ModelSpec.csf(1.5)
    e = np.eye(4)
    X = e[0]
    JX = J4 @ X
    assert curvature_csf(spec, X, JX, JX, X) == pytest.approx(4 * 1.5)
    assert curvature_csf(spec, e[0], e[2], e[2], e[0]) == pytest.approx(1.5)
    with pytest.raises(ValidationError):
        curvature_csf(ModelSpec.ekt(1.0, 1.0), X, X, X, X)
