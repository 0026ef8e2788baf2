"""Ambient model geometries: E(kappa, tau) and the complex space form M^2_C(c).

Frames are orthonormal and indices are 0-based in code: ``gamma[i, j, k]`` is
``<nabla_{e_i} e_j, e_k>``.  The orientation is ``e1 x e2 = e3`` with
``e3 = xi`` the unit vertical field.

Two frames of E(kappa, tau) are provided:

* the homogeneous canonical frame (``tau != 0``), whose connection
  coefficients are constant;
* the frame of the coordinate chart

      lambda = 1 / (1 + kappa (x^2 + y^2) / 4)
      g = lambda^2 (dx^2 + dy^2) + (tau lambda (y dx - x dy) + dz)^2

  with coframe ``(lambda dx, lambda dy, dz + tau lambda (y dx - x dy))``.
  It exists for every ``(kappa, tau)`` (including ``tau = 0``) and differs
  from the canonical one by a rotation about ``xi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ChartError, ValidationError


class Kind(str, Enum):
    EKT = "EKT"
    CSF = "CSF"


@dataclass(frozen=True)
class ModelSpec:
    kind: Kind
    kappa: float = 0.0
    tau: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if self.kind is Kind.EKT and self.kappa - 4 * self.tau**2 == 0:
            raise ValidationError(
                f"E(kappa, tau) needs kappa - 4 tau^2 != 0 (kappa={self.kappa}, tau={self.tau})"
            )
        if self.kind is Kind.CSF and self.c == 0:
            raise ValidationError("complex space form needs c != 0")

    @classmethod
    def ekt(cls, kappa: float, tau: float) -> "ModelSpec":
        return cls(Kind.EKT, kappa=float(kappa), tau=float(tau))

    @classmethod
    def csf(cls, c: float) -> "ModelSpec":
        return cls(Kind.CSF, c=float(c))

    @property
    def bundle_defect(self) -> float:
        """``kappa - 4 tau^2``."""
        return self.kappa - 4 * self.tau**2


def _require(spec: ModelSpec, kind: Kind):
    if spec.kind is not kind:
        raise ValidationError(f"operation needs a {kind.value} model, got {spec.kind.value}")


@dataclass(frozen=True)
class FrameGeometry:
    """Connection data of an orthonormal frame at one or many points.

    ``gamma[..., i, j, k] = <nabla_{e_i} e_j, e_k>`` and
    ``dgamma[..., l, i, j, k] = e_l(gamma[..., i, j, k])``.
    """

    gamma: np.ndarray
    dgamma: np.ndarray

    @property
    def bracket(self) -> np.ndarray:
        """``c[..., i, j, m]`` with ``[e_i, e_j] = sum_m c_ijm e_m``."""
        return self.gamma - np.swapaxes(self.gamma, -3, -2)


# ---------------------------------------------------------------- E(kappa, tau)


def christoffel_ekt(spec: ModelSpec) -> np.ndarray:
    """Connection coefficients of the canonical frame.

    For ``tau = 0`` there is no homogeneous canonical frame; the table of the
    chart frame at the origin (identically zero) is returned instead.
    """
    _require(spec, Kind.EKT)
    t, k = spec.tau, spec.kappa
    G = np.zeros((3, 3, 3))
    if t == 0:
        return G
    b = t - k / (2 * t)
    G[0, 1, 2] = G[1, 2, 0] = t
    G[1, 0, 2] = G[0, 2, 1] = -t
    G[2, 1, 0] = b
    G[2, 0, 1] = -b
    return G


def canonical_frame(spec: ModelSpec) -> FrameGeometry:
    _require(spec, Kind.EKT)
    if spec.tau == 0:
        raise ValidationError("canonical homogeneous frame needs tau != 0; use chart_frame")
    return FrameGeometry(christoffel_ekt(spec), np.zeros((3, 3, 3, 3)))


def ricci_ekt(spec: ModelSpec, X) -> np.ndarray:
    _require(spec, Kind.EKT)
    d = np.array([spec.kappa - 2 * spec.tau**2] * 2 + [2 * spec.tau**2])
    return d * np.asarray(X, dtype=float)


def _koszul(c: np.ndarray) -> np.ndarray:
    # gamma_ijk = (c_ijk - c_jki + c_kij) / 2
    return 0.5 * (
        c
        - np.einsum("...jki->...ijk", c)
        + np.einsum("...kij->...ijk", c)
    )


def _check_chart(spec: ModelSpec, p: np.ndarray):
    if spec.kappa > 0:
        r2 = p[..., 0] ** 2 + p[..., 1] ** 2
        bad = r2 >= 4 / spec.kappa
        if np.any(bad):
            idx = np.argwhere(np.atleast_1d(bad))[0]
            q = np.atleast_2d(p)[tuple(idx)] if p.ndim > 1 else p
            raise ChartError(
                f"point {np.asarray(q).tolist()} outside chart x^2 + y^2 < {4 / spec.kappa:g}"
            )


def chart_frame(spec: ModelSpec, p) -> FrameGeometry:
    """Exact connection data of the chart frame at ``p`` (shape ``(..., 3)``).

    Structure equations: ``[E1, E2] = -(kappa y / 2) E1 + (kappa x / 2) E2 + 2 tau E3``
    and ``[E_i, E3] = 0``.
    """
    _require(spec, Kind.EKT)
    p = np.asarray(p, dtype=float)
    _check_chart(spec, p)
    x, y = p[..., 0], p[..., 1]
    k, t = spec.kappa, spec.tau
    inv_lam = 1 + k * (x**2 + y**2) / 4
    shape = p.shape[:-1]
    c = np.zeros(shape + (3, 3, 3))
    c[..., 0, 1, 0] = -k * y / 2
    c[..., 0, 1, 1] = k * x / 2
    c[..., 0, 1, 2] = 2 * t
    c[..., 1, 0, :] = -c[..., 0, 1, :]
    # frame derivatives: E1(x) = E2(y) = 1/lambda, all others of x, y vanish
    dc = np.zeros(shape + (3, 3, 3, 3))
    dc[..., 1, 0, 1, 0] = -k / 2 * inv_lam
    dc[..., 0, 0, 1, 1] = k / 2 * inv_lam
    dc[..., :, 1, 0, :] = -dc[..., :, 0, 1, :]
    return FrameGeometry(_koszul(c), _koszul(dc))


def frame_curvature(frame: FrameGeometry) -> np.ndarray:
    """``R[..., i, j, k, n] = <R(e_i, e_j) e_k, e_n>`` with
    ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``."""
    G, dG, c = frame.gamma, frame.dgamma, frame.bracket
    return (
        dG
        - np.swapaxes(dG, -4, -3)
        + np.einsum("...jkm,...imn->...ijkn", G, G)
        - np.einsum("...ikm,...jmn->...ijkn", G, G)
        - np.einsum("...ijm,...mkn->...ijkn", c, G)
    )


def ricci_from_frame(frame: FrameGeometry) -> np.ndarray:
    """``Ric[..., j, k] = sum_i <R(e_i, e_j) e_k, e_i>``."""
    return np.einsum("...ijki->...jk", frame_curvature(frame))


def scalar_from_frame(frame: FrameGeometry) -> np.ndarray:
    return np.einsum("...jj->...", ricci_from_frame(frame))


def vertical_derivative_check(spec: ModelSpec, frame: FrameGeometry | None = None) -> float:
    """Max over frame directions of ``|nabla_X xi - tau X x xi|``."""
    _require(spec, Kind.EKT)
    if frame is None:
        frame = canonical_frame(spec) if spec.tau != 0 else chart_frame(spec, np.zeros(3))
    e3 = np.array([0.0, 0.0, 1.0])
    res = 0.0
    for i in range(3):
        lhs = frame.gamma[..., i, 2, :]
        rhs = spec.tau * np.cross(np.eye(3)[i], e3)
        res = max(res, float(np.max(np.linalg.norm(lhs - rhs, axis=-1))))
    return res


# ------------------------------------------------------------------ chart model


@dataclass(frozen=True)
class ChartPoint:
    metric: np.ndarray  # (..., 3, 3)
    frame: np.ndarray  # (..., 3, 3); column i is E_i in coordinates
    coframe: np.ndarray  # (..., 3, 3); row i is theta^i


def _lambda(spec: ModelSpec, p):
    return 1.0 / (1 + spec.kappa * (p[..., 0] ** 2 + p[..., 1] ** 2) / 4)


def coordinate_chart_ekt(spec: ModelSpec, p) -> ChartPoint:
    _require(spec, Kind.EKT)
    p = np.asarray(p, dtype=float)
    _check_chart(spec, p)
    lam = _lambda(spec, p)
    x, y = p[..., 0], p[..., 1]
    t = spec.tau
    shape = p.shape[:-1]
    co = np.zeros(shape + (3, 3))
    co[..., 0, 0] = lam
    co[..., 1, 1] = lam
    co[..., 2, 0] = t * lam * y
    co[..., 2, 1] = -t * lam * x
    co[..., 2, 2] = 1.0
    fr = np.zeros(shape + (3, 3))
    fr[..., 0, 0] = 1 / lam
    fr[..., 2, 0] = -t * y
    fr[..., 1, 1] = 1 / lam
    fr[..., 2, 1] = t * x
    fr[..., 2, 2] = 1.0
    metric = np.einsum("...ka,...kb->...ab", co, co)
    return ChartPoint(metric, fr, co)


def metric_derivatives(spec: ModelSpec, p) -> np.ndarray:
    """``dG[..., a, b, c] = d_a G_bc`` for the chart metric (exact)."""
    p = np.asarray(p, dtype=float)
    lam = _lambda(spec, p)
    x, y = p[..., 0], p[..., 1]
    k, t = spec.kappa, spec.tau
    dlam = np.stack([-k * x * lam**2 / 2, -k * y * lam**2 / 2, np.zeros_like(x)], -1)
    th3 = np.stack([t * lam * y, -t * lam * x, np.ones_like(x)], -1)
    dth3 = np.zeros(p.shape[:-1] + (3, 3))  # [a, component]
    dth3[..., 0, 0] = t * y * dlam[..., 0]
    dth3[..., 0, 1] = -t * lam - t * x * dlam[..., 0]
    dth3[..., 1, 0] = t * lam + t * y * dlam[..., 1]
    dth3[..., 1, 1] = -t * x * dlam[..., 1]
    flat = np.diag([1.0, 1.0, 0.0])
    return (
        np.einsum("...a,bc->...abc", 2 * lam[..., None] * dlam, flat)
        + np.einsum("...ab,...c->...abc", dth3, th3)
        + np.einsum("...b,...ac->...abc", th3, dth3)
    )


def _christoffel_from_dg(G: np.ndarray, dG: np.ndarray) -> np.ndarray:
    """``Gam[..., c, a, b] = Gamma^c_ab`` of a metric from its derivatives."""
    # first kind: [ab, d] = (d_a G_bd + d_b G_ad - d_d G_ab) / 2
    first = 0.5 * (
        dG
        + np.einsum("...bad->...abd", dG)
        - np.einsum("...dab->...abd", dG)
    )
    return np.einsum("...cd,...abd->...cab", np.linalg.inv(G), first)


def chart_christoffel_coords(spec: ModelSpec, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return _christoffel_from_dg(coordinate_chart_ekt(spec, p).metric, metric_derivatives(spec, p))


def chart_frame_christoffel_fd(spec: ModelSpec, p, h: float = 1e-5) -> np.ndarray:
    """Chart-frame connection coefficients from central differences of the
    chart metric and frame fields (independent of ``chart_frame``)."""
    p = np.asarray(p, dtype=float)
    base = coordinate_chart_ekt(spec, p)
    dG = np.zeros(p.shape[:-1] + (3, 3, 3))
    dE = np.zeros(p.shape[:-1] + (3, 3, 3))  # [a, comp, i] = d_a (E_i)^comp
    for a in range(3):
        step = np.zeros(3)
        step[a] = h
        hi = coordinate_chart_ekt(spec, p + step)
        lo = coordinate_chart_ekt(spec, p - step)
        dG[..., a, :, :] = (hi.metric - lo.metric) / (2 * h)
        dE[..., a, :, :] = (hi.frame - lo.frame) / (2 * h)
    Gam = _christoffel_from_dg(base.metric, dG)
    E = base.frame
    # nabla_{E_i} E_j = E_i^a d_a E_j + Gamma(E_i, E_j)
    cov = np.einsum("...ai,...acj->...ijc", E, dE) + np.einsum(
        "...cab,...ai,...bj->...ijc", Gam, E, E
    )
    return np.einsum("...kc,...ijc->...ijk", base.coframe, cov)


# ------------------------------------------------------------------ M^2_C(c)

# complex structure on the frame (u1, J u1, u2, J u2)
J4 = np.array(
    [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)


def curvature_csf(spec: ModelSpec, X, Y, Z, W) -> np.ndarray:
    """``g(R(X, Y) Z, W)`` of the complex space form of holomorphic curvature 4c."""
    _require(spec, Kind.CSF)
    X, Y, Z, W = (np.asarray(v, dtype=float) for v in (X, Y, Z, W))

    def g(a, b):
        return np.sum(a * b, axis=-1)

    def J(a):
        return a @ J4.T

    return spec.c * (
        g(Y, Z) * g(X, W)
        - g(X, Z) * g(Y, W)
        + g(J(Y), Z) * g(J(X), W)
        - g(J(X), Z) * g(J(Y), W)
        - 2 * g(J(X), Y) * g(J(Z), W)
    )
