"""Sister correspondence between CMC surfaces of E(kappa1, tau1) and
E(kappa2, tau2) with equal ``kappa - 4 tau^2``.

The sister data keeps ``g`` and ``f`` and rotates the traceless shape
operator and ``T`` by ``exp(theta J)``, where ``tau2 + i H2 = e^{i theta}
(tau1 + i H1)``.  On spinors the same transform is ``phi+ + e^{i theta} phi-``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InfeasibleSisterError, PreconditionError
from .models import ModelSpec
from .surfaces_ekt import (
    CompatibilityResidual,
    SurfaceDataEKT,
    central_first,
    check_compatibility_ekt,
)

CMC_STD_MAX = 1e-3


@dataclass(frozen=True)
class SisterParams:
    kappa1: float
    tau1: float
    H1: float
    kappa2: float
    tau2: float
    H2: float
    theta: float

    @property
    def source(self) -> ModelSpec:
        return ModelSpec.ekt(self.kappa1, self.tau1)

    @property
    def target(self) -> ModelSpec:
        return ModelSpec.ekt(self.kappa2, self.tau2)

    def inverse(self) -> "SisterParams":
        return SisterParams(self.kappa2, self.tau2, self.H2, self.kappa1, self.tau1, self.H1, -self.theta)


def solve_sister(kappa1: float, tau1: float, H1: float, tau2: float, sign: int = 1) -> SisterParams:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if tau1 == 0 and H1 == 0:
        raise PreconditionError("tau1 = H1 = 0: the phase theta is undefined")
    disc = H1**2 + tau1**2 - tau2**2
    if disc < 0:
        raise InfeasibleSisterError(
            f"H1^2 = {H1**2:g} < tau2^2 - tau1^2 = {tau2**2 - tau1**2:g}: no sister exists"
        )
    H2 = sign * math.sqrt(disc)
    kappa2 = kappa1 - 4 * tau1**2 + 4 * tau2**2
    theta = float(np.angle(complex(tau2, H2) / complex(tau1, H1)))
    if theta <= -math.pi:
        theta += 2 * math.pi
    return SisterParams(float(kappa1), float(tau1), float(H1), float(kappa2), float(tau2), H2, theta)


def J_matrix(g) -> np.ndarray:
    """Mixed tensor of the rotation by +pi/2 for the metric ``g``."""
    g = np.asarray(g, dtype=float)
    s = np.sqrt(np.linalg.det(g))[..., None, None]
    return np.stack(
        [
            np.stack([-g[..., 0, 1], -g[..., 1, 1]], -1),
            np.stack([g[..., 0, 0], g[..., 0, 1]], -1),
        ],
        -2,
    ) / s


def _exp_theta_J(theta, g):
    J = J_matrix(g)
    return math.cos(theta) * np.eye(2) + math.sin(theta) * J


def rotate_tensor(theta: float, g, E1, H1: float, H2: float) -> np.ndarray:
    """``E2 = H2 Id + exp(theta J) (E1 - H1 Id)``."""
    E1 = np.asarray(E1, dtype=float)
    return H2 * np.eye(2) + _exp_theta_J(theta, g) @ (E1 - H1 * np.eye(2))


def rotate_T(theta: float, T1, g=None) -> np.ndarray:
    T1 = np.asarray(T1, dtype=float)
    if g is None:
        g = np.broadcast_to(np.eye(2), T1.shape[:-1] + (2, 2))
    return np.einsum("...ab,...b->...a", _exp_theta_J(theta, g), T1)


def rotate_spinor(theta: float, phi, w=None) -> np.ndarray:
    """``phi+ + e^{i theta} phi-`` for the conjugation matrix ``w``
    (default: the intrinsic Sigma_2 model, ``w = sigma_3``)."""
    phi = np.asarray(phi, dtype=complex)
    if w is None:
        w = np.diag([1.0, -1.0])
    bar = np.einsum("...kl,...l->...k", w, phi)
    return 0.5 * (phi + bar) + np.exp(1j * theta) * 0.5 * (phi - bar)


def check_cmc(data: SurfaceDataEKT, H1: float | None = None) -> float:
    H = data.H
    std = float(np.std(H))
    if std > CMC_STD_MAX:
        raise PreconditionError(f"surface is not CMC: std(H) = {std:.3g} > {CMC_STD_MAX:g}")
    if H1 is not None and abs(float(np.mean(H)) - H1) > CMC_STD_MAX:
        raise PreconditionError(f"surface has H = {float(np.mean(H)):.6g}, parameters say H1 = {H1:g}")
    return float(np.mean(H))


def sister_data(data1: SurfaceDataEKT, params: SisterParams) -> SurfaceDataEKT:
    """Transform every stencil sample and re-difference ``E`` and ``T``."""
    st = data1.stencil
    E2 = rotate_tensor(params.theta, st.g, st.E, params.H1, params.H2)
    T2 = rotate_T(params.theta, st.T, st.g)
    second = st.g @ E2
    st2 = replace(st, E=E2, T=T2, second=second)
    center = replace(data1.center, E=E2[0], T=T2[0], second=second[0])
    return replace(
        data1,
        spec=params.target,
        center=center,
        stencil=st2,
        dE=central_first(E2, data1.h),
        dT=central_first(T2, data1.h),
    )


def verify_sister(data1: SurfaceDataEKT, params: SisterParams) -> CompatibilityResidual:
    check_cmc(data1, params.H1)
    return check_compatibility_ekt(params.target, sister_data(data1, params))
