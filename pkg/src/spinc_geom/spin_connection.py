"""Spin^c covariant derivative on E(kappa, tau) and its Killing spinor.

Spinors are written in the trivialization given by an orthonormal frame, so
that

    nabla_{e_i} psi = e_i(psi) + M_i psi,
    M_i = 1/4 sum_{j,k} gamma[i, j, k] e_j e_k + 1/2 A(e_i).

The auxiliary connection is ``A = eps (i omega_12 - i tau eta)`` where
``omega_12(X) = <nabla_X e1, e2>``, ``eta`` is the dual of ``xi`` and
``eps = +1`` (canonical structure, spinor ``(1, 0)``) or ``-1``
(anti-canonical, spinor ``(0, 1)``).  In both cases the frame-constant spinor
is a Killing spinor with constant ``tau / 2``, and the curvature ``i Omega``
of ``A`` has ``Omega_12 = 4 tau^2 - kappa`` so that
``Omega . psi = i (kappa - 4 tau^2) psi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import clifford_rep, two_form_matrix, vector_matrix
from .errors import SpincGeomError
from .models import (
    FrameGeometry,
    Kind,
    ModelSpec,
    _require,
    canonical_frame,
    chart_frame,
    ricci_from_frame,
    scalar_from_frame,
)

REP3 = clifford_rep(3)
_GG = np.einsum("jab,kbc->jkac", REP3.gamma, REP3.gamma)  # e_j e_k


@dataclass(frozen=True)
class AuxConnection:
    """Imaginary one-form ``A`` on a frame with its frame derivatives.

    ``values[..., i] = A(e_i)``, ``derivs[..., l, i] = e_l(A(e_i))``.
    """

    values: np.ndarray
    derivs: np.ndarray
    chirality: int = 1


@dataclass(frozen=True)
class KillingVerdict:
    max_residual: float
    per_direction: tuple[float, float, float]


def default_frame(spec: ModelSpec, p=None) -> FrameGeometry:
    """Canonical frame for ``tau != 0``, otherwise the chart frame at ``p``."""
    _require(spec, Kind.EKT)
    if spec.tau != 0 and p is None:
        return canonical_frame(spec)
    return chart_frame(spec, np.zeros(3) if p is None else p)


def aux_connection(spec: ModelSpec, frame: FrameGeometry, chirality: int = 1) -> AuxConnection:
    if chirality not in (1, -1):
        raise ValueError("chirality must be +1 or -1")
    eta = np.array([0.0, 0.0, 1.0])
    vals = chirality * (1j * frame.gamma[..., :, 0, 1] - 1j * spec.tau * eta)
    ders = chirality * 1j * frame.dgamma[..., :, :, 0, 1]
    return AuxConnection(vals, ders, chirality)


def killing_spinor(chirality: int = 1) -> np.ndarray:
    """Unit eigenspinor of ``e3`` with eigenvalue ``-i chirality``."""
    w, v = np.linalg.eig(REP3.gamma[2])
    idx = np.flatnonzero(np.abs(w + 1j * chirality) < 1e-12)
    if idx.size != 1:
        raise SpincGeomError("no eigenspinor of e3 found")
    psi = v[:, idx[0]]
    # fix the phase so the largest component is real positive
    k = np.argmax(np.abs(psi))
    return psi * np.conj(psi[k]) / np.abs(psi[k]) / np.linalg.norm(psi)


def connection_matrices(frame: FrameGeometry, aux: AuxConnection) -> np.ndarray:
    """``M[..., i]`` (2 x 2) of the spinor connection in the frame."""
    M = 0.25 * np.einsum("...ijk,jkab->...iab", frame.gamma, _GG)
    return M + 0.5 * aux.values[..., :, None, None] * np.eye(2)


def connection_matrix_derivs(frame: FrameGeometry, aux: AuxConnection) -> np.ndarray:
    """``dM[..., l, i] = e_l(M_i)``."""
    dM = 0.25 * np.einsum("...lijk,jkab->...liab", frame.dgamma, _GG)
    return dM + 0.5 * aux.derivs[..., :, :, None, None] * np.eye(2)


def spinor_cov_deriv(
    spec: ModelSpec,
    aux: AuxConnection,
    direction: int,
    psi,
    frame_derivative=None,
    frame: FrameGeometry | None = None,
) -> np.ndarray:
    """``nabla_{e_i} psi`` for 0-based frame index ``direction``."""
    if frame is None:
        frame = default_frame(spec)
    psi = np.asarray(psi, dtype=complex)
    M = connection_matrices(frame, aux)[..., direction, :, :]
    out = np.einsum("...ab,...b->...a", M, psi)
    if frame_derivative is not None:
        out = out + frame_derivative
    return out


def verify_killing(
    spec: ModelSpec, chirality: int = 1, frame: FrameGeometry | None = None
) -> KillingVerdict:
    """Residual of ``nabla_X psi = (tau / 2) X . psi`` on the frame directions."""
    if frame is None:
        frame = default_frame(spec)
    aux = aux_connection(spec, frame, chirality)
    psi = killing_spinor(chirality)
    res = []
    for i in range(3):
        lhs = spinor_cov_deriv(spec, aux, i, psi, frame=frame)
        rhs = 0.5 * spec.tau * (REP3.gamma[i] @ psi)
        res.append(float(np.max(np.linalg.norm(lhs - rhs, axis=-1))))
    return KillingVerdict(max(res), tuple(res))


def aux_curvature_form(frame: FrameGeometry, aux: AuxConnection) -> np.ndarray:
    """``Omega[..., i, j]`` with ``dA = i Omega``."""
    dA = aux.derivs
    c = frame.bracket
    return np.real(
        (dA - np.swapaxes(dA, -1, -2) - np.einsum("...ijm,...m->...ij", c, aux.values)) / 1j
    )


def aux_curvature_action(
    spec: ModelSpec, psi=None, chirality: int = 1, frame: FrameGeometry | None = None
) -> float:
    """``|Omega . psi - i (kappa - 4 tau^2) psi|`` with Omega built from ``A``."""
    if frame is None:
        frame = default_frame(spec)
    aux = aux_connection(spec, frame, chirality)
    if psi is None:
        psi = killing_spinor(chirality)
    Om = aux_curvature_form(frame, aux)
    lhs = np.einsum("...ab,b->...a", two_form_matrix(REP3, Om), psi)
    return float(np.max(np.linalg.norm(lhs - 1j * spec.bundle_defect * psi, axis=-1)))


def _dirac_data(frame: FrameGeometry, aux: AuxConnection, psi):
    """``D psi``, ``D^2 psi`` and ``nabla* nabla psi`` for a frame-constant ``psi``."""
    M = connection_matrices(frame, aux)
    dM = connection_matrix_derivs(frame, aux)
    g = REP3.gamma
    Mpsi = np.einsum("...iab,b->...ia", M, psi)
    Dpsi = np.einsum("iab,...ib->...a", g, Mpsi)
    # e_l(D psi) = sum_i gamma_i e_l(M_i) psi
    dD = np.einsum("iab,...libc,c->...la", g, dM, psi)
    D2 = np.einsum("lab,...lb->...a", g, dD + np.einsum("...lab,...b->...la", M, Dpsi))
    lap = -(
        np.einsum("...iiab,b->...a", dM, psi)
        + np.einsum("...iab,...ib->...a", M, Mpsi)
        - np.einsum("...iim,...ma->...a", frame.gamma, Mpsi)
    )
    return Dpsi, D2, lap


def lichnerowicz_residual(
    spec: ModelSpec, chirality: int = 1, frame: FrameGeometry | None = None
) -> float:
    """Norm of ``D^2 psi - nabla* nabla psi - (S / 4) psi - (i / 2) Omega . psi``.

    Also checks ``D psi = -(3 tau / 2) psi`` and ``nabla* nabla psi = (3 tau^2 / 4) psi``.
    """
    if frame is None:
        frame = default_frame(spec)
    aux = aux_connection(spec, frame, chirality)
    psi = killing_spinor(chirality)
    Dpsi, D2, lap = _dirac_data(frame, aux, psi)
    S = scalar_from_frame(frame)
    Om = np.einsum("...ab,b->...a", two_form_matrix(REP3, aux_curvature_form(frame, aux)), psi)
    r = D2 - lap - 0.25 * S[..., None] * psi - 0.5j * Om
    t = spec.tau
    return float(
        max(
            np.max(np.linalg.norm(r, axis=-1)),
            np.max(np.linalg.norm(Dpsi + 1.5 * t * psi, axis=-1)),
            np.max(np.linalg.norm(lap - 0.75 * t * t * psi, axis=-1)),
        )
    )


def spinor_curvature(frame: FrameGeometry, aux: AuxConnection) -> np.ndarray:
    """``R[..., i, j]`` (2 x 2): curvature of the spinor connection on ``(e_i, e_j)``."""
    M = connection_matrices(frame, aux)
    dM = connection_matrix_derivs(frame, aux)
    comm = np.einsum("...iab,...jbc->...ijac", M, M)
    return (
        dM
        - np.swapaxes(dM, -3, -4)
        + comm
        - np.swapaxes(comm, -3, -4)
        - np.einsum("...ijm,...mab->...ijab", frame.bracket, M)
    )


def spinor_ricci_identity_residual(
    spec: ModelSpec, chirality: int = 1, frame: FrameGeometry | None = None
) -> float:
    """Operator norm of ``sum_k e_k R(e_k, X) - Ric(X)/2 + (i/2)(X _| Omega)``
    over ``X = e_1, e_2, e_3``; vanishes for every spinor."""
    if frame is None:
        frame = default_frame(spec)
    aux = aux_connection(spec, frame, chirality)
    R = spinor_curvature(frame, aux)
    ric = ricci_from_frame(frame)
    Om = aux_curvature_form(frame, aux)
    g = REP3.gamma
    lhs = np.einsum("kab,...kjbc->...jac", g, R)
    rhs = 0.5 * np.einsum("...jm,mab->...jab", ric, g) - 0.5j * np.einsum(
        "...jm,mab->...jab", Om, g
    )
    return float(np.max(np.linalg.norm(lhs - rhs, ord=2, axis=(-2, -1))))


def ricci_identity_residual(
    spec: ModelSpec, X, chirality: int = 1, frame: FrameGeometry | None = None
) -> float:
    """``|Ric(X) . psi - i (X _| Omega) . psi - 2 tau^2 X . psi|`` for the Killing spinor."""
    if frame is None:
        frame = default_frame(spec)
    aux = aux_connection(spec, frame, chirality)
    psi = killing_spinor(chirality)
    X = np.asarray(X, dtype=float)
    ric = np.einsum("...jk,k->...j", ricci_from_frame(frame), X)
    contr = np.einsum("i,...ij->...j", X, aux_curvature_form(frame, aux))
    lhs = np.einsum("...ab,b->...a", vector_matrix(REP3, ric) - 1j * vector_matrix(REP3, contr), psi)
    rhs = 2 * spec.tau**2 * (vector_matrix(REP3, X) @ psi)
    return float(np.max(np.linalg.norm(lhs - rhs, axis=-1)))
