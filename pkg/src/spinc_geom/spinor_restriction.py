"""Restriction of the ambient Killing spinor of E(kappa, tau) to a surface.

On the surface, Clifford multiplication and conjugation are

    X . phi = X . nu . psi,      phi-bar = i nu . psi

computed in Sigma_3.  The spinor keeps the components of the ambient spinor in
the trivialization of the ambient chart frame; the surface connection in that
trivialization is

    nabla_X phi = X(phi) - Lambda(X) phi + 1/2 omega_12(X) t1.t2. phi + 1/2 A(X) phi

with ``Lambda(X)`` the spin lift of ``R^T X(R)`` (``R`` has rows ``t1, t2, nu``),
``omega_12(X) = g(nabla_X t1, t2)`` from the induced metric alone and ``A`` the
pulled-back auxiliary connection.  Only ``R``, ``omega_12`` and ``A`` are
differentiated by finite differences.

The intrinsic model Sigma_2 (``gamma_a = i sigma_a``, conjugation ``sigma_3``)
is reached through ``U S^dagger`` where ``S`` lifts ``R^T`` and
``U = diag(1, -i)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .clifford import SIGMA, clifford_rep, herm_product, norm2, vector_matrix
from .errors import FrameError, ZeroSpinorError
from .models import chart_frame
from .spin_connection import aux_connection, connection_matrices, killing_spinor
from .surfaces_ekt import OFFSETS, SurfaceDataEKT, central_first, orthonormal_coords

REP2 = clifford_rep(2)
REP3 = clifford_rep(3)
_GG = np.einsum("jab,kbc->jkac", REP3.gamma, REP3.gamma)
U_SIGMA2 = np.diag([1.0, -1.0j])


@dataclass(frozen=True)
class SurfaceClifford:
    """Clifford action of ``t1``, ``t2`` (``c[..., a]``) and conjugation ``w``."""

    c: np.ndarray  # (..., 2, k, k)
    w: np.ndarray  # (..., k, k)

    def mul(self, X, phi):
        """``X . phi`` for ``X`` given in ``(t1, t2)`` components."""
        M = np.einsum("...a,...akl->...kl", X, self.c)
        return np.einsum("...kl,...l->...k", M, phi)

    def bar(self, phi):
        return np.einsum("...kl,...l->...k", self.w, phi)


def intrinsic_clifford() -> SurfaceClifford:
    return SurfaceClifford(REP2.gamma, np.diag([1.0 + 0j, -1.0]))


def ambient_clifford(frame) -> SurfaceClifford:
    """Surface Clifford structure inside Sigma_3 from rows ``t1, t2, nu``."""
    nu = vector_matrix(REP3, frame[..., 2, :])
    c = np.stack([vector_matrix(REP3, frame[..., a, :]) @ nu for a in range(2)], -3)
    return SurfaceClifford(c, 1j * nu)


def spin_lift(frame) -> np.ndarray:
    """``S`` in SU(2) with ``S e_a S^-1 = t_a`` (rows of ``frame``)."""
    frame = np.asarray(frame, dtype=float)
    flat = frame.reshape(-1, 3, 3)
    q = Rotation.from_matrix(np.swapaxes(flat, -1, -2)).as_quat()
    S = q[:, 3, None, None] * np.eye(2) - 1j * np.einsum("na,akl->nkl", q[:, :3], SIGMA)
    return S.reshape(frame.shape[:-2] + (2, 2))


def check_frame(frame, tol: float = 1e-8):
    frame = np.asarray(frame, dtype=float)
    err = np.abs(frame @ np.swapaxes(frame, -1, -2) - np.eye(3)).max()
    det = np.linalg.det(frame)
    if err > tol or np.any(det < 0):
        raise FrameError(f"adapted frame not oriented orthonormal (defect {err:.3g})")


@dataclass(frozen=True)
class RestrictedSpinor:
    phi: np.ndarray  # (N, 2) in the intrinsic model Sigma_2
    frame: np.ndarray  # (N, 3, 3) rows t1, t2, nu
    psi: np.ndarray  # (N, 2) ambient components


def restrict_ambient_spinor(frame, psi) -> RestrictedSpinor:
    frame = np.asarray(frame, dtype=float)
    check_frame(frame)
    psi = np.broadcast_to(np.asarray(psi, dtype=complex), frame.shape[:-2] + (2,))
    S = spin_lift(frame)
    P = U_SIGMA2 @ np.conj(np.swapaxes(S, -1, -2))
    return RestrictedSpinor(np.einsum("...kl,...l->...k", P, psi), frame, np.array(psi))


def to_sigma2(frame) -> np.ndarray:
    """Matrix mapping ambient components to the intrinsic model."""
    S = spin_lift(frame)
    return U_SIGMA2 @ np.conj(np.swapaxes(S, -1, -2))


# ---------------------------------------------------------------- algebra


def extract_f_T(phi, cl: SurfaceClifford | None = None):
    """``f = <phi, phi-bar> / |phi|^2`` and ``T`` in ``(t1, t2)`` components."""
    if cl is None:
        cl = intrinsic_clifford()
    phi = np.asarray(phi, dtype=complex)
    n2 = norm2(phi)
    if np.any(n2 < 1e-16):
        raise ZeroSpinorError("spinor vanishes; f and T undefined")
    f = np.real(herm_product(phi, cl.bar(phi))) / n2
    e = np.eye(2)
    T1 = np.real(herm_product(1j * cl.mul(e[1], phi), phi)) / n2
    T2 = -np.real(herm_product(1j * cl.mul(e[0], phi), phi)) / n2
    return f, np.stack([T1, T2], -1)


def theta_identity_residual(phi, cl: SurfaceClifford | None = None) -> float:
    """``|T . phi + f phi - phi-bar|`` for unit-normalized ``phi``."""
    if cl is None:
        cl = intrinsic_clifford()
    phi = np.asarray(phi, dtype=complex)
    phi = phi / np.sqrt(norm2(phi))[..., None]
    f, T = extract_f_T(phi, cl)
    r = cl.mul(T, phi) + f[..., None] * phi - cl.bar(phi)
    return float(np.max(np.linalg.norm(r, axis=-1)))


def killing_derivative(E_hat, tau, phi, cl: SurfaceClifford | None = None):
    """``nabla_{t_i} phi`` prescribed by the restricted Killing equation
    (shape ``(..., 2, k)``); ``E_hat`` is the shape operator in ``(t1, t2)``."""
    if cl is None:
        cl = intrinsic_clifford()
    e = np.eye(2)
    out = []
    for i in range(2):
        EX = E_hat[..., :, i]
        out.append(-0.5 * cl.mul(EX, phi) + 0.5j * tau * cl.mul(e[i], cl.bar(phi)))
    return np.stack(out, -2)


def dirac(nabla_phi, cl: SurfaceClifford):
    """``D phi = sum_i t_i . nabla_{t_i} phi``."""
    return sum(cl.mul(np.eye(2)[i], nabla_phi[..., i, :]) for i in range(2))


def dirac_contraction_residual(E_hat, tau, phi, cl: SurfaceClifford | None = None) -> float:
    """Algebraic check that the restricted Killing equation implies
    ``D phi = H phi - i tau phi-bar``."""
    if cl is None:
        cl = intrinsic_clifford()
    nab = killing_derivative(E_hat, tau, phi, cl)
    H = 0.5 * np.trace(E_hat, axis1=-2, axis2=-1)
    r = dirac(nab, cl) - H[..., None] * phi + 1j * tau * cl.bar(phi)
    return float(np.max(np.abs(r)))


@dataclass(frozen=True)
class EnergyMomentum:
    ell: np.ndarray  # (..., 2, 2) symmetric
    T_plus: np.ndarray  # (..., 2, 2) as [X, Y]
    T_minus: np.ndarray
    F: np.ndarray
    T_phi: np.ndarray  # symmetric reconstruction tensor


def energy_momentum(nabla_phi, phi, cl: SurfaceClifford | None = None) -> EnergyMomentum:
    if cl is None:
        cl = intrinsic_clifford()
    phi = np.asarray(phi, dtype=complex)
    n2 = norm2(phi)
    if np.any(n2 < 1e-8):
        raise ZeroSpinorError("spinor vanishes somewhere; energy-momentum undefined")
    e = np.eye(2)
    raw = np.stack(
        [
            np.stack([np.real(herm_product(cl.mul(e[i], nabla_phi[..., j, :]), phi)) for j in range(2)], -1)
            for i in range(2)
        ],
        -2,
    ) / n2[..., None, None]
    ell = 0.5 * (raw + np.swapaxes(raw, -1, -2))
    bar_nab = np.stack([cl.bar(nabla_phi[..., i, :]) for i in range(2)], -2)
    bar_phi = cl.bar(phi)
    nab_p, nab_m = 0.5 * (nabla_phi + bar_nab), 0.5 * (nabla_phi - bar_nab)
    phi_p, phi_m = 0.5 * (phi + bar_phi), 0.5 * (phi - bar_phi)

    def tensor(nab, other):
        return np.stack(
            [
                np.stack([np.real(herm_product(nab[..., i, :], cl.mul(e[j], other))) for j in range(2)], -1)
                for i in range(2)
            ],
            -2,
        )

    Tp = tensor(nab_p, phi_m)
    Tm = tensor(nab_m, phi_p)
    F = Tp + Tm
    T_phi = -(F + np.swapaxes(F, -1, -2)) / (2 * n2[..., None, None])
    return EnergyMomentum(ell, Tp, Tm, F, T_phi)


def energy_momentum_identities(nabla_phi, phi, H, tau, cl: SurfaceClifford | None = None) -> dict:
    """Residuals of the trace identity, the antisymmetry identity and the
    reconstruction ``nabla_X phi = -T(X) . phi + i (tau/2) X . phi-bar``."""
    if cl is None:
        cl = intrinsic_clifford()
    em = energy_momentum(nabla_phi, phi, cl)
    bar_phi = cl.bar(phi)
    np2 = norm2(0.5 * (phi + bar_phi))
    nm2 = norm2(0.5 * (phi - bar_phi))
    H = np.asarray(H, dtype=float)
    tr_p = np.trace(em.T_plus, axis1=-2, axis2=-1) + H * nm2
    tr_m = np.trace(em.T_minus, axis1=-2, axis2=-1) + H * np2
    as_p = em.T_plus[..., 0, 1] - em.T_plus[..., 1, 0] - tau * nm2
    as_m = em.T_minus[..., 0, 1] - em.T_minus[..., 1, 0] - tau * np2
    e = np.eye(2)
    rec = 0.0
    for i in range(2):
        r = nabla_phi[..., i, :] + cl.mul(em.T_phi[..., i, :], phi) - 0.5j * tau * cl.mul(e[i], bar_phi)
        rec = max(rec, float(np.max(np.abs(r))))
    return {
        "trace": float(max(np.max(np.abs(tr_p)), np.max(np.abs(tr_m)))),
        "antisymmetry": float(max(np.max(np.abs(as_p)), np.max(np.abs(as_m)))),
        "reconstruction": rec,
    }


# ---------------------------------------------------------------- on a surface


@dataclass(frozen=True)
class SurfaceSpinorField:
    """Restricted spinor with its finite-difference covariant derivative."""

    phi: np.ndarray  # (N, 2) ambient components
    nabla: np.ndarray  # (N, 2, 2): nabla_{t_i} phi as [i, k]
    norm_grad: np.ndarray  # (N, 2): t_i(|phi|^2)
    omega: np.ndarray  # (N,): Omega(t1, t2) from the pulled-back A
    cl: SurfaceClifford
    E_hat: np.ndarray  # (N, 2, 2) shape operator in (t1, t2)
    T_hat: np.ndarray  # (N, 2)
    f: np.ndarray
    H: np.ndarray
    tau: float


def _aux_on(spec, st, chirality):
    """``A(d_a)`` at every stencil point: shape (9, N, 2)."""
    fr = chart_frame(spec, st.point)
    aux = aux_connection(spec, fr, chirality)
    return np.einsum("...ai,...i->...a", st.tangent, aux.values), fr, aux


def restricted_spinor_field(
    spec, data: SurfaceDataEKT, field=None, chirality: int = 1
) -> SurfaceSpinorField:
    """Covariant derivative of the restricted spinor over the sample grid.

    ``field(u, v)`` optionally returns ambient components on arbitrary
    parameter arrays (default: the frame-constant Killing spinor)."""
    st = data.stencil
    h = data.h
    check_frame(st.frame[0])
    base = killing_spinor(chirality)
    if field is None:
        phis = np.broadcast_to(base, st.f.shape + (2,)).astype(complex)
    else:
        su = data.u[None, :] + h * OFFSETS[:, 0, None]
        sv = data.v[None, :] + h * OFFSETS[:, 1, None]
        phis = np.asarray(field(su, sv), dtype=complex)
    phi = phis[0]
    R = st.frame
    dR = central_first(R, h)  # (N, 2, 3, 3)
    B = np.einsum("nij,naik->najk", R[0], dR)  # R^T d_a R
    Lam = 0.25 * np.einsum("najk,jkpq->napq", B, _GG)
    Q = orthonormal_coords(st.g)  # (9, N, 2, 2) columns t1, t2
    dQ1 = central_first(Q[..., :, 0], h)  # (N, 2, 2) [a, c]
    Gam = data.christoffel
    g = data.g
    Q0 = Q[0]
    nab_t1 = dQ1 + np.einsum("ncab,nb->nac", Gam, Q0[..., :, 0])
    omega12 = np.einsum("nac,ncd,nd->na", nab_t1, g, Q0[..., :, 1])
    A, _, _ = _aux_on(spec, st, chirality)
    t1t2 = vector_matrix(REP3, R[0][:, 0, :]) @ vector_matrix(REP3, R[0][:, 1, :])
    conn = (
        -Lam
        + 0.5 * omega12[:, :, None, None] * t1t2[:, None]
        + 0.5 * A[0][:, :, None, None] * np.eye(2)
    )
    dphi = central_first(phis, h)  # (N, 2, k)
    nab_coord = dphi + np.einsum("napq,nq->nap", conn, phi)
    nabla = np.einsum("nai,nak->nik", Q0, nab_coord)
    n2 = norm2(phis)
    norm_grad = np.einsum("nai,na->ni", Q0, central_first(n2, h))
    dA = central_first(A, h)  # (N, 2[deriv], 2[component])
    omega = np.real((dA[:, 0, 1] - dA[:, 1, 0]) / 1j) / np.sqrt(np.linalg.det(g))
    # shape operator and T in the orthonormal frame
    Qinv = np.einsum("nca,ncd->nad", Q0, g)  # Q^T g
    E_hat = Qinv @ data.E @ Q0
    T_hat = np.einsum("nad,nd->na", Qinv, data.T)
    return SurfaceSpinorField(
        phi=phi,
        nabla=nabla,
        norm_grad=norm_grad,
        omega=omega,
        cl=ambient_clifford(R[0]),
        E_hat=E_hat,
        T_hat=T_hat,
        f=data.f,
        H=data.H,
        tau=spec.tau,
    )


def restricted_killing_residual(sf: SurfaceSpinorField) -> float:
    e = np.eye(2)
    cl = sf.cl
    res = 0.0
    for i in range(2):
        r = (
            sf.nabla[:, i]
            + 0.5 * cl.mul(sf.E_hat[:, :, i], sf.phi)
            - 0.5j * sf.tau * cl.mul(e[i], cl.bar(sf.phi))
        )
        res = max(res, float(np.max(np.linalg.norm(r, axis=-1))))
    return res


def dirac_surface(sf: SurfaceSpinorField) -> dict:
    D = dirac(sf.nabla, sf.cl)
    r = D - sf.H[:, None] * sf.phi + 1j * sf.tau * sf.cl.bar(sf.phi)
    return {
        "dirac": float(np.max(np.linalg.norm(r, axis=-1))),
        "norm_drift": float(np.max(np.abs(sf.norm_grad))),
    }


def curvature_residual(spec, sf: SurfaceSpinorField) -> float:
    """``max |Omega(t1, t2) + (kappa - 4 tau^2) f|``."""
    return float(np.max(np.abs(sf.omega + spec.bundle_defect * sf.f)))


def f_T_residuals(sf: SurfaceSpinorField) -> dict:
    f, T = extract_f_T(sf.phi, sf.cl)
    return {
        "f": float(np.max(np.abs(f - sf.f))),
        "T": float(np.max(np.abs(T - sf.T_hat))),
        "unit": float(np.max(np.abs(f**2 + np.sum(T**2, -1) - 1))),
    }


def energy_momentum_residuals(sf: SurfaceSpinorField) -> dict:
    em = energy_momentum(sf.nabla, sf.phi, sf.cl)
    out = energy_momentum_identities(sf.nabla, sf.phi, sf.H, sf.tau, sf.cl)
    out["shape"] = float(np.max(np.abs(2 * em.ell - sf.E_hat)))
    return out


def dirac_gauss_residual(spec, data: SurfaceDataEKT, sf: SurfaceSpinorField, chirality: int = 1) -> float:
    """``D phi - (H phi - nu . D^N psi - nabla^N_nu psi)`` with the ambient
    Dirac operator and derivative evaluated in the chart frame."""
    p = data.center.point
    fr = chart_frame(spec, p)
    M = connection_matrices(fr, aux_connection(spec, fr, chirality))
    Mpsi = np.einsum("niab,nb->nia", M, sf.phi)
    DN = np.einsum("iab,nib->na", REP3.gamma, Mpsi)
    nu = data.center.frame[:, 2, :]
    nab_nu = np.einsum("ni,nia->na", nu, Mpsi)
    rhs = sf.H[:, None] * sf.phi - np.einsum("nab,nb->na", vector_matrix(REP3, nu), DN) - nab_nu
    return float(np.max(np.linalg.norm(dirac(sf.nabla, sf.cl) - rhs, axis=-1)))
