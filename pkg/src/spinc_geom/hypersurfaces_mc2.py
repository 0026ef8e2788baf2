"""Real hypersurfaces of the complex space form M^2_C(c).

Data live on an orthonormal frame ``(e1, e2, e3)`` of a homogeneous 3-manifold
with the almost contact structure ``X e1 = e2, X e2 = -e1, X e3 = 0`` and
``xi = e3``.  Covariant derivatives are exact frame algebra: for a (1,1)-tensor
``T`` we have ``nabla_i T = e_i(T) + L_i T - T L_i`` with ``L_i = gamma[i]^T``.

Compatibility equations checked (all vectors in frame components):

    Gauss    R(X,Y,Z,W) = c {<Y,Z><X,W> - <X,Z><Y,W> + <XY,Z><XX,W>
                             - <XX,Z><XY,W> - 2<XX,Y><XZ,W>}
                          + <EY,Z><EX,W> - <EX,Z><EY,W>
    Codazzi  (nabla_X E)Y - (nabla_Y E)X = c (eta(X) XY - eta(Y) XX - 2 <XX,Y> xi)
    (nabla_X X)Y = eta(Y) EX - <EX,Y> xi
    nabla_X xi = X E X

(``X`` in the structure terms stands for the endomorphism, written ``frak`` in code.)

The homogeneous Sasaki instance for ``c`` is E(4c + 4, -1) in its canonical
frame; there ``E = Id - c eta (x) xi`` satisfies every equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clifford import Sigma4_PLUS, clifford_rep, two_form_matrix, vector_matrix
from .errors import FrameError, PreconditionError, ValidationError
from .models import FrameGeometry, ModelSpec, canonical_frame, frame_curvature

REP3 = clifford_rep(3)
REP4 = clifford_rep(4)

FRAK = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])  # columns: X e_m
XI = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class HyperDataCSF:
    frame: FrameGeometry
    E: np.ndarray  # (3, 3), E e_m = column m
    c: float
    frak: np.ndarray = field(default_factory=lambda: FRAK.copy())
    xi: np.ndarray = field(default_factory=lambda: XI.copy())
    dE: np.ndarray | None = None  # (3, 3, 3): e_l(E) as [l, k, m]

    def __post_init__(self):
        if self.c == 0:
            raise ValidationError("complex space form needs c != 0")
        E = np.asarray(self.E, dtype=float)
        if not np.allclose(E, E.T, atol=1e-12, rtol=0):
            raise ValidationError("E must be symmetric")
        F, xi = self.frak, self.xi
        err = max(
            np.abs(F @ F + np.eye(3) - np.outer(xi, xi)).max(),
            abs(xi @ xi - 1),
            np.abs(F @ xi).max(),
        )
        if err > 1e-10:
            raise ValidationError(f"not an almost contact metric structure (defect {err:.3g})")

    @property
    def eta(self):
        return self.xi

    @property
    def H(self) -> float:
        return float(np.trace(self.E)) / 3


def _L(frame: FrameGeometry) -> np.ndarray:
    return np.swapaxes(frame.gamma, -1, -2)


def cov_endo(frame: FrameGeometry, T, dT=None) -> np.ndarray:
    """``nabla_i T`` for a (1,1)-tensor, shape (3, 3, 3) as [i, k, m]."""
    L = _L(frame)
    out = np.einsum("ikn,nm->ikm", L, T) - np.einsum("kn,inm->ikm", T, L)
    if dT is not None:
        out = out + dT
    return out


def cov_vector(frame: FrameGeometry, V) -> np.ndarray:
    """``nabla_i V`` for a frame-constant vector, shape (3, 3) as [i, k]."""
    return np.einsum("ikn,n->ik", _L(frame), V)


def codazzi_lhs(data: HyperDataCSF) -> np.ndarray:
    """``d^nabla E(e_i, e_j)`` as [i, j, k]."""
    nE = cov_endo(data.frame, data.E, data.dE)
    # (nabla_i E) e_j - (nabla_j E) e_i
    a = np.einsum("ikj->ijk", nE)
    return a - np.swapaxes(a, 0, 1)


def codazzi_rhs(data: HyperDataCSF) -> np.ndarray:
    F, xi, c = data.frak, data.xi, data.c
    eta = data.eta
    out = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            Fi, Fj = F[:, i], F[:, j]
            out[i, j] = c * (eta[i] * Fj - eta[j] * Fi - 2 * (Fi @ np.eye(3)[j]) * xi)
    return out


def gauss_rhs(data: HyperDataCSF) -> np.ndarray:
    """Model curvature ``[i, j, k, l] = g(R(e_i, e_j) e_k, e_l)``."""
    d = np.eye(3)
    F, E, c = data.frak, np.asarray(data.E, dtype=float), data.c
    return c * (
        np.einsum("jk,il->ijkl", d, d)
        - np.einsum("ik,jl->ijkl", d, d)
        + np.einsum("kj,li->ijkl", F, F)
        - np.einsum("ki,lj->ijkl", F, F)
        - 2 * np.einsum("ji,lk->ijkl", F, F)
    ) + np.einsum("kj,li->ijkl", E, E) - np.einsum("ki,lj->ijkl", E, E)


@dataclass(frozen=True)
class CSFResidual:
    gauss: float
    codazzi: float
    cond3: float
    cond4: float

    @property
    def max(self) -> float:
        return max(self.gauss, self.codazzi, self.cond3, self.cond4)

    def as_dict(self) -> dict:
        return {"gauss": self.gauss, "codazzi": self.codazzi, "cond3": self.cond3, "cond4": self.cond4}


def gauss_codazzi_residuals_csf(data: HyperDataCSF) -> CSFResidual:
    R = frame_curvature(data.frame)
    gauss = float(np.abs(R - gauss_rhs(data)).max())
    cod = float(np.linalg.norm(codazzi_lhs(data) - codazzi_rhs(data), axis=-1).max())
    E = np.asarray(data.E, dtype=float)
    nF = cov_endo(data.frame, data.frak)
    c3 = 0.0
    for i in range(3):
        for j in range(3):
            lhs = nF[i][:, j]
            rhs = data.eta[j] * E[:, i] - (E[:, i] @ np.eye(3)[j]) * data.xi
            c3 = max(c3, float(np.linalg.norm(lhs - rhs)))
    nxi = cov_vector(data.frame, data.xi)
    c4 = float(np.linalg.norm(nxi - (data.frak @ E).T, axis=-1).max())
    return CSFResidual(gauss, cod, c3, c4)


# -------------------------------------------------------------- instances


def sasaki_shape(c: float):
    """``E = Id - c eta (x) xi`` and ``H = (3 - c) / 3``."""
    if c == 0:
        raise ValidationError("c must be nonzero")
    E = np.eye(3) - c * np.outer(XI, XI)
    return E, (3 - c) / 3


def sasaki_frame(c: float) -> FrameGeometry:
    return canonical_frame(ModelSpec.ekt(4 * c + 4, -1.0))


def sasaki_instance(c: float, E=None) -> HyperDataCSF:
    if E is None:
        E = sasaki_shape(c)[0]
    return HyperDataCSF(sasaki_frame(c), np.asarray(E, dtype=float), c)


def sasaki_structure_residual(frame: FrameGeometry, frak=FRAK, xi=XI) -> float:
    """Max of ``|nabla_X xi - X X|`` and ``|(nabla_X X)Y - eta(Y) X + <X,Y> xi|``."""
    r = float(np.abs(cov_vector(frame, xi) - frak.T).max())
    nF = cov_endo(frame, frak)
    for i in range(3):
        for j in range(3):
            rhs = xi[j] * np.eye(3)[i] - float(i == j) * xi
            r = max(r, float(np.abs(nF[i][:, j] - rhs).max()))
    return r


def ekt_counterexample(kappa: float, tau: float) -> HyperDataCSF:
    """``E = -tau Id`` on E(kappa, tau) with ``c = (kappa - 4 tau^2) / 6``."""
    spec = ModelSpec.ekt(kappa, tau)
    return HyperDataCSF(canonical_frame(spec), -tau * np.eye(3), spec.bundle_defect / 6)


# -------------------------------------------------------------- Clifford commutators


def commutator_coefficients(E, i: int, j: int) -> np.ndarray:
    """Coefficients of ``E e_i . E e_j - E e_j . E e_i`` on ``(e1, e2, e3)``
    (0-based ``i``, ``j``)."""
    a = np.asarray(E, dtype=float)
    if a.shape != (3, 3) or not np.allclose(a, a.T, atol=1e-12, rtol=0):
        raise ValidationError("E must be a symmetric 3 x 3 matrix")
    return np.array(
        [
            2 * (a[j, 2] * a[i, 1] - a[j, 1] * a[i, 2]),
            2 * (a[i, 2] * a[j, 0] - a[i, 0] * a[j, 2]),
            2 * (a[i, 0] * a[j, 1] - a[i, 1] * a[j, 0]),
        ]
    )


def commutator_brute(E, i: int, j: int) -> np.ndarray:
    E = np.asarray(E, dtype=float)
    A, B = vector_matrix(REP3, E[:, i]), vector_matrix(REP3, E[:, j])
    return A @ B - B @ A


def commutator_residual(E, i: int, j: int) -> float:
    lhs = commutator_brute(E, i, j)
    rhs = vector_matrix(REP3, commutator_coefficients(E, i, j))
    return float(np.abs(lhs - rhs).max())


# -------------------------------------------------------------- restricted spinor


def kahler_form() -> np.ndarray:
    """``g(J X, Y)`` for ``J e1 = e2``, ``J e3 = e4``."""
    K = np.zeros((4, 4))
    K[0, 1], K[2, 3] = 1.0, 1.0
    return K - K.T


def ambient_checks(c: float) -> dict:
    """Residuals in Sigma_4 for the parallel spinor ``psi`` in Sigma_4^+:
    ``Omega . psi = 12 c i psi`` with ``Omega = -6c Kahler``, ``xi . nu . psi =
    -i psi`` for ``nu = e4``, ``xi = -J nu = e3``, and
    ``(nu _| Omega) . nu . psi = -6 c i psi``."""
    psi = Sigma4_PLUS[:, 0]
    Om = -6 * c * kahler_form()
    om = float(np.linalg.norm(two_form_matrix(REP4, Om) @ psi - 12j * c * psi))
    nu = np.eye(4)[3]
    xi = np.eye(4)[2]
    nuM = vector_matrix(REP4, nu)
    xi_res = float(np.linalg.norm(vector_matrix(REP4, xi) @ nuM @ psi + 1j * psi))
    contr = nu @ Om
    nc = float(np.linalg.norm(vector_matrix(REP4, contr) @ nuM @ psi + 6j * c * psi))
    return {"ambient_omega": om, "ambient_xi": xi_res, "normal_contraction": nc}


def sasaki_aux(c: float) -> np.ndarray:
    """Auxiliary connection ``A = -3 i c eta`` on the Sasaki instance."""
    return -3j * c * XI


def aux_omega(frame: FrameGeometry, A) -> np.ndarray:
    """``Omega`` with ``dA = i Omega`` for frame-constant ``A``."""
    return np.real(-np.einsum("ijm,m->ij", frame.bracket, A) / 1j)


def spinor_derivative(frame: FrameGeometry, A, phi) -> np.ndarray:
    """``nabla_{e_i} phi`` for frame-constant ``phi``, shape (3, 2)."""
    gg = np.einsum("jab,kbc->jkac", REP3.gamma, REP3.gamma)
    M = 0.25 * np.einsum("ijk,jkab->iab", frame.gamma, gg) + 0.5 * np.asarray(A)[:, None, None] * np.eye(2)
    return M @ phi


def check_adapted(data: HyperDataCSF, tol: float = 1e-8):
    if np.abs(data.frak[:, 0] - np.eye(3)[1]).max() > tol or np.abs(data.xi - XI).max() > tol:
        raise FrameError("frame not adapted: need X e1 = e2 and xi = e3")


def restrict_parallel_residual(data: HyperDataCSF, A=None, phi=None) -> dict:
    """Residuals of ``nabla_X phi + 1/2 E X . phi = 0``, ``xi . phi = -i phi`` and
    ``Omega . phi = 6 c i phi`` with ``Omega_12 = -6c`` (plus the ambient checks)."""
    check_adapted(data)
    if A is None:
        A = sasaki_aux(data.c)
    if phi is None:
        phi = np.array([1.0 + 0j, 0.0])
    phi = np.asarray(phi, dtype=complex)
    nab = spinor_derivative(data.frame, A, phi)
    E = np.asarray(data.E, dtype=float)
    kill = max(
        float(np.linalg.norm(nab[i] + 0.5 * vector_matrix(REP3, E[:, i]) @ phi)) for i in range(3)
    )
    xi_res = float(np.linalg.norm(vector_matrix(REP3, data.xi) @ phi + 1j * phi))
    Om_model = np.zeros((3, 3))
    Om_model[0, 1], Om_model[1, 0] = -6 * data.c, 6 * data.c
    om = float(np.linalg.norm(two_form_matrix(REP3, Om_model) @ phi - 6j * data.c * phi))
    form = float(np.abs(aux_omega(data.frame, A) - Om_model).max())
    out = {"killing": kill, "xi_eigen": xi_res, "omega_action": om, "omega_form": form}
    out.update(ambient_checks(data.c))
    return out


# -------------------------------------------------------------- Gauss iff Codazzi


def hypothesis_family(kappa: float, tau: float, e33: float):
    """Data on E(kappa, tau) satisfying the spinor hypotheses with the frame-
    constant spinor ``(1, 0)``: ``E = -tau (Id - eta (x) xi) + e33 eta (x) xi``,
    ``A_i = i (E_3i + gamma[i, 0, 1])`` and ``c = -Omega_12 / 6``.

    Returns ``(data, A)``; Codazzi (and Gauss) fail unless ``e33`` is special."""
    frame = canonical_frame(ModelSpec.ekt(kappa, tau))
    E = -tau * np.eye(3)
    E[2, 2] = e33
    A = 1j * (E[2, :] + frame.gamma[:, 0, 1])
    Om = aux_omega(frame, A)
    c = -Om[0, 1] / 6
    if abs(c) < 1e-14:
        raise PreconditionError("hypotheses force c = 0")
    return HyperDataCSF(frame, E, c), A


@dataclass(frozen=True)
class ProbeReport:
    identities: np.ndarray  # (3, 4): per X = e_i, [trace, 3 vector components]
    gauss_residual: float  # max |Ric - Ric_model|
    codazzi_residual: float
    predicted_ricci_defect: np.ndarray  # (3, 3)
    ricci_defect: np.ndarray  # (3, 3)
    hypotheses: dict

    @property
    def max_identity(self) -> float:
        return float(np.abs(self.identities).max())


def gauss_iff_codazzi_probe(data: HyperDataCSF, A, phi=None, tol: float = 1e-10) -> ProbeReport:
    """Spinor Ricci identity projected on ``{phi, e1 phi, e2 phi, e3 phi}``.

    With ``C`` the Codazzi defect and ``G`` the Ricci defect of the Gauss
    equation, for every ``X = e_i``:

        sum_k <e_k, C(e_k, X)> = 0       and       G(X) = -sum_k e_k x C(e_k, X).

    These twelve scalar identities make Gauss and Codazzi equivalent."""
    hyp = restrict_parallel_residual(data, A, phi)
    bad = {k: v for k, v in hyp.items() if k in ("killing", "xi_eigen", "omega_form") and v > tol}
    if bad:
        raise PreconditionError(f"hypotheses of the equivalence fail: {bad}")
    C = codazzi_lhs(data) - codazzi_rhs(data)  # [k, x, :]
    ric = np.einsum("ijki->jk", frame_curvature(data.frame))
    ric_model = np.einsum("ijki->jk", gauss_rhs(data))
    G = ric - ric_model  # [x, :]
    ids = np.zeros((3, 4))
    pred = np.zeros((3, 3))
    for x in range(3):
        ids[x, 0] = sum(C[k, x, k] for k in range(3))
        pred[x] = -sum(np.cross(np.eye(3)[k], C[k, x]) for k in range(3))
        ids[x, 1:] = G[x] - pred[x]
    return ProbeReport(
        identities=ids,
        gauss_residual=float(np.abs(frame_curvature(data.frame) - gauss_rhs(data)).max()),
        codazzi_residual=float(np.linalg.norm(C, axis=-1).max()),
        predicted_ricci_defect=pred,
        ricci_defect=G,
        hypotheses=hyp,
    )
