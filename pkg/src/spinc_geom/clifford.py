"""Complex Clifford algebra Cl(n) and spinor module Sigma_n for n = 2, 3, 4.

Convention sheet
----------------
* Clifford relation ``e_i e_j + e_j e_i = -2 delta_ij`` (so ``X.X = -|X|^2``);
  every gamma matrix is skew-Hermitian, hence Clifford multiplication by a
  real vector is skew-adjoint for the Hermitian product.
* ``n = 2``: ``gamma_k = i sigma_k`` (k = 1, 2).  The complex volume element
  ``i e1 e2`` equals ``sigma_3``; Sigma^+ is spanned by ``(1, 0)``.
* ``n = 3``: ``gamma_k = -i sigma_k``.  Then ``e1 e2 e3 = -Id`` and the
  volume element ``i^2 e1 e2 e3`` acts as the identity.  In particular
  ``e1 e2 = e3`` (cyclically), so ``X.Y = -<X, Y> + (X x Y).``.
* ``n = 4``: ``gamma_k = [[0, g_k], [g_k, 0]]`` for k = 1..3 with ``g_k`` the
  n = 3 matrices, and ``gamma_4 = [[0, -Id], [Id, 0]]``.  The volume element
  ``-e1 e2 e3 e4`` is ``diag(Id, -Id)``, so Sigma_4^+ is the upper block, and
  ``e_k e_4`` restricted to Sigma_4^+ is exactly the n = 3 gamma ``g_k``.
  This realizes ``Sigma_3 = Sigma_4^+`` with ``X. = X . nu .`` for
  ``nu = e_4``; the identification matrix is ``Sigma4_PLUS`` (4 x 2).
* Hermitian product ``<a, b> = sum_k a_k conj(b_k)`` (linear in the first slot).
* Two-forms act by ``Omega. = sum_{i<j} Omega_ij e_i e_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
ID2 = np.eye(2, dtype=complex)


def _gammas(n: int) -> np.ndarray:
    if n == 2:
        return 1j * SIGMA[:2]
    if n == 3:
        return -1j * SIGMA
    if n == 4:
        g3 = -1j * SIGMA
        zero = np.zeros((2, 2), dtype=complex)
        out = [np.block([[zero, g], [g, zero]]) for g in g3]
        out.append(np.block([[zero, -ID2], [ID2, zero]]))
        return np.array(out)
    raise DimensionError(f"Clifford representation only for n in {{2, 3, 4}}, got {n}")


@dataclass(frozen=True)
class CliffordRep:
    dim: int
    gamma: np.ndarray = field(repr=False)

    @property
    def spinor_dim(self) -> int:
        return self.gamma.shape[-1]


_CACHE: dict[int, CliffordRep] = {}


def clifford_rep(n: int) -> CliffordRep:
    if n not in _CACHE:
        g = _gammas(n)
        g.setflags(write=False)
        _CACHE[n] = CliffordRep(n, g)
    return _CACHE[n]


# columns span Sigma_4^+ inside Sigma_4
Sigma4_PLUS = np.vstack([ID2, np.zeros((2, 2), dtype=complex)])


def _check(rep: CliffordRep, X=None, psi=None):
    if X is not None and np.shape(X)[-1] != rep.dim:
        raise DimensionError(f"vector of length {np.shape(X)[-1]} for Cl({rep.dim})")
    if psi is not None and np.shape(psi)[-1] != rep.spinor_dim:
        raise DimensionError(
            f"spinor of length {np.shape(psi)[-1]}, expected {rep.spinor_dim}"
        )


def vector_matrix(rep: CliffordRep, X) -> np.ndarray:
    """Matrix of Clifford multiplication by ``X`` (batched over leading axes)."""
    _check(rep, X=X)
    return np.einsum("...i,ijk->...jk", np.asarray(X, dtype=float), rep.gamma)


def clifford_mul(rep: CliffordRep, X, psi) -> np.ndarray:
    _check(rep, X, psi)
    return np.einsum("...jk,...k->...j", vector_matrix(rep, X), psi)


def volume_element(rep: CliffordRep) -> np.ndarray:
    n = rep.dim
    w = (1j) ** ((n + 1) // 2) * np.eye(rep.spinor_dim, dtype=complex)
    for g in rep.gamma:
        w = w @ g
    return w


def volume_action(rep: CliffordRep, psi) -> np.ndarray:
    _check(rep, psi=psi)
    return np.einsum("jk,...k->...j", volume_element(rep), psi)


def chirality_split(rep: CliffordRep, psi, normal=None) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(psi+, psi-)``.

    For n = 3 the splitting is the one induced on a surface with unit normal
    ``normal`` (ambient frame components): the surface volume element is
    ``i t1.t2. = i nu.``.
    """
    w = _chirality_operator(rep, normal)
    wpsi = np.einsum("...jk,...k->...j", w, psi)
    return 0.5 * (psi + wpsi), 0.5 * (psi - wpsi)


def _chirality_operator(rep: CliffordRep, normal) -> np.ndarray:
    if rep.dim % 2 == 0:
        if normal is not None:
            raise ValidationError("even dimension carries its own chirality")
        return volume_element(rep)
    if rep.dim != 3 or normal is None:
        raise ValidationError("odd dimension needs the unit normal of a surface")
    return 1j * vector_matrix(rep, normal)


def conjugate(rep: CliffordRep, psi, normal=None) -> np.ndarray:
    """``psi+ - psi-`` for the (possibly induced) chirality splitting."""
    _check(rep, psi=psi)
    w = _chirality_operator(rep, normal)
    return np.einsum("...jk,...k->...j", w, psi)


def two_form_matrix(rep: CliffordRep, omega, *, atol: float = 1e-12) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if omega.shape[-2:] != (rep.dim, rep.dim):
        raise DimensionError(f"two-form of shape {omega.shape} for Cl({rep.dim})")
    if not np.allclose(omega, -np.swapaxes(omega, -1, -2), atol=atol, rtol=0):
        raise ValidationError("two-form must be antisymmetric")
    out = np.zeros(omega.shape[:-2] + (rep.spinor_dim, rep.spinor_dim), dtype=complex)
    for i in range(rep.dim):
        for j in range(i + 1, rep.dim):
            out = out + omega[..., i, j, None, None] * (rep.gamma[i] @ rep.gamma[j])
    return out


def two_form_action(rep: CliffordRep, omega, psi) -> np.ndarray:
    _check(rep, psi=psi)
    return np.einsum("...jk,...k->...j", two_form_matrix(rep, omega), psi)


def herm_product(phi, psi) -> np.ndarray:
    phi = np.asarray(phi)
    psi = np.asarray(psi)
    if phi.shape[-1] != psi.shape[-1]:
        raise DimensionError("spinors of different dimension")
    return np.sum(phi * np.conj(psi), axis=-1)


def norm2(psi) -> np.ndarray:
    return np.real(herm_product(psi, psi))
