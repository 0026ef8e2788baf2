"""Surface data (g, E, T, f) of immersions into E(kappa, tau) and residuals of
the compatibility equations

    K = det E + tau^2 + (kappa - 4 tau^2) f^2
    (nabla_X E) Y - (nabla_Y E) X = (kappa - 4 tau^2) f (<Y, T> X - <X, T> Y)
    nabla_X T = f (E X - tau J X)
    df(X) = -<E X - tau J X, T>.

Pointwise quantities (tangent vectors, normal, second fundamental form, T, f)
come from the symbolic chart derivatives and the exact chart connection.
Derivatives along the surface (of g, E, T, f) are central differences with
step ``h`` on the stencil ``(u +- h, v)``, ``(u, v +- h)``, ``(u +- h, v +- h)``.

Conventions: ``(t1, t2, nu)`` is positively oriented with ``t1`` along
``d/du``; ``g(E X, Y) = <nabla_X Y, nu>``; ``J t1 = t2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import ParametricChart
from .errors import DegenerateChartError, StencilError
from .models import ModelSpec, chart_christoffel_coords, coordinate_chart_ekt, Kind, _require

DET_MIN = 1e-10
# stencil offsets in units of h; index 0 is the sample point itself
OFFSETS = np.array(
    [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
    dtype=float,
)


@dataclass(frozen=True)
class PointData:
    """Pointwise (derivative-free) data at an array of parameter values."""

    point: np.ndarray  # (..., 3) chart coordinates
    tangent: np.ndarray  # (..., 2, 3) frame components of F_u, F_v
    frame: np.ndarray  # (..., 3, 3) rows t1, t2, nu in frame components
    g: np.ndarray  # (..., 2, 2)
    second: np.ndarray  # (..., 2, 2) h_ab = <nabla_{F_a} F_b, nu>
    E: np.ndarray  # (..., 2, 2) mixed tensor E^c_a
    T: np.ndarray  # (..., 2) coordinate components
    f: np.ndarray  # (...)


def pointwise_data(spec: ModelSpec, chart: ParametricChart, u, v) -> PointData:
    _require(spec, Kind.EKT)
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    p = chart.point(u, v)
    cp = coordinate_chart_ekt(spec, p)
    Fa = chart.first(u, v)
    Fab = chart.second(u, v)
    X = np.einsum("...ij,...aj->...ai", cp.coframe, Fa)
    g = np.einsum("...ai,...bi->...ab", X, X)
    det = np.linalg.det(g)
    if np.any(det < DET_MIN):
        k = np.unravel_index(np.argmin(det), det.shape)
        raise DegenerateChartError(
            f"induced metric degenerate (det g = {det[k]:.3g}) at (u, v) = ({u[k]:.6g}, {v[k]:.6g})"
        )
    t1 = X[..., 0, :] / np.linalg.norm(X[..., 0, :], axis=-1, keepdims=True)
    w = X[..., 1, :] - np.sum(X[..., 1, :] * t1, -1, keepdims=True) * t1
    t2 = w / np.linalg.norm(w, axis=-1, keepdims=True)
    nu = np.cross(t1, t2)
    Gam = chart_christoffel_coords(spec, p)
    acc = Fab + np.einsum("...cij,...ai,...bj->...abc", Gam, Fa, Fa)
    hab = np.einsum("...ij,...abj,...i->...ab", cp.coframe, acc, nu)
    ginv = np.linalg.inv(g)
    E = np.einsum("...cb,...ba->...ca", ginv, hab)
    f = nu[..., 2]
    T = np.einsum("...ab,...b->...a", ginv, X[..., :, 2])
    return PointData(p, X, np.stack([t1, t2, nu], -2), g, hab, E, T, f)


def rotate_J(g, X) -> np.ndarray:
    """Rotation by +pi/2 in the metric ``g`` (coordinate components)."""
    g = np.asarray(g, dtype=float)
    s = np.sqrt(np.linalg.det(g))
    J = np.stack(
        [
            np.stack([-g[..., 0, 1], -g[..., 1, 1]], -1),
            np.stack([g[..., 0, 0], g[..., 0, 1]], -1),
        ],
        -2,
    ) / s[..., None, None]
    return np.einsum("...ab,...b->...a", J, X)


def orthonormal_coords(g) -> np.ndarray:
    """Coordinate components of ``(t1, t2)`` as columns: ``t1 ~ d/du``, ``t2 = J t1``."""
    g = np.asarray(g, dtype=float)
    t1 = np.stack([1 / np.sqrt(g[..., 0, 0]), np.zeros(g.shape[:-2])], -1)
    return np.stack([t1, rotate_J(g, t1)], -1)


@dataclass(frozen=True)
class Grid:
    nu: int = 64
    nv: int = 64
    margin: float = 0.05  # fraction of each side trimmed before sampling

    def samples(self, domain, h: float):
        if self.nu < 3 or self.nv < 3:
            raise StencilError(f"grid {self.nu}x{self.nv} too small for central differences")
        if not h > 0:
            raise StencilError(f"finite-difference step must be positive, got {h}")
        out = []
        for (a, b), n in zip(domain, (self.nu, self.nv)):
            m = self.margin * (b - a)
            if h > m:
                raise StencilError(
                    f"step {h} leaves the domain [{a}, {b}]; shrink h below {m:g}"
                )
            out.append(np.linspace(a + m, b - m, n))
        uu, vv = np.meshgrid(*out, indexing="ij")
        return uu.ravel(), vv.ravel()


@dataclass(frozen=True)
class SurfaceDataEKT:
    spec: ModelSpec
    u: np.ndarray  # (N,)
    v: np.ndarray
    h: float
    center: PointData
    dg: np.ndarray  # (N, 2, 2, 2)  d_a g_bc
    christoffel: np.ndarray  # (N, 2, 2, 2)  Gamma^c_ab as [c, a, b]
    K: np.ndarray  # (N,)
    dE: np.ndarray  # (N, 2, 2, 2)  d_a E^c_b as [a, c, b]
    dT: np.ndarray  # (N, 2, 2)  d_a T^c as [a, c]
    df: np.ndarray  # (N, 2)
    stencil: PointData  # every field with a leading axis of 9 stencil offsets

    # convenient views
    @property
    def g(self):
        return self.center.g

    @property
    def E(self):
        return self.center.E

    @property
    def T(self):
        return self.center.T

    @property
    def f(self):
        return self.center.f

    @property
    def H(self):
        return 0.5 * np.trace(self.center.E, axis1=-2, axis2=-1)


def _brioschi(g, d1, d2):
    """Gauss curvature from g, its first derivatives ``d1[a]`` and second
    derivatives ``d2[a, b]`` (each a 2 x 2 array field)."""
    E_, F_, G_ = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    Eu, Ev = d1[0][..., 0, 0], d1[1][..., 0, 0]
    Fu, Fv = d1[0][..., 0, 1], d1[1][..., 0, 1]
    Gu, Gv = d1[0][..., 1, 1], d1[1][..., 1, 1]
    Evv = d2[1][1][..., 0, 0]
    Guu = d2[0][0][..., 1, 1]
    Fuv = d2[0][1][..., 0, 1]
    z = np.zeros_like(E_)
    A = np.stack(
        [
            np.stack([-Evv / 2 + Fuv - Guu / 2, Eu / 2, Fu - Ev / 2], -1),
            np.stack([Fv - Gu / 2, E_, F_], -1),
            np.stack([Gv / 2, F_, G_], -1),
        ],
        -2,
    )
    B = np.stack(
        [
            np.stack([z, Ev / 2, Gu / 2], -1),
            np.stack([Ev / 2, E_, F_], -1),
            np.stack([Gu / 2, F_, G_], -1),
        ],
        -2,
    )
    return (np.linalg.det(A) - np.linalg.det(B)) / (E_ * G_ - F_**2) ** 2


def metric_christoffel(g, dg) -> np.ndarray:
    """``Gamma[..., c, a, b]`` of a 2D metric from ``dg[..., a, b, c] = d_a g_bc``."""
    first = 0.5 * (
        dg + np.einsum("...bad->...abd", dg) - np.einsum("...dab->...abd", dg)
    )
    return np.einsum("...cd,...abd->...cab", np.linalg.inv(g), first)


def stencil(u, v, h):
    """Parameter values of the 9-point stencil, shape ``(9, N)``."""
    return u[None, :] + h * OFFSETS[:, 0, None], v[None, :] + h * OFFSETS[:, 1, None]


def central_first(q, h):
    """``d_u``, ``d_v`` of a stencil-evaluated field ``q`` (leading axis 9)."""
    return np.stack([(q[1] - q[2]) / (2 * h), (q[3] - q[4]) / (2 * h)], 1)


def induce_surface_data(
    spec: ModelSpec, chart: ParametricChart, domain, grid: Grid = Grid(), h: float = 1e-5
) -> SurfaceDataEKT:
    u, v = grid.samples(domain, h)
    su, sv = stencil(u, v, h)
    pd = pointwise_data(spec, chart, su, sv)
    center = PointData(*(getattr(pd, k)[0] for k in PointData.__dataclass_fields__))
    g = pd.g
    dg = central_first(g, h)
    d2 = [
        [(g[1] - 2 * g[0] + g[2]) / h**2, (g[5] - g[6] - g[7] + g[8]) / (4 * h**2)],
        [None, (g[3] - 2 * g[0] + g[4]) / h**2],
    ]
    d2[1][0] = d2[0][1]
    K = _brioschi(g[0], [dg[:, 0], dg[:, 1]], d2)
    return SurfaceDataEKT(
        spec=spec,
        u=u,
        v=v,
        h=h,
        center=center,
        dg=dg,
        christoffel=metric_christoffel(g[0], dg),
        K=K,
        dE=central_first(pd.E, h),
        dT=central_first(pd.T, h),
        df=central_first(pd.f, h),
        stencil=pd,
    )


@dataclass(frozen=True)
class CompatibilityResidual:
    gauss: float
    codazzi: float
    cond1: float
    cond2: float

    @property
    def max(self) -> float:
        return max(self.gauss, self.codazzi, self.cond1, self.cond2)

    def as_dict(self) -> dict:
        return {"gauss": self.gauss, "codazzi": self.codazzi, "cond1": self.cond1, "cond2": self.cond2}


def _gnorm(g, X):
    return np.sqrt(np.abs(np.einsum("...a,...ab,...b->...", X, g, X)))


def compatibility_fields(spec: ModelSpec, data: SurfaceDataEKT) -> dict:
    """Pointwise residual magnitudes of the four equations (arrays of shape (N,))."""
    k, t = spec.kappa, spec.tau
    d = spec.bundle_defect
    g, E, T, f = data.g, data.E, data.T, data.f
    Gam = data.christoffel
    gauss = np.abs(data.K - np.linalg.det(E) - t**2 - d * f**2)

    # (nabla_a E)^c_b
    nE = (
        data.dE
        + np.einsum("...cad,...db->...acb", Gam, E)
        - np.einsum("...cd,...dab->...acb", E, Gam)
    )
    lhs = nE[:, 0, :, 1] - nE[:, 1, :, 0]
    gT = np.einsum("...ab,...b->...a", g, T)
    e = np.eye(2)
    rhs = d * f[:, None] * (gT[:, 1, None] * e[0] - gT[:, 0, None] * e[1])
    codazzi = _gnorm(g, lhs - rhs) / np.sqrt(np.linalg.det(g))

    # columns: orthonormal t1, t2 in coordinates
    Q = orthonormal_coords(g)
    nT = data.dT + np.einsum("...cad,...d->...ac", Gam, T)  # (nabla_a T)^c as [a, c]
    cond1 = np.zeros_like(f)
    cond2 = np.zeros_like(f)
    for i in range(2):
        X = Q[..., :, i]
        EX = np.einsum("...ca,...a->...c", E, X)
        W = EX - t * rotate_J(g, X)
        r1 = np.einsum("...a,...ac->...c", X, nT) - f[:, None] * W
        cond1 = np.maximum(cond1, _gnorm(g, r1))
        r2 = np.einsum("...a,...a->...", data.df, X) + np.einsum("...a,...ab,...b->...", W, g, T)
        cond2 = np.maximum(cond2, np.abs(r2))
    return {"gauss": gauss, "codazzi": codazzi, "cond1": cond1, "cond2": cond2}


def check_compatibility_ekt(spec: ModelSpec, data: SurfaceDataEKT) -> CompatibilityResidual:
    fields = compatibility_fields(spec, data)
    return CompatibilityResidual(**{k: float(np.max(v)) for k, v in fields.items()})


def unit_defect(data: SurfaceDataEKT) -> float:
    """``max |f^2 + |T|^2 - 1|``."""
    T = data.T
    n2 = np.einsum("...a,...ab,...b->...", T, data.g, T)
    return float(np.max(np.abs(data.f**2 + n2 - 1)))


def convergence_orders(residuals: list[float], floor: float = 1e-9) -> list[float]:
    """Observed orders ``log2(r_h / r_{h/2})`` along a halving ladder.

    A pair whose coarse residual is already below ``floor`` is reported as
    ``inf`` (the quantity is exact up to rounding at every step)."""
    out = []
    for a, b in zip(residuals, residuals[1:]):
        if a < floor:
            out.append(float("inf"))
        else:
            out.append(float(np.log2(a / max(b, 1e-300))))
    return out


def residual_ladder(
    spec: ModelSpec, chart: ParametricChart, domain, grid: Grid = Grid(), steps=(0.04, 0.02, 0.01)
) -> list[CompatibilityResidual]:
    return [check_compatibility_ekt(spec, induce_surface_data(spec, chart, domain, grid, h)) for h in steps]
