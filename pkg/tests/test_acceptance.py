"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import math
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from spinc_geom.catalog import builtin, builtin_catalog
from spinc_geom.clifford import clifford_rep, volume_action
from spinc_geom.correspondence import solve_sister, verify_sister
from spinc_geom.expr import ParseError, DomainError, evaluate, parse_expr, to_source
from spinc_geom.hypersurfaces_mc2 import (
    commutator_residual,
    ekt_counterexample,
    gauss_codazzi_residuals_csf,
    gauss_iff_codazzi_probe,
    hypothesis_family,
    sasaki_aux,
    sasaki_instance,
    sasaki_shape,
)
from spinc_geom.models import ModelSpec
from spinc_geom.spin_connection import (
    aux_curvature_action,
    lichnerowicz_residual,
    ricci_identity_residual,
    spinor_ricci_identity_residual,
    verify_killing,
)
from spinc_geom.spinor_restriction import (
    ambient_clifford,
    curvature_residual,
    dirac_contraction_residual,
    dirac_surface,
    energy_momentum_identities,
    f_T_residuals,
    intrinsic_clifford,
    killing_derivative,
    restricted_killing_residual,
    restricted_spinor_field,
)
from spinc_geom.surfaces_ekt import (
    Grid,
    check_compatibility_ekt,
    convergence_orders,
    induce_surface_data,
    residual_ladder,
)

from conftest import ACCEPTANCE_LINES
from exprgen import random_source, reference_eval, well_conditioned

GRID = Grid(64, 64)
H = 1e-5


def verdict(n, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    line = f"[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail} ({elapsed:.2f}s, limit {limit:g}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_clifford():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = {"anticommutation": 0.0, "skew": 0.0, "volume": 0.0, "bar": 0.0}
    for n in (2, 3, 4):
        rep = clifford_rep(n)
        k = rep.spinor_dim
        X = rng.normal(size=(1000, n))
        Y = rng.normal(size=(1000, n))
        psi = rng.normal(size=(1000, k)) + 1j * rng.normal(size=(1000, k))
        MX = np.einsum("ni,ijk->njk", X, rep.gamma)
        MY = np.einsum("ni,ijk->njk", Y, rep.gamma)
        ac = MX @ MY + MY @ MX + 2 * np.sum(X * Y, -1)[:, None, None] * np.eye(k)
        worst["anticommutation"] = max(worst["anticommutation"], np.abs(ac).max())
        Xpsi = np.einsum("njk,nk->nj", MX, psi)
        worst["skew"] = max(worst["skew"], np.abs(np.real(np.sum(Xpsi * np.conj(psi), -1))).max())
        if n == 3:
            worst["volume"] = np.abs(volume_action(rep, psi) - psi).max()
    frames = Rotation.random(1000, random_state=4).as_matrix()
    phi = rng.normal(size=(1000, 2)) + 1j * rng.normal(size=(1000, 2))
    e = np.eye(2)
    for cl in (intrinsic_clifford(), ambient_clifford(frames)):
        r = cl.bar(phi) - 1j * cl.mul(e[0], cl.mul(e[1], phi))
        worst["bar"] = max(worst["bar"], np.abs(r).max())
    elapsed = time.perf_counter() - t0
    m = max(worst.values())
    verdict(1, m < 1e-13, f"max residual {m:.2e} over {sorted(worst)}", elapsed, 1.0)


KAPPAS = (-3.3, -2.1, -1.2, -0.4, 0.3, 0.9, 1.7, 2.6, 3.4, 4.6)
TAUS = (-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 1.25)


def test_criterion_2_killing_construction():
    t0 = time.perf_counter()
    worst = {"killing": 0.0, "omega-action": 0.0, "lichnerowicz": 0.0, "ricci-identity": 0.0}
    for k in KAPPAS:
        for tau in TAUS:
            spec = ModelSpec.ekt(k, tau)
            worst["killing"] = max(worst["killing"], verify_killing(spec).max_residual)
            worst["omega-action"] = max(worst["omega-action"], aux_curvature_action(spec))
            worst["lichnerowicz"] = max(worst["lichnerowicz"], lichnerowicz_residual(spec))
            r5 = max(ricci_identity_residual(spec, x) for x in np.eye(3))
            worst["ricci-identity"] = max(worst["ricci-identity"], r5, spinor_ricci_identity_residual(spec))
    elapsed = time.perf_counter() - t0
    m = max(worst.values())
    verdict(2, m < 1e-12, "10x10 grid, " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()), elapsed, 1.0)


@pytest.mark.parametrize("name", [e.name for e in builtin_catalog()])
def test_criterion_3_compatibility(name):
    t0 = time.perf_counter()
    entry = builtin(name)
    r = check_compatibility_ekt(entry.spec, induce_surface_data(entry.spec, entry.chart, entry.domain, GRID, H))
    ladder = [x.as_dict() for x in residual_ladder(entry.spec, entry.chart, entry.domain, GRID)]
    orders = {k: convergence_orders([x[k] for x in ladder]) for k in ladder[0]}
    low = min(min(v) for v in orders.values())
    elapsed = time.perf_counter() - t0
    ok = r.max < 5e-4 and low >= 1.8
    verdict(3, ok, f"{name}: max residual {r.max:.2e} at h=1e-5, min order {low:.2f}", elapsed, 30.0)


def test_criterion_4_restricted_killing():
    t0 = time.perf_counter()
    fd = 0.0
    alg = 0.0
    for entry in builtin_catalog():
        spec = entry.spec
        data = induce_surface_data(spec, entry.chart, entry.domain, GRID, H)
        sf = restricted_spinor_field(spec, data)
        d = dirac_surface(sf)
        fd = max(fd, restricted_killing_residual(sf), d["dirac"], d["norm_drift"],
                 curvature_residual(spec, sf), f_T_residuals(sf)["unit"])
        alg = max(alg, dirac_contraction_residual(sf.E_hat, sf.tau, sf.phi, sf.cl))
        nab = killing_derivative(sf.E_hat, sf.tau, sf.phi, sf.cl)
        alg = max(alg, energy_momentum_identities(nab, sf.phi, sf.H, sf.tau, sf.cl)["reconstruction"])
    elapsed = time.perf_counter() - t0
    ok = fd < 5e-4 and alg < 1e-12
    verdict(4, ok, f"fd residuals {fd:.2e}, algebraic {alg:.2e}", elapsed, 60.0)


def test_criterion_5_sister_correspondence():
    t0 = time.perf_counter()
    p = solve_sister(-1.0, 0.0, 0.5, 0.5)
    example = max(abs(p.kappa2), abs(p.tau2 - 0.5), abs(p.H2), abs(p.theta + math.pi / 2))
    back = solve_sister(p.kappa2, p.tau2, p.H2, p.tau1, 1)
    trip = max(abs(back.kappa2 + 1), abs(back.H2 - 0.5), abs(back.theta + p.theta))
    entry = builtin("nil3-vertical-geodesic-cylinder")
    data = induce_surface_data(entry.spec, entry.chart, entry.domain, GRID, H)
    q = solve_sister(0.0, 0.5, 0.0, 0.0)
    sister = verify_sister(data, q).max
    control = verify_sister(data, replace(q, theta=q.theta + 0.1)).max
    elapsed = time.perf_counter() - t0
    ok = example < 1e-12 and trip < 1e-12 and sister < 5e-4 and control > 1e-2
    detail = f"example {example:.1e}, round trip {trip:.1e}, sister {sister:.2e}, control {control:.3f}"
    verdict(5, ok, detail, elapsed, 60.0)


def test_criterion_6_commutator():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(1000):
        a = rng.normal(size=(3, 3))
        a = a + a.T
        worst = max(worst, max(commutator_residual(a, i, j) for i in range(3) for j in range(i + 1, 3)))
    elapsed = time.perf_counter() - t0
    verdict(6, worst < 1e-13, f"1000 random symmetric E, max {worst:.2e}", elapsed, 1.0)


def test_criterion_7_sasaki():
    t0 = time.perf_counter()
    cs = (-2.0, -1.0, -0.3, 0.4, 1.0, 2.5)
    cod = max(gauss_codazzi_residuals_csf(sasaki_instance(c)).codazzi for c in cs)
    h_exact = all(sasaki_instance(c).H == sasaki_shape(c)[1] == (3 - c) / 3 for c in cs)
    cex = 0.0
    for kappa, tau in ((1.0, 1.0), (-1.0, 0.5), (3.0, -0.7), (0.0, 0.3), (5.0, 2.0)):
        d = ekt_counterexample(kappa, tau)
        cex = max(cex, abs(gauss_codazzi_residuals_csf(d).codazzi - 2 * abs(d.c)))
    umb = min(
        gauss_codazzi_residuals_csf(sasaki_instance(c, lam * np.eye(3))).codazzi
        for c in cs
        for lam in (-2.0, -1.0, 0.0, 0.5, 1.0, 3.0)
    )
    elapsed = time.perf_counter() - t0
    ok = cod < 1e-10 and h_exact and cex < 1e-12 and umb > 1e-2
    verdict(7, ok, f"codazzi {cod:.1e}, H exact {h_exact}, |r - 2|c|| {cex:.1e}, umbilic min {umb:.2f}", elapsed, 1.0)


def test_criterion_8_gauss_iff_codazzi():
    t0 = time.perf_counter()
    sas = max(gauss_iff_codazzi_probe(sasaki_instance(c), sasaki_aux(c)).max_identity for c in (-1.5, -0.5, 0.7, 2.0))
    prop = 0.0
    violated = np.inf
    for kappa, tau in ((8.0, -1.0), (1.0, 1.0), (-2.0, 0.4)):
        for e33 in (-2.0, 0.3, 1.7):
            pr = gauss_iff_codazzi_probe(*hypothesis_family(kappa, tau, e33))
            prop = max(prop, np.abs(pr.ricci_defect - pr.predicted_ricci_defect).max())
            violated = min(violated, pr.codazzi_residual)
    elapsed = time.perf_counter() - t0
    ok = sas < 1e-10 and prop < 1e-8 and violated > 1e-2
    verdict(8, ok, f"sasaki identities {sas:.1e}, propagation {prop:.1e}, min injected codazzi {violated:.2f}", elapsed, 1.0)


def _mutate(rng, src):
    k = rng.integers(3)
    i = int(rng.integers(len(src) + 1))
    if k == 0 and src:
        return src[: max(i - 1, 0)] + src[i:]
    if k == 1:
        return src[:i] + "+-*/^()$,. 1uq"[rng.integers(14)] + src[i:]
    return src[:i]


def test_criterion_9_parser():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    trips = compared = 0
    worst = 0.0
    for _ in range(1000):
        src = random_source(rng)
        e = parse_expr(src)
        trips += parse_expr(to_source(e)) == e
        u, v = rng.uniform(0.1, 1.5, size=2)
        ref = reference_eval(src, u, v)
        if well_conditioned(src, u, v, ref):
            try:
                got = float(evaluate(e, u, v))
            except DomainError:
                got = math.nan
            compared += 1
            worst = max(worst, abs(got - ref) / (1 + abs(ref)))
    bad = 0
    for _ in range(1000):
        src = _mutate(rng, random_source(rng))
        try:
            parse_expr(src)
        except ParseError as err:
            bad += not (0 <= err.offset <= len(src) and f"offset {err.offset}" in str(err))
        except Exception:
            bad += 1
    elapsed = time.perf_counter() - t0
    ok = trips == 1000 and compared > 800 and worst < 1e-12 and bad == 0
    detail = f"round trips {trips}/1000, compared {compared} (max rel {worst:.1e}), bad errors {bad}"
    verdict(9, ok, detail, elapsed, 1.0)
