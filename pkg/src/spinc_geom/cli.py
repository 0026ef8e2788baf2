"""Command-line runner: ``spinc-geom verify model|surface|mc2`` and ``spinc-geom sister``.

Every run prints a JSON report and exits 0 (all cases pass), 1 (a verification
case failed), 2 (usage or input error) or 3 (a precondition does not hold).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .catalog import builtin, builtin_catalog, load_catalog
from .correspondence import check_cmc, solve_sister, verify_sister
from .errors import (
    ChartError,
    FrameError,
    PreconditionError,
    StencilError,
    ValidationError,
    ZeroSpinorError,
)
from .hypersurfaces_mc2 import (
    commutator_residual,
    ekt_counterexample,
    gauss_codazzi_residuals_csf,
    gauss_iff_codazzi_probe,
    hypothesis_family,
    restrict_parallel_residual,
    sasaki_aux,
    sasaki_instance,
    sasaki_shape,
    sasaki_structure_residual,
)
from .models import ModelSpec
from .spin_connection import (
    aux_curvature_action,
    lichnerowicz_residual,
    ricci_identity_residual,
    spinor_ricci_identity_residual,
    verify_killing,
)
from .spinor_restriction import (
    curvature_residual,
    dirac_contraction_residual,
    dirac_gauss_residual,
    dirac_surface,
    energy_momentum_identities,
    energy_momentum_residuals,
    f_T_residuals,
    killing_derivative,
    restricted_killing_residual,
    restricted_spinor_field,
)
from .surfaces_ekt import Grid, check_compatibility_ekt, induce_surface_data, unit_defect

ALG_TOL = 1e-12
FD_TOL = 5e-4
PRECONDITION = (PreconditionError, ChartError, StencilError, FrameError, ZeroSpinorError)


class UsageError(Exception):
    pass


def case(name: str, residual, tolerance: float, expect_fail: bool = False) -> dict:
    """One report row.  Expected-failure rows pass when the residual is
    *above* the tolerance."""
    r = float(residual)
    ok = r > tolerance if expect_fail else r <= tolerance
    out = {"name": name, "residual_max": r, "tolerance": float(tolerance), "pass": bool(ok)}
    if expect_fail:
        out["expect"] = "fail"
    return out


def threads() -> int:
    raw = os.environ.get("SPINC_GEOM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"SPINC_GEOM_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise UsageError(f"SPINC_GEOM_THREADS must be a positive integer, got {raw!r}")
    return n


def run_jobs(jobs) -> list[dict]:
    """Run zero-argument callables returning lists of cases; the result keeps
    submission order whatever the thread count."""
    n = threads()
    if n == 1 or len(jobs) < 2:
        groups = [j() for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n) as ex:
            groups = list(ex.map(lambda j: j(), jobs))
    return [c for g in groups for c in g]


def report(suite: str, cases: list[dict], grid=None, fd_step=None, **extra) -> dict:
    passed = sum(c["pass"] for c in cases)
    out = {
        "suite": suite,
        "cases": cases,
        "summary": {"total": len(cases), "passed": passed, "failed": len(cases) - passed},
        "metadata": {"version": __version__, "grid": grid, "fd_step": fd_step},
    }
    out.update(extra)
    return out


# ---------------------------------------------------------------- suites


def suite_model(kappa: float, tau: float, anti: bool, tol: float) -> dict:
    spec = ModelSpec.ekt(kappa, tau)
    ch = -1 if anti else 1
    cases = [
        case("killing", verify_killing(spec, ch).max_residual, tol),
        case("aux-curvature", aux_curvature_action(spec, chirality=ch), tol),
        case("lichnerowicz", lichnerowicz_residual(spec, ch), tol),
        case("spinor-ricci-identity", spinor_ricci_identity_residual(spec, ch), tol),
        case(
            "ricci-identity",
            max(ricci_identity_residual(spec, x, ch) for x in np.eye(3)),
            tol,
        ),
    ]
    return report("model", cases, kappa=kappa, tau=tau, chirality=ch)


def surface_cases(entry, grid: Grid, h: float, tol: float | None, alg_tol: float) -> list[dict]:
    t = tol if tol is not None else entry.expected.get("max_residual", FD_TOL)
    spec = entry.spec
    data = induce_surface_data(spec, entry.chart, entry.domain, grid, h)
    comp = check_compatibility_ekt(spec, data).as_dict()
    out = [case(f"{entry.name}/{k}", v, t) for k, v in comp.items()]
    out.append(case(f"{entry.name}/unit", unit_defect(data), t))
    sf = restricted_spinor_field(spec, data)
    fd = {"killing": restricted_killing_residual(sf)}
    fd.update(dirac_surface(sf))
    fd["curvature"] = curvature_residual(spec, sf)
    fd.update({f"f-T/{k}": v for k, v in f_T_residuals(sf).items()})
    fd.update({f"energy-momentum/{k}": v for k, v in energy_momentum_residuals(sf).items()})
    fd["dirac-gauss"] = dirac_gauss_residual(spec, data, sf)
    out += [case(f"{entry.name}/{k}", v, t) for k, v in fd.items()]
    nab = killing_derivative(sf.E_hat, sf.tau, sf.phi, sf.cl)
    rec = energy_momentum_identities(nab, sf.phi, sf.H, sf.tau, sf.cl)["reconstruction"]
    out.append(case(f"{entry.name}/contraction", dirac_contraction_residual(sf.E_hat, sf.tau, sf.phi, sf.cl), alg_tol))
    out.append(case(f"{entry.name}/reconstruction", rec, alg_tol))
    return out


def suite_surface(entries, grid: Grid, h: float, tol, alg_tol: float) -> dict:
    jobs = [lambda e=e: surface_cases(e, grid, h, tol, alg_tol) for e in entries]
    return report("surface", run_jobs(jobs), grid=[grid.nu, grid.nv], fd_step=h)


def suite_sister(kappa1, tau1, h1, tau2, sign, surface, grid, h, tol, alg_tol) -> dict:
    p = solve_sister(kappa1, tau1, h1, tau2, sign)
    back = solve_sister(p.kappa2, p.tau2, p.H2, p.tau1, 1 if p.H1 >= 0 else -1)
    trip = max(abs(back.kappa2 - p.kappa1), abs(back.H2 - p.H1), abs(math.remainder(back.theta + p.theta, 2 * math.pi)))
    cases = [case("round-trip", trip, alg_tol)]
    params = {k: getattr(p, k) for k in ("kappa1", "tau1", "H1", "kappa2", "tau2", "H2", "theta")}
    if surface is None:
        return report("sister", cases, params=params)
    entry = builtin(surface)
    if (entry.spec.kappa, entry.spec.tau) != (p.kappa1, p.tau1):
        raise PreconditionError(
            f"surface {surface!r} lies in E({entry.spec.kappa:g}, {entry.spec.tau:g}), "
            f"not E({p.kappa1:g}, {p.tau1:g})"
        )
    data = induce_surface_data(entry.spec, entry.chart, entry.domain, grid, h)
    check_cmc(data, p.H1)
    t = tol if tol is not None else FD_TOL
    cases += [case(f"{surface}/sister/{k}", v, t) for k, v in verify_sister(data, p).as_dict().items()]
    return report("sister", cases, grid=[grid.nu, grid.nv], fd_step=h, params=params)


LAMBDAS = (-1.0, 0.0, 0.5, 1.0, 2.0)
DELTAS = (0.1, 0.5, 1.0)


def suite_mc2(c: float, which: str, tol: float, seed: int) -> dict:
    cases = []
    if which == "sasaki":
        data = sasaki_instance(c)
        cases += [case(f"sasaki/{k}", v, tol) for k, v in gauss_codazzi_residuals_csf(data).as_dict().items()]
        cases.append(case("sasaki/mean-curvature", abs(data.H - sasaki_shape(c)[1]), tol))
        cases.append(case("sasaki/structure", sasaki_structure_residual(data.frame), tol))
        cases += [case(f"sasaki/spinor/{k}", v, tol) for k, v in restrict_parallel_residual(data).items()]
        cases.append(case("sasaki/opposite-spinor/omega-action",
                          restrict_parallel_residual(data, phi=[0, 1])["omega_action"], tol, expect_fail=True))
    elif which == "umbilic":
        for lam in LAMBDAS:
            r = gauss_codazzi_residuals_csf(sasaki_instance(c, lam * np.eye(3))).codazzi
            cases.append(case(f"umbilic/lambda={lam:g}/codazzi", r, tol, expect_fail=True))
        # E(kappa, 1) with kappa - 4 = 6c carries the same c
        cex = gauss_codazzi_residuals_csf(ekt_counterexample(6 * c + 4, 1.0)).codazzi
        cases.append(case("minus-tau-identity/codazzi", cex, tol, expect_fail=True))
        cases.append(case("minus-tau-identity/equals-2|c|", abs(cex - 2 * abs(c)), tol))
    elif which == "commutator":
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(1000):
            a = rng.normal(size=(3, 3))
            a = a + a.T
            worst = max(worst, max(commutator_residual(a, i, j) for i in range(3) for j in range(3)))
        cases.append(case("commutator/random-1000", worst, max(tol, 1e-13)))
    elif which == "gauss-iff-codazzi":
        data = sasaki_instance(c)
        pr = gauss_iff_codazzi_probe(data, sasaki_aux(c))
        cases.append(case("sasaki/identities", pr.max_identity, tol))
        for d in DELTAS:
            fam, A = hypothesis_family(4 * c + 4, -1.0, 1 - c + d)
            pr = gauss_iff_codazzi_probe(fam, A)
            cases.append(case(f"injected/delta={d:g}/identities", pr.max_identity, tol))
            cases.append(case(f"injected/delta={d:g}/codazzi", pr.codazzi_residual, tol, expect_fail=True))
            cases.append(case(f"injected/delta={d:g}/gauss", pr.gauss_residual, tol, expect_fail=True))
    return report("mc2", cases, c=c, case=which)


# ---------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _finite(s: str) -> float:
    try:
        x = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"not finite: {s!r}")
    return x


def _positive(s: str) -> float:
    x = _finite(s)
    if x <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
    return x


def _grid(s: str) -> int:
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}")
    if n < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points per side")
    return n


def _sign(s: str) -> int:
    if s in ("+", "+1", "1"):
        return 1
    if s in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be + or -, got {s!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spinc-geom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(q, fd=False):
        q.add_argument("--out", help="write the JSON report here instead of stdout")
        if fd:
            q.add_argument("--grid", type=_grid, default=64, help="samples per side (default 64)")
            q.add_argument("--fd-step", type=_positive, default=1e-5, help="finite-difference step (default 1e-5)")
            q.add_argument("--tol", type=_positive, default=None,
                           help=f"finite-difference tolerance (default: catalog value or {FD_TOL:g})")
            q.add_argument("--alg-tol", type=_positive, default=ALG_TOL,
                           help=f"tolerance of pointwise algebraic cases (default {ALG_TOL:g})")

    ver = sub.add_parser("verify", help="run a verification suite")
    vsub = ver.add_subparsers(dest="suite", required=True, parser_class=_Parser)

    m = vsub.add_parser("model", help="Killing spinor suite on E(kappa, tau)")
    m.add_argument("--kappa", type=_finite, required=True)
    m.add_argument("--tau", type=_finite, required=True)
    m.add_argument("--anti", action="store_true", help="use the opposite-chirality spinor")
    m.add_argument("--tol", type=_positive, default=ALG_TOL)
    common(m)

    s = vsub.add_parser("surface", help="compatibility and restricted-spinor suites on catalog surfaces")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--name", help="built-in surface name ('all' for every built-in)")
    g.add_argument("--catalog", help="JSON catalog file")
    common(s, fd=True)

    c = vsub.add_parser("mc2", help="hypersurfaces of the complex space form")
    c.add_argument("--c", type=_finite, default=1.0)
    c.add_argument("--case", required=True, choices=["sasaki", "umbilic", "commutator", "gauss-iff-codazzi"])
    c.add_argument("--tol", type=_positive, default=1e-10)
    c.add_argument("--seed", type=int, default=0)
    common(c)

    si = sub.add_parser("sister", help="sister surface parameters (and optionally verify a sister)")
    si.add_argument("--kappa1", type=_finite, required=True)
    si.add_argument("--tau1", type=_finite, required=True)
    si.add_argument("--h1", type=_finite, required=True)
    si.add_argument("--tau2", type=_finite, required=True)
    si.add_argument("--sign", type=_sign, default=1)
    si.add_argument("--surface", help="built-in CMC surface to transform")
    common(si, fd=True)
    return p


def dispatch(args) -> dict:
    if args.command == "sister":
        return suite_sister(args.kappa1, args.tau1, args.h1, args.tau2, args.sign, args.surface,
                            Grid(args.grid, args.grid), args.fd_step, args.tol, args.alg_tol)
    if args.suite == "model":
        return suite_model(args.kappa, args.tau, args.anti, args.tol)
    if args.suite == "mc2":
        if args.c == 0:
            raise UsageError("--c must be nonzero")
        return suite_mc2(args.c, args.case, args.tol, args.seed)
    if args.catalog:
        entries = load_catalog(args.catalog)
    elif args.name == "all":
        entries = builtin_catalog()
    else:
        try:
            entries = [builtin(args.name)]
        except KeyError as err:
            raise UsageError(err.args[0])
    return suite_surface(entries, Grid(args.grid, args.grid), args.fd_step, args.tol, args.alg_tol)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep = dispatch(args)
    except PRECONDITION as err:
        print(f"spinc-geom: precondition failed: {err}", file=sys.stderr)
        return 3
    except (UsageError, ValidationError, KeyError, OSError) as err:
        print(f"spinc-geom: error: {err}", file=sys.stderr)
        return 2
    text = json.dumps(rep, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if rep["summary"]["failed"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
