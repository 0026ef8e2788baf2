"""Catalog of parametric surfaces in the chart model of E(kappa, tau).

Catalog files are JSON, either a single entry or a list of entries::

    {"name": "...",
     "ambient": {"kappa": -1, "tau": 0},
     "chart": {"x": "u", "y": "v", "z": "0"},
     "domain": {"u": [-0.5, 0.5], "v": [-0.5, 0.5]},
     "expected": {"max_residual": 5e-4}}          # optional
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ChartError, ValidationError
from .expr import DomainError, Expr, diff, evaluate, parse_expr, to_source
from .models import ModelSpec

SCAN = 101


@dataclass(frozen=True)
class ParametricChart:
    """Immersion ``(u, v) -> (x, y, z)`` with symbolic partial derivatives."""

    x: Expr
    y: Expr
    z: Expr

    @classmethod
    def parse(cls, x: str, y: str, z: str) -> "ParametricChart":
        return cls(parse_expr(x), parse_expr(y), parse_expr(z))

    @property
    def components(self) -> tuple[Expr, Expr, Expr]:
        return (self.x, self.y, self.z)

    @cached_property
    def _d1(self):
        return [[diff(c, w) for c in self.components] for w in "uv"]

    @cached_property
    def _d2(self):
        return [[[diff(c, b) for c in row] for b in "uv"] for row in self._d1]

    @staticmethod
    def _stack(exprs, u, v):
        return np.stack([evaluate(e, u, v) for e in exprs], axis=-1)

    def point(self, u, v) -> np.ndarray:
        return self._stack(self.components, u, v)

    def first(self, u, v) -> np.ndarray:
        """``F_a`` with shape ``(..., 2, 3)``."""
        return np.stack([self._stack(row, u, v) for row in self._d1], axis=-2)

    def second(self, u, v) -> np.ndarray:
        """``F_ab`` with shape ``(..., 2, 2, 3)``."""
        return np.stack(
            [np.stack([self._stack(r, u, v) for r in row], axis=-2) for row in self._d2],
            axis=-3,
        )

    def to_json(self) -> dict:
        return {k: to_source(e) for k, e in zip("xyz", self.components)}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spec: ModelSpec
    chart: ParametricChart
    domain: tuple[tuple[float, float], tuple[float, float]]
    expected: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "ambient": {"kappa": self.spec.kappa, "tau": self.spec.tau},
            "chart": self.chart.to_json(),
            "domain": {"u": list(self.domain[0]), "v": list(self.domain[1])},
        }
        if self.expected:
            out["expected"] = dict(self.expected)
        return out


def _number(obj, path):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ValidationError(f"{path}: expected a number, got {obj!r}")
    if not np.isfinite(obj):
        raise ValidationError(f"{path}: must be finite")
    return float(obj)


def _mapping(obj, path, keys, optional=()):
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: expected an object")
    for k in keys:
        if k not in obj:
            raise ValidationError(f"{path}.{k}: missing")
    extra = set(obj) - set(keys) - set(optional)
    if extra:
        raise ValidationError(f"{path}.{sorted(extra)[0]}: unknown field")
    return obj


def scan_chart(spec: ModelSpec, chart: ParametricChart, domain, n: int = SCAN):
    """Evaluate the chart on a closed ``n x n`` grid and check it stays in the
    ambient coordinate chart."""
    (a, b), (c, d) = domain
    u, v = np.meshgrid(np.linspace(a, b, n), np.linspace(c, d, n), indexing="ij")
    p = chart.point(u, v)
    if spec.kappa > 0:
        r2 = p[..., 0] ** 2 + p[..., 1] ** 2
        bad = np.argwhere(r2 >= 4 / spec.kappa)
        if bad.size:
            i, j = bad[0]
            raise ChartError(
                f"chart leaves the disk x^2 + y^2 < {4 / spec.kappa:g} at (u, v) = "
                f"({u[i, j]:.6g}, {v[i, j]:.6g})"
            )
    return p


def entry_from_dict(obj, where: str = "entry") -> CatalogEntry:
    _mapping(obj, where, ("name", "ambient", "chart", "domain"), ("expected",))
    name = obj["name"]
    if not isinstance(name, str) or not name:
        raise ValidationError(f"{where}.name: expected a nonempty string")
    amb = _mapping(obj["ambient"], f"{where}.ambient", ("kappa", "tau"))
    spec = ModelSpec.ekt(
        _number(amb["kappa"], f"{where}.ambient.kappa"),
        _number(amb["tau"], f"{where}.ambient.tau"),
    )
    ch = _mapping(obj["chart"], f"{where}.chart", ("x", "y", "z"))
    exprs = []
    for k in "xyz":
        if not isinstance(ch[k], str):
            raise ValidationError(f"{where}.chart.{k}: expected an expression string")
        try:
            exprs.append(parse_expr(ch[k]))
        except ValueError as err:
            raise ValidationError(f"{where}.chart.{k}: {err}") from err
    chart = ParametricChart(*exprs)
    dom = _mapping(obj["domain"], f"{where}.domain", ("u", "v"))
    rng = []
    for k in "uv":
        r = dom[k]
        if not isinstance(r, list) or len(r) != 2:
            raise ValidationError(f"{where}.domain.{k}: expected [a, b]")
        lo, hi = (_number(t, f"{where}.domain.{k}") for t in r)
        if not lo < hi:
            raise ValidationError(f"{where}.domain.{k}: empty interval")
        rng.append((lo, hi))
    expected = {}
    if "expected" in obj:
        ex = _mapping(obj["expected"], f"{where}.expected", (), ("max_residual",))
        for k, val in ex.items():
            expected[k] = _number(val, f"{where}.expected.{k}")
    try:
        scan_chart(spec, chart, rng)
    except DomainError as err:
        raise ValidationError(f"{where}.chart: {err}") from err
    return CatalogEntry(name, spec, chart, tuple(rng), expected)


def load_catalog(path) -> list[CatalogEntry]:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ValidationError(f"{path}: invalid JSON ({err})") from err
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise ValidationError(f"{path}: expected an entry or a list of entries")
    return [entry_from_dict(obj, f"entry[{i}]") for i, obj in enumerate(data)]


_BUILTINS = [
    {
        "name": "slice-h2xr",
        "ambient": {"kappa": -1.0, "tau": 0.0},
        "chart": {"x": "u", "y": "v", "z": "0"},
        "domain": {"u": [-0.5, 0.5], "v": [-0.5, 0.5]},
        "expected": {"max_residual": 5e-4},
    },
    {
        "name": "nil3-vertical-cylinder",
        "ambient": {"kappa": 0.0, "tau": 0.5},
        "chart": {"x": "cos(u)", "y": "sin(u)", "z": "v"},
        "domain": {"u": [0.0, 3.0], "v": [-1.0, 1.0]},
        "expected": {"max_residual": 5e-4},
    },
    {
        "name": "nil3-vertical-geodesic-cylinder",
        "ambient": {"kappa": 0.0, "tau": 0.5},
        "chart": {"x": "u", "y": "0.5*u + 0.2", "z": "v"},
        "domain": {"u": [-1.0, 1.0], "v": [-1.0, 1.0]},
        "expected": {"max_residual": 5e-4},
    },
    {
        "name": "berger-chart-disk",
        "ambient": {"kappa": 4.0, "tau": 0.5},
        "chart": {"x": "u", "y": "v", "z": "0.3*(u^2 - v^2) + 0.1*u*v"},
        "domain": {"u": [-0.5, 0.5], "v": [-0.5, 0.5]},
        "expected": {"max_residual": 5e-4},
    },
]


def builtin_catalog() -> list[CatalogEntry]:
    return [entry_from_dict(obj, obj["name"]) for obj in _BUILTINS]


def builtin(name: str) -> CatalogEntry:
    for e in builtin_catalog():
        if e.name == name:
            return e
    raise KeyError(f"no built-in surface {name!r}")
