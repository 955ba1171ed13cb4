"""Run configuration read from TOML.

A configuration describes one run.  Families are written as tables with a
``kind`` key::

    n = 3

    [phi]
    kind = "pq"          # constant_one | power_law | pq | sum_of_powers
    p = 2                #   | exponential | mean_curvature
    q = 4

    [psi]
    kind = "double_power"   # zero | power | double_power | log_power | general_sum
    m = 1
    k = 3

Scans name their axes by dotted keys (``"phi.p"``, ``"psi.k"``, ``"n"``).
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import families as fam
from .radial import ModelSpace

__all__ = [
    "ConfigError", "UnsupportedError", "AxisSpec", "ScanSpec", "SolverSpec",
    "OutputSpec", "RunConfig", "load_config", "parse_config", "build_phi",
    "build_psi", "with_value",
]

MAX_CELLS = 10 ** 7


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


class UnsupportedError(ValueError):
    """A family kind (or family) the requested command cannot handle."""


def _num(v, key):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse number {v!r}") from None
    return v


def _get(table, key, where):
    if key not in table:
        raise ConfigError(f"missing key {where}.{key}")
    return _num(table[key], f"{where}.{key}")


def _pairs(v, key):
    if not isinstance(v, list) or not all(isinstance(x, list) and len(x) == 2 for x in v):
        raise ConfigError(f"{key}: expected a list of [coefficient, exponent] pairs")
    return tuple((_num(a, key), _num(b, key)) for a, b in v)


def build_phi(table: Dict[str, Any]) -> fam.PhiSpec:
    kind = table.get("kind")
    try:
        if kind == "constant_one":
            return fam.ConstantOne()
        if kind == "power_law":
            return fam.PowerLaw(_get(table, "p", "phi"))
        if kind == "pq":
            return fam.pq_laplacian(_get(table, "p", "phi"), _get(table, "q", "phi"))
        if kind == "sum_of_powers":
            if "terms" in table:
                return fam.SumOfPowers(_pairs(table["terms"], "phi.terms"))
            exps = [_num(p, "phi.exponents") for p in table.get("exponents", [])]
            ws = table.get("weights")
            ws = None if ws is None else [_num(w, "phi.weights") for w in ws]
            return fam.weighted_laplacian(exps, ws)
        if kind == "exponential":
            return fam.Exponential()
        if kind == "mean_curvature":
            return fam.MeanCurvature()
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"phi: {exc}") from None
    raise UnsupportedError(f"unsupported phi kind {kind!r}")


def build_psi(table: Optional[Dict[str, Any]]) -> fam.PsiSpec:
    if table is None:
        return fam.Zero()
    kind = table.get("kind")
    try:
        if kind == "zero":
            return fam.Zero()
        if kind == "power":
            return fam.Power(_get(table, "a", "psi"), _get(table, "q", "psi"))
        if kind == "double_power":
            return fam.DoublePower(_get(table, "m", "psi"), _get(table, "k", "psi"))
        if kind == "log_power":
            m = table.get("m")
            if m is None:
                raise ConfigError("missing key psi.m")
            return fam.LogPower(_get(table, "a", "psi"), _get(table, "q", "psi"),
                                m if isinstance(m, str) else _num(m, "psi.m"))
        if kind == "general_sum":
            return fam.GeneralSum(_pairs(table.get("powers", []), "psi.powers"),
                                  _num(table.get("log_coef", 0), "psi.log_coef"),
                                  _num(table.get("const", 0), "psi.const"))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"psi: {exc}") from None
    raise UnsupportedError(f"unsupported psi kind {kind!r}")


@dataclass(frozen=True)
class AxisSpec:
    param: str
    start: float
    stop: float
    num: int

    def values(self) -> List[float]:
        if self.num == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.num - 1)
        return [self.start + i * step for i in range(self.num)]


@dataclass(frozen=True)
class ScanSpec:
    x: AxisSpec
    y: AxisSpec
    compare: Optional[str] = None
    workers: int = 0

    @property
    def cells(self) -> int:
        return self.x.num * self.y.num


@dataclass(frozen=True)
class SolverSpec:
    u0: float = 1.0
    radii: tuple = (1.0,)
    h: float = 1e-3
    workers: int = 0


@dataclass(frozen=True)
class OutputSpec:
    csv: Optional[str] = None
    svg: Optional[str] = None
    precision: int = 12


@dataclass(frozen=True)
class RunConfig:
    raw: dict = field(repr=False)
    n: Optional[float]
    phi: Optional[fam.PhiSpec]
    psi: fam.PsiSpec
    scan: Optional[ScanSpec]
    space: Optional[ModelSpace]
    solver: SolverSpec
    output: OutputSpec


def _axis(t, name) -> AxisSpec:
    if not isinstance(t, dict):
        raise ConfigError(f"scan.{name} must be a table")
    param = t.get("param")
    if not isinstance(param, str) or not param:
        raise ConfigError(f"scan.{name}.param must name a dotted key")
    start = float(_get(t, "start", f"scan.{name}"))
    stop = float(_get(t, "stop", f"scan.{name}"))
    num = t.get("num")
    if not isinstance(num, int) or isinstance(num, bool) or num < 1:
        raise ConfigError(f"scan.{name}.num must be a positive integer")
    if num > 1 and not stop > start:
        raise ConfigError(f"scan.{name}: range is empty (stop <= start)")
    return AxisSpec(param, start, stop, num)


def _int_field(t, key, default, where):
    v = t.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{where}.{key} must be an integer")
    return v


def parse_config(raw: Dict[str, Any]) -> RunConfig:
    """Validate a decoded TOML document."""
    n = raw.get("n")
    if n is not None:
        n = _num(n, "n")
        if not n >= 2:
            raise ConfigError(f"n must be at least 2, got {n}")
    phi = build_phi(raw["phi"]) if "phi" in raw else None
    psi = build_psi(raw.get("psi"))

    scan = None
    if "scan" in raw:
        s = raw["scan"]
        compare = s.get("compare")
        if compare not in (None, "wang"):
            raise ConfigError(f"scan.compare must be 'wang' if given, got {compare!r}")
        scan = ScanSpec(_axis(s.get("x"), "x"), _axis(s.get("y"), "y"), compare,
                        _int_field(s, "workers", 0, "scan"))

    space = None
    sp = raw.get("space")
    if sp is not None or n is not None:
        sp = sp or {}
        sn = sp.get("n", n)
        if sn is None:
            raise ConfigError("space.n (or n) is required")
        try:
            space = ModelSpace(int(sn), float(_num(sp.get("k", 0), "space.k")))
        except ValueError as exc:
            raise ConfigError(f"space: {exc}") from None

    sv = raw.get("solver", {})
    radii = sv.get("radii", [sv["R"]] if "R" in sv else [1.0])
    if not isinstance(radii, list) or not radii:
        raise ConfigError("solver.radii must be a nonempty list")
    radii = tuple(float(_num(r, "solver.radii")) for r in radii)
    solver = SolverSpec(float(_num(sv.get("u0", 1.0), "solver.u0")), radii,
                        float(_num(sv.get("h", 1e-3), "solver.h")),
                        _int_field(sv, "workers", 0, "solver"))
    if solver.h <= 0:
        raise ConfigError("solver.h must be positive")

    out = raw.get("output", {})
    prec = _int_field(out, "precision", 12, "output")
    if not 6 <= prec <= 17:
        raise ConfigError("output.precision must lie in [6, 17]")
    output = OutputSpec(out.get("csv"), out.get("svg"), prec)
    return RunConfig(raw, n, phi, psi, scan, space, solver, output)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(raw)


def with_value(raw: Dict[str, Any], dotted: str, value) -> Dict[str, Any]:
    """Copy of ``raw`` with the dotted key set to ``value``."""
    out = copy.deepcopy(raw)
    node = out
    *head, last = dotted.split(".")
    for part in head:
        node = node.setdefault(part, {})
    node[last] = value
    return out
