"""Run configuration: JSON with exact rationals as "p/q" strings.

The schema is validated before any computation; every number that feeds the
exact machinery is parsed as a Fraction, never as a float.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any

from .arith import LatticeModule
from .errors import ConfigError, ConesumError
from .fan import FanDescription, build_quadratic_fan
from .field import FieldElement, TotallyRealField, UnitGroupData, make_field
from .geometry import Cone


def parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise ConfigError(f"expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse rational {value!r}") from exc
    raise ConfigError(f"expected a rational, got {value!r}")


def format_rational(q: Fraction) -> str:
    return str(q)


def parse_element(field: TotallyRealField, coords) -> FieldElement:
    if not isinstance(coords, (list, tuple)) or len(coords) != field.degree:
        raise ConfigError(
            f"element needs {field.degree} coordinates, got {coords!r}"
        )
    return field.element([parse_rational(c) for c in coords])


@dataclass
class RunConfig:
    field: TotallyRealField
    module: LatticeModule | None
    fan: FanDescription | None
    x0: FieldElement | None
    s: int
    n_max: int
    tolerance: float
    precision_bits: int
    seed: int
    output_format: str
    unitsearch: dict = dc_field(default_factory=dict)
    raw: dict = dc_field(default_factory=dict)


def load_config(path: str, overrides: dict[str, Any] | None = None) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return build_config(raw, overrides or {})


def build_config(raw: dict, overrides: dict[str, Any] | None = None) -> RunConfig:
    overrides = overrides or {}
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be an object")

    fdesc = raw.get("field")
    if not isinstance(fdesc, dict) or "min_poly" not in fdesc:
        raise ConfigError('config needs "field": {"min_poly": [c0, ..., 1]}')
    coeffs = fdesc["min_poly"]
    if (
        not isinstance(coeffs, list)
        or len(coeffs) < 3
        or any(not isinstance(c, int) for c in coeffs)
        or coeffs[-1] != 1
    ):
        raise ConfigError("min_poly must be an ascending monic integer list")
    try:
        field = make_field(coeffs)
    except ConesumError as exc:
        raise ConfigError(f"bad field: {exc}") from exc

    module = None
    if "module" in raw:
        mdesc = raw["module"]
        if not isinstance(mdesc, dict) or "basis" not in mdesc or "units" not in mdesc:
            raise ConfigError('module needs "basis" and "units"')
        basis = tuple(parse_element(field, c) for c in mdesc["basis"])
        rho = (
            parse_element(field, mdesc["rho"]) if "rho" in mdesc else field.zero
        )
        units = UnitGroupData(
            tuple(parse_element(field, c) for c in mdesc["units"])
        )
        try:
            module = LatticeModule(basis=basis, rho=rho, units=units)
        except ConesumError as exc:
            raise ConfigError(f"bad module: {exc}") from exc

    fan = None
    if "fan" in raw:
        fan = _build_fan(raw["fan"], field, module)

    x0 = None
    if "x0" in _merged(raw, overrides):
        x0 = parse_element(field, _merged(raw, overrides)["x0"])

    merged = _merged(raw, overrides)
    out_fmt = merged.get("format", "csv")
    if out_fmt not in ("csv", "json"):
        raise ConfigError('format must be "csv" or "json"')

    def _int(name, default, minimum):
        v = merged.get(name, default)
        if not isinstance(v, int) or v < minimum:
            raise ConfigError(f"{name} must be an integer >= {minimum}")
        return v

    tol = merged.get("tolerance", 1e-6)
    if not isinstance(tol, (int, float)) or tol < 0:
        raise ConfigError("tolerance must be a nonnegative number")

    return RunConfig(
        field=field,
        module=module,
        fan=fan,
        x0=x0,
        s=_int("s", 1, 1),
        n_max=_int("N_max", 8, 1),
        tolerance=float(tol),
        precision_bits=_int("precision_bits", 128, 16),
        seed=_int("seed", 0, 0),
        output_format=out_fmt,
        unitsearch=raw.get("unitsearch", {}),
        raw=raw,
    )


def _merged(raw: dict, overrides: dict) -> dict:
    merged = dict(raw)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    return merged


def _build_fan(fdesc, field, module) -> FanDescription:
    if not isinstance(fdesc, dict) or "type" not in fdesc:
        raise ConfigError('fan needs a "type"')
    kind = fdesc["type"]
    if kind == "quadratic-auto":
        if module is None:
            raise ConfigError("quadratic-auto fan needs a module")
        if field.degree != 2:
            raise ConfigError("quadratic-auto fan needs a quadratic field")
        try:
            desc, _ = build_quadratic_fan(module.basis, module.units.generators[0])
        except ConesumError as exc:
            raise ConfigError(f"bad fan: {exc}") from exc
        return desc
    if kind == "explicit":
        if "cones" not in fdesc or "unit_action" not in fdesc:
            raise ConfigError('explicit fan needs "cones" and "unit_action"')
        cones = []
        for gens in fdesc["cones"]:
            cones.append(Cone(field, [parse_element(field, g) for g in gens]))
        units = tuple(parse_element(field, u) for u in fdesc["unit_action"])
        basis = module.basis if module else tuple(
            field.element([1 if i == j else 0 for j in range(field.degree)])
            for i in range(field.degree)
        )
        return FanDescription(
            kind="explicit",
            module_basis=basis,
            units=units,
            orbit_cones=tuple(cones),
        )
    raise ConfigError(f"unknown fan type {kind!r}")
