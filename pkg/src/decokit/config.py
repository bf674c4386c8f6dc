"""Scenario configuration: JSON in, dimension-checked SI values out.

Physical values may be bare numbers (taken as SI) or ``{"value": 8,
"unit": "nm"}`` pairs. Unknown keys are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import jsonschema

from .units import (
    CHARGE,
    DIMENSIONLESS,
    LENGTH,
    MASS,
    NUMBER_DENSITY,
    TEMPERATURE,
    TIME,
    VOLTAGE,
    DIPOLE,
    DimensionError,
    Quantity,
    format_dims,
    parse_unit,
    quantity,
)

__all__ = ["ConfigError", "ScenarioConfig", "FIELDS", "DEFAULTS", "schema", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Schema or dimension violation in a scenario config."""

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        self.path = path
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(f"field {path}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


KINDS = ("neuron", "microtubule", "colloid", "custom")

# field -> expected dims; dimensionless fields are plain numbers
_COMMON = {"temperature": TEMPERATURE, "tau_dyn": TIME, "tau_diss": TIME}
FIELDS: dict[str, dict[str, tuple]] = {
    "neuron": {
        **_COMMON,
        "membrane_thickness": LENGTH,
        "diameter": LENGTH,
        "axon_length": LENGTH,
        "bare_fraction": DIMENSIONLESS,
        "resting_potential": VOLTAGE,
        "firing_potential": VOLTAGE,
        "eta": DIMENSIONLESS,
        "ion_count": DIMENSIONLESS,
        "ion_mass": MASS,
    },
    "microtubule": {
        **_COMMON,
        "tube_diameter": LENGTH,
        "kink_charge": CHARGE,
        "environment_ion_density": NUMBER_DENSITY,
        "superposition_span": LENGTH,
        "ion_mass": MASS,
    },
    "colloid": {
        **_COMMON,
        "colloid_mass": MASS,
        "molecule_mass": MASS,
        "collision_time": TIME,
    },
    "custom": {
        **_COMMON,
        "ion_count": DIMENSIONLESS,
        "separation": LENGTH,
        "ion_density": NUMBER_DENSITY,
        "water_density": NUMBER_DENSITY,
        "water_dipole": DIPOLE,
        "ion_mass": MASS,
    },
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "neuron": {
        "temperature": (310, "K"),
        "membrane_thickness": (8, "nm"),
        "diameter": (10, "um"),
        "axon_length": (10, "cm"),
        "bare_fraction": (1e-3, "1"),
        "resting_potential": (-0.07, "V"),
        "firing_potential": (0.03, "V"),
        "eta": (2e-4, "1"),
        "ion_mass": (23, "m_p"),
        "tau_dyn": (1e-3, "s"),
    },
    "microtubule": {
        "temperature": (310, "K"),
        "tube_diameter": (24, "nm"),
        "kink_charge": (940, "e"),
        "environment_ion_density": (0.125, "nm^-3"),
        "superposition_span": (1, "um"),
        "ion_mass": (23, "m_p"),
        "tau_dyn": (5e-7, "s"),
    },
    "colloid": {
        "temperature": (310, "K"),
        "colloid_mass": (1, "ug"),
        "molecule_mass": (18, "m_p"),
        "collision_time": (1e-12, "s"),
    },
    "custom": {
        "temperature": (310, "K"),
        "ion_count": (1, "1"),
        "separation": (8, "nm"),
        "ion_density": (6.64e24, "m^-3"),
        "water_density": (3.32e28, "m^-3"),
        "water_dipole": (1.85, "Debye"),
        "ion_mass": (23, "m_p"),
    },
}

_VALUE = {
    "oneOf": [
        {"type": "number"},
        {
            "type": "object",
            "properties": {"value": {"type": "number"}, "unit": {"type": "string"}},
            "required": ["value", "unit"],
            "additionalProperties": False,
        },
    ]
}


def schema(kind: Optional[str] = None) -> dict:
    """JSON schema for one scenario kind (or the kind selector alone)."""
    if kind is None:
        return {
            "type": "object",
            "properties": {"kind": {"enum": list(KINDS)}},
            "required": ["kind"],
        }
    props = {"kind": {"const": kind}, "name": {"type": "string"},
             "theta_policy": {"enum": ["drop", "worst", "best"]}}
    props.update({k: _VALUE for k in FIELDS[kind]})
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": f"{kind} scenario",
        "type": "object",
        "properties": props,
        "required": ["kind"],
        "additionalProperties": False,
    }


@dataclass(eq=False)
class ScenarioConfig:
    kind: str
    values: dict = field(default_factory=dict)  # name -> Quantity (SI)
    name: str = ""
    theta_policy: str = "drop"

    def get(self, key: str) -> Optional[Quantity]:
        return self.values.get(key)

    def number(self, key: str) -> Optional[float]:
        q = self.values.get(key)
        return None if q is None else float(q)

    def to_dict(self) -> dict:
        """Normalised form: every value as a bare SI number."""
        out: dict[str, Any] = {"kind": self.kind}
        if self.name:
            out["name"] = self.name
        if self.theta_policy != "drop":
            out["theta_policy"] = self.theta_policy
        for k in FIELDS[self.kind]:
            if k in self.values:
                out[k] = float(self.values[k].value)
        return out


def _line_of(text: Optional[str], key: str) -> Optional[int]:
    if not text:
        return None
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def _to_quantity(raw, dims, path: str, text: Optional[str]) -> Quantity:
    key = path.split(".")[-1]
    if isinstance(raw, dict):
        try:
            q = quantity(raw["value"], raw["unit"])
        except ValueError as e:
            raise ConfigError(str(e), path, _line_of(text, key)) from None
    else:
        q = Quantity(float(raw), dims)
    if q.dims != tuple(dims):
        raise ConfigError(
            f"expected dimension {format_dims(dims)}, got {format_dims(q.dims)}",
            path, _line_of(text, key))
    return q


def parse_config(data: dict, text: Optional[str] = None, apply_defaults: bool = True) -> ScenarioConfig:
    """Validate a decoded config object and normalise it to SI."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    try:
        jsonschema.validate(data, schema())
    except jsonschema.ValidationError as e:
        raise ConfigError(e.message, "kind", _line_of(text, "kind")) from None
    kind = data["kind"]
    validator = jsonschema.Draft202012Validator(schema(kind))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = ".".join(str(p) for p in e.absolute_path)
        if e.validator == "additionalProperties":
            extra = sorted(set(data) - set(schema(kind)["properties"]))
            path = extra[0] if extra else path
            msg = f"unknown key {path!r} for scenario kind {kind!r}"
        elif e.validator == "oneOf":
            msg = f"expected a number or a {{value, unit}} object, got {e.instance!r}"
        else:
            msg = e.message
        raise ConfigError(msg, path, _line_of(text, path.split(".")[0] if path else "kind"))

    values: dict[str, Quantity] = {}
    if apply_defaults:
        for k, (v, unit) in DEFAULTS[kind].items():
            values[k] = quantity(v, unit)
    for k, dims in FIELDS[kind].items():
        if k in data:
            values[k] = _to_quantity(data[k], dims, k, text)
    for k, q in values.items():
        if k not in ("resting_potential", "firing_potential") and q.value < 0:
            raise ConfigError("value must be non-negative", k, _line_of(text, k))
    return ScenarioConfig(kind, values, data.get("name", ""), data.get("theta_policy", "drop"))


def load_config(path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    return parse_config(data, text)
