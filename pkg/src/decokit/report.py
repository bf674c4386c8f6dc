"""Scenario evaluation and report rendering (JSON and aligned text)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .config import ScenarioConfig, parse_config
from .scattering import (
    CollisionDecoherenceSpec,
    DecoherenceResult,
    ScattererPopulation,
    collision_decoherence_timescale,
)
from .scenarios import (
    MicrotubuleKink,
    NeuronGeometry,
    SystemClassification,
    WATER_MASS,
    classify,
    colloid_estimate,
    combined_timescale,
    microtubule_timescale,
    neuron_ion_count,
    neuron_mechanisms,
)
from .tidal import nearest_ion_timescale
from .units import CONSTANTS, CONSTANTS_VERSION, Quantity, format_dims

__all__ = ["Row", "Report", "run_scenario", "table1", "PUBLISHED_TIMESCALES", "format_seconds"]

#: object, environment, published order-of-magnitude timescale (s)
PUBLISHED_TIMESCALES = (
    ("Neuron", "Colliding ion", 1e-20),
    ("Neuron", "Colliding H2O", 1e-20),
    ("Neuron", "Nearby ion", 1e-19),
    ("Microtubule", "Distant ion", 1e-13),
)

#: Quantum-gravity decoherence estimates for microtubules, quoted for comparison.
QUANTUM_GRAVITY_ESTIMATE = (1e-7, 1e-6)


@dataclass(eq=False)
class Row:
    object: str
    result: DecoherenceResult


@dataclass(eq=False)
class Report:
    scenario: dict
    rows: list
    classification: Optional[SystemClassification] = None
    extras: dict = field(default_factory=dict)

    def provenance(self) -> dict:
        return {
            "constants": CONSTANTS_VERSION,
            "formulas": sorted({r.result.formula for r in self.rows}),
            "package_version": __version__,
        }

    def to_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "results": [_row_dict(r) for r in self.rows],
        }
        if self.classification is not None:
            c = self.classification
            out["classification"] = {
                "regime": c.regime,
                "tau_dyn_s": _num(c.tau_dyn.value),
                "tau_dec_s": _num(c.tau_dec.value),
                "tau_diss_s": _num(c.tau_diss.value),
                "tau_dyn_over_tau_dec": _num(c.margin),
            }
        if self.extras:
            out["extras"] = {k: _jsonable(v) for k, v in self.extras.items()}
        out["provenance"] = self.provenance()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        header = ("Object", "Environment", "tau_dec", "Formula")
        body = [(r.object, r.result.mechanism, format_seconds(r.result.tau.value), r.result.formula)
                for r in self.rows]
        widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h)
                  for i, h in enumerate(header)]
        lines = []
        name = self.scenario.get("name") or self.scenario.get("kind", "")
        if name:
            lines.append(f"# {name}")
        lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
        lines.append("  ".join("-" * w for w in widths))
        for b in body:
            lines.append("  ".join(c.ljust(w) for c, w in zip(b, widths)).rstrip())
        if self.classification is not None:
            c = self.classification
            lines.append("")
            lines.append(f"regime: {c.regime}  (tau_dyn = {format_seconds(c.tau_dyn.value)}, "
                         f"tau_dec = {format_seconds(c.tau_dec.value)}, "
                         f"tau_diss = {format_seconds(c.tau_diss.value)}, "
                         f"tau_dyn/tau_dec = {c.margin:.2g})")
        for k, v in self.extras.items():
            lines.append(f"{k}: {_text_value(v)}")
        lines.append(f"constants: {CONSTANTS_VERSION}")
        return "\n".join(lines) + "\n"


def format_seconds(t: float) -> str:
    if math.isinf(t):
        return "inf"
    return f"{t:.2g} s"


def _num(v) -> float | str:
    v = float(v)
    if math.isinf(v):
        return "inf"
    return v


def _jsonable(v):
    if isinstance(v, Quantity):
        val = v.value
        if np.ndim(val):
            return {"value": np.asarray(val).tolist(), "si_dims": format_dims(v.dims)}
        return {"value": _num(val), "si_dims": format_dims(v.dims)}
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, float, np.floating, np.integer)):
        return _num(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


def _text_value(v):
    if isinstance(v, Quantity):
        return f"{float(v.value):.3g} [{format_dims(v.dims)}]"
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _row_dict(r: Row) -> dict:
    res = r.result
    return {
        "object": r.object,
        "mechanism": res.mechanism,
        "formula": res.formula,
        "tau_s": _num(res.tau.value),
        "tau_display": format_seconds(res.tau.value),
        "intermediates": {k: _jsonable(v) for k, v in res.intermediates.items()},
    }


# ---------------------------------------------------------------------------


def _neuron_rows(cfg: ScenarioConfig, theta_policy: str) -> tuple[list, dict]:
    v = cfg.values
    geom = NeuronGeometry(v["membrane_thickness"], v["diameter"], v["axon_length"],
                          float(v["bare_fraction"]), v["resting_potential"], v["firing_potential"])
    N_geom = neuron_ion_count(geom)
    N = cfg.number("ion_count") if "ion_count" in v else None
    results = neuron_mechanisms(geom, v["temperature"], float(v["eta"]), ion_count=N,
                                theta_policy=theta_policy, ion_mass=v["ion_mass"])
    extras = {"ion_count_from_geometry": N_geom,
              "ion_count_rounded": int(round(N if N is not None else N_geom))}
    return [Row("Neuron", r) for r in results], extras


def _custom_rows(cfg: ScenarioConfig, theta_policy: str) -> tuple[list, dict]:
    v = cfg.values
    N = float(v["ion_count"])
    T, m = v["temperature"], v["ion_mass"]
    h = v["separation"]
    ions = ScattererPopulation(v["ion_density"], m, T, charge=CONSTANTS.electron_charge)
    water = ScattererPopulation(v["water_density"], WATER_MASS, T, dipole=v["water_dipole"])
    results = [
        collision_decoherence_timescale(CollisionDecoherenceSpec(h, N, ions, probe_mass=m)),
        collision_decoherence_timescale(CollisionDecoherenceSpec(h, N, water, probe_mass=m)),
        nearest_ion_timescale(N, v["ion_density"], h, m, T, theta_policy=theta_policy),
    ]
    return [Row(cfg.name or "Custom", r) for r in results], {}


def run_scenario(cfg: ScenarioConfig, theta_policy: Optional[str] = None) -> Report:
    """Evaluate every mechanism of a scenario and classify it if tau_dyn is given."""
    policy = theta_policy or cfg.theta_policy
    v = cfg.values
    extras: dict = {}
    if cfg.kind == "neuron":
        rows, extras = _neuron_rows(cfg, policy)
    elif cfg.kind == "custom":
        rows, extras = _custom_rows(cfg, policy)
    elif cfg.kind == "microtubule":
        kink = MicrotubuleKink(v["tube_diameter"], v["kink_charge"],
                               v["environment_ion_density"], v["superposition_span"])
        res = microtubule_timescale(kink, v["temperature"], v["ion_mass"])
        rows = [Row("Microtubule", res)]
        extras = {"quantum_gravity_estimate_s": list(QUANTUM_GRAVITY_ESTIMATE),
                  "orders_below_quantum_gravity": [
                      math.log10(x / res.tau.value) for x in QUANTUM_GRAVITY_ESTIMATE]}
    elif cfg.kind == "colloid":
        tau_diss, tau_dec = colloid_estimate(v["colloid_mass"], v["molecule_mass"], v["collision_time"])
        rows = [Row("Colloid", DecoherenceResult("colliding molecule", "colloid/collision-time", tau_dec,
                                                 {"tau_diss": tau_diss,
                                                  "mass_ratio": float(v["colloid_mass"] / v["molecule_mass"])}))]
        extras = {"tau_diss_estimate": tau_diss}
        if "tau_diss" not in v:
            v = dict(v, tau_diss=tau_diss)
    else:  # pragma: no cover - schema rejects other kinds
        raise ValueError(cfg.kind)

    classification = None
    if "tau_dyn" in v:
        tau_dec = combined_timescale([r.result for r in rows])
        classification = classify(v["tau_dyn"], tau_dec, v.get("tau_diss"))
    scenario = cfg.to_dict()
    scenario["theta_policy"] = policy
    return Report(scenario, rows, classification, extras)


def table1(theta_policy: str = "drop") -> Report:
    """The four-row summary: neuron (three mechanisms) and microtubule."""
    neuron = run_scenario(parse_config({"kind": "neuron"}), theta_policy)
    micro = run_scenario(parse_config({"kind": "microtubule"}), theta_policy)
    rows = neuron.rows + micro.rows
    extras = {"published_s": [p for _, _, p in PUBLISHED_TIMESCALES],
              "decades_from_published": [math.log10(r.result.tau.value / p)
                                         for r, (_, _, p) in zip(rows, PUBLISHED_TIMESCALES)]}
    return Report({"name": "Decoherence timescales", "kind": "table1", "theta_policy": theta_policy},
                  rows, None, extras)
