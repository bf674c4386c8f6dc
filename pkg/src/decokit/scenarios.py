"""Physical scenarios (neuron firing, microtubule kink, colloid) and the
dynamics / decoherence / dissipation timescale classifier."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .scattering import (
    CollisionDecoherenceSpec,
    DecoherenceResult,
    RegimeError,
    ScattererPopulation,
    collision_decoherence_timescale,
    closed_form_ion_ion,
    closed_form_ion_water,
)
from .tidal import minimal_thermal_spread, nearest_ion_timescale
from .units import (
    CHARGE,
    CONSTANTS,
    DIMENSIONLESS,
    LENGTH,
    MASS,
    NUMBER_DENSITY,
    TEMPERATURE,
    TIME,
    VOLTAGE,
    Quantity,
    quantity,
)

__all__ = [
    "NeuronGeometry",
    "MicrotubuleKink",
    "SystemClassification",
    "KinkProfile",
    "WATER_DENSITY",
    "WATER_DIPOLE",
    "NA_MASS",
    "WATER_MASS",
    "FUZZ",
    "neuron_ion_count",
    "kink_profile",
    "microtubule_timescale",
    "classify",
    "colloid_estimate",
    "neuron_mechanisms",
    "combined_timescale",
]

NA_MASS = 23 * CONSTANTS.proton_mass
WATER_MASS = 18 * CONSTANTS.proton_mass
#: 1 g/cm^3 of water molecules
WATER_DENSITY = quantity(1.0, "g/cm^3") / WATER_MASS
WATER_DIPOLE = quantity(1.85, "Debye")
DIMER_LENGTH = quantity(8, "nm")

#: ratios within this factor of a regime threshold are labelled "boundary"
FUZZ = 3.0


@dataclass(frozen=True, eq=False)
class NeuronGeometry:
    membrane_thickness: Quantity = field(default_factory=lambda: quantity(8, "nm"))
    diameter: Quantity = field(default_factory=lambda: quantity(10, "um"))
    axon_length: Quantity = field(default_factory=lambda: quantity(10, "cm"))
    bare_fraction: float = 1e-3
    resting_potential: Quantity = field(default_factory=lambda: quantity(-0.07, "V"))
    firing_potential: Quantity = field(default_factory=lambda: quantity(0.03, "V"))

    def __post_init__(self):
        for name in ("membrane_thickness", "diameter", "axon_length"):
            q = getattr(self, name).check(LENGTH, name)
            if q.value <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.bare_fraction <= 1:
            raise ValueError("bare_fraction must lie in (0, 1]")
        self.resting_potential.check(VOLTAGE, "resting_potential")
        self.firing_potential.check(VOLTAGE, "firing_potential")
        if self.firing_potential.value < self.resting_potential.value:
            raise ValueError("firing_potential must not be below resting_potential")

    @property
    def active_area(self) -> Quantity:
        return math.pi * self.diameter * self.axon_length * self.bare_fraction


@dataclass(frozen=True, eq=False)
class MicrotubuleKink:
    tube_diameter: Quantity = field(default_factory=lambda: quantity(24, "nm"))
    kink_charge: Quantity = field(default_factory=lambda: quantity(940, "e"))
    environment_ion_density: Quantity = field(default_factory=lambda: quantity(2, "nm") ** -3)
    superposition_span: Quantity = field(default_factory=lambda: quantity(1, "um"))

    def __post_init__(self):
        self.tube_diameter.check(LENGTH, "tube_diameter")
        self.kink_charge.check(CHARGE, "kink_charge")
        self.environment_ion_density.check(NUMBER_DENSITY, "environment_ion_density")
        self.superposition_span.check(LENGTH, "superposition_span")
        for name in ("tube_diameter", "kink_charge", "environment_ion_density", "superposition_span"):
            if getattr(self, name).value <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def nearest_ion_distance(self) -> Quantity:
        return self.tube_diameter + (1 / self.environment_ion_density).root(3)


@dataclass(frozen=True, eq=False)
class SystemClassification:
    tau_dyn: Quantity
    tau_dec: Quantity
    tau_diss: Quantity
    regime: str

    @property
    def margin(self) -> float:
        """tau_dyn / tau_dec."""
        return float(self.tau_dyn / self.tau_dec)


# ---------------------------------------------------------------------------


def neuron_ion_count(geom: NeuronGeometry, q: Quantity = CONSTANTS.electron_charge) -> float:
    """Ions crossing the membrane in one firing: A eps0 (U1 - U0) / (q h).

    Returns the raw real value; round it for display.
    """
    n = (geom.active_area * CONSTANTS.vacuum_permittivity
         * (geom.firing_potential - geom.resting_potential)
         / (q * geom.membrane_thickness))
    return float(n.check(DIMENSIONLESS, "ion count"))


@dataclass(frozen=True, eq=False)
class KinkProfile:
    """Polarization p(x) = -p0 tanh((x - x0) / width), in SI charge units."""

    p0: float
    x0: float
    width: float

    def __call__(self, x):
        return -self.p0 * np.tanh((np.asarray(x, dtype=float) - self.x0) / self.width)

    def charge_density(self, x):
        """-p'(x)."""
        u = (np.asarray(x, dtype=float) - self.x0) / self.width
        return self.p0 / self.width / np.cosh(u) ** 2

    @property
    def total_charge(self) -> Quantity:
        return Quantity(2 * self.p0, CHARGE)


def kink_profile(p0: Quantity, x0: Quantity = Quantity(0.0, LENGTH),
                 width: Optional[Quantity] = None) -> KinkProfile:
    """Smooth kink between +p0 (far left) and -p0 (far right).

    ``width`` defaults to three tubulin dimers.
    """
    p0.check(CHARGE, "p0")
    x0.check(LENGTH, "x0")
    width = 3 * DIMER_LENGTH if width is None else width.check(LENGTH, "width")
    if width.value <= 0:
        raise ValueError("width must be positive")
    return KinkProfile(float(p0.value), float(x0.value), float(width.value))


def microtubule_timescale(kink: MicrotubuleKink, T: Quantity = quantity(310, "K"),
                          m_ion: Quantity = NA_MASS) -> DecoherenceResult:
    """Nearest-ion tidal timescale for a kink superposed over a long span.

    The nearest ion sits at a = D + n^(-1/3). For spans |dr| >= a the
    separation saturates at a, giving a^2 sqrt(m k T) / (N g q_e^2).
    """
    D = kink.tube_diameter
    span = kink.superposition_span
    if float(span / D) <= 10:
        raise RegimeError(f"superposition span / tube diameter = {float(span / D):.3g} <= 10")
    N = float(kink.kink_charge / CONSTANTS.electron_charge)
    a = kink.nearest_ion_distance
    effective = a if span.value >= a.value else span
    res = nearest_ion_timescale(N, kink.environment_ion_density, effective, m_ion, T, a=a)
    res.intermediates.update({"ion_count": N, "span": span, "saturated": bool(span.value >= a.value)})
    return DecoherenceResult("distant ion", "tidal/microtubule-kink", res.tau, res.intermediates)


def classify(tau_dyn: Quantity, tau_dec: Quantity,
             tau_diss: Optional[Quantity] = None, fuzz: float = FUZZ) -> SystemClassification:
    """Place a system in the dynamics/decoherence/dissipation diagram.

    quantum: tau_dyn < tau_dec; not_independent: tau_dyn > tau_diss;
    classical: in between. Ratios within ``fuzz`` of either threshold are
    labelled "boundary". A missing tau_diss means no dissipation (infinite).
    """
    tau_diss = Quantity(math.inf, TIME) if tau_diss is None else tau_diss
    for q, name in ((tau_dyn, "tau_dyn"), (tau_dec, "tau_dec"), (tau_diss, "tau_diss")):
        q.check(TIME, name)
        if not q.value > 0:
            raise ValueError(f"{name} must be positive")
    r_dec = tau_dyn.value / tau_dec.value
    r_diss = tau_dyn.value / tau_diss.value
    if 1 / fuzz <= r_dec <= fuzz or 1 / fuzz <= r_diss <= fuzz:
        regime = "boundary"
    elif r_dec < 1:
        regime = "quantum"
    elif r_diss > 1:
        regime = "not_independent"
    else:
        regime = "classical"
    return SystemClassification(tau_dyn, tau_dec, tau_diss, regime)


def colloid_estimate(M: Quantity, m: Quantity, tau_coll: Quantity) -> tuple[Quantity, Quantity]:
    """(tau_diss, tau_dec) = (tau_coll M/m, tau_coll) for a heavy particle
    kicked by light bath molecules."""
    M.check(MASS, "M")
    m.check(MASS, "m")
    tau_coll.check(TIME, "tau_coll")
    if not m.value > 0 or M.value < m.value:
        raise ValueError("require M >= m > 0")
    if not tau_coll.value > 0:
        raise ValueError("tau_coll must be positive")
    return tau_coll * (M / m), tau_coll


# ---------------------------------------------------------------------------
# Neuron mechanisms


def neuron_mechanisms(geom: NeuronGeometry = NeuronGeometry(),
                      T: Quantity = quantity(310, "K"),
                      eta: float = 2e-4,
                      ion_count: Optional[float] = None,
                      theta_policy: str = "drop",
                      ion_mass: Quantity = NA_MASS,
                      water_density: Quantity = WATER_DENSITY,
                      water_dipole: Quantity = WATER_DIPOLE) -> list[DecoherenceResult]:
    """Colliding ion, colliding water and nearby-ion timescales for a
    neuron whose firing moves ``ion_count`` ions (default from geometry)
    across the membrane."""
    N = neuron_ion_count(geom) if ion_count is None else float(ion_count)
    if N < 1:
        raise RegimeError(f"ion count {N:.3g} < 1: no superposed ions")
    h = geom.membrane_thickness
    n_ion = eta * water_density
    ions = ScattererPopulation(n_ion, ion_mass, T, charge=CONSTANTS.electron_charge, name="ions")
    water = ScattererPopulation(water_density, WATER_MASS, T, dipole=water_dipole, name="water")

    ion_ion = collision_decoherence_timescale(CollisionDecoherenceSpec(h, N, ions, probe_mass=ion_mass))
    ion_ion.intermediates["closed_form_tau"] = closed_form_ion_ion(N, n_ion, ion_mass, T)
    ion_water = collision_decoherence_timescale(CollisionDecoherenceSpec(h, N, water, probe_mass=ion_mass))
    ion_water.intermediates["closed_form_tau"] = closed_form_ion_water(N, water_density, ion_mass, T,
                                                                       water_dipole)
    ion_water = DecoherenceResult("colliding H2O", ion_water.formula, ion_water.tau,
                                  ion_water.intermediates)
    tidal = nearest_ion_timescale(N, n_ion, h, ion_mass, T, theta_policy=theta_policy)
    for r in (ion_ion, ion_water, tidal):
        r.intermediates["ion_count"] = N
    return [ion_ion, ion_water, tidal]


def combined_timescale(results: list[DecoherenceResult]) -> Quantity:
    """Independent mechanisms: rates add, 1/tau = sum 1/tau_i."""
    rate = sum(1 / r.tau.value for r in results)
    return Quantity(1 / rate, TIME)
