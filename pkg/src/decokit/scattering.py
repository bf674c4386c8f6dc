"""Collisional decoherence: Coulomb and dipole cross sections, thermal
scattering rates and the scattering suppression factor.

Conventions used throughout:

* two-body kinematics use the reduced mass mu = m1 m2 / (m1 + m2) and the
  relative rms speed sqrt(3kT/mu);
* cross sections are sigma = pi b**2 with b the impact parameter giving a
  unit deflection angle;
* <sigma v> is evaluated at the rms speed unless ``thermal_average=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import trapezoid

from .units import (
    AREA,
    CHARGE,
    DIMENSIONLESS,
    DIPOLE,
    LENGTH,
    MASS,
    NUMBER_DENSITY,
    RATE,
    SPEED,
    TEMPERATURE,
    TIME,
    CONSTANTS,
    Quantity,
    de_broglie_wavelength,
    thermal_speed,
)

__all__ = [
    "RegimeError",
    "ScattererPopulation",
    "CollisionDecoherenceSpec",
    "DecoherenceResult",
    "SigmaModel",
    "coulomb_deflection",
    "cross_section_coulomb",
    "cross_section_dipole",
    "coulomb_model",
    "dipole_model",
    "model_for",
    "reduced_mass",
    "scattering_rate",
    "thermal_average_sigma_v",
    "suppression_factor_scattering",
    "collision_decoherence_timescale",
    "closed_form_ion_ion",
    "closed_form_ion_water",
    "REGIME_RATIO",
]

#: Separation / wavelength ratio above which the "large separation" branch applies.
REGIME_RATIO = 10.0

SigmaModel = Callable[[Quantity, Quantity], Quantity]  # (mu, v) -> area


class RegimeError(ValueError):
    """A formula was applied outside the physical regime it is valid in."""


def _require_positive(q: Quantity, dims, name: str) -> Quantity:
    q.check(dims, name)
    if np.any(np.asarray(q.value) <= 0):
        raise ValueError(f"{name} must be positive, got {q.value}")
    return q


@dataclass(frozen=True, eq=False)
class ScattererPopulation:
    """A thermal bath of scatterers that are either charged or dipolar."""

    number_density: Quantity
    mass: Quantity
    temperature: Quantity
    charge: Optional[Quantity] = None
    dipole: Optional[Quantity] = None
    name: str = ""

    def __post_init__(self):
        self.number_density.check(NUMBER_DENSITY, "number_density")
        if self.number_density.value < 0:
            raise ValueError("number_density must be >= 0")
        _require_positive(self.mass, MASS, "mass")
        _require_positive(self.temperature, TEMPERATURE, "temperature")
        if (self.charge is None) == (self.dipole is None):
            raise ValueError("population must be either charged or dipolar (exactly one)")
        if self.charge is not None:
            _require_positive(self.charge, CHARGE, "charge")
        if self.dipole is not None:
            _require_positive(self.dipole, DIPOLE, "dipole")

    @property
    def kind(self) -> str:
        return "charged" if self.charge is not None else "dipolar"


@dataclass(frozen=True, eq=False)
class CollisionDecoherenceSpec:
    """N probe ions superposed over a separation, immersed in a population."""

    separation: Quantity
    ion_count: float
    environment: ScattererPopulation
    probe_mass: Quantity = field(default_factory=lambda: 23 * CONSTANTS.proton_mass)
    probe_charge: Quantity = field(default_factory=lambda: CONSTANTS.electron_charge)

    def __post_init__(self):
        _require_positive(self.separation, LENGTH, "separation")
        if not self.ion_count >= 1:
            raise ValueError(f"ion_count must be >= 1, got {self.ion_count}")
        _require_positive(self.probe_mass, MASS, "probe_mass")
        _require_positive(self.probe_charge, CHARGE, "probe_charge")


@dataclass(frozen=True, eq=False)
class DecoherenceResult:
    """Timescale from one mechanism plus the intermediate quantities."""

    mechanism: str
    formula: str
    tau: Quantity
    intermediates: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Cross sections


def coulomb_deflection(b: Quantity, v: Quantity, m: Quantity,
                       q1: Quantity, q2: Quantity) -> Quantity:
    """Transverse velocity kick 2 g q1 q2 / (m v b) of a weak Coulomb fly-by."""
    _require_positive(b, LENGTH, "impact parameter")
    _require_positive(v, SPEED, "speed")
    _require_positive(m, MASS, "mass")
    _require_positive(q1, CHARGE, "q1")
    _require_positive(q2, CHARGE, "q2")
    return 2 * CONSTANTS.coulomb_constant * q1 * q2 / (m * v * b)


def cross_section_coulomb(m: Quantity, v: Quantity, q1: Quantity, q2: Quantity) -> Quantity:
    """pi (g q1 q2 / m v^2)^2: unit-deflection impact parameter, squared, times pi."""
    _require_positive(m, MASS, "mass")
    _require_positive(v, SPEED, "speed")
    _require_positive(q1, CHARGE, "q1")
    _require_positive(q2, CHARGE, "q2")
    b = CONSTANTS.coulomb_constant * q1 * q2 / (m * v ** 2)
    return (math.pi * b ** 2).check(AREA, "cross section")


def cross_section_dipole(m: Quantity, v: Quantity, q: Quantity, p: Quantity) -> Quantity:
    """Charge-dipole cross section pi b^2 with b^2 = 2 g q p / (m v^2).

    Zero dipole moment gives zero cross section.
    """
    _require_positive(m, MASS, "mass")
    _require_positive(v, SPEED, "speed")
    _require_positive(q, CHARGE, "charge")
    p.check(DIPOLE, "dipole moment")
    if p.value < 0:
        raise ValueError("dipole moment must be >= 0")
    b2 = 2 * CONSTANTS.coulomb_constant * q * p / (m * v ** 2)
    return (math.pi * b2).check(AREA, "cross section")


def coulomb_model(q1: Quantity, q2: Quantity) -> SigmaModel:
    return lambda mu, v: cross_section_coulomb(mu, v, q1, q2)


def dipole_model(q: Quantity, p: Quantity) -> SigmaModel:
    return lambda mu, v: cross_section_dipole(mu, v, q, p)


def model_for(env: ScattererPopulation, probe_charge: Quantity) -> SigmaModel:
    """Cross-section model matching the population kind."""
    if env.charge is not None:
        return coulomb_model(probe_charge, env.charge)
    return dipole_model(probe_charge, env.dipole)


# ---------------------------------------------------------------------------
# Rates


def reduced_mass(m1: Quantity, m2: Quantity) -> Quantity:
    return m1 * m2 / (m1 + m2)


def thermal_average_sigma_v(sigma_model: SigmaModel, mu: Quantity, T: Quantity,
                            v_min: Optional[Quantity] = None,
                            rtol: float = 1e-6, max_doublings: int = 22) -> Quantity:
    """<sigma v> over the Maxwell-Boltzmann relative-speed distribution.

    Trapezoid rule on [v_min, 12 v_p] (v_p the most probable speed), doubled
    until two successive estimates agree to ``rtol``.  A cross section that
    diverges too fast at low speed (Coulomb: sigma v ~ v^-3) gives a
    log-divergent average; that is detected and reported as a ValueError
    unless a positive ``v_min`` is supplied.
    """
    kT = (CONSTANTS.boltzmann * T)
    v_p = (2 * kT / mu).sqrt().check(SPEED, "speed").value
    a = mu.value / (2 * kT.value)
    u_lo = 0.0 if v_min is None else v_min.check(SPEED, "v_min").value / v_p
    u_hi = 12.0

    def integrand(u: np.ndarray) -> np.ndarray:
        v = u * v_p
        out = np.full_like(u, np.nan)
        pos = v > 0
        sig = sigma_model(mu, Quantity(v[pos], SPEED)).value
        # Maxwell-Boltzmann pdf in u: 4 pi v^2 (a/pi)^(3/2) exp(-a v^2) * v_p
        pdf = 4 * np.pi * v[pos] ** 2 * (a / np.pi) ** 1.5 * np.exp(-a * v[pos] ** 2) * v_p
        out[pos] = sig * v[pos] * pdf
        return out

    def estimate(lo: float, n: int) -> float:
        u = np.linspace(lo, u_hi, n + 1)
        y = integrand(u)
        if np.isnan(y[0]):
            # value at u=0 is a 0*inf limit; extrapolate linearly from the next points
            y[0] = 2 * y[1] - y[2]
        return float(trapezoid(y, u))

    if u_lo == 0.0:
        # divergence probe: shrinking the lower cutoff must not change the answer
        probe = [estimate(10.0 ** -k, 4096) for k in (3, 5)]
        if abs(probe[1] - probe[0]) > 1e-3 * abs(probe[1]):
            raise ValueError("thermal average diverges at low speed; supply v_min")

    n = 64
    prev = estimate(u_lo, n)
    for _ in range(max_doublings):
        n *= 2
        cur = estimate(u_lo, n)
        if abs(cur - prev) <= rtol * abs(cur):
            sigma_dims = sigma_model(mu, Quantity(v_p, SPEED)).dims
            return Quantity(cur, sigma_dims) * Quantity(1.0, SPEED)
        prev = cur
    raise RuntimeError("thermal average did not converge")


def scattering_rate(env: ScattererPopulation, probe_mass: Quantity,
                    sigma_model: Optional[SigmaModel] = None,
                    probe_charge: Optional[Quantity] = None,
                    thermal_average: bool = False) -> Quantity:
    """Collision rate n <sigma v> seen by one probe particle."""
    _require_positive(probe_mass, MASS, "probe_mass")
    if sigma_model is None:
        sigma_model = model_for(env, probe_charge or CONSTANTS.electron_charge)
    if env.number_density.value == 0:
        return Quantity(0.0, RATE)
    mu = reduced_mass(probe_mass, env.mass)
    if thermal_average:
        sv = thermal_average_sigma_v(sigma_model, mu, env.temperature)
    else:
        v = thermal_speed(mu, env.temperature)
        sv = sigma_model(mu, v) * v
    return (env.number_density * sv).check(RATE, "rate")


def suppression_factor_scattering(dx: Quantity, wavelength: Quantity,
                                  rate: Quantity, t: Quantity):
    """exp[-rate t (1 - exp(-dx^2 / 2 wavelength^2))], evaluated exactly.

    Works elementwise on array-valued quantities; returns a float or array.
    """
    dx.check(LENGTH, "separation")
    wavelength.check(LENGTH, "wavelength")
    rate.check(RATE, "rate")
    t.check(TIME, "time")
    if np.any(np.asarray(t.value) < 0):
        raise ValueError("t must be >= 0")
    if np.any(np.asarray(rate.value) < 0):
        raise ValueError("rate must be >= 0")
    if np.any(np.asarray(dx.value) < 0):
        raise ValueError("separation must be >= 0")
    if np.any(np.asarray(wavelength.value) <= 0):
        raise ValueError("wavelength must be positive")
    ratio = float_or_array(dx ** 2 / (2 * wavelength ** 2))
    # -expm1(-r) == 1 - exp(-r) without cancellation for small r
    return np.exp(-float_or_array(rate * t) * -np.expm1(-ratio))


def float_or_array(q: Quantity):
    q.check(DIMENSIONLESS, "ratio")
    v = q.value
    return float(v) if np.ndim(v) == 0 else np.asarray(v, dtype=float)


def collision_decoherence_timescale(spec: CollisionDecoherenceSpec,
                                    sigma_model: Optional[SigmaModel] = None,
                                    thermal_average: bool = False) -> DecoherenceResult:
    """tau = 1 / (N Lambda), valid when the separation is far beyond the
    scatterer's de Broglie wavelength."""
    env = spec.environment
    lam = de_broglie_wavelength(env.mass, env.temperature)
    ratio = float(spec.separation / lam)
    if ratio <= REGIME_RATIO:
        raise RegimeError(
            f"separation/wavelength = {ratio:.3g} <= {REGIME_RATIO}: "
            "single collisions do not fully decohere; the 1/(N Lambda) timescale does not apply"
        )
    if sigma_model is None:
        sigma_model = model_for(env, spec.probe_charge)
    mu = reduced_mass(spec.probe_mass, env.mass)
    v = thermal_speed(mu, env.temperature)
    sigma = sigma_model(mu, v)
    rate = scattering_rate(env, spec.probe_mass, sigma_model,
                           thermal_average=thermal_average)
    if rate.value == 0:
        tau = Quantity(math.inf, TIME)
    else:
        tau = (1 / (spec.ion_count * rate)).check(TIME, "timescale")
    mechanism = "colliding ion" if env.kind == "charged" else "colliding dipole"
    formula = "collision/coulomb" if env.kind == "charged" else "collision/dipole"
    return DecoherenceResult(
        mechanism=mechanism,
        formula=formula,
        tau=tau,
        intermediates={
            "cross_section": sigma,
            "relative_speed": v,
            "rate": rate,
            "wavelength": lam,
            "reduced_mass": mu,
            "separation_over_wavelength": ratio,
        },
    )


# ---------------------------------------------------------------------------
# Closed-form order-of-magnitude expressions, without pi or reduced mass


def closed_form_ion_ion(N: float, n: Quantity, m: Quantity, T: Quantity,
                          q: Quantity = CONSTANTS.electron_charge) -> Quantity:
    """sqrt(m (kT)^3) / (N g^2 q^4 n): v ~ sqrt(kT/m), sigma ~ (g q^2 / m v^2)^2."""
    kT = CONSTANTS.boltzmann * T
    g = CONSTANTS.coulomb_constant
    return ((m * kT ** 3).sqrt() / (N * g ** 2 * q ** 4 * n)).check(TIME, "timescale")


def closed_form_ion_water(N: float, n: Quantity, m: Quantity, T: Quantity, p: Quantity,
                            q: Quantity = CONSTANTS.electron_charge) -> Quantity:
    """sqrt(m k T) / (N g q p n): the dipole analogue, concentration-free."""
    kT = CONSTANTS.boltzmann * T
    g = CONSTANTS.coulomb_constant
    return ((m * kT).sqrt() / (N * g * q * p * n)).check(TIME, "timescale")
