"""Long-range (tidal) decoherence from the Hessian of a pair potential.

A distant environment particle with Gaussian position uncertainty Sigma
suppresses the object's off-diagonal density-matrix elements by

    f = exp[-1/2 dr^T M^T Sigma M dr t^2 / hbar^2]

where M is the Hessian of the interaction at the mean separation. The mean
force only contributes a phase and is carried along for the grid oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .scattering import DecoherenceResult
from .units import (
    CHARGE,
    CONSTANTS,
    FORCE,
    HESSIAN,
    LENGTH,
    MASS,
    NUMBER_DENSITY,
    TEMPERATURE,
    TIME,
    DIMENSIONLESS,
    Quantity,
)

__all__ = [
    "TidalCoupling",
    "GaussianEnvironmentState",
    "NoTidalDecoherence",
    "coulomb_hessian",
    "tidal_exponent",
    "tidal_suppression",
    "tidal_timescale",
    "multi_ion_suppression",
    "multi_ion_timescale",
    "minimal_thermal_spread",
    "nearest_ion_timescale",
    "angle_factor",
    "THETA_POLICIES",
]

THETA_POLICIES = ("drop", "worst", "best")


class NoTidalDecoherence(ValueError):
    """M dr = 0: the tidal field does not distinguish the two branches."""


def _vec(q: Quantity, dims, name: str, shape=(3,)) -> Quantity:
    q.check(dims, name)
    arr = np.asarray(q.value, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    return Quantity(arr, q.dims)


@dataclass(frozen=True, eq=False)
class TidalCoupling:
    hessian: Quantity
    mean_separation: Quantity
    force: Quantity

    def __post_init__(self):
        M = _vec(self.hessian, HESSIAN, "hessian", (3, 3))
        object.__setattr__(self, "hessian", M)
        object.__setattr__(self, "mean_separation", _vec(self.mean_separation, LENGTH, "mean_separation"))
        object.__setattr__(self, "force", _vec(self.force, FORCE, "force"))
        m = M.value
        scale = np.max(np.abs(m)) or 1.0
        if np.max(np.abs(m - m.T)) > 1e-12 * scale:
            raise ValueError("hessian must be symmetric")


@dataclass(frozen=True, eq=False)
class GaussianEnvironmentState:
    """Position covariance of the environment particle (length^2, 3x3)."""

    covariance: Quantity

    def __post_init__(self):
        S = _vec(self.covariance, (2, 0, 0, 0, 0, 0, 0), "covariance", (3, 3))
        object.__setattr__(self, "covariance", S)
        s = S.value
        scale = np.max(np.abs(s)) or 1.0
        if np.max(np.abs(s - s.T)) > 1e-12 * scale:
            raise ValueError("covariance must be symmetric")
        if np.min(np.linalg.eigvalsh(0.5 * (s + s.T))) < -1e-12 * scale:
            raise ValueError("covariance must be positive semidefinite")

    @classmethod
    def isotropic(cls, spread: Quantity) -> "GaussianEnvironmentState":
        spread.check(LENGTH, "spread")
        if spread.value < 0:
            raise ValueError("spread must be >= 0")
        return cls(Quantity(spread.value ** 2 * np.eye(3), (2, 0, 0, 0, 0, 0, 0)))

    @property
    def spread(self) -> Quantity:
        """Isotropic shorthand: sqrt(trace / 3)."""
        return Quantity(math.sqrt(np.trace(self.covariance.value) / 3), LENGTH)


def coulomb_hessian(a: Quantity, q1: Quantity = CONSTANTS.electron_charge,
                    q2: Quantity = CONSTANTS.electron_charge) -> TidalCoupling:
    """Hessian (3 a_hat a_hat^T - I) g q1 q2 / |a|^3 of the Coulomb potential."""
    a = _vec(a, LENGTH, "separation")
    q1.check(CHARGE, "q1")
    q2.check(CHARGE, "q2")
    r = float(np.linalg.norm(a.value))
    if r == 0:
        raise ValueError("zero separation")
    ahat = a.value / r
    gqq = CONSTANTS.coulomb_constant * q1 * q2
    M = (3 * np.outer(ahat, ahat) - np.eye(3)) * (gqq / Quantity(r, LENGTH) ** 3).value
    F = ahat * (gqq / Quantity(r, LENGTH) ** 2).value
    return TidalCoupling(Quantity(M, HESSIAN), a, Quantity(F, FORCE))


def _quadratic_form(coupling: TidalCoupling, env: GaussianEnvironmentState,
                    dr: Quantity) -> Quantity:
    """dr^T M^T Sigma M dr  (units energy^2 length^-2 ... = kg^2 m^4 s^-4)."""
    dr = _vec(dr, LENGTH, "dr")
    Mdr = coupling.hessian @ dr
    return Mdr @ (env.covariance @ Mdr)


def tidal_exponent(coupling: TidalCoupling, env: GaussianEnvironmentState,
                   dr: Quantity, t: Quantity) -> float:
    t.check(TIME, "time")
    q = _quadratic_form(coupling, env, dr)
    e = 0.5 * q * t ** 2 / CONSTANTS.hbar ** 2
    return float(e.check(DIMENSIONLESS, "exponent").value)


def tidal_suppression(coupling: TidalCoupling, env: GaussianEnvironmentState,
                      dr: Quantity, t: Quantity) -> float:
    """Magnitude of the tidal suppression factor; the phase is not included."""
    return math.exp(-tidal_exponent(coupling, env, dr, t))


def tidal_timescale(coupling: TidalCoupling, env: GaussianEnvironmentState,
                    dr: Quantity) -> Quantity:
    """hbar / sqrt(dr^T M^T Sigma M dr); the suppression there is exp(-1/2)."""
    dr = _vec(dr, LENGTH, "dr")
    if not np.any((coupling.hessian @ dr).value):
        raise NoTidalDecoherence("no tidal decoherence in this direction (M dr = 0)")
    q = _quadratic_form(coupling, env, dr)
    if q.value <= 0:
        raise NoTidalDecoherence("environment spread has no component along M dr")
    return (CONSTANTS.hbar / q.sqrt()).check(TIME, "timescale")


def multi_ion_suppression(couplings: Sequence[TidalCoupling],
                          envs: Union[GaussianEnvironmentState, Sequence[GaussianEnvironmentState]],
                          dr: Quantity, t: Quantity) -> float:
    """Product of single-ion factors: the exponents add."""
    envs = _broadcast_envs(envs, len(couplings))
    return math.exp(-sum(tidal_exponent(c, e, dr, t) for c, e in zip(couplings, envs)))


def multi_ion_timescale(couplings: Sequence[TidalCoupling],
                        envs: Union[GaussianEnvironmentState, Sequence[GaussianEnvironmentState]],
                        dr: Quantity) -> Quantity:
    """Time at which the summed exponent reaches 1/2 (tau^-2 add)."""
    envs = _broadcast_envs(envs, len(couplings))
    inv_sq = sum((1 / tidal_timescale(c, e, dr) ** 2).value
                 for c, e in zip(couplings, envs))
    return Quantity(1 / math.sqrt(inv_sq), TIME)


def _broadcast_envs(envs, n):
    if isinstance(envs, GaussianEnvironmentState):
        return [envs] * n
    envs = list(envs)
    if len(envs) != n:
        raise ValueError("need one environment state per coupling")
    return envs


def minimal_thermal_spread(m: Quantity, T: Quantity) -> Quantity:
    """hbar / sqrt(m k T): the tightest thermally allowed localisation."""
    m.check(MASS, "mass")
    T.check(TEMPERATURE, "temperature")
    if m.value <= 0 or T.value <= 0:
        raise ValueError("mass and temperature must be positive")
    return (CONSTANTS.hbar / (m * CONSTANTS.boltzmann * T).sqrt()).check(LENGTH, "spread")


def angle_factor(policy: str = "drop", cos_theta: float | None = None) -> float:
    """(1 + 3 cos^2 theta)^(-1/2) under a theta policy.

    ``drop`` ignores the anisotropy (factor 1), ``worst`` takes theta = 0
    (shortest timescale, factor 1/2), ``best`` takes theta = pi/2 (factor 1).
    An explicit ``cos_theta`` overrides the policy.
    """
    if cos_theta is not None:
        return (1 + 3 * cos_theta ** 2) ** -0.5
    if policy == "drop":
        return 1.0
    if policy == "worst":
        return 0.5
    if policy == "best":
        return 1.0
    raise ValueError(f"unknown theta policy {policy!r}; expected one of {THETA_POLICIES}")


def nearest_ion_timescale(N: float, n: Quantity, separation: Quantity, m: Quantity,
                          T: Quantity, a: Union[Quantity, str] = "auto",
                          q1: Quantity = CONSTANTS.electron_charge,
                          q2: Quantity = CONSTANTS.electron_charge,
                          theta_policy: str = "drop") -> DecoherenceResult:
    """a^3 sqrt(m k T) / (N g q1 q2 |dr|), a = n^(-1/3) under ``"auto"``.

    ``m`` and ``T`` describe the environment ion, whose spread is the minimal
    thermal one.
    """
    if not N >= 1:
        raise ValueError(f"N must be >= 1, got {N}")
    n.check(NUMBER_DENSITY, "number density")
    separation.check(LENGTH, "separation")
    for q, name in ((n, "number density"), (separation, "separation"), (m, "mass"), (T, "temperature")):
        if q.value <= 0:
            raise ValueError(f"{name} must be positive")
    if isinstance(a, str):
        if a != "auto":
            raise ValueError(f"a must be a length or 'auto', got {a!r}")
        a = (1 / n).root(3)
    a.check(LENGTH, "a")
    if a.value <= 0:
        raise ValueError("a must be positive")
    dx = minimal_thermal_spread(m, T)
    g = CONSTANTS.coulomb_constant
    tau = CONSTANTS.hbar * a ** 3 / (N * g * q1 * q2 * separation * dx)
    tau = (tau * angle_factor(theta_policy)).check(TIME, "timescale")
    return DecoherenceResult(
        mechanism="nearby ion",
        formula="tidal/nearest-ion",
        tau=tau,
        intermediates={
            "nearest_distance": a,
            "environment_spread": dx,
            "separation": separation,
            "theta_policy": theta_policy,
        },
    )
