"""SI quantities with integer dimension exponents, physical constants, and
thermal kinematics.

Every physical number in the package travels as a :class:`Quantity`: an SI
magnitude (float or numpy array) plus a 7-vector of integer exponents over
(length, mass, time, current, temperature, amount, luminosity).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "DimensionError",
    "Quantity",
    "Dims",
    "DIMENSIONLESS",
    "LENGTH",
    "MASS",
    "TIME",
    "CURRENT",
    "TEMPERATURE",
    "AMOUNT",
    "CHARGE",
    "ENERGY",
    "SPEED",
    "AREA",
    "VOLUME",
    "NUMBER_DENSITY",
    "RATE",
    "VOLTAGE",
    "DIPOLE",
    "FORCE",
    "HESSIAN",
    "ConstantsTable",
    "CONSTANTS",
    "CONSTANTS_VERSION",
    "combine",
    "quantity",
    "parse_unit",
    "thermal_speed",
    "de_broglie_wavelength",
]

Dims = tuple  # tuple[int, int, int, int, int, int, int]
Number = Union[int, float, np.ndarray]


class DimensionError(TypeError):
    """Raised when an operation mixes incompatible physical dimensions."""


def _dims(L=0, M=0, T=0, I=0, K=0, N=0, J=0) -> Dims:
    return (L, M, T, I, K, N, J)


DIMENSIONLESS = _dims()
LENGTH = _dims(L=1)
MASS = _dims(M=1)
TIME = _dims(T=1)
CURRENT = _dims(I=1)
TEMPERATURE = _dims(K=1)
AMOUNT = _dims(N=1)
CHARGE = _dims(T=1, I=1)
ENERGY = _dims(L=2, M=1, T=-2)
SPEED = _dims(L=1, T=-1)
AREA = _dims(L=2)
VOLUME = _dims(L=3)
NUMBER_DENSITY = _dims(L=-3)
RATE = _dims(T=-1)
VOLTAGE = _dims(L=2, M=1, T=-3, I=-1)
DIPOLE = _dims(L=1, T=1, I=1)
FORCE = _dims(L=1, M=1, T=-2)
HESSIAN = _dims(M=1, T=-2)  # energy / length**2

_BASE_SYMBOLS = ("m", "kg", "s", "A", "K", "mol", "cd")


def _add(a: Dims, b: Dims) -> Dims:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Dims, b: Dims) -> Dims:
    return tuple(x - y for x, y in zip(a, b))


def _scale(a: Dims, k: int) -> Dims:
    return tuple(x * k for x in a)


@dataclass(frozen=True, eq=False)
class Quantity:
    """An SI magnitude with integer dimension exponents.

    Plain numbers on either side of ``*`` and ``/`` are treated as
    dimensionless; ``+``/``-`` require identical dimensions.
    """

    value: Number
    dims: Dims = DIMENSIONLESS

    # make numpy defer to our reflected operators (np.float64 * Quantity)
    __array_ufunc__ = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 7:
            raise ValueError(f"dims must have 7 entries, got {len(dims)}")
        object.__setattr__(self, "dims", dims)
        if isinstance(self.value, (list, tuple)):
            object.__setattr__(self, "value", np.asarray(self.value, dtype=float))

    # -- helpers -----------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Quantity":
        if isinstance(other, Quantity):
            return other
        return Quantity(other, DIMENSIONLESS)

    def _require_same(self, other: "Quantity", op: str) -> None:
        if self.dims != other.dims:
            raise DimensionError(
                f"cannot {op} {format_dims(self.dims)} and {format_dims(other.dims)}"
            )

    @property
    def is_dimensionless(self) -> bool:
        return self.dims == DIMENSIONLESS

    def check(self, dims: Dims, name: str = "quantity") -> "Quantity":
        """Return self if its dimensions equal ``dims``, else raise."""
        if self.dims != tuple(dims):
            raise DimensionError(
                f"{name} must have dimension {format_dims(dims)}, "
                f"got {format_dims(self.dims)}"
            )
        return self

    def to(self, unit: str) -> Number:
        """Magnitude expressed in ``unit`` (e.g. ``"nm"``)."""
        factor, dims = parse_unit(unit)
        if dims != self.dims:
            raise DimensionError(
                f"cannot express {format_dims(self.dims)} in {unit!r}"
            )
        return self.value / factor

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        self._require_same(other, "add")
        return Quantity(self.value + other.value, self.dims)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        self._require_same(other, "subtract")
        return Quantity(self.value - other.value, self.dims)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Quantity(-self.value, self.dims)

    def __abs__(self):
        return Quantity(abs(self.value), self.dims)

    def __mul__(self, other):
        return combine(self, self._coerce(other), "mul")

    def __rmul__(self, other):
        return combine(self._coerce(other), self, "mul")

    def __truediv__(self, other):
        return combine(self, self._coerce(other), "div")

    def __rtruediv__(self, other):
        return combine(self._coerce(other), self, "div")

    def __matmul__(self, other):
        other = self._coerce(other)
        return Quantity(np.asarray(self.value) @ np.asarray(other.value),
                        _add(self.dims, other.dims))

    def __rmatmul__(self, other):
        return self._coerce(other) @ self

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)):
            raise DimensionError("only integer powers are supported; use root()")
        return Quantity(self.value ** int(k), _scale(self.dims, int(k)))

    def root(self, k: int) -> "Quantity":
        """k-th root; every dimension exponent must be divisible by k."""
        if any(d % k for d in self.dims):
            raise DimensionError(
                f"cannot take root {k} of {format_dims(self.dims)}"
            )
        if k == 2:
            value = np.sqrt(self.value)
        elif k == 3:
            value = np.cbrt(self.value)
        else:
            value = np.asarray(self.value) ** (1.0 / k)
        return Quantity(value, tuple(d // k for d in self.dims))

    def sqrt(self) -> "Quantity":
        return self.root(2)

    # -- comparisons (same dims only) ---------------------------------------
    def _cmp(self, other, op):
        other = self._coerce(other)
        self._require_same(other, "compare")
        return op(self.value, other.value)

    def __lt__(self, other):
        return self._cmp(other, lambda a, b: a < b)

    def __le__(self, other):
        return self._cmp(other, lambda a, b: a <= b)

    def __gt__(self, other):
        return self._cmp(other, lambda a, b: a > b)

    def __ge__(self, other):
        return self._cmp(other, lambda a, b: a >= b)

    def __float__(self):
        if not self.is_dimensionless:
            raise DimensionError(
                f"cannot convert {format_dims(self.dims)} to a bare float"
            )
        return float(self.value)

    def __repr__(self):
        return f"Quantity({self.value!r}, {format_dims(self.dims)})"


def format_dims(dims: Dims) -> str:
    parts = []
    for sym, e in zip(_BASE_SYMBOLS, dims):
        if e == 1:
            parts.append(sym)
        elif e:
            parts.append(f"{sym}^{e}")
    return " ".join(parts) if parts else "1"


def combine(a: Quantity, b: Quantity, op: str) -> Quantity:
    """Multiply or divide two quantities, combining exponents exactly."""
    if op == "mul":
        return Quantity(a.value * b.value, _add(a.dims, b.dims))
    if op == "div":
        if np.any(np.asarray(b.value) == 0):
            raise ZeroDivisionError("division by a zero-valued quantity")
        return Quantity(a.value / b.value, _sub(a.dims, b.dims))
    raise ValueError(f"unknown op {op!r}; expected 'mul' or 'div'")


# ---------------------------------------------------------------------------
# Constants (CODATA 2018)

CONSTANTS_VERSION = "CODATA-2018"

_HBAR = 1.054571817e-34
_BOLTZMANN = 1.380649e-23
_EPS0 = 8.8541878128e-12
_QE = 1.602176634e-19
_MP = 1.67262192369e-27
_AVOGADRO = 6.02214076e23
_DEBYE = 3.335640952e-30  # 1e-21 / c  C m


@dataclass(frozen=True, eq=False)
class ConstantsTable:
    hbar: Quantity
    boltzmann: Quantity
    vacuum_permittivity: Quantity
    coulomb_constant: Quantity
    electron_charge: Quantity
    proton_mass: Quantity
    avogadro: Quantity
    version: str = CONSTANTS_VERSION


CONSTANTS = ConstantsTable(
    hbar=Quantity(_HBAR, _dims(L=2, M=1, T=-1)),
    boltzmann=Quantity(_BOLTZMANN, _dims(L=2, M=1, T=-2, K=-1)),
    vacuum_permittivity=Quantity(_EPS0, _dims(L=-3, M=-1, T=4, I=2)),
    coulomb_constant=Quantity(1.0 / (4.0 * math.pi * _EPS0), _dims(L=3, M=1, T=-4, I=-2)),
    electron_charge=Quantity(_QE, CHARGE),
    proton_mass=Quantity(_MP, MASS),
    avogadro=Quantity(_AVOGADRO, _dims(N=-1)),
)

# ---------------------------------------------------------------------------
# Units: a small table of named units plus a "a*b/c^2" style parser.

_UNITS: dict[str, tuple[float, Dims]] = {
    "1": (1.0, DIMENSIONLESS),
    "m": (1.0, LENGTH),
    "cm": (1e-2, LENGTH),
    "mm": (1e-3, LENGTH),
    "um": (1e-6, LENGTH),
    "μm": (1e-6, LENGTH),
    "nm": (1e-9, LENGTH),
    "pm": (1e-12, LENGTH),
    "kg": (1.0, MASS),
    "g": (1e-3, MASS),
    "mg": (1e-6, MASS),
    "ug": (1e-9, MASS),
    "μg": (1e-9, MASS),
    "m_p": (_MP, MASS),
    "s": (1.0, TIME),
    "ms": (1e-3, TIME),
    "us": (1e-6, TIME),
    "ns": (1e-9, TIME),
    "ps": (1e-12, TIME),
    "fs": (1e-15, TIME),
    "A": (1.0, CURRENT),
    "K": (1.0, TEMPERATURE),
    "mol": (1.0, AMOUNT),
    "mmol": (1e-3, AMOUNT),
    "l": (1e-3, VOLUME),
    "L": (1e-3, VOLUME),
    "C": (1.0, CHARGE),
    "e": (_QE, CHARGE),
    "q_e": (_QE, CHARGE),
    "J": (1.0, ENERGY),
    "eV": (_QE, ENERGY),
    "N": (1.0, FORCE),
    "V": (1.0, VOLTAGE),
    "mV": (1e-3, VOLTAGE),
    "Debye": (_DEBYE, DIPOLE),
    "D": (_DEBYE, DIPOLE),
}

_TOKEN = re.compile(r"^(?P<sym>[A-Za-zμ_]+|1)(?:\^(?P<exp>[+-]?\d+))?$")


def parse_unit(unit: str) -> tuple[float, Dims]:
    """Parse ``"nm"``, ``"m^-3"``, ``"mmol/l"``, ``"J/m^2"`` into (SI factor, dims)."""
    text = unit.replace(" ", "")
    if not text:
        raise ValueError("empty unit string")
    factor, dims = 1.0, DIMENSIONLESS
    # split on * and / while remembering the operator
    pieces = re.split(r"([*/])", text)
    sign = 1
    for piece in pieces:
        if piece == "*":
            sign = 1
            continue
        if piece == "/":
            sign = -1
            continue
        m = _TOKEN.match(piece)
        if not m or m.group("sym") not in _UNITS:
            raise ValueError(f"unknown unit {piece!r} in {unit!r}")
        f, d = _UNITS[m.group("sym")]
        exp = sign * int(m.group("exp") or 1)
        factor *= f ** exp
        dims = _add(dims, _scale(d, exp))
    return factor, dims


def quantity(value: Number, unit: str = "1") -> Quantity:
    """Build a Quantity from a magnitude in ``unit``: ``quantity(8, "nm")``."""
    factor, dims = parse_unit(unit)
    if isinstance(value, (list, tuple)):
        value = np.asarray(value, dtype=float)
    return Quantity(value * factor, dims)


# ---------------------------------------------------------------------------
# Thermal kinematics


def _positive(q: Quantity, dims: Dims, name: str) -> Quantity:
    q.check(dims, name)
    if np.any(np.asarray(q.value) <= 0):
        raise ValueError(f"{name} must be positive, got {q.value}")
    return q


def thermal_speed(m: Quantity, T: Quantity) -> Quantity:
    """rms speed sqrt(3kT/m) of a Maxwell-Boltzmann distribution."""
    _positive(m, MASS, "mass")
    T.check(TEMPERATURE, "temperature")
    # T = 0 is allowed here as the zero-temperature limit
    if np.any(np.asarray(T.value) < 0):
        raise ValueError(f"temperature must be non-negative, got {T.value}")
    return (3 * CONSTANTS.boltzmann * T / m).sqrt()


def de_broglie_wavelength(m: Quantity, T: Quantity) -> Quantity:
    """Thermal wavelength 2*pi*hbar / sqrt(3 m k T) = 2*pi*hbar / (m v_rms)."""
    _positive(m, MASS, "mass")
    _positive(T, TEMPERATURE, "temperature")
    return 2 * math.pi * CONSTANTS.hbar / (3 * m * CONSTANTS.boltzmann * T).sqrt()
