import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decokit.units import (
    AREA, CONSTANTS, DIMENSIONLESS, ENERGY, LENGTH, MASS, TEMPERATURE, TIME,
    DimensionError, Quantity, combine, de_broglie_wavelength, parse_unit, quantity,
    thermal_speed,
)

from reference import LAMBDA_H2O, LAMBDA_NA, V_RMS_H2O, V_RMS_NA

T310 = quantity(310, "K")
NA = 23 * CONSTANTS.proton_mass
H2O = 18 * CONSTANTS.proton_mass


def test_combine_examples():
    assert combine(quantity(2, "m"), quantity(3, "m"), "mul").dims == AREA
    assert combine(quantity(2, "m"), quantity(3, "m"), "mul").value == 6
    r = combine(quantity(6, "J"), quantity(2, "K"), "div")
    assert r.value == 3
    assert r.dims == tuple(e - k for e, k in zip(ENERGY, TEMPERATURE))
    r = combine(quantity(5, "m"), quantity(1), "mul")
    assert r.value == 5 and r.dims == LENGTH


def test_combine_rejects_bad_op_and_zero_division():
    with pytest.raises(ValueError):
        combine(quantity(1, "m"), quantity(1, "m"), "add")
    with pytest.raises(ZeroDivisionError):
        combine(quantity(1, "m"), quantity(0, "s"), "div")


def test_addition_requires_matching_dims():
    with pytest.raises(DimensionError):
        quantity(1, "m") + quantity(1, "s")
    assert (quantity(1, "m") + quantity(50, "cm")).value == pytest.approx(1.5)


def test_unit_parsing():
    f, d = parse_unit("nm^-3")
    assert f == pytest.approx(1e27) and d == (-3, 0, 0, 0, 0, 0, 0)
    assert quantity(1, "g/cm^3").value == pytest.approx(1000)
    assert quantity(8, "nm").to("nm") == pytest.approx(8)
    with pytest.raises(ValueError):
        parse_unit("furlong")
    with pytest.raises(DimensionError):
        quantity(1, "m").to("s")


def test_float_only_for_dimensionless():
    assert float(quantity(2, "m") / quantity(1, "m")) == 2
    with pytest.raises(DimensionError):
        float(quantity(2, "m"))


def test_root_needs_divisible_exponents():
    assert quantity(8, "m^3").root(3).value == pytest.approx(2)
    with pytest.raises(DimensionError):
        quantity(2, "m").sqrt()


def test_thermal_speed_examples():
    assert thermal_speed(NA, T310).value == pytest.approx(V_RMS_NA, rel=1e-8)
    assert thermal_speed(H2O, T310).value == pytest.approx(V_RMS_H2O, rel=1e-8)
    assert thermal_speed(NA, quantity(0, "K")).value == 0
    assert abs(thermal_speed(NA, T310).value - 5.8e2) < 10
    assert abs(thermal_speed(H2O, T310).value - 6.5e2) < 10


def test_thermal_speed_rejects_bad_inputs():
    with pytest.raises(ValueError):
        thermal_speed(NA, quantity(-1, "K"))
    with pytest.raises(DimensionError):
        thermal_speed(quantity(1, "m"), T310)


def test_de_broglie_examples():
    assert de_broglie_wavelength(NA, T310).value == pytest.approx(LAMBDA_NA, rel=1e-8)
    assert de_broglie_wavelength(H2O, T310).value == pytest.approx(LAMBDA_H2O, rel=1e-8)
    assert de_broglie_wavelength(NA, T310).to("nm") == pytest.approx(0.03, abs=0.003)
    with pytest.raises(ValueError):
        de_broglie_wavelength(NA, quantity(0, "K"))


def test_constants_table():
    assert CONSTANTS.hbar.value == 1.054571817e-34
    assert CONSTANTS.boltzmann.value == 1.380649e-23
    g = CONSTANTS.coulomb_constant.value
    assert g == pytest.approx(1 / (4 * math.pi * CONSTANTS.vacuum_permittivity.value), rel=1e-15)


# ---------------------------------------------------------------------------
# dimensional-safety fuzzing

dims_st = st.tuples(*[st.integers(-3, 3)] * 7)
val_st = st.floats(1e-6, 1e6)


@settings(max_examples=250, deadline=None)
@given(dims_st, dims_st, val_st, val_st)
def test_fuzz_mul_div_add_exponents(da, db, va, vb):
    a, b = Quantity(va, da), Quantity(vb, db)
    assert (a * b).dims == tuple(x + y for x, y in zip(da, db))
    assert (a / b).dims == tuple(x - y for x, y in zip(da, db))
    assert (a * b / b).value == pytest.approx(va, rel=1e-12)


@settings(max_examples=250, deadline=None)
@given(dims_st, dims_st, val_st, val_st)
def test_fuzz_mismatched_addition_raises(da, db, va, vb):
    a, b = Quantity(va, da), Quantity(vb, db)
    if da == db:
        assert (a + b).dims == da
        assert (a - b).dims == da
    else:
        with pytest.raises(DimensionError):
            a + b
        with pytest.raises(DimensionError):
            a - b
        with pytest.raises(DimensionError):
            a < b


@settings(max_examples=250, deadline=None)
@given(dims_st, val_st)
def test_fuzz_physics_functions_reject_wrong_dims(d, v):
    q = Quantity(v, d)
    if d != MASS:
        with pytest.raises(DimensionError):
            thermal_speed(q, T310)
    if d != TEMPERATURE:
        with pytest.raises(DimensionError):
            de_broglie_wavelength(NA, q)


@settings(max_examples=200, deadline=None)
@given(dims_st, val_st, st.integers(-3, 3))
def test_fuzz_power(d, v, k):
    q = Quantity(v, d) ** k
    assert q.dims == tuple(k * x for x in d)
    assert q.value == pytest.approx(v ** k, rel=1e-12)


def test_array_quantities_broadcast():
    q = Quantity(np.array([1.0, 2.0]), LENGTH) * quantity(3, "s")
    assert np.allclose(q.value, [3, 6])
    assert q.dims == tuple(a + b for a, b in zip(LENGTH, TIME))
    assert (q / q).dims == DIMENSIONLESS
