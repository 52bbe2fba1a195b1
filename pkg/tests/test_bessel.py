import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hotspots import bessel
from hotspots.errors import NonFiniteInput

from .oracles import j0_series_exact, j1_series_exact

# Frozen expected values, computed by the exact-rational series oracle
# (tests/oracles.py) and cross-checked against the 2.4048 / 3.8317 / 0.7967
# published roundings.
J0_AT_2 = 0.2238907791412357
J1_AT_2 = 0.5767248077568734
J0_ZERO = 2.404825557695773
J1_ZERO = 3.831705970207512
JP11 = 1.8411837813406593
C_EXCL = 0.7966702528475560


def test_oracle_agrees_with_frozen_values():
    assert j0_series_exact(2.0) == pytest.approx(J0_AT_2, abs=1e-15)
    assert j1_series_exact(2.0) == pytest.approx(J1_AT_2, abs=1e-15)


def test_j0_normalization_and_table_values():
    assert bessel.j0_eval(0.0) == 1.0
    assert abs(bessel.j0_eval(J0_ZERO)) <= 1e-12
    assert bessel.j0_eval(2.0) == pytest.approx(J0_AT_2, abs=1e-9)


def test_j1_values():
    assert bessel.j1_eval(0.0) == 0.0
    assert abs(bessel.j1_eval(J1_ZERO)) <= 1e-12
    assert bessel.j1_eval(2.0) == pytest.approx(J1_AT_2, abs=1e-9)


def test_j0_derivative_is_minus_j1():
    assert bessel.j0_derivative(0.0) == 0.0
    assert bessel.j0_derivative(2.0) == pytest.approx(-J1_AT_2, abs=1e-9)
    assert abs(bessel.j0_derivative(J1_ZERO)) <= 1e-12


@pytest.mark.parametrize("fn", [bessel.j0_eval, bessel.j1_eval, bessel.j0_derivative])
def test_non_finite_input(fn):
    with pytest.raises(NonFiniteInput):
        fn(float("nan"))
    with pytest.raises(NonFiniteInput):
        fn(float("inf"))
    with pytest.raises(ValueError):
        fn(-1.0)


def test_series_accuracy_against_oracle():
    # the 1e-12 contract, sampled across the series branch
    for x in np.linspace(0.0, 16.0, 457):
        assert abs(bessel.j0_eval(float(x)) - j0_series_exact(float(x))) <= 1e-12
        assert abs(bessel.j1_eval(float(x)) - j1_series_exact(float(x))) <= 1e-12


def test_asymptotic_accuracy_against_extended_oracle():
    # beyond the seam the oracle series still converges (exact arithmetic)
    for x in [16.5, 18.0, 20.0]:
        assert abs(bessel.j0_eval(x) - j0_series_exact(x, terms=120)) <= 1e-12
        assert abs(bessel.j1_eval(x) - j1_series_exact(x, terms=120)) <= 1e-12


def test_seam_continuity():
    # spec's stated seam at 12 (same branch both sides here) ...
    below = bessel.j0_eval(np.nextafter(12.0, 0.0))
    above = bessel.j0_eval(np.nextafter(12.0, 20.0))
    assert abs(below - above) <= 1e-11
    # ... and the actual series/asymptotics switch point at 16
    below = bessel.j0_eval(np.nextafter(16.0, 0.0))
    above = bessel.j0_eval(np.nextafter(16.0, 20.0))
    assert abs(below - above) <= 1e-11
    below = bessel.j1_eval(np.nextafter(16.0, 0.0))
    above = bessel.j1_eval(np.nextafter(16.0, 20.0))
    assert abs(below - above) <= 1e-11


def test_ode_residual():
    # x^2 J0'' + x J0' + x^2 J0 = 0 with J0'' = (J2 - J0)/2,
    # J2 = (2/x) J1 - J0
    for x in np.linspace(0.1, 20.0, 100):
        x = float(x)
        j0 = bessel.j0_eval(x)
        j1 = bessel.j1_eval(x)
        j2 = (2.0 / x) * j1 - j0
        second = 0.5 * (j2 - j0)
        residual = x * x * second + x * (-j1) + x * x * j0
        assert abs(residual) <= 1e-8


def test_derivative_sign_on_zero_to_j1():
    for x in np.linspace(0.01, J1_ZERO - 0.01, 100):
        assert bessel.j0_derivative(float(x)) < 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=50.0, allow_nan=False))
def test_j0_bounded_by_one(x):
    assert abs(bessel.j0_eval(x)) <= 1.0 + 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=50.0))
def test_j1_bounded(x):
    assert abs(bessel.j1_eval(x)) <= 0.6


class TestFindConstants:
    def test_zero_locations(self):
        c = bessel.find_constants()
        assert c.j0 == pytest.approx(J0_ZERO, abs=1e-12)
        assert c.j1 == pytest.approx(J1_ZERO, abs=1e-12)
        assert c.jp11 == pytest.approx(JP11, abs=1e-12)

    def test_invariants(self):
        c = bessel.find_constants()
        assert abs(bessel.j0_eval(c.j0)) <= 1e-12
        assert abs(bessel.j1_eval(c.j1)) <= 1e-12
        assert 2.404 < c.j0 < 2.405
        assert 3.831 < c.j1 < 3.832
        assert 0.796 < c.c_excl < 0.797
        assert c.c_excl == c.j1 / (2.0 * c.j0)

    def test_exclusion_ratio(self):
        c = bessel.find_constants()
        assert c.c_excl == pytest.approx(C_EXCL, abs=1e-9)
        assert c.c_excl == pytest.approx(0.7967, abs=1e-4)  # published rounding

    def test_cached(self):
        assert bessel.find_constants() is bessel.find_constants()
