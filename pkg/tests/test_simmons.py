"""Tunneling-formula core: pinned values, symmetries, resistance fits."""

import numpy as np
import pytest

from jjbarrier.errors import BarrierDomainError, InsufficientDataError
from jjbarrier.simmons import (
    IVCurve,
    SimmonsParams,
    linear_conductance,
    low_voltage_resistance,
    simmons_current,
    simmons_iv,
)

REF = SimmonsParams(area=5.76e4, thickness=0.78, barrier_height=1.48)

# Regression constant for I(REF, 0.01 V), frozen from a 50-digit
# arbitrary-precision evaluation of the formula with the same constants.
PINNED_CURRENT_0P01V = 1.350201182e-06


def test_pinned_current_value():
    assert simmons_current(REF, 0.01) == pytest.approx(PINNED_CURRENT_0P01V, rel=1e-9)


def test_zero_voltage_is_exactly_zero():
    assert simmons_current(REF, 0.0) == 0.0


def test_odd_symmetry_exact():
    v = np.linspace(0.01, 1.4, 40)
    plus = simmons_current(REF, v)
    minus = simmons_current(REF, -v)
    assert np.array_equal(minus, -plus)


def test_strictly_increasing_in_voltage():
    # monotone throughout the decaying-exponential regime; very close to
    # the |V| = 2 phi domain edge the formula leaves its validity
    # envelope and turns over, so the dense grid stops at 1.8 phi
    v = np.linspace(0.0, 1.8 * REF.barrier_height, 2000)
    cur = simmons_current(REF, v)
    assert (np.diff(cur) > 0).all()


@pytest.mark.parametrize("bad_v", [2 * 1.48, 3.2, np.nan, np.inf])
def test_domain_errors(bad_v):
    with pytest.raises(BarrierDomainError):
        simmons_current(REF, bad_v)


@pytest.mark.parametrize(
    "area,t,phi", [(-1, 0.78, 1.48), (5.76e4, 0.0, 1.48), (5.76e4, 0.78, -0.5)]
)
def test_invalid_params_rejected(area, t, phi):
    with pytest.raises(BarrierDomainError):
        SimmonsParams(area, t, phi)


def test_iv_single_zero_point():
    iv = simmons_iv(REF, [0.0])
    assert len(iv) == 1 and iv.current[0] == 0.0


def test_iv_odd_on_symmetric_grid():
    half = np.linspace(0.1, 1.0, 10)
    grid = np.concatenate([-half[::-1], [0.0], half])  # exactly symmetric
    iv = simmons_iv(REF, grid)
    assert np.array_equal(iv.current[::-1], -iv.current)


def test_iv_pointwise_matches_scalar():
    grid = np.linspace(0.0, 1.2, 17)
    iv = simmons_iv(REF, grid)
    for v, i in zip(grid, iv.current):
        assert i == simmons_current(REF, v)


def test_iv_rejects_non_increasing_grid():
    with pytest.raises(ValueError):
        simmons_iv(REF, [0.0, 0.5, 0.5])


def test_resistance_perfect_ohmic():
    r0 = 6200.0
    v = np.linspace(-0.02, 0.02, 9)
    iv = IVCurve(v, v / r0)
    assert low_voltage_resistance(iv) == pytest.approx(r0, rel=1e-14)


def test_resistance_against_finite_difference_slope():
    # independent oracle: central finite difference of the current at V -> 0
    h = 1e-5
    g0 = (simmons_current(REF, h) - simmons_current(REF, -h)) / (2 * h)
    iv = simmons_iv(REF, np.linspace(-0.02, 0.02, 11))
    r = low_voltage_resistance(iv, v_max=0.02)
    assert r == pytest.approx(1.0 / g0, rel=0.005)


def test_resistance_consistent_with_full_curve():
    iv = simmons_iv(REF, np.linspace(0.0, 1.2, 50))
    iv_low = simmons_iv(REF, np.linspace(0.0, 0.02, 5))
    r = low_voltage_resistance(iv_low)
    # the full curve's first increments give the same slope to ~1%
    slope = iv.current[1] / iv.voltage[1]
    assert r == pytest.approx(1.0 / slope, rel=0.01)


def test_resistance_insufficient_points():
    iv = IVCurve([0.0, 0.015, 0.5], [0.0, 1e-6, 1e-4])
    with pytest.raises(InsufficientDataError):
        low_voltage_resistance(iv, v_max=0.02)


def test_resistance_negative_slope_rejected():
    v = np.linspace(0.0, 0.02, 5)
    iv = IVCurve(v, -v / 5000.0)
    with pytest.raises(ValueError):
        low_voltage_resistance(iv)


def test_resistance_free_intercept_recovers_offset_curve():
    r0 = 8000.0
    v = np.linspace(-0.02, 0.02, 9)
    iv = IVCurve(v, v / r0 + 3e-7)
    assert low_voltage_resistance(iv, fit_intercept=True) == pytest.approx(
        r0, rel=1e-12
    )


def test_resistance_monotone_in_thickness_and_barrier():
    ts = np.linspace(0.6, 1.4, 15)
    g_t = linear_conductance(5.76e4, ts, 1.48)
    assert (np.diff(g_t) < 0).all()  # resistance increases with t
    phis = np.linspace(0.9, 2.0, 15)
    g_phi = linear_conductance(5.76e4, 0.78, phis)
    assert (np.diff(g_phi) < 0).all()  # resistance increases with phi


def test_doubling_area_halves_resistance():
    g1 = linear_conductance(5.76e4, 0.78, 1.48)
    g2 = linear_conductance(2 * 5.76e4, 0.78, 1.48)
    assert g2 == pytest.approx(2 * g1, rel=1e-15)
    iv1 = simmons_iv(REF, np.linspace(0.0, 0.02, 5))
    iv2 = simmons_iv(
        SimmonsParams(2 * REF.area, REF.thickness, REF.barrier_height),
        np.linspace(0.0, 0.02, 5),
    )
    assert low_voltage_resistance(iv2) == pytest.approx(
        low_voltage_resistance(iv1) / 2.0, rel=1e-12
    )


def test_ivcurve_validation():
    with pytest.raises(ValueError):
        IVCurve([0.0, 0.0], [0.0, 1.0])  # duplicate voltage
    with pytest.raises(ValueError):
        IVCurve([0.0, 1.0], [0.0, np.inf])
