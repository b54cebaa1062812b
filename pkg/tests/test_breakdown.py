"""Thinnest-point statistics, calibration, breakdown detection, grouping
and conductance concentration."""

import numpy as np
import pytest
from scipy.optimize import brentq

from jjbarrier import rng
from jjbarrier.breakdown import (
    BreakdownRecord,
    calibrate_dielectric_strength,
    cumulative_conductance,
    detect_breakdown,
    group_by_breakdown,
    min_thickness_samples,
)
from jjbarrier.errors import InsufficientDataError, ShortedFieldError
from jjbarrier.montecarlo import BarrierField, ThicknessDistribution, sample_barrier
from jjbarrier.simmons import SimmonsParams, linear_conductance, simmons_iv


def test_minima_sd_zero_equal_mean():
    dist = ThicknessDistribution("normal", 1.3, 0.0)
    minima = min_thickness_samples(dist, 10, 10, mesh=1.0, n_junctions=5, seed=0)
    assert np.array_equal(minima, np.full(5, 1.3))


def test_minima_match_bruteforce_oracle():
    # literal per-pixel re-draw from the same keyed stream
    dist = ThicknessDistribution("lognormal", 1.0, 0.155)
    got = min_thickness_samples(dist, 10, 10, mesh=1.0, n_junctions=10, seed=77)
    for j in range(10):
        key = rng.derive_key(77, j)
        pixels = [
            float(dist.from_unit(rng.uniform_at(key, y, x)))
            for y in range(10)
            for x in range(10)
        ]
        assert got[j] == min(pixels)


def test_minima_workers_bit_identical():
    dist = ThicknessDistribution("lognormal", 1.0, 0.155)
    a = min_thickness_samples(dist, 12, 12, mesh=0.5, n_junctions=8, seed=3, workers=1)
    b = min_thickness_samples(dist, 12, 12, mesh=0.5, n_junctions=8, seed=3, workers=4)
    assert np.array_equal(a, b)


def test_minima_nonincreasing_under_mesh_refinement():
    dist = ThicknessDistribution("lognormal", 1.0, 0.155)
    coarse = min_thickness_samples(dist, 10, 10, mesh=0.5, n_junctions=12, seed=5)
    fine = min_thickness_samples(dist, 10, 10, mesh=0.25, n_junctions=12, seed=5)
    assert (fine <= coarse).all()


def test_normal_minima_spread_exceeds_lognormal():
    norm = ThicknessDistribution("normal", 1.025, 0.21)
    logn = ThicknessDistribution("lognormal", 1.0, 0.155)
    m_norm = min_thickness_samples(norm, 40, 40, mesh=0.5, n_junctions=60, seed=11)
    m_logn = min_thickness_samples(logn, 40, 40, mesh=0.5, n_junctions=60, seed=11)
    m_norm = m_norm[m_norm > 0]
    rel = lambda x: np.std(x, ddof=1) / np.mean(x)  # noqa: E731
    assert rel(m_norm) > rel(m_logn)


def test_calibration_definitional():
    cal = calibrate_dielectric_strength(np.ones(10), 1.3)
    assert cal.E_ds == pytest.approx(1.3, rel=1e-15)


def test_calibration_identity_mean():
    gen = np.random.default_rng(2)
    minima = gen.uniform(0.3, 0.8, 200)
    cal = calibrate_dielectric_strength(minima, 1.42)
    vbd = cal.breakdown_voltages(minima)
    assert vbd.mean() == pytest.approx(1.42, rel=1e-14)


def test_calibration_rejects_nonpositive():
    with pytest.raises(ValueError):
        calibrate_dielectric_strength(np.array([0.5, -0.1]), 1.3)
    with pytest.raises(InsufficientDataError):
        calibrate_dielectric_strength(np.array([]), 1.3)


def test_detect_breakdown_none_on_pure_tunneling():
    iv = simmons_iv(SimmonsParams(5.76e4, 0.78, 1.48), np.linspace(0, 1.2, 60))
    assert detect_breakdown(iv) is None


def test_detect_breakdown_constructed_jump():
    p = SimmonsParams(5.76e4, 0.78, 1.48)
    grid = np.linspace(0, 1.5, 61)
    iv = simmons_iv(p, grid)
    cur = iv.current.copy()
    v_bd = 1.25
    m = grid >= v_bd
    i0 = int(np.argmax(m))
    slope = (cur[i0 - 1] - cur[i0 - 2]) / (grid[i0 - 1] - grid[i0 - 2])
    cur[m] = cur[i0 - 1] + 50 * slope * (grid[m] - grid[i0 - 1])
    got = detect_breakdown(type(iv)(grid, cur))
    step = grid[1] - grid[0]
    assert got == pytest.approx(v_bd, abs=step + 1e-12)


def test_detect_breakdown_flat_zero_precondition():
    from jjbarrier.simmons import IVCurve

    with pytest.raises(ValueError):
        detect_breakdown(IVCurve(np.linspace(0, 1, 15), np.zeros(15)))
    with pytest.raises(InsufficientDataError):
        detect_breakdown(IVCurve(np.linspace(0, 1, 5), np.linspace(0, 1e-6, 5)))


def test_grouping_exact_delta():
    records = [BreakdownRecord(f"lo{i}", 1.2, 7000.0) for i in range(93)]
    records += [BreakdownRecord(f"hi{i}", 1.4, 7300.0) for i in range(7)]
    groups = group_by_breakdown(records, threshold=1.3)
    assert groups.delta_R == 300.0
    assert groups.median_R_low == 7000.0 and groups.median_R_high == 7300.0
    assert groups.fraction_low == pytest.approx(0.93)
    assert groups.fraction_high == pytest.approx(0.07)


def test_grouping_empty_side_warns():
    records = [BreakdownRecord(f"j{i}", 1.1, 7000.0) for i in range(5)]
    with pytest.warns(UserWarning):
        groups = group_by_breakdown(records, threshold=1.3)
    assert np.isnan(groups.median_R_high)
    assert groups.fraction_low == 1.0


def test_cumulative_uniform_is_diagonal():
    fld = BarrierField(1.0, np.full((12, 12), 1.0))
    curve = cumulative_conductance(fld, 1.22)
    assert np.allclose(curve.conductance_fraction, curve.area_fraction, atol=1e-12)
    assert curve.area_fraction[0] == 0.0 and curve.conductance_fraction[-1] == 1.0


def test_cumulative_two_pixel_three_to_one():
    t1 = 0.9
    g1 = float(linear_conductance(1.0, t1, 1.22))
    t2 = brentq(lambda t: float(linear_conductance(1.0, t, 1.22)) - g1 / 3.0, t1, 3.0)
    fld = BarrierField(1.0, np.array([[t1, t2]]))
    curve = cumulative_conductance(fld, 1.22)
    assert curve.area_fraction[1] == 0.5
    assert curve.conductance_fraction[1] == pytest.approx(0.75, rel=1e-9)


def test_cumulative_concave_and_above_diagonal():
    fld = sample_barrier(
        ThicknessDistribution("lognormal", 1.0, 0.155), 60, 60, 1.0, seed=13
    )
    curve = cumulative_conductance(fld, 1.22)
    diffs = np.diff(curve.conductance_fraction)
    assert (np.diff(diffs) <= 1e-12).all()  # concave
    inner = slice(1, -1)
    assert (
        curve.conductance_fraction[inner] > curve.area_fraction[inner]
    ).all()  # strictly above the diagonal
    assert curve.conductance_fraction[0] == 0.0
    assert curve.conductance_fraction[-1] == pytest.approx(1.0, rel=1e-12)


def test_cumulative_rejects_shorted():
    with pytest.raises(ShortedFieldError):
        cumulative_conductance(BarrierField(1.0, np.array([[1.0, -0.2]])), 1.22)


def test_breakdown_record_validation():
    with pytest.raises(ValueError):
        BreakdownRecord("x", -1.0, 7000.0)
