"""Topography synthesis, tip dilation, lamella geometry, projection and
degradation."""

import numpy as np
import pytest

from jjbarrier.errors import BarrierDomainError
from jjbarrier.stem_forward import (
    EdsImage,
    Lamella,
    TopographyMap,
    build_lamella,
    degrade,
    occupancy_at,
    project,
    synth_topography,
    tip_convolve,
)


def test_synth_flat_when_rms_zero():
    topo = synth_topography(50, 20, 0.5, rms=0.0, correlation_length=5, seed=1)
    assert np.array_equal(topo.heights, np.zeros_like(topo.heights))


def test_synth_exact_rms_and_zero_mean():
    topo = synth_topography(100, 100, 0.5, rms=0.7, correlation_length=10, seed=2)
    assert topo.rms() == pytest.approx(0.7, rel=1e-9)
    assert abs(topo.heights.mean()) < 1e-12


def test_synth_two_seeds_uncorrelated():
    a = synth_topography(50, 50, 0.5, rms=0.7, correlation_length=5, seed=3)
    b = synth_topography(50, 50, 0.5, rms=0.7, correlation_length=5, seed=4)
    x = a.heights.ravel()
    y = b.heights.ravel()
    rho = np.corrcoef(x, y)[0, 1]
    assert abs(rho) < 0.05


def test_synth_correlation_length_smooths():
    rough = synth_topography(100, 100, 0.5, 0.5, correlation_length=1.0, seed=5)
    smooth = synth_topography(100, 100, 0.5, 0.5, correlation_length=20.0, seed=5)
    grad = lambda t: np.abs(np.diff(t.heights, axis=1)).mean()  # noqa: E731
    assert grad(smooth) < grad(rough)


def test_tip_flat_unchanged():
    topo = TopographyMap(0.5, np.full((20, 20), 1.7))
    out = tip_convolve(topo, 2.0)
    assert np.allclose(out.heights, topo.heights, atol=1e-12)


def test_tip_zero_radius_identity():
    topo = synth_topography(20, 20, 0.5, 0.4, 5, seed=6)
    out = tip_convolve(topo, 0.0)
    assert np.array_equal(out.heights, topo.heights)


def test_tip_spike_analytic_dilation():
    px = 0.5
    radius = 2.0
    h = 5.0
    grid = np.zeros((21, 21))
    grid[10, 10] = h
    out = tip_convolve(TopographyMap(px, grid), radius).heights
    assert out[10, 10] == h  # peak preserved
    ys, xs = np.indices(grid.shape)
    d2 = ((ys - 10.0) * px) ** 2 + ((xs - 10.0) * px) ** 2
    expected = np.where(
        d2 <= radius**2, np.maximum(h + np.sqrt(np.maximum(radius**2 - d2, 0)) - radius, 0.0), 0.0
    )
    assert np.allclose(out, expected, atol=1e-12)


def test_tip_monotone_and_repeatable():
    topo = synth_topography(30, 30, 0.5, 0.7, 5, seed=7)
    once = tip_convolve(topo, 2.0)
    twice = tip_convolve(once, 2.0)
    assert (once.heights >= topo.heights - 1e-12).all()
    assert (twice.heights >= once.heights - 1e-12).all()


def test_lamella_flat_band_structure():
    topo = TopographyMap(0.5, np.zeros((80, 220)))
    lam = build_lamella(topo, width_nm=100, depth_nm=30, barrier_thickness=2.0, voxel=0.1)
    col = lam.occupancy[:, 0, 0]
    # 2 nm band over 0.1 nm voxels: 19 interior layers of 1 plus a half
    # layer at each face (the faces sit strictly inside a voxel)
    assert int((col == 1.0).sum()) == 19
    assert int((col == 0.5).sum()) == 2
    assert col.sum() * lam.voxel_size == pytest.approx(2.0, rel=1e-12)
    # every column identical for a flat surface
    assert np.array_equal(lam.occupancy, np.broadcast_to(
        col[:, None, None], lam.occupancy.shape))


def test_lamella_step_follows_surface():
    heights = np.zeros((80, 220))
    heights[:, 110:] = 1.0  # 1 nm step halfway
    topo = TopographyMap(0.5, heights)
    lam = build_lamella(topo, width_nm=100, depth_nm=30, voxel=0.1)
    left = lam.occupancy[:, 0, 10]
    right = lam.occupancy[:, 0, -10]
    shift = int(round(1.0 / lam.voxel_size))
    assert np.array_equal(np.flatnonzero(left == 1.0) + shift, np.flatnonzero(right == 1.0))


def test_lamella_bruteforce_membership_oracle():
    topo = synth_topography(120, 40, 0.5, rms=0.7, correlation_length=10, seed=8)
    lam = build_lamella(topo, x0_nm=5, d0_nm=5, width_nm=100, depth_nm=30, voxel=0.1)
    gen = np.random.default_rng(0)
    nz, nd, nx = lam.occupancy.shape
    zz = gen.integers(0, nz, 100_000)
    dd = gen.integers(0, nd, 100_000)
    xx = gen.integers(0, nx, 100_000)
    mismatches = sum(
        lam.occupancy[z, d, x] != occupancy_at(lam, z, d, x)
        for z, d, x in zip(zz, dd, xx)
    )
    assert mismatches == 0


def test_lamella_region_out_of_bounds():
    topo = TopographyMap(0.5, np.zeros((40, 40)))
    with pytest.raises(BarrierDomainError):
        build_lamella(topo, x0_nm=0, d0_nm=0, width_nm=100, depth_nm=30)


def test_project_flat_band_values():
    topo = TopographyMap(0.5, np.zeros((80, 220)))
    lam = build_lamella(topo, width_nm=100, depth_nm=30, voxel=0.1)
    img = project(lam)
    col = img.values[:, 0]
    assert set(np.round(col, 12)) <= {0.0, 0.5, 1.0}
    assert (img.values == img.values[:, :1]).all()


def test_project_toy_step_hand_computed():
    # 3-column toy lamella: band occupies z rows 2-4 in two depth slices
    # and rows 5-7 in the third
    occ = np.zeros((10, 3, 1))
    occ[2:5, 0, 0] = 1.0
    occ[2:5, 1, 0] = 1.0
    occ[5:8, 2, 0] = 1.0
    lam = Lamella(
        voxel_size=0.1,
        occupancy=occ,
        surface_heights=np.zeros((3, 1)),
        z0=0.0,
        barrier_thickness=0.3,
    )
    img = project(lam)
    expected = np.zeros(10)
    expected[2:5] = 2.0 / 3.0
    expected[5:8] = 1.0 / 3.0
    assert np.allclose(img.values[:, 0], expected, atol=1e-15)
    assert (img.values[2:8, 0] < 1.0).all()  # broadened band, diluted values


def test_project_all_zero():
    lam = Lamella(0.1, np.zeros((5, 4, 3)), np.zeros((4, 3)), 0.0, 1.0)
    assert not project(lam).values.any()


def test_project_preserves_mass():
    topo = synth_topography(60, 30, 0.5, 0.5, 8, seed=9)
    lam = build_lamella(topo, width_nm=50, depth_nm=20, voxel=0.1)
    img = project(lam)
    n_depth = lam.occupancy.shape[1]
    assert img.values.sum() * n_depth == pytest.approx(lam.occupancy.sum(), rel=1e-12)


def test_degrade_identity():
    img = EdsImage(0.1, np.linspace(0, 1, 50).reshape(5, 10))
    out = degrade(img, noise_mean=0.0, noise_sd=0.0, blur_radius=0.0, seed=1)
    assert np.array_equal(out.values, img.values)


def test_degrade_noise_statistics():
    img = EdsImage(0.1, np.zeros((250, 400)))
    out = degrade(img, noise_mean=0.3, noise_sd=0.2, blur_radius=0.0, seed=2)
    diff = out.values - img.values
    assert abs(diff.mean() - 0.3) < 0.02 * 0.3
    assert abs(diff.std() - 0.2) < 0.02 * 0.2


def test_degrade_deterministic():
    img = EdsImage(0.1, np.zeros((20, 20)))
    a = degrade(img, 0.0, 0.2, 0.1, seed=5)
    b = degrade(img, 0.0, 0.2, 0.1, seed=5)
    assert np.array_equal(a.values, b.values)


def test_blur_single_pixel_integrates_to_one():
    values = np.zeros((41, 41))
    values[20, 20] = 1.0
    out = degrade(EdsImage(0.1, values), 0.0, 0.0, blur_radius=0.3, seed=0)
    assert out.values.sum() == pytest.approx(1.0, abs=1e-9)
    assert out.values[20, 20] < 1.0
    assert out.values[20, 20] == out.values.max()
