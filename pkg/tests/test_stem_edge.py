"""Kernel construction, edge tracing and thickness extraction."""

import numpy as np
import pytest

from jjbarrier.errors import InsufficientDataError
from jjbarrier.stem_edge import (
    build_kernels,
    default_half_length,
    detect_edges,
    multi_delta_summary,
    thickness_profile,
)
from jjbarrier.stem_forward import EdsImage


def band_image(
    height=60, width=40, top=20, thickness_px=20, pixel=0.1, ramp=0, value=1.0
):
    """Horizontal band; optional linear ramps of `ramp` rows at each face."""
    img = np.zeros((height, width))
    img[top : top + thickness_px, :] = value
    for i in range(1, ramp + 1):
        frac = value * (1 - i / (ramp + 1))
        if top - i >= 0:
            img[top - i, :] = frac
        if top + thickness_px - 1 + i < height:
            img[top + thickness_px - 1 + i, :] = frac
    return EdsImage(pixel, img)


def test_profile_construction_examples():
    assert np.array_equal(build_kernels(2, 0.0, 0.1).profile, [1, 1, 0, -1, -1])
    assert np.allclose(build_kernels(2, 0.4, 0.1).profile, [1.4, 1.4, 0, -0.6, -0.6])


def test_kernel_center_zero_and_reflection():
    kp = build_kernels(3, 0.25, 0.1)
    assert kp.profile[3] == 0.0
    assert np.array_equal(kp.kernel_b, kp.kernel_a[::-1])


def test_kernel_zero_sum_when_symmetric():
    kp = build_kernels(4, 0.0, 0.1)
    assert kp.profile.sum() == 0.0
    assert abs(kp.kernel_a.sum()) < 1e-12


def test_kernel_validation():
    with pytest.raises(ValueError):
        build_kernels(0, 0.0, 0.1)
    with pytest.raises(ValueError):
        build_kernels(2, -0.1, 0.1)


def test_sharp_band_width_recovered():
    img = band_image(thickness_px=20)
    kp = build_kernels(3, 0.0, img.pixel_size)
    tr_a, tr_b = detect_edges(img, kp)
    widths = tr_a.positions - tr_b.positions
    assert np.all(np.abs(widths - 20) <= 1)
    assert not tr_a.low_confidence.any()


def test_constant_offset_invariance_delta_zero():
    img = band_image()
    kp = build_kernels(3, 0.0, img.pixel_size)
    base = detect_edges(img, kp)
    shifted = detect_edges(EdsImage(img.pixel_size, img.values + 7.3), kp)
    assert np.array_equal(base[0].positions, shifted[0].positions)
    assert np.array_equal(base[1].positions, shifted[1].positions)


def test_translation_equivariance():
    kp = build_kernels(3, 0.2, 0.1)
    a = detect_edges(band_image(top=18), kp)
    b = detect_edges(band_image(top=23), kp)
    assert np.array_equal(a[0].positions + 5, b[0].positions)
    assert np.array_equal(a[1].positions + 5, b[1].positions)


def test_mirror_swaps_traces():
    img = band_image(top=15, ramp=3)
    kp = build_kernels(3, 0.0, img.pixel_size)
    tr_a, tr_b = detect_edges(img, kp)
    flipped = EdsImage(img.pixel_size, img.values[::-1].copy())
    fl_a, fl_b = detect_edges(flipped, kp)
    h = img.values.shape[0]
    assert np.array_equal(fl_a.positions, h - 1 - tr_b.positions)
    assert np.array_equal(fl_b.positions, h - 1 - tr_a.positions)


def test_uniform_image_ties_flagged_lowest_index():
    img = EdsImage(0.1, np.ones((40, 40)))
    kp = build_kernels(3, 0.0, img.pixel_size)
    tr_a, tr_b = detect_edges(img, kp)
    assert tr_a.low_confidence.all()
    assert (tr_a.positions == kp.k).all()  # lowest valid row


def test_image_smaller_than_kernel_rejected():
    kp = build_kernels(10, 0.0, 0.1)
    with pytest.raises(ValueError):
        detect_edges(EdsImage(0.1, np.ones((15, 50))), kp)


def test_thickness_profile_parallel_traces():
    img = band_image(thickness_px=20)
    kp = build_kernels(3, 0.0, img.pixel_size)
    prof = thickness_profile(detect_edges(img, kp), img.pixel_size)
    assert prof.mean == pytest.approx(2.0, abs=img.pixel_size)
    assert prof.sd == 0.0
    assert prof.n_excluded == 0


def test_thickness_profile_crossing_columns_excluded():
    from jjbarrier.stem_edge import EdgeTrace

    a = EdgeTrace(np.array([30.0, 10.0, 31.0]), np.zeros(3, bool))
    b = EdgeTrace(np.array([10.0, 30.0, 11.0]), np.zeros(3, bool))
    prof = thickness_profile((a, b), 0.1, fit_distributions=False)
    assert prof.n_excluded == 1
    assert len(prof.thickness_nm) == 2


def test_thickness_profile_all_crossed_errors():
    from jjbarrier.stem_edge import EdgeTrace

    a = EdgeTrace(np.array([10.0, 10.0]), np.zeros(2, bool))
    b = EdgeTrace(np.array([30.0, 30.0]), np.zeros(2, bool))
    with pytest.raises(InsufficientDataError):
        thickness_profile((a, b), 0.1)


def test_multi_delta_sharp_band_agreement():
    img = band_image(thickness_px=20)
    summary = multi_delta_summary(img, deltas=(0.0, 0.2, 0.4), k=3)
    means = list(summary.mean_by_delta.values())
    assert max(means) - min(means) <= img.pixel_size  # within one pixel


def test_multi_delta_diffuse_band_monotone_nonincreasing():
    img = band_image(height=80, thickness_px=20, ramp=6)
    summary = multi_delta_summary(img, deltas=(0.0, 0.2, 0.4), k=3)
    means = [summary.mean_by_delta[d] for d in (0.0, 0.2, 0.4)]
    assert means[0] >= means[1] >= means[2]
    assert summary.thickness_range == (min(means), max(means))
    assert summary.error_bar == pytest.approx(max(means) - min(means))


def test_gaussian_length_independence_on_sharp_band():
    img = band_image(thickness_px=20, width=80)
    short = multi_delta_summary(img, deltas=(0.0,), k=3, gaussian_length=0.3)
    long = multi_delta_summary(img, deltas=(0.0,), k=3, gaussian_length=1.0)
    assert short.mean_by_delta[0.0] == long.mean_by_delta[0.0]


def test_subpixel_refinement_close_to_integer_on_sharp_band():
    img = band_image(thickness_px=20, ramp=2)
    kp = build_kernels(3, 0.0, img.pixel_size)
    tr_a, tr_b = detect_edges(img, kp, refine=True)
    assert np.issubdtype(tr_a.positions.dtype, np.floating)
    coarse_a, _ = detect_edges(img, kp, refine=False)
    assert np.all(np.abs(tr_a.positions - coarse_a.positions) <= 1.0)


def test_default_half_length_scales_with_pixel():
    assert default_half_length(0.1) == 5
    assert default_half_length(0.25) == 2
    assert default_half_length(5.0) == 1
