"""Forward simulation of cross-section elemental maps of a barrier.

Pipeline: bottom-electrode topography (synthetic or measured) -> voxel
lamella with a conformal barrier band -> projection along the lamella
depth -> detector noise -> beam blur.  The output image plays the role
of an oxygen-signal map from a scanned-probe cross section and feeds the
edge-detection analysis in :mod:`jjbarrier.stem_edge`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from . import rng
from .errors import BarrierDomainError

__all__ = [
    "TopographyMap",
    "Lamella",
    "EdsImage",
    "synth_topography",
    "tip_convolve",
    "build_lamella",
    "project",
    "degrade",
]

# rng context tags so independent pipeline stages never share a stream
_TAG_TOPOGRAPHY = 0x701
_TAG_NOISE = 0x702


@dataclass
class TopographyMap:
    """Surface heights (nm) on a square-pixel grid.

    Heights are defined at pixel centers: pixel (row, col) sits at
    physical position ((col + 0.5) * pixel_size, (row + 0.5) * pixel_size).
    """

    pixel_size: float
    heights: np.ndarray

    def __post_init__(self):
        self.heights = np.asarray(self.heights, dtype=float)
        if self.pixel_size <= 0:
            raise ValueError("pixel_size must be positive")
        if self.heights.ndim != 2 or 0 in self.heights.shape:
            raise ValueError("heights must be a non-empty 2D grid")
        if not np.isfinite(self.heights).all():
            raise ValueError("heights must be finite")

    @property
    def extent_nm(self) -> tuple:
        rows, cols = self.heights.shape
        return rows * self.pixel_size, cols * self.pixel_size

    def rms(self) -> float:
        h = self.heights - self.heights.mean()
        return float(np.sqrt(np.mean(h**2)))


@dataclass
class EdsImage:
    """Dimensionless 2D intensity raster with a physical pixel size (nm)."""

    pixel_size: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.pixel_size <= 0:
            raise ValueError("pixel_size must be positive")
        if self.values.ndim != 2 or 0 in self.values.shape:
            raise ValueError("values must be a non-empty 2D grid")
        if not np.isfinite(self.values).all():
            raise ValueError("image values must be finite")


@dataclass
class Lamella:
    """Voxelized slab containing the barrier band.

    ``occupancy[z, d, x]`` with z vertical (the eventual image row axis),
    d the projection (depth) axis, x the width axis.  Values are 0
    (electrode/vacuum), 1 (inside the barrier band), or 0.5 (voxel cut by
    a band face).  ``surface_heights[d, x]`` and ``z0`` record the
    geometry the band was built from, which downstream oracles use.
    """

    voxel_size: float
    occupancy: np.ndarray
    surface_heights: np.ndarray
    z0: float  # physical z of the lower edge of voxel layer 0
    barrier_thickness: float

    def __post_init__(self):
        if self.voxel_size <= 0:
            raise ValueError("voxel_size must be positive")
        levels = np.unique(self.occupancy)
        if not np.isin(levels, (0.0, 0.5, 1.0)).all():
            raise ValueError("occupancy values restricted to {0, 0.5, 1}")


def synth_topography(
    width_nm: float,
    height_nm: float,
    pixel_size: float,
    rms: float,
    correlation_length: float,
    seed: int = 0,
) -> TopographyMap:
    """Gaussian random surface with prescribed roughness.

    White noise is filtered in Fourier space with a Gaussian transfer
    function (periodic boundary), giving an approximately Gaussian
    autocorrelation ``exp(-(r / correlation_length)^2)``; the result is
    shifted and rescaled to exactly zero mean and the requested RMS.
    """
    if rms < 0:
        raise ValueError("rms must be non-negative")
    if correlation_length <= 0:
        raise ValueError("correlation_length must be positive")
    cols = max(1, round(width_nm / pixel_size))
    rows = max(1, round(height_nm / pixel_size))
    if rms == 0.0:
        return TopographyMap(pixel_size, np.zeros((rows, cols)))
    gen = rng.generator(seed, _TAG_TOPOGRAPHY)
    white = gen.standard_normal((rows, cols))
    sigma_f = correlation_length / 2.0
    ky = 2.0 * np.pi * np.fft.fftfreq(rows, d=pixel_size)[:, None]
    kx = 2.0 * np.pi * np.fft.fftfreq(cols, d=pixel_size)[None, :]
    transfer = np.exp(-0.5 * sigma_f**2 * (kx**2 + ky**2))
    field = np.fft.ifft2(np.fft.fft2(white) * transfer).real
    field -= field.mean()
    std = field.std()
    if std == 0.0:
        return TopographyMap(pixel_size, np.zeros((rows, cols)))
    return TopographyMap(pixel_size, field * (rms / std))


def tip_convolve(topo: TopographyMap, tip_radius: float = 2.0) -> TopographyMap:
    """Tip-limited imaging of a surface: grey dilation by a spherical cap.

    The structuring element is the bottom cap of a sphere of the given
    radius (0 at the apex, negative outward), so the output never drops
    below the input and a zero radius is the identity.
    """
    if tip_radius < 0:
        raise ValueError("tip_radius must be non-negative")
    n = int(tip_radius / topo.pixel_size)
    if n == 0:
        return TopographyMap(topo.pixel_size, topo.heights.copy())
    offsets = np.arange(-n, n + 1) * topo.pixel_size
    dy, dx = np.meshgrid(offsets, offsets, indexing="ij")
    d2 = dx**2 + dy**2
    inside = d2 <= tip_radius**2
    cap = np.where(inside, np.sqrt(np.maximum(tip_radius**2 - d2, 0.0)) - tip_radius, 0.0)
    out = ndimage.grey_dilation(
        topo.heights, footprint=inside, structure=cap, mode="nearest"
    )
    return TopographyMap(topo.pixel_size, out)


def build_lamella(
    topo: TopographyMap,
    x0_nm: float = 0.0,
    d0_nm: float = 0.0,
    width_nm: float = 100.0,
    depth_nm: float = 30.0,
    barrier_thickness: float = 2.0,
    voxel: float = 0.1,
    z_margin: float = 2.0,
) -> Lamella:
    """Cut a (depth x width) region from the topography and wrap it in a
    voxel lamella with a conformal barrier band of constant thickness.

    Surface heights are sampled at voxel centers by bilinear
    interpolation.  A voxel is 1 when its center lies within
    ``[h, h + thickness]`` (the surface normal is approximated by the
    vertical axis), 0.5 when either band face passes strictly through its
    vertical extent, else 0.  The z grid is offset half a voxel so that a
    face at an integer height sits inside a voxel rather than on a
    boundary.
    """
    if barrier_thickness <= 0 or voxel <= 0:
        raise ValueError("barrier_thickness and voxel must be positive")
    ext_d, ext_x = topo.extent_nm
    if x0_nm < 0 or d0_nm < 0 or x0_nm + width_nm > ext_x or d0_nm + depth_nm > ext_d:
        raise BarrierDomainError(
            f"region {width_nm} x {depth_nm} nm at ({x0_nm}, {d0_nm}) exceeds the "
            f"{ext_x} x {ext_d} nm topography"
        )
    n_x = int(round(width_nm / voxel))
    n_d = int(round(depth_nm / voxel))
    # voxel-center sample positions, in topography pixel coordinates
    xs = (x0_nm + (np.arange(n_x) + 0.5) * voxel) / topo.pixel_size - 0.5
    ds = (d0_nm + (np.arange(n_d) + 0.5) * voxel) / topo.pixel_size - 0.5
    grid_d, grid_x = np.meshgrid(ds, xs, indexing="ij")
    h = ndimage.map_coordinates(
        topo.heights, [grid_d.ravel(), grid_x.ravel()], order=1, mode="nearest"
    ).reshape(n_d, n_x)

    z0 = float(h.min()) - z_margin - voxel / 2.0
    n_z = int(math.ceil((h.max() + barrier_thickness + z_margin - z0) / voxel))
    occ = np.zeros((n_z, n_d, n_x))

    centers = z0 + (np.arange(n_z) + 0.5) * voxel
    lo = h[None, :, :]
    hi = (h + barrier_thickness)[None, :, :]
    inside = (centers[:, None, None] >= lo) & (centers[:, None, None] <= hi)
    occ[inside] = 1.0

    d_idx, x_idx = np.meshgrid(np.arange(n_d), np.arange(n_x), indexing="ij")
    for face in (h, h + barrier_thickness):
        frac = (face - z0) / voxel
        k = np.floor(frac).astype(int)
        cut = (frac != k) & (k >= 0) & (k < n_z)
        occ[k[cut], d_idx[cut], x_idx[cut]] = 0.5
    return Lamella(
        voxel_size=voxel,
        occupancy=occ,
        surface_heights=h,
        z0=z0,
        barrier_thickness=barrier_thickness,
    )


def occupancy_at(lamella: Lamella, z: int, d: int, x: int) -> float:
    """Scalar re-evaluation of the voxel rule at one coordinate.

    Independent of the vectorized construction in :func:`build_lamella`;
    used as a brute-force membership oracle in tests.
    """
    h = float(lamella.surface_heights[d, x])
    dz = lamella.voxel_size
    low = lamella.z0 + z * dz
    high = low + dz
    center = low + dz / 2.0
    for face in (h, h + lamella.barrier_thickness):
        if low < face < high:
            return 0.5
    return 1.0 if h <= center <= h + lamella.barrier_thickness else 0.0


def project(lamella: Lamella, depth_axis: int = 1) -> EdsImage:
    """Average occupancy along the depth axis: the beam-projection image."""
    if depth_axis != 1:
        raise ValueError("the lamella depth axis is axis 1")
    return EdsImage(lamella.voxel_size, lamella.occupancy.mean(axis=depth_axis))


def degrade(
    image: EdsImage,
    noise_mean: float = 0.0,
    noise_sd: float = 0.2,
    blur_radius: float = 0.1,
    seed: int = 0,
) -> EdsImage:
    """Detector noise then beam blur.

    Adds i.i.d. Gaussian noise per pixel, then convolves with a
    normalized Gaussian of the given physical radius.  The default noise
    level puts the band contrast-to-noise ratio at about 5, a typical
    working point for the analysis stage; both numbers are plain
    configuration, not measurements.
    """
    if noise_sd < 0 or blur_radius < 0:
        raise ValueError("noise_sd and blur_radius must be non-negative")
    values = image.values.copy()
    if noise_sd > 0 or noise_mean != 0.0:
        gen = rng.generator(seed, _TAG_NOISE)
        values = values + noise_mean + noise_sd * gen.standard_normal(values.shape)
    if blur_radius > 0:
        values = ndimage.gaussian_filter(
            values, sigma=blur_radius / image.pixel_size, mode="nearest"
        )
    return EdsImage(image.pixel_size, values)
