"""Monte-Carlo simulation of junction IVs from pixelized barriers.

A junction is modeled as a grid of square pixels acting as parallel
conduction channels.  Each pixel's thickness is an independent draw from
a normal or lognormal law (parameterized by arithmetic mean and sd), and
the junction current is the pixel-wise sum of the tunneling formula.
Draws are addressed by (master seed, junction index, pixel row, pixel
column) through a counter-based generator, so ensembles and parameter
sweeps are bit-reproducible at any level of parallelism.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy.special import ndtri

from . import rng
from .constants import BARRIER_DECAY_PER_NM, ELEMENTARY_CHARGE, PLANCK_CONSTANT
from .errors import BarrierDomainError
from .fitting import fit_simmons, lognormal_shape_params
from .simmons import IVCurve, SimmonsParams, low_voltage_resistance

__all__ = [
    "ThicknessDistribution",
    "BarrierField",
    "JunctionGeometry",
    "EnsembleMetrics",
    "MatchTargets",
    "sample_barrier",
    "junction_iv",
    "simulate_ensemble",
    "sweep",
    "SweepResult",
    "DEFAULT_IV_GRID",
    "DEFAULT_TARGETS",
    "BARRIER_HEIGHT_PRESETS",
]

#: Default voltage grid for simulated IVs: 50 points spanning the
#: pre-breakdown fit range.
DEFAULT_IV_GRID = np.linspace(0.0, 1.2, 50)

#: Dedicated low-voltage grid for the linear resistance fit.  The default
#: 50-point IV grid has only one sample at or below 0.02 V, so resistance
#: is evaluated on this auxiliary window instead.
LOW_VOLTAGE_GRID = np.linspace(0.0, 0.02, 5)

#: Barrier-height presets commonly used in the sweeps.
BARRIER_HEIGHT_PRESETS = (0.8, 1.0, 1.22, 1.5)

#: Pixels below this size are unphysical (smaller than the ionic radii of
#: the barrier constituents); sampling below it only triggers a warning.
MIN_PHYSICAL_PIXEL_NM = 0.2


@dataclass(frozen=True)
class ThicknessDistribution:
    """Statistical law for pixel thickness, in arithmetic moments (nm)."""

    kind: Literal["normal", "lognormal"]
    mean: float
    sd: float

    def __post_init__(self):
        if self.kind not in ("normal", "lognormal"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if not (self.mean > 0):
            raise ValueError("mean thickness must be positive")
        if self.sd < 0:
            raise ValueError("thickness sd must be non-negative")

    def from_unit(self, u):
        """Map uniforms in (0, 1) to thickness draws (inverse CDF)."""
        u = np.asarray(u, dtype=float)
        if self.sd == 0.0:
            return np.full_like(u, self.mean)
        z = ndtri(u)
        if self.kind == "normal":
            return self.mean + self.sd * z
        mu, sigma = lognormal_shape_params(self.mean, self.sd)
        return np.exp(mu + sigma * z)


@dataclass
class BarrierField:
    """Per-pixel thickness map of one junction barrier."""

    pixel_size: float  # nm
    thickness: np.ndarray  # (rows, cols) in nm

    def __post_init__(self):
        self.thickness = np.asarray(self.thickness, dtype=float)
        if self.pixel_size <= 0:
            raise ValueError("pixel_size must be positive")
        if self.thickness.ndim != 2 or 0 in self.thickness.shape:
            raise ValueError("thickness must be a non-empty 2D grid")
        if not np.isfinite(self.thickness).all():
            raise ValueError("thickness values must be finite")

    @property
    def shorted(self) -> bool:
        """True when any pixel has thickness <= 0 (short circuit)."""
        return bool((self.thickness <= 0.0).any())

    @property
    def area_nm2(self) -> float:
        return self.thickness.size * self.pixel_size**2


@dataclass(frozen=True)
class JunctionGeometry:
    width_nm: float = 240.0
    height_nm: float = 240.0
    pixel_size_nm: float = 1.0

    @property
    def area_nm2(self) -> float:
        cols = int(self.width_nm / self.pixel_size_nm)
        rows = int(self.height_nm / self.pixel_size_nm)
        return rows * cols * self.pixel_size_nm**2


def sample_barrier(
    dist: ThicknessDistribution,
    width_nm: float,
    height_nm: float,
    pixel_size: float,
    seed: int,
    junction: int = 0,
) -> BarrierField:
    """Draw one barrier field.

    Pixel (row, col) of junction ``junction`` is a pure function of
    (seed, junction, row, col): evaluation order and worker count cannot
    change the result.  Dimensions that do not divide into whole pixels
    are rounded down with a warning.  Negative draws are permitted (the
    normal law has them); downstream code treats them as shorts.
    """
    if pixel_size <= 0:
        raise ValueError("pixel_size must be positive")
    if pixel_size < MIN_PHYSICAL_PIXEL_NM:
        warnings.warn(
            f"pixel size {pixel_size} nm is below the ~{MIN_PHYSICAL_PIXEL_NM} nm "
            "physical floor (ionic radius scale)"
        )
    cols = int(width_nm / pixel_size)
    rows = int(height_nm / pixel_size)
    if cols * pixel_size != width_nm or rows * pixel_size != height_nm:
        warnings.warn(
            f"{width_nm} x {height_nm} nm does not divide into whole "
            f"{pixel_size} nm pixels; rounding down to {cols} x {rows} pixels"
        )
    if rows <= 0 or cols <= 0:
        raise ValueError("geometry smaller than one pixel")
    key = rng.derive_key(seed, junction)
    u = rng.uniform_field(key, rows, cols)
    return BarrierField(pixel_size=pixel_size, thickness=dist.from_unit(u))


def junction_iv(
    field: BarrierField, barrier_height: float, grid=DEFAULT_IV_GRID
) -> Optional[IVCurve]:
    """Combine per-pixel currents into the junction IV.

    Pixels conduct in parallel: I(V) is the sum over pixels of the
    tunneling current at the pixel's thickness and area.  Returns ``None``
    when the field contains a short (any thickness <= 0).
    """
    grid = np.asarray(grid, dtype=float)
    if field.shorted:
        return None
    if np.any(barrier_height - np.abs(grid) / 2.0 <= 0):
        bad = grid[barrier_height - np.abs(grid) / 2.0 <= 0][0]
        raise BarrierDomainError(
            f"grid voltage {bad} V outside domain for barrier height {barrier_height} V"
        )
    t = field.thickness.ravel()
    k = BARRIER_DECAY_PER_NM * t
    pref = (
        field.pixel_size**2
        * 1e-18
        * ELEMENTARY_CHARGE**2
        / (2.0 * np.pi * PLANCK_CONSTANT * (t * 1e-9) ** 2)
    )
    currents = np.empty(len(grid))
    for i, v in enumerate(grid):
        lo = barrier_height - v / 2.0
        hi = barrier_height + v / 2.0
        term_lo = pref * np.exp(-k * math.sqrt(lo))
        term_hi = pref * np.exp(-k * math.sqrt(hi))
        currents[i] = lo * term_lo.sum() - hi * term_hi.sum()
    return IVCurve(grid, currents)


@dataclass(frozen=True)
class MatchTargets:
    """Experimental reference values a simulated ensemble is scored against."""

    target_R: float = 7122.0  # ohm
    R_tol: float = 0.10  # fraction
    spread_max: float = 2.4  # percent
    t_center: float = 0.78  # nm
    t_tol: float = 0.03  # fraction
    phi_center: float = 1.48  # V
    phi_tol: float = 0.06  # fraction

    def __post_init__(self):
        for name in ("R_tol", "spread_max", "t_tol", "phi_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def criteria(self, median_R, spread, t_fit, phi_fit) -> dict:
        return {
            "resistance": abs(median_R - self.target_R) <= self.R_tol * self.target_R,
            "spread": spread <= self.spread_max,
            "thickness": abs(t_fit - self.t_center) <= self.t_tol * self.t_center,
            "barrier_height": abs(phi_fit - self.phi_center)
            <= self.phi_tol * self.phi_center,
        }


DEFAULT_TARGETS = MatchTargets()


@dataclass
class EnsembleMetrics:
    """Aggregate statistics of one simulated junction ensemble."""

    n_junctions: int
    n_shorted: int
    median_resistance: float
    resistance_spread: float  # sd / median, percent
    refit_thickness: float
    refit_barrier_height: float
    match_count: int
    valid: bool
    #: junctions whose linear fit or refit failed (e.g. net non-positive
    #: conductance from pixels below the formula's conduction threshold);
    #: excluded from the aggregates like shorted ones but counted apart
    n_failed: int = 0
    resistances: np.ndarray = field(default_factory=lambda: np.empty(0))
    thickness_fits: np.ndarray = field(default_factory=lambda: np.empty(0))
    barrier_height_fits: np.ndarray = field(default_factory=lambda: np.empty(0))


def _invalid_metrics(n_junctions: int, n_shorted: int, n_failed: int) -> EnsembleMetrics:
    nan = float("nan")
    return EnsembleMetrics(
        n_junctions,
        n_shorted,
        nan,
        nan,
        nan,
        nan,
        match_count=0,
        valid=False,
        n_failed=n_failed,
    )


def simulate_ensemble(
    dist: ThicknessDistribution,
    barrier_height: float,
    n_junctions: int = 20,
    geometry: JunctionGeometry = JunctionGeometry(),
    seed: int = 0,
    targets: MatchTargets = DEFAULT_TARGETS,
    iv_grid=DEFAULT_IV_GRID,
    workers: int = 1,
) -> EnsembleMetrics:
    """Simulate an ensemble of junctions and score it against targets.

    Per junction: sample a barrier field, build its IV, take the linear
    low-voltage resistance, and refit the single-thickness tunneling
    model with the area fixed to the geometry.  Shorted junctions (any
    pixel thickness <= 0) are excluded from the aggregates but counted,
    as are junctions whose fits fail outright; metrics are invalid when
    no junction survives.
    """
    if n_junctions < 2:
        raise ValueError("need at least 2 junctions")
    area = geometry.area_nm2
    init = SimmonsParams(
        area=area, thickness=dist.mean, barrier_height=barrier_height
    )

    def one(j: int):
        fld = sample_barrier(
            dist,
            geometry.width_nm,
            geometry.height_nm,
            geometry.pixel_size_nm,
            seed,
            junction=j,
        )
        if fld.shorted:
            return "short"
        try:
            iv = junction_iv(fld, barrier_height, iv_grid)
            iv_low = junction_iv(fld, barrier_height, LOW_VOLTAGE_GRID)
            resistance = low_voltage_resistance(iv_low)
            fit = fit_simmons(iv, area_mode="fixed", init=init)
        except (ValueError, RuntimeError):
            return "failed"
        return resistance, fit.param("thickness"), fit.param("barrier_height")

    if workers <= 1:
        results = [one(j) for j in range(n_junctions)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(n_junctions)))

    ok = [r for r in results if isinstance(r, tuple)]
    n_shorted = sum(1 for r in results if r == "short")
    n_failed = sum(1 for r in results if r == "failed")
    if not ok:
        return _invalid_metrics(n_junctions, n_shorted, n_failed)
    resistances = np.array([r[0] for r in ok])
    t_fits = np.array([r[1] for r in ok])
    phi_fits = np.array([r[2] for r in ok])
    median_r = float(np.median(resistances))
    spread = (
        float(np.std(resistances, ddof=1) / median_r * 100.0)
        if len(resistances) > 1
        else 0.0
    )
    t_med = float(np.median(t_fits))
    phi_med = float(np.median(phi_fits))
    match = sum(targets.criteria(median_r, spread, t_med, phi_med).values())
    return EnsembleMetrics(
        n_junctions=n_junctions,
        n_shorted=n_shorted,
        median_resistance=median_r,
        resistance_spread=spread,
        refit_thickness=t_med,
        refit_barrier_height=phi_med,
        match_count=match,
        valid=True,
        n_failed=n_failed,
        resistances=resistances,
        thickness_fits=t_fits,
        barrier_height_fits=phi_fits,
    )


#: Default (mean, sd) sweep axes in nm.
DEFAULT_MEAN_RANGE = np.round(np.arange(0.7, 1.4 + 1e-9, 0.025), 10)
DEFAULT_SD_RANGE = np.round(np.arange(0.0, 0.4 + 1e-9, 0.025), 10)


@dataclass
class SweepResult:
    means: np.ndarray
    sds: np.ndarray
    barrier_height: float
    kind: str
    metrics: list  # [i_mean][i_sd] -> EnsembleMetrics

    def _grid(self, attr) -> np.ndarray:
        out = np.empty((len(self.means), len(self.sds)))
        for i, row in enumerate(self.metrics):
            for j, m in enumerate(row):
                out[i, j] = getattr(m, attr)
        return out

    @property
    def resistance(self):
        return self._grid("median_resistance")

    @property
    def spread(self):
        return self._grid("resistance_spread")

    @property
    def t_fit(self):
        return self._grid("refit_thickness")

    @property
    def phi_fit(self):
        return self._grid("refit_barrier_height")

    @property
    def match_count(self):
        return self._grid("match_count")

    @property
    def n_shorted(self):
        return self._grid("n_shorted")

    @property
    def valid(self):
        return self._grid("valid").astype(bool)


def sweep(
    kind: Literal["normal", "lognormal"],
    mean_range=DEFAULT_MEAN_RANGE,
    sd_range=DEFAULT_SD_RANGE,
    barrier_height: float = 1.22,
    targets: MatchTargets = DEFAULT_TARGETS,
    seed: int = 0,
    n_junctions: int = 20,
    geometry: JunctionGeometry = JunctionGeometry(),
    iv_grid=DEFAULT_IV_GRID,
    workers: int = 1,
) -> SweepResult:
    """Ensemble metrics over a (mean, sd) grid of thickness distributions.

    Every cell derives its own sub-seed from (master seed, cell indices),
    so the grid is reproducible cell-by-cell and identical for any worker
    count.  Cells whose ensembles are entirely shorted come back invalid.
    """
    means = np.asarray(mean_range, dtype=float)
    sds = np.asarray(sd_range, dtype=float)
    if means.size == 0 or sds.size == 0:
        raise ValueError("sweep ranges must be non-empty")

    def cell(idx):
        i, j = idx
        dist = ThicknessDistribution(kind, means[i], sds[j])
        return simulate_ensemble(
            dist,
            barrier_height,
            n_junctions=n_junctions,
            geometry=geometry,
            seed=rng.derive_seed(seed, i, j),
            targets=targets,
            iv_grid=iv_grid,
        )

    indices = [(i, j) for i in range(len(means)) for j in range(len(sds))]
    if workers <= 1:
        flat = [cell(ij) for ij in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(cell, indices))
    metrics = [
        [flat[i * len(sds) + j] for j in range(len(sds))] for i in range(len(means))
    ]
    return SweepResult(means, sds, barrier_height, kind, metrics)
