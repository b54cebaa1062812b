"""Breakdown-voltage statistics from thinnest-point sampling.

A barrier fails at its weakest (thinnest) point: V_bd = t_min * E_ds for
a uniform dielectric strength.  This module samples per-junction minimum
thickness over a fine mesh, calibrates the dielectric strength so the
rescaled minima reproduce a target mean breakdown voltage, detects
breakdown in measured IVs, groups junctions by breakdown voltage, and
computes cumulative-conductance concentration curves.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import rng
from .errors import InsufficientDataError, ShortedFieldError
from .montecarlo import BarrierField, ThicknessDistribution
from .simmons import IVCurve, linear_conductance

__all__ = [
    "BreakdownRecord",
    "DielectricCalibration",
    "min_thickness_samples",
    "calibrate_dielectric_strength",
    "detect_breakdown",
    "BreakdownGroups",
    "group_by_breakdown",
    "CumulativeConductance",
    "cumulative_conductance",
]


@dataclass(frozen=True)
class BreakdownRecord:
    junction_id: str
    breakdown_voltage: float  # V
    resistance: float  # ohm

    def __post_init__(self):
        if not (self.breakdown_voltage > 0 and self.resistance > 0):
            raise ValueError("breakdown voltage and resistance must be positive")


@dataclass(frozen=True)
class DielectricCalibration:
    """E_ds in GV/m (numerically V/nm), with the quantities defining it."""

    E_ds: float
    mean_min_thickness: float  # nm
    target_mean_Vbd: float  # V

    def breakdown_voltages(self, minima_nm) -> np.ndarray:
        """Rescale thinnest-point samples (nm) to breakdown voltages (V)."""
        return np.asarray(minima_nm, dtype=float) * self.E_ds


def min_thickness_samples(
    dist: ThicknessDistribution,
    width_nm: float = 240.0,
    height_nm: float = 240.0,
    mesh: float = 0.2,
    n_junctions: int = 597,
    seed: int = 0,
    workers: int = 1,
) -> np.ndarray:
    """Per-junction minimum thickness over a (width/mesh) x (height/mesh) grid.

    Uses the same coordinate-keyed stream as barrier sampling, so a
    junction's draw at (row, col) does not depend on the mesh: refining
    the mesh extends the grid and can only lower the minimum.  Negative
    minima are possible for normal draws and returned as-is.

    The reduction happens on the raw uniforms (thickness is monotone in
    the uniform), which avoids materializing the full field.
    """
    if mesh <= 0:
        raise ValueError("mesh must be positive")
    cols = int(width_nm / mesh)
    rows = int(height_nm / mesh)
    if rows <= 0 or cols <= 0:
        raise ValueError("geometry smaller than one mesh cell")

    def one(j: int) -> float:
        key = rng.derive_key(seed, j)
        umin = np.inf
        for y in range(rows):
            u = rng.words_to_unit(rng.row_words(key, y, cols))
            m = u.min()
            if m < umin:
                umin = m
        return float(dist.from_unit(umin))

    if workers <= 1:
        return np.array([one(j) for j in range(n_junctions)])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(one, range(n_junctions))))


def calibrate_dielectric_strength(
    minima_nm, target_mean_Vbd: float
) -> DielectricCalibration:
    """Dielectric strength that maps mean thinnest-point to the target mean V_bd.

    ``E_ds = target_mean_Vbd / mean(minima)`` in V/nm, which is
    numerically GV/m.  Non-positive minima (shorts from normal draws)
    must be filtered by the caller first.
    """
    minima = np.asarray(minima_nm, dtype=float)
    if minima.size == 0:
        raise InsufficientDataError("no thinnest-point samples")
    if np.any(minima <= 0):
        raise ValueError(
            "non-positive minima present (shorted junctions); filter them out "
            "before calibrating"
        )
    mean_min = float(np.mean(minima))
    return DielectricCalibration(
        E_ds=target_mean_Vbd / mean_min,
        mean_min_thickness=mean_min,
        target_mean_Vbd=target_mean_Vbd,
    )


def detect_breakdown(
    iv: IVCurve, jump_factor: float = 5.0, min_history: int = 5
) -> Optional[float]:
    """Voltage of the ohmic transition in a swept IV, or None.

    Walks the incremental conductances dI/dV and reports the first sample
    where the increment exceeds ``jump_factor`` times the running median
    of all previous increments.  The tunneling formula's own curvature
    stays well below the default factor, so a pure tunneling curve
    yields None.
    """
    if len(iv) < 10:
        raise InsufficientDataError(f"need >= 10 samples, got {len(iv)}")
    dv = np.diff(iv.voltage)
    di = np.diff(iv.current)
    g = di / dv
    if not np.any(g > 0):
        raise ValueError("flat or non-increasing IV; no conductance signal")
    for i in range(min_history, len(g)):
        med = float(np.median(g[:i]))
        if med > 0 and g[i] > jump_factor * med:
            return float(iv.voltage[i + 1])
    return None


@dataclass
class BreakdownGroups:
    """Junctions split by breakdown voltage relative to a threshold."""

    threshold: float
    low: list
    high: list
    median_R_low: float
    median_R_high: float
    delta_R: float  # median_R_high - median_R_low
    fraction_low: float
    fraction_high: float


def group_by_breakdown(
    records: Sequence[BreakdownRecord], threshold: float = 1.3
) -> BreakdownGroups:
    """Partition records at ``threshold`` (V_bd <= threshold goes low).

    Reports median resistance per group, their difference, and group
    size fractions.  An empty side produces a warning and NaN statistics
    for that side.
    """
    records = list(records)
    if not records:
        raise InsufficientDataError("no breakdown records")
    low = [r for r in records if r.breakdown_voltage <= threshold]
    high = [r for r in records if r.breakdown_voltage > threshold]
    if not low or not high:
        warnings.warn(
            f"one breakdown group is empty at threshold {threshold} V; "
            "single-group statistics reported"
        )
    med_low = float(np.median([r.resistance for r in low])) if low else float("nan")
    med_high = float(np.median([r.resistance for r in high])) if high else float("nan")
    n = len(records)
    return BreakdownGroups(
        threshold=threshold,
        low=low,
        high=high,
        median_R_low=med_low,
        median_R_high=med_high,
        delta_R=med_high - med_low,
        fraction_low=len(low) / n,
        fraction_high=len(high) / n,
    )


@dataclass
class CumulativeConductance:
    """Conductance concentration curve of one barrier field.

    ``conductance_fraction[i]`` is the share of total zero-voltage
    conductance carried by the ``area_fraction[i]`` most conductive part
    of the junction.  Both arrays start at 0 and end at 1.
    """

    area_fraction: np.ndarray
    conductance_fraction: np.ndarray

    def area_fraction_at(self, level: float = 0.5) -> float:
        """Smallest tabulated area fraction carrying >= ``level`` of the
        total conductance."""
        idx = int(np.searchsorted(self.conductance_fraction, level))
        return float(self.area_fraction[min(idx, len(self.area_fraction) - 1)])


def cumulative_conductance(
    field: BarrierField, barrier_height: float
) -> CumulativeConductance:
    """Per-pixel conductances sorted descending, cumulated, normalized.

    A uniform field gives exactly the diagonal; any thickness variation
    bends the curve above it.  Fields with shorted pixels are rejected.
    """
    if field.shorted:
        raise ShortedFieldError("cumulative conductance undefined for shorted fields")
    g = linear_conductance(field.pixel_size**2, field.thickness.ravel(), barrier_height)
    g = np.sort(g)[::-1]
    total = g.sum()
    if total <= 0:
        raise ValueError("field has no net conductance")
    n = g.size
    area = np.arange(n + 1) / n
    cond = np.concatenate([[0.0], np.cumsum(g) / total])
    cond[-1] = 1.0  # exact endpoint; accumulation error is O(n * eps)
    return CumulativeConductance(area, cond)
