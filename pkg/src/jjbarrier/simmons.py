"""Rectangular-barrier tunneling current and derived quantities.

The current through a thin insulating barrier between two metal
electrodes, at voltages below the barrier height, is modeled as

    I(V) = (A e^2 / (2 pi h t^2)) * [ (phi - V/2) exp(-K sqrt(phi - V/2))
                                    - (phi + V/2) exp(-K sqrt(phi + V/2)) ]

with ``K = 4 pi t sqrt(2 m_e e) / h``.  Unit convention used throughout
the package:

* voltages and barrier heights in volts (the barrier height in volts is
  numerically the height in eV per elementary charge),
* lengths in nm (converted to metres internally),
* areas in nm^2,
* currents in amperes.

The bracket energies ``phi +- V/2`` are carried in volts; the factor
``sqrt(e)`` that makes ``K * sqrt(volts)`` dimensionless is folded into
``K`` via the constants module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import (
    BARRIER_DECAY_PER_NM,
    ELEMENTARY_CHARGE,
    PLANCK_CONSTANT,
)
from .errors import BarrierDomainError, InsufficientDataError

__all__ = [
    "SimmonsParams",
    "IVCurve",
    "simmons_current",
    "simmons_iv",
    "low_voltage_resistance",
    "linear_conductance",
]


@dataclass(frozen=True)
class SimmonsParams:
    """Junction parameters: area (nm^2), thickness (nm), barrier height (V)."""

    area: float
    thickness: float
    barrier_height: float

    def __post_init__(self):
        if not (
            math.isfinite(self.area)
            and math.isfinite(self.thickness)
            and math.isfinite(self.barrier_height)
        ):
            raise BarrierDomainError("parameters must be finite")
        if self.area <= 0 or self.thickness <= 0 or self.barrier_height <= 0:
            raise BarrierDomainError(
                f"parameters must be positive, got area={self.area}, "
                f"thickness={self.thickness}, barrier_height={self.barrier_height}"
            )

    def max_voltage(self) -> float:
        """Largest |V| the formula admits for these parameters (2 phi)."""
        return 2.0 * self.barrier_height


@dataclass
class IVCurve:
    """One junction's current-voltage samples, sorted by voltage."""

    voltage: np.ndarray
    current: np.ndarray

    def __post_init__(self):
        self.voltage = np.asarray(self.voltage, dtype=float)
        self.current = np.asarray(self.current, dtype=float)
        if self.voltage.ndim != 1 or self.voltage.shape != self.current.shape:
            raise ValueError("voltage and current must be 1D arrays of equal length")
        if not (np.isfinite(self.voltage).all() and np.isfinite(self.current).all()):
            raise ValueError("IV samples must be finite")
        if len(self.voltage) > 1 and not (np.diff(self.voltage) > 0).all():
            raise ValueError("voltages must be strictly increasing")

    def __len__(self) -> int:
        return len(self.voltage)

    def window(self, v_max: float) -> "IVCurve":
        """Samples with |V| <= v_max."""
        m = np.abs(self.voltage) <= v_max
        return IVCurve(self.voltage[m], self.current[m])


def _raw_current(area_nm2, t_nm, phi, v):
    """Unchecked vectorized evaluation of the current formula.

    Broadcasts over any mix of array arguments; callers are responsible
    for the domain requirement phi - |v|/2 > 0.
    """
    t_m = np.asarray(t_nm) * 1e-9
    k = BARRIER_DECAY_PER_NM * np.asarray(t_nm)
    pref = (
        np.asarray(area_nm2)
        * 1e-18
        * ELEMENTARY_CHARGE**2
        / (2.0 * np.pi * PLANCK_CONSTANT * t_m**2)
    )
    lo = phi - np.asarray(v) / 2.0
    hi = phi + np.asarray(v) / 2.0
    return pref * (lo * np.exp(-k * np.sqrt(lo)) - hi * np.exp(-k * np.sqrt(hi)))


def _check_domain(params: SimmonsParams, v) -> None:
    v = np.asarray(v, dtype=float)
    if not np.isfinite(v).all():
        raise BarrierDomainError("voltage must be finite")
    bad = params.barrier_height - np.abs(v) / 2.0 <= 0
    if np.any(bad):
        offending = np.atleast_1d(v)[np.atleast_1d(bad)][0]
        raise BarrierDomainError(
            f"voltage {offending} V outside domain: requires |V|/2 < "
            f"barrier height ({params.barrier_height} V)"
        )


def simmons_current(params: SimmonsParams, v):
    """Tunneling current (A) at voltage ``v`` (V).

    ``v`` may be a scalar or an array.  The result is exactly odd in
    ``v`` and exactly zero at ``v = 0``.

    Raises
    ------
    BarrierDomainError
        If ``phi - |v|/2 <= 0`` for any requested voltage, or inputs are
        not finite.
    """
    _check_domain(params, v)
    out = _raw_current(params.area, params.thickness, params.barrier_height, v)
    return float(out) if np.ndim(v) == 0 else out


def simmons_iv(params: SimmonsParams, grid) -> IVCurve:
    """Evaluate the current formula on a strictly increasing voltage grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("voltage grid must be a non-empty 1D sequence")
    if len(grid) > 1 and not (np.diff(grid) > 0).all():
        raise ValueError("voltage grid must be strictly increasing")
    return IVCurve(grid, simmons_current(params, grid))


def current_gradient(params: SimmonsParams, v, free_area: bool = False):
    """Analytic partial derivatives of the current.

    Returns columns d I/d t (per nm) and d I/d phi (per V); with
    ``free_area`` a leading d I/d A (per nm^2) column is included.
    Shape: (n_voltages, 2 or 3).
    """
    _check_domain(params, v)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    t_nm = params.thickness
    phi = params.barrier_height
    t_m = t_nm * 1e-9
    k = BARRIER_DECAY_PER_NM * t_nm
    pref = (
        params.area * 1e-18 * ELEMENTARY_CHARGE**2 / (2.0 * np.pi * PLANCK_CONSTANT * t_m**2)
    )
    lo = phi - v / 2.0
    hi = phi + v / 2.0
    slo = np.sqrt(lo)
    shi = np.sqrt(hi)
    elo = np.exp(-k * slo)
    ehi = np.exp(-k * shi)
    cur = pref * (lo * elo - hi * ehi)
    d_phi = pref * (elo * (1.0 - k * slo / 2.0) - ehi * (1.0 - k * shi / 2.0))
    d_t = (-2.0 * cur + k * pref * (hi * shi * ehi - lo * slo * elo)) / t_nm
    cols = [d_t, d_phi]
    if free_area:
        cols.insert(0, cur / params.area)
    return np.column_stack(cols)


def linear_conductance(area_nm2, t_nm, phi):
    """Zero-voltage conductance dI/dV (siemens) of the current formula.

    Analytic limit: ``G0 = pref * exp(-K sqrt(phi)) * (K sqrt(phi)/2 - 1)``.
    Note the formula itself turns non-conducting below
    ``t = 2 / (K' sqrt(phi))`` (about 0.18 nm at phi = 1.22 V); callers
    sampling broad thickness distributions will see that reflected here
    rather than masked.
    """
    t_m = np.asarray(t_nm) * 1e-9
    k = BARRIER_DECAY_PER_NM * np.asarray(t_nm)
    pref = (
        np.asarray(area_nm2)
        * 1e-18
        * ELEMENTARY_CHARGE**2
        / (2.0 * np.pi * PLANCK_CONSTANT * t_m**2)
    )
    s = np.sqrt(phi)
    return pref * np.exp(-k * s) * (k * s / 2.0 - 1.0)


def low_voltage_resistance(
    iv: IVCurve, v_max: float = 0.02, fit_intercept: bool = False
) -> float:
    """Ohmic resistance from a linear fit of I vs V restricted to |V| <= v_max.

    The default fit forces a zero intercept, consistent with I(0) = 0 in
    the model; ``fit_intercept=True`` frees the intercept for sensitivity
    checks.

    Raises
    ------
    InsufficientDataError
        Fewer than 3 samples inside the window.
    ValueError
        Zero or negative fitted slope.
    """
    win = iv.window(v_max)
    if len(win) < 3:
        raise InsufficientDataError(
            f"need at least 3 samples with |V| <= {v_max} V, got {len(win)}"
        )
    if fit_intercept:
        slope = np.polyfit(win.voltage, win.current, 1)[0]
    else:
        denom = np.dot(win.voltage, win.voltage)
        if denom == 0.0:
            raise ValueError("voltage window is identically zero")
        slope = np.dot(win.voltage, win.current) / denom
    if slope <= 0.0:
        raise ValueError(f"non-positive IV slope ({slope}); cannot form a resistance")
    return 1.0 / slope
