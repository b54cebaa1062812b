"""Least-squares estimation: junction IV fits, double-Gaussian histogram
fits, and normal/lognormal maximum-likelihood fits to thickness samples.

The nonlinear fits share one damped Gauss-Newton core with a
Levenberg-Marquardt damping schedule (x10 on reject, /10 on accept,
initial 1e-3) and analytic Jacobians.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Sequence

import numpy as np

from .errors import InsufficientDataError, NoFeasibleStepError
from .simmons import IVCurve, SimmonsParams, current_gradient, simmons_current

__all__ = [
    "FitResult",
    "levenberg_marquardt",
    "fit_simmons",
    "DoubleGaussianParams",
    "DoubleGaussianFit",
    "fit_double_gaussian",
    "DistributionFit",
    "ThicknessDistributionChoice",
    "fit_thickness_distribution",
    "batch_fit",
]

_DAMPING_INIT = 1e-3
_DAMPING_MAX = 1e100
_STEP_TOL = 1e-10
_GRAD_TOL = 1e-12


@dataclass
class FitResult:
    """Outcome of one damped least-squares run."""

    names: tuple
    values: np.ndarray
    residual_norm: float  # sum of squared residuals
    converged: bool
    iterations: int
    covariance_diag: np.ndarray

    def param(self, name: str) -> float:
        return float(self.values[self.names.index(name)])

    def as_dict(self) -> dict:
        return {n: float(v) for n, v in zip(self.names, self.values)}


def levenberg_marquardt(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    names: tuple,
    feasible: Optional[Callable[[np.ndarray], bool]] = None,
    max_iter: int = 500,
) -> FitResult:
    """Damped Gauss-Newton minimization of ``sum(residual(x)**2)``.

    Steps solve the column-scaled normal equations
    ``(Js^T Js + damping * I) dxs = -Js^T r`` with ``Js = J / ||J_col||``
    (raw parameter scales like nm^2 areas next to nm thicknesses would
    square into an unsolvable condition number).  A step is accepted only
    if it stays feasible and strictly decreases the residual norm, so the
    reported norm never exceeds the initial one.

    Convergence: scaled gradient norm < 1e-12, or relative parameter step
    < 1e-10 on a lightly damped (near Gauss-Newton) step; heavily damped
    crawl steps along a degenerate valley do not count as convergence.
    """
    x = np.asarray(x0, dtype=float).copy()
    if feasible is not None and not feasible(x):
        raise NoFeasibleStepError(f"initial guess {x} violates the model domain")
    r = residual(x)
    ssr = float(r @ r)
    damping = _DAMPING_INIT
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        jac = jacobian(x)
        col = np.sqrt(np.clip(np.einsum("ij,ij->j", jac, jac), 1e-300, None))
        js = jac / col
        g_s = js.T @ r
        if np.linalg.norm(g_s) < _GRAD_TOL:
            converged = True
            break
        a_s = js.T @ js
        eye = np.eye(len(x))
        accepted = False
        while damping <= _DAMPING_MAX:
            try:
                dx = np.linalg.solve(a_s + damping * eye, -g_s) / col
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            x_new = x + dx
            if feasible is None or feasible(x_new):
                r_new = residual(x_new)
                ssr_new = float(r_new @ r_new)
                if ssr_new < ssr:
                    rel_step = float(
                        np.max(np.abs(dx) / np.maximum(np.abs(x), 1e-300))
                    )
                    x, r, ssr = x_new, r_new, ssr_new
                    accepted = True
                    if rel_step < _STEP_TOL and damping <= 1e-2:
                        converged = True
                    damping = max(damping / 10.0, 1e-300)
                    break
            damping *= 10.0
        if not accepted:
            # Damping exhausted: either a stationary point (tiny steps no
            # longer reduce the residual) or a feasibility wall.
            converged = (
                np.linalg.norm(js.T @ r) < 1e3 * _GRAD_TOL or damping > _DAMPING_MAX
            )
            break
        if converged:
            break
    jac = jacobian(x)
    cov = _covariance_diag(jac, ssr)
    return FitResult(
        names=names,
        values=x,
        residual_norm=ssr,
        converged=converged,
        iterations=it,
        covariance_diag=cov,
    )


def _covariance_diag(jac: np.ndarray, ssr: float) -> np.ndarray:
    n, p = jac.shape
    if n <= p:
        return np.full(p, np.nan)
    sigma2 = ssr / (n - p)
    try:
        inv = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        return np.full(p, np.nan)
    return sigma2 * np.diag(inv)


def fit_simmons(
    iv: IVCurve,
    area_mode: Literal["fixed", "free"] = "fixed",
    init: SimmonsParams | None = None,
    max_iter: int = 500,
) -> FitResult:
    """Fit the tunneling formula to an IV curve.

    ``area_mode="fixed"`` fits (thickness, barrier_height) with the area
    pinned to ``init.area`` (e.g. the AFM-measured value);
    ``area_mode="free"`` fits all three parameters.  The curve must be
    restricted to pre-breakdown voltages by the caller.
    """
    if init is None:
        raise ValueError("an initial SimmonsParams guess is required")
    if area_mode not in ("fixed", "free"):
        raise ValueError(f"unknown area_mode {area_mode!r}")
    v = iv.voltage
    data = iv.current
    v_abs_max = float(np.max(np.abs(v))) if len(v) else 0.0
    free_area = area_mode == "free"

    def unpack(x):
        if free_area:
            return SimmonsParams(x[0], x[1], x[2])
        return SimmonsParams(init.area, x[0], x[1])

    def feasible(x):
        a, t, phi = (x[0], x[1], x[2]) if free_area else (init.area, x[0], x[1])
        return a > 0 and t > 0 and phi > v_abs_max / 2.0 * (1.0 + 1e-12)

    def residual(x):
        return simmons_current(unpack(x), v) - data

    def jac(x):
        return current_gradient(unpack(x), v, free_area=free_area)

    if free_area:
        x0 = [init.area, init.thickness, init.barrier_height]
        names = ("area", "thickness", "barrier_height")
    else:
        x0 = [init.thickness, init.barrier_height]
        names = ("thickness", "barrier_height")
    return levenberg_marquardt(residual, jac, x0, names, feasible, max_iter)


# ---------------------------------------------------------------------------
# Double-Gaussian histogram fit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DoubleGaussianParams:
    """Sum-of-two-Gaussians parameters; means ordered mean1 < mean2."""

    amp1: float
    mean1: float
    sd1: float
    amp2: float
    mean2: float
    sd2: float


@dataclass
class DoubleGaussianFit:
    params: Optional[DoubleGaussianParams]
    midpoint: Optional[float]  # (mean1 + mean2) / 2
    unimodal: bool
    bin_centers: np.ndarray
    counts: np.ndarray
    fit: Optional[FitResult] = None


def _two_gauss(x, p):
    a1, m1, s1, a2, m2, s2 = p
    return a1 * np.exp(-0.5 * ((x - m1) / s1) ** 2) + a2 * np.exp(
        -0.5 * ((x - m2) / s2) ** 2
    )


def _two_gauss_jac(x, p):
    a1, m1, s1, a2, m2, s2 = p
    cols = []
    for a, m, s in ((a1, m1, s1), (a2, m2, s2)):
        z = (x - m) / s
        g = np.exp(-0.5 * z**2)
        cols += [g, a * g * z / s, a * g * z**2 / s]
    return np.column_stack(cols)


def fit_double_gaussian(samples, bins=None) -> DoubleGaussianFit:
    """Histogram ``samples`` and fit a sum of two Gaussians to the counts.

    ``bins`` follows numpy semantics; the default is the
    Freedman-Diaconis rule.  A fit whose means are closer than a quarter
    of their pooled standard deviation is flagged unimodal (degenerate),
    as is a histogram with fewer than two populated bins.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size < 20:
        raise InsufficientDataError(f"need >= 20 samples, got {samples.size}")
    counts, edges = np.histogram(samples, bins=bins if bins is not None else "fd")
    centers = 0.5 * (edges[:-1] + edges[1:])
    if np.count_nonzero(counts) < 2:
        return DoubleGaussianFit(None, None, True, centers, counts)

    lo, hi = np.percentile(samples, [25, 75])
    if hi <= lo:
        lo, hi = samples.min(), samples.max()
    spread = max(np.std(samples) / 2.0, 1e-6 * max(abs(hi), 1.0))
    peak = float(counts.max())
    x0 = [0.8 * peak, lo, spread, 0.8 * peak, hi, spread]

    def feasible(p):
        return p[0] > 0 and p[3] > 0 and p[2] > 0 and p[5] > 0

    res = levenberg_marquardt(
        lambda p: _two_gauss(centers, p) - counts,
        lambda p: _two_gauss_jac(centers, p),
        x0,
        names=("amp1", "mean1", "sd1", "amp2", "mean2", "sd2"),
        feasible=feasible,
    )
    a1, m1, s1, a2, m2, s2 = res.values
    if m1 > m2:
        a1, m1, s1, a2, m2, s2 = a2, m2, s2, a1, m1, s1
    pooled = math.sqrt((s1**2 + s2**2) / 2.0)
    unimodal = abs(m2 - m1) < pooled / 4.0
    params = DoubleGaussianParams(a1, m1, s1, a2, m2, s2)
    return DoubleGaussianFit(params, (m1 + m2) / 2.0, unimodal, centers, counts, res)


# ---------------------------------------------------------------------------
# Normal / lognormal thickness-sample fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistributionFit:
    """Maximum-likelihood fit of one law, reported in arithmetic moments."""

    kind: Literal["normal", "lognormal"]
    mean: float
    sd: float
    log_likelihood: float


@dataclass
class ThicknessDistributionChoice:
    normal: DistributionFit
    lognormal: Optional[DistributionFit]
    preferred: Literal["normal", "lognormal"]


def lognormal_shape_params(mean: float, sd: float) -> tuple[float, float]:
    """(mu, sigma) of log(x) for a lognormal with arithmetic mean/sd."""
    if mean <= 0:
        raise ValueError("lognormal arithmetic mean must be positive")
    sigma2 = math.log1p((sd / mean) ** 2)
    mu = math.log(mean) - sigma2 / 2.0
    return mu, math.sqrt(sigma2)


def lognormal_arithmetic_moments(mu: float, sigma: float) -> tuple[float, float]:
    """Arithmetic (mean, sd) of a lognormal with log-space (mu, sigma)."""
    mean = math.exp(mu + sigma**2 / 2.0)
    return mean, mean * math.sqrt(math.expm1(sigma**2))


def fit_thickness_distribution(samples) -> ThicknessDistributionChoice:
    """Fit samples to both a normal and a lognormal law by maximum
    likelihood and report which one fits better.

    The lognormal branch is skipped (with a warning) when non-positive
    samples are present; constant samples produce degenerate fits with a
    warning.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 10:
        raise InsufficientDataError(f"need >= 10 samples, got {x.size}")
    n = x.size
    mean = float(np.mean(x))
    sd = float(np.std(x))  # MLE (ddof=0)
    if sd == 0.0:
        warnings.warn("constant samples: degenerate distribution fits")
        normal = DistributionFit("normal", mean, 0.0, math.inf)
        lognormal = (
            DistributionFit("lognormal", mean, 0.0, math.inf) if mean > 0 else None
        )
        return ThicknessDistributionChoice(normal, lognormal, "normal")
    ll_norm = -0.5 * n * (math.log(2.0 * math.pi * sd**2) + 1.0)
    normal = DistributionFit("normal", mean, sd, ll_norm)

    if np.any(x <= 0.0):
        warnings.warn("non-positive samples: lognormal fit skipped")
        return ThicknessDistributionChoice(normal, None, "normal")
    logs = np.log(x)
    mu = float(np.mean(logs))
    sigma = float(np.std(logs))
    if sigma == 0.0:
        warnings.warn("constant samples: degenerate lognormal fit")
        lognormal = DistributionFit("lognormal", math.exp(mu), 0.0, math.inf)
        return ThicknessDistributionChoice(normal, lognormal, "normal")
    ll_log = (
        -float(np.sum(logs)) - 0.5 * n * (math.log(2.0 * math.pi * sigma**2) + 1.0)
    )
    amean, asd = lognormal_arithmetic_moments(mu, sigma)
    lognormal = DistributionFit("lognormal", amean, asd, ll_log)
    preferred = "lognormal" if ll_log > ll_norm else "normal"
    return ThicknessDistributionChoice(normal, lognormal, preferred)


# ---------------------------------------------------------------------------
# Batch fitting
# ---------------------------------------------------------------------------


def batch_fit(
    curves: Sequence[tuple[str, IVCurve]],
    area_nm2: float,
    area_mode: Literal["fixed", "free"] = "fixed",
    v_linear_max: float = 0.02,
    init: SimmonsParams | None = None,
    workers: int = 1,
) -> list[dict]:
    """Fit many junction IVs; one record per junction.

    Records carry id, linear-fit resistance, fitted thickness and barrier
    height, residual norm and convergence flag.  Per-junction failures are
    recorded (``error`` key) without aborting the batch, and results are
    independent of the worker count.
    """
    from .simmons import low_voltage_resistance

    if init is None:
        init = SimmonsParams(area=area_nm2, thickness=1.0, barrier_height=1.2)

    def one(item):
        junction_id, iv = item
        rec = {"junction_id": junction_id}
        try:
            rec["resistance_ohm"] = low_voltage_resistance(iv, v_max=v_linear_max)
            fit = fit_simmons(iv, area_mode=area_mode, init=init)
            rec["t_fit_nm"] = fit.param("thickness")
            rec["phi_fit_V"] = fit.param("barrier_height")
            if area_mode == "free":
                rec["area_fit_nm2"] = fit.param("area")
            rec["residual_norm"] = fit.residual_norm
            rec["converged"] = fit.converged
        except Exception as exc:  # noqa: BLE001 - per-junction isolation
            rec["error"] = str(exc)
        return rec

    if workers <= 1:
        return [one(item) for item in curves]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, curves))
