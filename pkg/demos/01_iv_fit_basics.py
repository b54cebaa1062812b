#!/usr/bin/env python3
"""
Tunneling IV curves and parameter fitting
=========================================

Walks the core electrical workflow for a single junction:

1. evaluate the rectangular-barrier tunneling current on a voltage grid,
2. read off the ohmic resistance from the low-voltage linear regime,
3. refit the curve to recover (thickness, barrier height) with the area
   fixed, and all three parameters with the area free.

Outputs land in ``demos/output/01_iv_fit/``.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jjbarrier import (
    SimmonsParams,
    fit_simmons,
    low_voltage_resistance,
    simmons_iv,
)

out = pathlib.Path(__file__).parent / "output" / "01_iv_fit"
out.mkdir(parents=True, exist_ok=True)

# A junction with AFM-measured area 240 x 240 nm^2 and typical fitted
# barrier parameters.
params = SimmonsParams(area=5.76e4, thickness=0.78, barrier_height=1.48)
grid = np.linspace(0.0, 1.2, 50)
iv = simmons_iv(params, grid)

# Low-voltage resistance from a zero-intercept linear fit below 20 mV.
iv_low = simmons_iv(params, np.linspace(0.0, 0.02, 9))
r_ohmic = low_voltage_resistance(iv_low)
print(f"low-voltage resistance: {r_ohmic:.1f} ohm")

# Round-trip fit: start 30% off and recover the true parameters.
init = SimmonsParams(params.area, 0.78 * 1.3, 1.48 * 0.7)
fit = fit_simmons(iv, area_mode="fixed", init=init)
print(f"area-fixed refit:  t = {fit.param('thickness'):.6f} nm, "
      f"phi = {fit.param('barrier_height'):.6f} V "
      f"({fit.iterations} iterations, ssr = {fit.residual_norm:.2e})")

init_free = SimmonsParams(params.area * 1.2, 0.78 * 0.8, 1.48 * 1.2)
fit_free = fit_simmons(iv, area_mode="free", init=init_free)
print(f"area-free refit:   A = {fit_free.param('area'):.1f} nm^2, "
      f"t = {fit_free.param('thickness'):.6f} nm, "
      f"phi = {fit_free.param('barrier_height'):.6f} V")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
ax1.plot(iv.voltage, iv.current * 1e6, "o-", ms=3, label="tunneling curve")
ax1.plot(grid, grid / r_ohmic * 1e6, "--", label=f"ohmic {r_ohmic:.0f} $\\Omega$")
ax1.set_xlabel("voltage (V)")
ax1.set_ylabel("current ($\\mu$A)")
ax1.legend()
ax1.set_title("nonlinearity above the linear window")

window = iv_low
ax2.plot(window.voltage * 1e3, window.current * 1e9, "o-", ms=4)
ax2.set_xlabel("voltage (mV)")
ax2.set_ylabel("current (nA)")
ax2.set_title("low-voltage linear regime")
fig.tight_layout()
fig.savefig(out / "iv_curve.svg")
print(f"wrote {out / 'iv_curve.svg'}")
