#!/usr/bin/env python3
"""
Pixelized-barrier ensembles and the matched parameter region
============================================================

A junction barrier is modeled as 1 nm pixels conducting in parallel, with
per-pixel thickness drawn from a lognormal law.  The interesting effect:
because conduction is exponential in thickness, the thin pixels dominate,
so an ensemble refit with a single-thickness model reports a thickness
well below the arithmetic mean and a barrier height above the input.

The demo scores ensembles against experimental reference values
(median R = 7122 ohm +- 10%, spread <= 2.4%, refit t = 0.78 nm +- 3%,
refit phi = 1.48 V +- 6%) and maps the match count over a (mean, sd)
grid.  With this exact formula the all-four-matched ridge sits near
mean = 1.01 nm, sd = 0.20 nm, i.e. a relative spread of ~20%.

Outputs land in ``demos/output/02_ensembles/``.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jjbarrier import ThicknessDistribution, sample_barrier, simulate_ensemble
from jjbarrier.montecarlo import sweep

out = pathlib.Path(__file__).parent / "output" / "02_ensembles"
out.mkdir(parents=True, exist_ok=True)

# One sampled barrier, for looking at.
dist = ThicknessDistribution("lognormal", mean=1.01, sd=0.20)
field = sample_barrier(dist, 240, 240, 1.0, seed=2026)
fig, ax = plt.subplots(figsize=(4.6, 4))
im = ax.imshow(field.thickness, cmap="viridis")
fig.colorbar(im, ax=ax, label="thickness (nm)")
ax.set_title("one pixelized barrier (nm)")
fig.tight_layout()
fig.savefig(out / "barrier_field.svg")

# A 20-junction ensemble at the matched cell.
metrics = simulate_ensemble(dist, barrier_height=1.22, seed=2026)
print(f"ensemble at lognormal(1.01, 0.20), phi = 1.22 V:")
print(f"  median R        = {metrics.median_resistance:.0f} ohm")
print(f"  spread          = {metrics.resistance_spread:.2f} %")
print(f"  refit thickness = {metrics.refit_thickness:.3f} nm  "
      f"(input mean 1.01 nm: thin pixels dominate)")
print(f"  refit barrier   = {metrics.refit_barrier_height:.3f} V  (input 1.22 V)")
print(f"  matched criteria: {metrics.match_count} / 4")

# Map the match count over a small (mean, sd) grid around the ridge.
# The all-four ridge is narrow in the mean direction, so step finely.
means = np.round(np.arange(0.95, 1.051, 0.01), 10)
sds = np.round(np.arange(0.16, 0.241, 0.02), 10)
print(f"\nsweeping {len(means)} x {len(sds)} cells (20 junctions each)...")
result = sweep("lognormal", means, sds, barrier_height=1.22, seed=2026, workers=4)

fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
for ax, (name, mat) in zip(
    axes,
    (
        ("median R (ohm)", result.resistance),
        ("refit thickness (nm)", result.t_fit),
        ("match count", result.match_count),
    ),
):
    im = ax.imshow(
        mat,
        origin="lower",
        aspect="auto",
        extent=[sds[0], sds[-1], means[0], means[-1]],
        cmap="plasma",
    )
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("thickness sd (nm)")
    ax.set_ylabel("mean thickness (nm)")
    ax.set_title(name)
fig.tight_layout()
fig.savefig(out / "sweep_maps.svg")
print(f"wrote {out / 'sweep_maps.svg'}")

best = np.argwhere(result.match_count == result.match_count.max())
cells = [(float(means[i]), float(sds[j])) for i, j in best]
print(f"best cells (match {int(result.match_count.max())}/4): {cells}")
