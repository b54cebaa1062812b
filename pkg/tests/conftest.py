import numpy as np
import pytest

from jjbarrier.simmons import IVCurve, SimmonsParams, simmons_iv


def make_dataset(n_junctions=20, noise=0.01, seed=3, with_breakdown=True):
    """Synthetic junction ensemble: slightly varied parameters, optional
    ohmic transition, dense low-voltage sampling for the linear fit."""
    gen = np.random.default_rng(seed)
    grid = np.unique(np.concatenate([np.linspace(0, 0.02, 6), np.linspace(0.05, 1.5, 60)]))
    curves = []
    for j in range(n_junctions):
        t = 0.78 * (1 + 0.01 * gen.standard_normal())
        phi = 1.48 * (1 + 0.01 * gen.standard_normal())
        iv = simmons_iv(SimmonsParams(5.76e4, t, phi), grid)
        cur = iv.current * (1 + noise * gen.standard_normal(len(grid)))
        cur = np.maximum.accumulate(cur)  # keep the sweep monotone
        if with_breakdown:
            v_bd = 1.2 if j % 8 else 1.4  # a small high-breakdown subgroup
            m = grid >= v_bd
            i0 = int(np.argmax(m))
            cur[m] = cur[i0 - 1] + (grid[m] - grid[i0 - 1]) / 300.0
        curves.append((f"jj{j:03d}", IVCurve(grid, cur)))
    return curves


@pytest.fixture
def synthetic_curves():
    return make_dataset()
