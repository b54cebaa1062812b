"""Declarative configuration for the command-line surface.

One INI-style file with a section per command plus ``[common]``;
precedence is CLI flag > config file > built-in default, and the fully
resolved configuration is echoed into every run manifest.
"""

from __future__ import annotations

import configparser
import os
from pathlib import Path

__all__ = ["DEFAULTS", "load_config_file", "resolve_config", "default_out_dir"]

#: Environment variable naming the default output directory.
OUT_DIR_ENV = "JJBARRIER_OUTDIR"

DEFAULTS: dict = {
    "common": {
        "out_dir": "",  # resolved via default_out_dir()
        "seed": 0,
        "workers": 1,
    },
    "fit-iv": {
        "area_nm2": 57600.0,
        "area_mode": "fixed",
        "v_linear_max": 0.02,
        "init_thickness": 1.0,
        "init_phi": 1.2,
        "hist_bins": 30,
    },
    "sweep": {
        "kind": "lognormal",
        "phi": 1.22,
        "mean_min": 0.7,
        "mean_max": 1.4,
        "mean_step": 0.025,
        "sd_min": 0.0,
        "sd_max": 0.4,
        "sd_step": 0.025,
        "n_junctions": 20,
        "width_nm": 240.0,
        "height_nm": 240.0,
        "pixel_nm": 1.0,
        "v_max": 1.2,
        "n_voltages": 50,
        "target_R": 7122.0,
        "R_tol": 0.10,
        "spread_max": 2.4,
        "t_center": 0.78,
        "t_tol": 0.03,
        "phi_center": 1.48,
        "phi_tol": 0.06,
    },
    "breakdown": {
        "mode": "simulate",
        "kind": "lognormal",
        "mean": 1.0,
        "sd": 0.155,
        "width_nm": 240.0,
        "height_nm": 240.0,
        "mesh_nm": 0.2,
        "n_junctions": 597,
        "target_mean_vbd": 1.4,
        "threshold_v": 1.3,
        "jump_factor": 5.0,
        "phi": 1.22,
        "n_example_junctions": 2,
        "example_pixel_nm": 1.0,
        "hist_bins": 40,
        "v_linear_max": 0.02,
    },
    "stem": {
        "mode": "simulate",
        "width_nm": 220.0,
        "height_nm": 60.0,
        "pixel_nm": 0.5,
        "rms_nm": 0.7,
        "correlation_nm": 10.0,
        "tip_radius_nm": 2.0,
        "region_width_nm": 100.0,
        "region_depth_nm": 30.0,
        "barrier_thickness_nm": 2.0,
        "voxel_nm": 0.1,
        "noise_mean": 0.0,
        "noise_sd": 0.2,
        "blur_nm": 0.1,
        "n_regions": 1,
        "deltas": "0,0.2,0.4",
        "k": 0,  # 0 = derive from pixel size
        "gaussian_length_nm": 0.5,
    },
    "report": {},
}


def default_out_dir() -> str:
    return os.environ.get(OUT_DIR_ENV, "jjbarrier_out")


def _coerce(default, raw: str):
    if isinstance(default, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def load_config_file(path) -> dict:
    """Read an INI file into {section: {key: typed value}}.

    Unknown sections or keys are rejected so typos fail loudly.
    """
    parser = configparser.ConfigParser()
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    parser.read(path)
    out: dict = {}
    for section in parser.sections():
        if section not in DEFAULTS:
            raise ValueError(f"unknown config section [{section}]")
        out[section] = {}
        for key, raw in parser.items(section):
            if key not in DEFAULTS[section]:
                raise ValueError(f"unknown config key '{key}' in [{section}]")
            out[section][key] = _coerce(DEFAULTS[section][key], raw)
    return out


def resolve_config(section: str, file_cfg: dict | None, cli: dict | None) -> dict:
    """Merge defaults <- config file <- CLI for one command section
    (plus [common]); CLI entries with value None are treated as unset."""
    merged = dict(DEFAULTS["common"])
    merged.update(DEFAULTS[section])
    if file_cfg:
        merged.update(file_cfg.get("common", {}))
        merged.update(file_cfg.get(section, {}))
    if cli:
        for key, val in cli.items():
            if val is not None:
                merged[key] = val
    if not merged.get("out_dir"):
        merged["out_dir"] = default_out_dir()
    return merged
