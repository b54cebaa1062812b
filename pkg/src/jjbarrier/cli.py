"""Command-line surface.

Subcommands: ``fit-iv``, ``sweep``, ``breakdown``, ``stem simulate``,
``stem analyze``, ``report``, ``replay``.  Every run writes its outputs
plus a ``manifest.json`` (command, resolved config, master seed, code
version, input digests); ``replay`` re-executes a manifest and
reproduces the outputs byte-identically.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, breakdown as bd, montecarlo as mc, plots
from .config import DEFAULTS, load_config_file, resolve_config
from .dataio import (
    JunctionRecord,
    RunManifest,
    format_float,
    ingest_iv,
    read_eds_image,
    read_records_csv,
    read_topography,
    sha256_of,
    write_grid,
    write_iv_long_csv,
    write_pgm16,
    write_records_csv,
)
from .fitting import batch_fit, fit_double_gaussian
from .simmons import SimmonsParams
from .stem_edge import default_half_length, build_kernels, detect_edges, multi_delta_summary
from .stem_forward import build_lamella, degrade, project, synth_topography, tip_convolve

__all__ = ["main"]


def _hist_csv(path, data, bins):
    counts, edges = np.histogram(np.asarray(data, dtype=float), bins=bins)
    rows = [
        {"bin_left": edges[i], "bin_right": edges[i + 1], "count": int(counts[i])}
        for i in range(len(counts))
    ]
    write_records_csv(path, rows, ["bin_left", "bin_right", "count"])


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _finish(out_dir: Path, command: str, cfg: dict, inputs: list, outputs: list):
    manifest = RunManifest(
        command=command,
        config=cfg,
        master_seed=int(cfg.get("seed", 0)),
        code_version=__version__,
        input_digests={str(p): sha256_of(p) for p in inputs},
        outputs=sorted(str(Path(o).name) for o in outputs),
    )
    manifest.write(out_dir / "manifest.json")


# ---------------------------------------------------------------------------
# fit-iv
# ---------------------------------------------------------------------------


def cmd_fit_iv(cfg: dict, inputs: list) -> list:
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = []
    for path in inputs:
        curves.extend(ingest_iv(path))
    if not curves:
        raise ValueError("dataset contains no IV curves")
    init = SimmonsParams(
        area=cfg["area_nm2"],
        thickness=cfg["init_thickness"],
        barrier_height=cfg["init_phi"],
    )
    pre = []
    vbd_by_id = {}
    for jid, iv in curves:
        vbd = None
        try:
            vbd = bd.detect_breakdown(iv, jump_factor=5.0)
        except Exception:
            pass
        vbd_by_id[jid] = vbd
        if vbd is not None:
            keep = iv.voltage < vbd
            iv = type(iv)(iv.voltage[keep], iv.current[keep])
        pre.append((jid, iv))
    recs = batch_fit(
        pre,
        area_nm2=cfg["area_nm2"],
        area_mode=cfg["area_mode"],
        v_linear_max=cfg["v_linear_max"],
        init=init,
        workers=int(cfg["workers"]),
    )
    for rec in recs:
        vbd = vbd_by_id.get(rec["junction_id"])
        rec["v_bd_V"] = vbd if vbd is not None else ""
    fields = [
        "junction_id",
        "resistance_ohm",
        "t_fit_nm",
        "phi_fit_V",
        "v_bd_V",
        "residual_norm",
        "converged",
        "error",
    ]
    for rec in recs:
        for f in fields:
            rec.setdefault(f, "")
    outputs = [out_dir / "records.csv"]
    write_records_csv(outputs[0], recs, fields)

    ok = [r for r in recs if r.get("resistance_ohm") != ""]
    rs = np.array([r["resistance_ohm"] for r in ok], dtype=float)
    ts = np.array([r["t_fit_nm"] for r in ok if r.get("t_fit_nm") != ""], dtype=float)
    ps = np.array([r["phi_fit_V"] for r in ok if r.get("phi_fit_V") != ""], dtype=float)
    summary = {
        "n_junctions": len(recs),
        "n_failed": len(recs) - len(ok),
        "median_resistance_ohm": float(np.median(rs)) if rs.size else None,
        "resistance_sd_percent": float(np.std(rs, ddof=1) / np.median(rs) * 100.0)
        if rs.size > 1
        else None,
        "median_t_nm": float(np.median(ts)) if ts.size else None,
        "t_sd_percent": float(np.std(ts, ddof=1) / np.median(ts) * 100.0)
        if ts.size > 1
        else None,
        "median_phi_V": float(np.median(ps)) if ps.size else None,
        "phi_sd_percent": float(np.std(ps, ddof=1) / np.median(ps) * 100.0)
        if ps.size > 1
        else None,
    }
    outputs.append(out_dir / "summary.json")
    _write_json(outputs[-1], summary)
    bins = int(cfg["hist_bins"])
    for name, data in (("resistance", rs), ("thickness", ts), ("phi", ps)):
        if data.size:
            outputs.append(out_dir / f"hist_{name}.csv")
            _hist_csv(outputs[-1], data, bins)
            outputs.append(out_dir / f"hist_{name}.svg")
            plots.save_histogram(outputs[-1], data, bins=bins, xlabel=name)
    _finish(out_dir, "fit-iv", cfg, inputs, outputs)
    return outputs


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _axis(lo, hi, step):
    n = int(round((hi - lo) / step)) + 1 if step > 0 else 1
    return np.round(lo + step * np.arange(max(n, 1)), 10)


def cmd_sweep(cfg: dict) -> list:
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    means = _axis(cfg["mean_min"], cfg["mean_max"], cfg["mean_step"])
    sds = _axis(cfg["sd_min"], cfg["sd_max"], cfg["sd_step"])
    targets = mc.MatchTargets(
        target_R=cfg["target_R"],
        R_tol=cfg["R_tol"],
        spread_max=cfg["spread_max"],
        t_center=cfg["t_center"],
        t_tol=cfg["t_tol"],
        phi_center=cfg["phi_center"],
        phi_tol=cfg["phi_tol"],
    )
    geometry = mc.JunctionGeometry(cfg["width_nm"], cfg["height_nm"], cfg["pixel_nm"])
    grid = np.linspace(0.0, cfg["v_max"], int(cfg["n_voltages"]))
    result = mc.sweep(
        cfg["kind"],
        means,
        sds,
        barrier_height=cfg["phi"],
        targets=targets,
        seed=int(cfg["seed"]),
        n_junctions=int(cfg["n_junctions"]),
        geometry=geometry,
        iv_grid=grid,
        workers=int(cfg["workers"]),
    )
    rows = []
    for i, mval in enumerate(result.means):
        for j, sval in enumerate(result.sds):
            m = result.metrics[i][j]
            rows.append(
                {
                    "mean_nm": mval,
                    "sd_nm": sval,
                    "median_R_ohm": m.median_resistance,
                    "spread_percent": m.resistance_spread,
                    "t_fit_nm": m.refit_thickness,
                    "phi_fit_V": m.refit_barrier_height,
                    "match_count": m.match_count,
                    "n_shorted": m.n_shorted,
                    "valid": m.valid,
                }
            )
    outputs = [out_dir / "cells.csv"]
    write_records_csv(
        outputs[0],
        rows,
        [
            "mean_nm",
            "sd_nm",
            "median_R_ohm",
            "spread_percent",
            "t_fit_nm",
            "phi_fit_V",
            "match_count",
            "n_shorted",
            "valid",
        ],
    )
    tables = {
        "resistance": result.resistance,
        "spread": result.spread,
        "t_fit": result.t_fit,
        "phi_fit": result.phi_fit,
        "match_count": result.match_count,
    }
    for name, matrix in tables.items():
        path = out_dir / f"heatmap_{name}.csv"
        outputs.append(path)
        with open(path, "w") as fh:
            fh.write("mean_nm\\sd_nm," + ",".join(format_float(s) for s in result.sds))
            fh.write("\n")
            for i, mval in enumerate(result.means):
                fh.write(
                    format_float(mval)
                    + ","
                    + ",".join(format_float(v) for v in matrix[i])
                    + "\n"
                )
        svg = out_dir / f"heatmap_{name}.svg"
        outputs.append(svg)
        plots.save_heatmap(
            svg,
            matrix,
            result.sds,
            result.means,
            xlabel="thickness sd (nm)",
            ylabel="mean thickness (nm)",
            title=name,
            mask=result.valid,
        )
    _finish(out_dir, "sweep", cfg, [], outputs)
    return outputs


# ---------------------------------------------------------------------------
# breakdown
# ---------------------------------------------------------------------------


def cmd_breakdown(cfg: dict, inputs: list) -> list:
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    bins = int(cfg["hist_bins"])
    outputs = []
    if cfg["mode"] == "simulate":
        dist = mc.ThicknessDistribution(cfg["kind"], cfg["mean"], cfg["sd"])
        minima = bd.min_thickness_samples(
            dist,
            width_nm=cfg["width_nm"],
            height_nm=cfg["height_nm"],
            mesh=cfg["mesh_nm"],
            n_junctions=int(cfg["n_junctions"]),
            seed=int(cfg["seed"]),
            workers=int(cfg["workers"]),
        )
        rows = [
            {"junction": i, "min_thickness_nm": t} for i, t in enumerate(minima)
        ]
        outputs.append(out_dir / "minima.csv")
        write_records_csv(outputs[-1], rows, ["junction", "min_thickness_nm"])
        positive = minima[minima > 0]
        n_shorted = int((minima <= 0).sum())
        if n_shorted:
            warnings.warn(
                f"{n_shorted} junction(s) with non-positive minimum thickness "
                "excluded from calibration"
            )
        cal = bd.calibrate_dielectric_strength(positive, cfg["target_mean_vbd"])
        vbd = cal.breakdown_voltages(positive)
        outputs.append(out_dir / "calibration.json")
        _write_json(
            outputs[-1],
            {
                "E_ds_GV_per_m": cal.E_ds,
                "mean_min_thickness_nm": cal.mean_min_thickness,
                "target_mean_Vbd_V": cal.target_mean_Vbd,
                "n_junctions": int(cfg["n_junctions"]),
                "n_shorted_excluded": n_shorted,
                "vbd_relative_sd_percent": float(np.std(vbd, ddof=1) / np.mean(vbd) * 100.0)
                if vbd.size > 1
                else 0.0,
            },
        )
        outputs.append(out_dir / "breakdown_hist.csv")
        _hist_csv(outputs[-1], vbd, bins)
        outputs.append(out_dir / "breakdown_hist.svg")
        plots.save_histogram(
            outputs[-1], vbd, bins=bins, xlabel="breakdown voltage (V)"
        )
        # example junctions at the IV pixel size: full thickness
        # histograms and conductance concentration curves
        cc_rows, th_rows = [], []
        for j in range(int(cfg["n_example_junctions"])):
            fld = mc.sample_barrier(
                dist,
                cfg["width_nm"],
                cfg["height_nm"],
                cfg["example_pixel_nm"],
                int(cfg["seed"]),
                junction=j,
            )
            counts, edges = np.histogram(fld.thickness.ravel(), bins=bins)
            th_rows += [
                {
                    "junction": j,
                    "bin_left": edges[i],
                    "bin_right": edges[i + 1],
                    "count": int(counts[i]),
                }
                for i in range(len(counts))
            ]
            if not fld.shorted:
                curve = bd.cumulative_conductance(fld, cfg["phi"])
                cc_rows += [
                    {
                        "junction": j,
                        "area_fraction": a,
                        "conductance_fraction": c,
                    }
                    for a, c in zip(curve.area_fraction, curve.conductance_fraction)
                ]
        outputs.append(out_dir / "thickness_hist.csv")
        write_records_csv(
            outputs[-1], th_rows, ["junction", "bin_left", "bin_right", "count"]
        )
        outputs.append(out_dir / "cumulative_conductance.csv")
        write_records_csv(
            outputs[-1], cc_rows, ["junction", "area_fraction", "conductance_fraction"]
        )
    elif cfg["mode"] == "data":
        if not inputs:
            raise ValueError("breakdown data mode requires an IV dataset")
        curves = []
        for path in inputs:
            curves.extend(ingest_iv(path))
        records = []
        rows = []
        for jid, iv in curves:
            row = {"junction_id": jid, "resistance_ohm": "", "v_bd_V": ""}
            try:
                from .simmons import low_voltage_resistance

                resistance = low_voltage_resistance(iv, v_max=cfg["v_linear_max"])
                row["resistance_ohm"] = resistance
                vbd = bd.detect_breakdown(iv, jump_factor=cfg["jump_factor"])
                if vbd is not None:
                    row["v_bd_V"] = vbd
                    records.append(bd.BreakdownRecord(jid, vbd, resistance))
            except Exception as exc:  # per-junction isolation
                row["error"] = str(exc)
            rows.append(row)
        outputs.append(out_dir / "breakdown_records.csv")
        write_records_csv(
            outputs[-1], rows, ["junction_id", "resistance_ohm", "v_bd_V", "error"]
        )
        vbds = np.array([r.breakdown_voltage for r in records])
        if vbds.size:
            outputs.append(out_dir / "breakdown_hist.csv")
            _hist_csv(outputs[-1], vbds, bins)
            outputs.append(out_dir / "breakdown_hist.svg")
            plots.save_histogram(
                outputs[-1], vbds, bins=bins, xlabel="breakdown voltage (V)",
                vline=cfg["threshold_v"],
            )
        if vbds.size >= 20:
            dg = fit_double_gaussian(vbds)
            payload = {"unimodal": dg.unimodal, "midpoint_V": dg.midpoint}
            if dg.params is not None:
                payload.update(
                    {
                        "amp1": dg.params.amp1,
                        "mean1_V": dg.params.mean1,
                        "sd1_V": dg.params.sd1,
                        "amp2": dg.params.amp2,
                        "mean2_V": dg.params.mean2,
                        "sd2_V": dg.params.sd2,
                    }
                )
            outputs.append(out_dir / "double_gaussian.json")
            _write_json(outputs[-1], payload)
        if records:
            groups = bd.group_by_breakdown(records, threshold=cfg["threshold_v"])
            outputs.append(out_dir / "groups.json")
            _write_json(
                outputs[-1],
                {
                    "threshold_V": groups.threshold,
                    "n_low": len(groups.low),
                    "n_high": len(groups.high),
                    "fraction_low": groups.fraction_low,
                    "fraction_high": groups.fraction_high,
                    "median_R_low_ohm": groups.median_R_low,
                    "median_R_high_ohm": groups.median_R_high,
                    "delta_R_ohm": groups.delta_R,
                },
            )
    else:
        raise ValueError(f"unknown breakdown mode {cfg['mode']!r}")
    _finish(out_dir, "breakdown", cfg, inputs, outputs)
    return outputs


# ---------------------------------------------------------------------------
# stem
# ---------------------------------------------------------------------------


def cmd_stem(cfg: dict, inputs: list) -> list:
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    if cfg["mode"] == "simulate":
        if inputs:
            topo = read_topography(inputs[0])
        else:
            topo = synth_topography(
                cfg["width_nm"],
                cfg["height_nm"],
                cfg["pixel_nm"],
                rms=cfg["rms_nm"],
                correlation_length=cfg["correlation_nm"],
                seed=int(cfg["seed"]),
            )
            if cfg["tip_radius_nm"] > 0:
                topo = tip_convolve(topo, cfg["tip_radius_nm"])
        outputs.append(out_dir / "topography.txt")
        write_grid(outputs[-1], topo.pixel_size, topo.heights, "topography")
        ext_d, ext_x = topo.extent_nm
        n_regions = int(cfg["n_regions"])
        if ext_x < cfg["region_width_nm"] or ext_d < cfg["region_depth_nm"]:
            raise ValueError("topography smaller than the requested region")
        x_offsets = (
            np.linspace(0.0, ext_x - cfg["region_width_nm"], n_regions)
            if n_regions > 1
            else [0.0]
        )
        d0 = (ext_d - cfg["region_depth_nm"]) / 2.0
        for idx, x0 in enumerate(x_offsets):
            lam = build_lamella(
                topo,
                x0_nm=float(x0),
                d0_nm=d0,
                width_nm=cfg["region_width_nm"],
                depth_nm=cfg["region_depth_nm"],
                barrier_thickness=cfg["barrier_thickness_nm"],
                voxel=cfg["voxel_nm"],
            )
            image = degrade(
                project(lam),
                noise_mean=cfg["noise_mean"],
                noise_sd=cfg["noise_sd"],
                blur_radius=cfg["blur_nm"],
                seed=int(cfg["seed"]) + idx,
            )
            stem_name = f"region_{idx}_eds"
            outputs.append(out_dir / f"{stem_name}.txt")
            write_grid(outputs[-1], image.pixel_size, image.values, "eds")
            outputs.append(out_dir / f"{stem_name}.pgm")
            write_pgm16(outputs[-1], image)
            outputs.append(out_dir / f"{stem_name}.svg")
            plots.save_band_with_traces(outputs[-1], image, title=stem_name)
    elif cfg["mode"] == "analyze":
        if not inputs:
            raise ValueError("stem analyze requires an image file")
        image = read_eds_image(inputs[0])
        deltas = [float(d) for d in str(cfg["deltas"]).split(",") if d != ""]
        k = int(cfg["k"]) or default_half_length(image.pixel_size)
        summary = multi_delta_summary(
            image,
            deltas=deltas,
            k=k,
            gaussian_length=cfg["gaussian_length_nm"],
        )
        for d, prof in summary.profiles.items():
            tag = format_float(d).replace(".", "p")
            kp = build_kernels(k, d, image.pixel_size, cfg["gaussian_length_nm"])
            tr_a, tr_b = detect_edges(image, kp)
            outputs.append(out_dir / f"traces_delta_{tag}.csv")
            write_records_csv(
                outputs[-1],
                [
                    {
                        "column": c,
                        "edge_lower_px": tr_a.positions[c],
                        "edge_upper_px": tr_b.positions[c],
                        "low_confidence": bool(
                            tr_a.low_confidence[c] or tr_b.low_confidence[c]
                        ),
                    }
                    for c in range(len(tr_a))
                ],
                ["column", "edge_lower_px", "edge_upper_px", "low_confidence"],
            )
            outputs.append(out_dir / f"thickness_hist_delta_{tag}.csv")
            rows = [
                {
                    "bin_left": prof.histogram_edges[i],
                    "bin_right": prof.histogram_edges[i + 1],
                    "count": int(prof.histogram_counts[i]),
                }
                for i in range(len(prof.histogram_counts))
            ]
            write_records_csv(outputs[-1], rows, ["bin_left", "bin_right", "count"])
            outputs.append(out_dir / f"band_delta_{tag}.svg")
            plots.save_band_with_traces(
                outputs[-1], image, traces=(tr_a, tr_b), title=f"delta={d}"
            )
        payload = {
            "deltas": list(summary.deltas),
            "mean_thickness_by_delta_nm": {
                format_float(d): m for d, m in summary.mean_by_delta.items()
            },
            "sd_by_delta_nm": {
                format_float(d): p.sd for d, p in summary.profiles.items()
            },
            "excluded_columns_by_delta": {
                format_float(d): p.n_excluded for d, p in summary.profiles.items()
            },
            "thickness_range_nm": list(summary.thickness_range),
            "error_bar_nm": summary.error_bar,
            "kernel_half_length_px": k,
        }
        outputs.append(out_dir / "summary.json")
        _write_json(outputs[-1], payload)
    else:
        raise ValueError(f"unknown stem mode {cfg['mode']!r}")
    _finish(out_dir, "stem", cfg, inputs, outputs)
    return outputs


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def cmd_report(cfg: dict, inputs: list) -> list:
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    if not inputs:
        raise ValueError("report requires a records CSV")
    records = [JunctionRecord.from_row(r) for r in read_records_csv(inputs[0])]
    if not records:
        raise ValueError("records file is empty")
    outputs = []
    located = [r for r in records if r.wafer_x is not None and r.wafer_y is not None]
    quantities = (("t_fit", "t_fit_nm"), ("phi_fit", "phi_fit_V"), ("v_bd", "v_bd_V"))
    if located:
        nx = max(r.wafer_x for r in located) + 1
        ny = max(r.wafer_y for r in located) + 1
        for attr, label in quantities:
            grid = np.full((ny, nx), np.nan)
            for r in located:
                val = getattr(r, attr)
                if val is not None:
                    grid[r.wafer_y, r.wafer_x] = val
            path = out_dir / f"grid_{attr}.csv"
            outputs.append(path)
            with open(path, "w") as fh:
                fh.write(
                    "wafer_y\\wafer_x," + ",".join(str(x) for x in range(nx)) + "\n"
                )
                for y in range(ny):
                    fh.write(
                        str(y)
                        + ","
                        + ",".join(
                            "" if np.isnan(v) else format_float(v) for v in grid[y]
                        )
                        + "\n"
                    )
    else:
        warnings.warn("records carry no wafer coordinates; flat table fallback")
        path = out_dir / "flat_records.csv"
        outputs.append(path)
        write_records_csv(
            path, [r.to_row() for r in records], JunctionRecord._FIELDS
        )

    def _median(attr):
        vals = [getattr(r, attr) for r in records if getattr(r, attr) is not None]
        return float(np.median(vals)) if vals else None

    lines = [
        "junction ensemble report",
        f"records: {len(records)} (with coordinates: {len(located)})",
        f"median resistance (ohm): {_median('resistance')}",
        f"median fitted thickness (nm): {_median('t_fit')}",
        f"median fitted barrier height (V): {_median('phi_fit')}",
        f"median breakdown voltage (V): {_median('v_bd')}",
    ]
    outputs.append(out_dir / "summary.txt")
    Path(outputs[-1]).write_text("\n".join(lines) + "\n")
    html = (
        "<html><body><h1>junction ensemble report</h1><pre>"
        + "\n".join(lines[1:])
        + "</pre></body></html>\n"
    )
    outputs.append(out_dir / "summary.html")
    Path(outputs[-1]).write_text(html)
    _finish(out_dir, "report", cfg, inputs, outputs)
    return outputs


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--config", help="INI config file")
    p.add_argument("--out", dest="out_dir", help="output directory")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--workers", type=int, help="worker threads")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="jjbarrier", description="tunnel-junction barrier analysis toolkit"
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-iv", help="batch-fit measured or synthetic IV curves")
    p.add_argument("dataset", nargs="+", help="IV CSV files")
    _add_common(p)
    p.add_argument("--area-nm2", dest="area_nm2", type=float)
    p.add_argument("--area-mode", dest="area_mode", choices=("fixed", "free"))
    p.add_argument("--v-linear-max", dest="v_linear_max", type=float)

    p = sub.add_parser("sweep", help="Monte-Carlo (mean, sd) parameter sweep")
    _add_common(p)
    p.add_argument("--kind", choices=("normal", "lognormal"))
    p.add_argument("--phi", type=float)
    p.add_argument("--mean", help="min:max:step (nm)")
    p.add_argument("--sd", help="min:max:step (nm)")
    p.add_argument("--n-junctions", dest="n_junctions", type=int)
    p.add_argument("--pixel-nm", dest="pixel_nm", type=float)

    p = sub.add_parser("breakdown", help="breakdown statistics (simulate or data)")
    p.add_argument("dataset", nargs="*", help="IV CSV files (data mode)")
    _add_common(p)
    p.add_argument("--mode", choices=("simulate", "data"))
    p.add_argument("--kind", choices=("normal", "lognormal"))
    p.add_argument("--mean", type=float)
    p.add_argument("--sd", type=float)
    p.add_argument("--mesh-nm", dest="mesh_nm", type=float)
    p.add_argument("--n-junctions", dest="n_junctions", type=int)
    p.add_argument("--target-mean-vbd", dest="target_mean_vbd", type=float)
    p.add_argument("--threshold-v", dest="threshold_v", type=float)
    p.add_argument("--jump-factor", dest="jump_factor", type=float)

    p = sub.add_parser("stem", help="cross-section simulation and analysis")
    p.add_argument("mode", choices=("simulate", "analyze"))
    p.add_argument("inputs", nargs="*", help="topography (simulate) or image (analyze)")
    _add_common(p)
    p.add_argument("--rms-nm", dest="rms_nm", type=float)
    p.add_argument("--correlation-nm", dest="correlation_nm", type=float)
    p.add_argument("--tip-radius-nm", dest="tip_radius_nm", type=float)
    p.add_argument("--barrier-thickness-nm", dest="barrier_thickness_nm", type=float)
    p.add_argument("--noise-sd", dest="noise_sd", type=float)
    p.add_argument("--blur-nm", dest="blur_nm", type=float)
    p.add_argument("--n-regions", dest="n_regions", type=int)
    p.add_argument("--width-nm", dest="width_nm", type=float)
    p.add_argument("--height-nm", dest="height_nm", type=float)
    p.add_argument("--deltas")
    p.add_argument("--k", type=int)

    p = sub.add_parser("report", help="semi-spatial wafer report from records")
    p.add_argument("records", help="records CSV")
    _add_common(p)

    p = sub.add_parser("replay", help="re-run a manifest and reproduce its outputs")
    p.add_argument("manifest", help="manifest.json from a previous run")
    p.add_argument("--out", dest="out_dir", help="output directory")
    return ap


def _cli_overrides(args, keys) -> dict:
    return {k: getattr(args, k, None) for k in keys}


def _dispatch(command: str, cfg: dict, inputs: list) -> list:
    if command == "fit-iv":
        return cmd_fit_iv(cfg, inputs)
    if command == "sweep":
        return cmd_sweep(cfg)
    if command == "breakdown":
        return cmd_breakdown(cfg, inputs)
    if command == "stem":
        return cmd_stem(cfg, inputs)
    if command == "report":
        return cmd_report(cfg, inputs)
    raise ValueError(f"unknown command {command!r}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "replay":
            manifest = RunManifest.read(args.manifest)
            cfg = dict(manifest.config)
            if args.out_dir:
                cfg["out_dir"] = args.out_dir
            inputs = list(manifest.input_digests)
            for path, digest in manifest.input_digests.items():
                if sha256_of(path) != digest:
                    raise ValueError(f"input {path} changed since the original run")
            _dispatch(manifest.command, cfg, inputs)
            return 0

        file_cfg = load_config_file(args.config) if args.config else None
        if args.command == "fit-iv":
            over = _cli_overrides(
                args,
                ("out_dir", "seed", "workers", "area_nm2", "area_mode", "v_linear_max"),
            )
            cfg = resolve_config("fit-iv", file_cfg, over)
            cmd_fit_iv(cfg, args.dataset)
        elif args.command == "sweep":
            over = _cli_overrides(
                args, ("out_dir", "seed", "workers", "kind", "phi", "n_junctions", "pixel_nm")
            )
            for axis, keys in (("mean", ("mean_min", "mean_max", "mean_step")),
                               ("sd", ("sd_min", "sd_max", "sd_step"))):
                spec = getattr(args, axis, None)
                if spec:
                    parts = [float(v) for v in spec.split(":")]
                    if len(parts) != 3:
                        raise ValueError(f"--{axis} expects min:max:step")
                    over.update(dict(zip(keys, parts)))
            cfg = resolve_config("sweep", file_cfg, over)
            cmd_sweep(cfg)
        elif args.command == "breakdown":
            over = _cli_overrides(
                args,
                (
                    "out_dir",
                    "seed",
                    "workers",
                    "mode",
                    "kind",
                    "mean",
                    "sd",
                    "mesh_nm",
                    "n_junctions",
                    "target_mean_vbd",
                    "threshold_v",
                    "jump_factor",
                ),
            )
            if args.dataset and over.get("mode") is None:
                over["mode"] = "data"
            cfg = resolve_config("breakdown", file_cfg, over)
            cmd_breakdown(cfg, args.dataset)
        elif args.command == "stem":
            over = _cli_overrides(
                args,
                (
                    "out_dir",
                    "seed",
                    "workers",
                    "rms_nm",
                    "correlation_nm",
                    "tip_radius_nm",
                    "barrier_thickness_nm",
                    "noise_sd",
                    "blur_nm",
                    "n_regions",
                    "width_nm",
                    "height_nm",
                    "deltas",
                    "k",
                ),
            )
            over["mode"] = args.mode
            if over.get("k") == 0:
                over["k"] = None
            cfg = resolve_config("stem", file_cfg, over)
            cmd_stem(cfg, args.inputs)
        elif args.command == "report":
            over = _cli_overrides(args, ("out_dir", "seed", "workers"))
            cfg = resolve_config("report", file_cfg, over)
            cmd_report(cfg, [args.records])
    except Exception as exc:  # noqa: BLE001 - single CLI error surface
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
