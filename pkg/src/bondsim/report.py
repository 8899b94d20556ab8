"""Batch runs, parameter sweeps and figure data, written as CSV."""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import thickness_fit as tf
from .config import ScenarioConfig, SweepGrid, load_config
from .errors import BondsimError, ValidationError
from .lumped import TemperatureTrace, run_lumped
from .materials import default_params
from .parabolic import ParabolicResult, run_parabolic
from .stiffness import Variant

TRACE_HEADER = ["abscissa", "strain", "temperature_C", "heating_term", "flux_term"]
FIELD_HEADER = ["tau", "zeta", "temperature_C", "phase"]
SUMMARY_HEADER = ["r", "v_fabric", "peak_centerline_C", "homogenized_C", "bonded_flag"]
SWEEP_HEADER = ["r", "v_fabric", "peak_centerline_C", "homogenized_C", "bonded_flag", "error"]
CURVE_HEADER = ["x_mm", "pressure_MPa"]
SHEET_HEADER = ["w_single_mm", "pressure_MPa"]

FIGURES = ("fig6", "fig7", "fig8", "fig11", "fig13", "fig15", "fig16", "fig17", "fig18")
REFERENCE_HOMOGENIZED = (25.0, 55.0)  # degC, expected band for the fig16 setup
FIGURE_TAU_END = 20.0


def fmt(value) -> str:
    """17 significant digits: enough for an exact float round trip."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: str, header: list[str], rows) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_trace(trace: TemperatureTrace, path: str) -> str:
    rows = zip(trace.abscissa, trace.strain, trace.temperature, trace.heating_term, trace.flux_term)
    return write_csv(path, TRACE_HEADER, rows)


def write_field(result: ParabolicResult, path: str) -> str:
    zeta = result.grid.nodes
    rows = (
        (snap.tau, z, t, snap.phase.value)
        for snap in result.snapshots
        for z, t in zip(zeta, snap.values)
    )
    return write_csv(path, FIELD_HEADER, rows)


def summary_row(result: ParabolicResult, threshold: float) -> tuple:
    peak = result.peak_centerline
    return (result.setup.r, result.setup.v_fabric, peak, result.homogenized, peak >= threshold)


@dataclass
class RunManifest:
    scenario: dict
    outputs: list[str] = field(default_factory=list)
    wall_clock_s: float = 0.0
    solver: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def write(self, path: str) -> str:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        return path


def _parabolic_notes(result: ParabolicResult) -> list[str]:
    notes = []
    if not result.homogenized_converged:
        notes.append(
            f"profile not yet uniform at tau_end={result.final.tau:g}: spread "
            f"{result.spread:.3g} C; homogenized value is the conserved node mean"
        )
    return notes


def _parabolic_solver(result: ParabolicResult) -> dict:
    return {
        **dataclasses.asdict(result.stats),
        "field_min_C": result.field_min,
        "field_max_C": result.field_max,
        "relaxation_sum_drift": result.max_relaxation_drift,
        "homogenized_spread_C": result.spread,
        "homogenized_converged": result.homogenized_converged,
    }


def _run_config(cfg: ScenarioConfig, out_dir: str, stem: str, threshold: float = 150.0):
    """Run one configured model; returns (outputs, solver, notes, payload)."""
    if cfg.model == "parabolic":
        res = run_parabolic(
            cfg.roller_setup(), cfg.materials, cfg.grid(), cfg.tau_end, cfg.parabolic_control()
        )
        outs = [
            write_field(res, os.path.join(out_dir, f"{stem}_field.csv")),
            write_csv(os.path.join(out_dir, f"{stem}_summary.csv"), SUMMARY_HEADER,
                      [summary_row(res, threshold)]),
        ]
        return outs, _parabolic_solver(res), _parabolic_notes(res), res
    sc = cfg.lumped_scenario()
    trace = run_lumped(sc, np.linspace(*sc.span(), cfg.points), cfg.step_control())
    outs = [write_trace(trace, os.path.join(out_dir, f"{stem}_trace.csv"))]
    solver = {**dataclasses.asdict(trace.stats), "peak_C": trace.peak, "final_C": trace.final}
    return outs, solver, [], trace


def run_scenario(config_path: str, out_dir: str = "out", *, grid_n=None, tau_end=None) -> RunManifest:
    cfg = load_config(config_path)
    cfg = _override(cfg, grid_n, tau_end)
    start = time.perf_counter()
    outs, solver, notes, _ = _run_config(cfg, out_dir, cfg.name)
    manifest = RunManifest(cfg.echo(), outs, time.perf_counter() - start, solver, notes)
    manifest.outputs.append(manifest.write(os.path.join(out_dir, f"{cfg.name}_manifest.json")))
    return manifest


def _override(cfg: ScenarioConfig, grid_n, tau_end) -> ScenarioConfig:
    updates = {}
    if grid_n is not None:
        updates["grid_n"] = grid_n
    if tau_end is not None:
        updates["tau_end"] = tau_end
    if updates:
        cfg = replace(cfg, **updates)
        cfg.validate()
    return cfg


def _sweep_cell(args) -> tuple:
    cfg, model, r, v, threshold = args
    try:
        if model == "parabolic":
            res = run_parabolic(
                cfg.roller_setup(r, v), cfg.materials, cfg.grid(), cfg.tau_end, cfg.parabolic_control()
            )
            peak, hom = res.peak_centerline, res.homogenized
        else:
            sc = replace(cfg, model="roller").lumped_scenario(r, v)
            trace = run_lumped(sc, np.linspace(0.0, 1.0, cfg.points), cfg.step_control())
            peak, hom = trace.peak, float("nan")
        return (r, v, peak, hom, peak >= threshold, "")
    except BondsimError as exc:
        return (r, v, float("nan"), float("nan"), False, f"{type(exc).__name__}: {exc}")


def run_sweep(grid: SweepGrid, base_config: ScenarioConfig, out_dir: str = "out",
              workers: int | None = None, name: str = "sweep") -> RunManifest:
    """Bonding map over (r, v). One row per cell, in grid order, whatever
    happens inside individual cells."""
    grid.validate(base_config.materials)
    cells = [(base_config, grid.model, r, v, grid.bond_threshold)
             for r in grid.r_values for v in grid.v_values]
    start = time.perf_counter()
    workers = workers or os.cpu_count() or 1
    if workers == 1 or len(cells) == 1:
        rows = [_sweep_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
            rows = list(pool.map(_sweep_cell, cells))
    path = write_csv(os.path.join(out_dir, f"{name}_bonding_map.csv"), SWEEP_HEADER, rows)
    failed = sum(1 for row in rows if row[-1])
    manifest = RunManifest(
        {**base_config.echo(), "sweep": dataclasses.asdict(grid)},
        [path],
        time.perf_counter() - start,
        {"cells": len(rows), "failed_cells": failed, "workers": workers},
        [f"{failed} cell(s) failed; see the error column"] if failed else [],
    )
    manifest.outputs.append(manifest.write(os.path.join(out_dir, f"{name}_manifest.json")))
    return manifest


def run_sweep_config(config_path: str, out_dir: str = "out", workers=None, *, grid_n=None, tau_end=None):
    cfg = _override(load_config(config_path), grid_n, tau_end)
    if cfg.sweep is None:
        raise ValidationError("sweep", "config has no [sweep] section")
    return run_sweep(cfg.sweep, cfg, out_dir, workers, name=cfg.name)


def _figure_configs(fig: str, tau_end: float, grid_n: int) -> list[tuple[str, ScenarioConfig]]:
    base = default_params()
    para = replace(base, K_steel=17.0)
    if fig == "fig11":
        return [(f"fig11_{v.value}", ScenarioConfig(name=f"fig11_{v.value}", model="adiabatic", variant=v))
                for v in (Variant.LINEAR, Variant.QUADRATIC)]
    if fig == "fig13":
        out = []
        for ms, dt in (("10ms", 1e-2), ("1ms", 1e-3), ("0.1ms", 1e-4)):
            for flux in (True, False):
                stem = f"fig13_{ms}_{'flux' if flux else 'noflux'}"
                out.append((stem, ScenarioConfig(
                    name=stem, model="constant_speed", materials=base, compression_ratio=0.6,
                    compression_time_s=dt, flux=flux)))
        return out
    if fig == "fig15":
        return [("fig15", ScenarioConfig(name="fig15", model="roller", materials=base, compression_ratio=0.6))]
    speeds = {"fig16": (6.0, 0.8), "fig17": (0.6, 0.8), "fig18": (6.0, 0.95)}
    v, r = speeds[fig]
    return [(fig, ScenarioConfig(name=fig, model="parabolic", materials=para, line_speed_m_s=v,
                                 compression_ratio=r, tau_end=tau_end, grid_n=grid_n))]


def _pressure_figure(fig: str, out_dir: str, x_range, samples: int) -> tuple[list[str], dict, list[str]]:
    if fig == "fig6":
        lo, hi = x_range or (0.0, 0.25)
        xs = np.linspace(lo, hi, samples)
        path = write_csv(os.path.join(out_dir, "fig6_base.csv"), CURVE_HEADER,
                         ((x, tf.eval_fit(tf.P_BASE, x)) for x in xs))
        return [path], {"samples": samples}, []
    if fig == "fig7":
        lo, hi = x_range or (-1.0, tf.P_BASE_10_FABRIC.peak_displacement())
        xs = np.linspace(lo, hi, samples)
        path = write_csv(os.path.join(out_dir, "fig7_base_10fabric.csv"), CURVE_HEADER,
                         ((x, tf.eval_fit(tf.P_BASE_10_FABRIC, x)) for x in xs))
        return [path], {"samples": samples}, []
    if x_range is None:
        xs = tf.default_x_samples(samples)
    else:
        xs = list(np.linspace(x_range[0], x_range[1], samples))
    curve = tf.single_sheet_curve(xs)
    path = write_csv(os.path.join(out_dir, "fig8_single_sheet.csv"), SHEET_HEADER, curve.points)
    notes = [f"x = {x!r} mm skipped: {msg}" for x, msg in curve.failures]
    return [path], {"samples": len(xs), "solved": len(curve.points), "failed": len(curve.failures)}, notes


def emit_figure_data(fig: str, out_dir: str = "out", *, tau_end: float | None = None,
                     grid_n: int | None = None, x_range=None, samples: int = 400) -> RunManifest:
    """Write the preset scenario(s) of one figure plus a manifest."""
    if fig not in FIGURES:
        raise ValidationError("figure", f"unknown figure id {fig!r}; valid ids: {', '.join(FIGURES)}")
    start = time.perf_counter()
    if fig in ("fig6", "fig7", "fig8"):
        outs, solver, notes = _pressure_figure(fig, out_dir, x_range, samples)
        manifest = RunManifest({"figure": fig}, outs, time.perf_counter() - start, solver, notes)
    else:
        te = FIGURE_TAU_END if tau_end is None else tau_end
        n = 100 if grid_n is None else grid_n
        outs, solver, notes, echo = [], {}, [], {}
        for stem, cfg in _figure_configs(fig, te, n):
            cfg.validate()
            o, s, nt, payload = _run_config(cfg, out_dir, stem)
            outs += o
            solver[stem] = s
            notes += nt
            echo[stem] = cfg.echo()
            if fig == "fig16":
                lo, hi = REFERENCE_HOMOGENIZED
                hom = payload.homogenized
                if not lo <= hom <= hi:
                    notes.append(
                        f"homogenized outgoing temperature {hom:.4f} C lies outside the reference "
                        f"estimate [{lo:g}, {hi:g}] C; the model equations are used as written "
                        "and no parameter was adjusted"
                    )
        manifest = RunManifest({"figure": fig, "scenarios": echo}, outs,
                               time.perf_counter() - start, solver, notes)
    manifest.outputs.append(manifest.write(os.path.join(out_dir, f"{fig}_manifest.json")))
    return manifest

