"""Run orchestration: config -> trajectory -> files on disk."""
import os

import numpy as np

from . import energy, serialize, solver, validation
from .errors import HasimotoUndefinedError, InputError
from .filament import geometry_report, nls_residual_series


def diagnostic_series(traj, diagnostics):
    """Named per-frame scalar series for the requested diagnostics."""
    frames = traj.frames
    series = {}
    if diagnostics.geometry or diagnostics.hasimoto:
        reports = []
        for f in frames:
            try:
                reports.append(geometry_report(f, with_hasimoto=diagnostics.hasimoto))
            except HasimotoUndefinedError as exc:
                reports.append(exc.report)
        if diagnostics.geometry:
            series["arc_length"] = [r.arc_length for r in reports]
            series["min_speed"] = [r.min_speed for r in reports]
            series["kappa_max"] = [float(np.max(r.curvature)) for r in reports]
        if diagnostics.hasimoto:
            try:
                series["nls_residual"] = nls_residual_series(reports, traj.times)
            except InputError:
                series["nls_residual"] = [float("nan")] * len(frames)
    for k in diagnostics.energy_orders:
        reps = [energy.modified_energy(f, k, diagnostics.energy_variant) for f in frames]
        series[f"E{k}"] = [r.E_k for r in reps]
        series[f"ratio{k}"] = [r.ratio for r in reps]
    return series


def execute(run_cfg, out_dir=None):
    """Evolve the configured initial curve and write frames, diagnostics and manifest."""
    out_dir = out_dir or run_cfg.outputs.directory
    f0 = run_cfg.initial_filament()
    traj = solver.evolve(f0, run_cfg.flow, run_cfg.solver, stride=run_cfg.outputs.frame_stride)
    series = diagnostic_series(traj, run_cfg.outputs.diagnostics)
    diag_path = serialize.write_diagnostics(traj.times, series, out_dir)
    manifest = serialize.write_trajectory(
        traj, out_dir, run_cfg, extra={"diagnostics": {"file": os.path.basename(diag_path), "columns": ["t"] + list(series)}}
    )
    return traj, manifest


def energy_report(run_cfg):
    f0 = run_cfg.initial_filament()
    d = run_cfg.outputs.diagnostics
    m = run_cfg.solver.sobolev_order
    return [energy.modified_energy(f0, k, d.energy_variant, m=m) for k in d.energy_orders]


def convergence_studies(run_cfg):
    """epsilon-limit and dt self-convergence on the configured problem."""
    f0 = run_cfg.initial_filament()
    conv = run_cfg.convergence
    base = run_cfg.solver.replace(epsilon=conv.epsilons[0])
    eps = validation.run_convergence_epsilon(base, conv.epsilons, run_cfg.flow, f0)
    dt_cfg = run_cfg.solver.replace(epsilon=conv.dt_epsilon)
    dts = validation.run_convergence_dt(dt_cfg, conv.dts, run_cfg.flow, f0)
    return [eps, dts]
