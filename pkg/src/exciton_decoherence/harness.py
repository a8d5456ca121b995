"""Scenario runners behind the command line: figure data, validation, sweeps."""
from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import coefficients as co
from . import observables as ob
from . import oracle as orc
from .config import ScenarioConfig
from .params import FIG2, FIG2_VARIANTS, SystemParams

log = logging.getLogger(__name__)

SWEEP_AXES = ("xi", "delta", "gamma", "m_coupling", "n0", "dphi")
MAX_SWEEP_POINTS = 10**4


@dataclass
class CsvTable:
    columns: list
    rows: np.ndarray
    name: str = "table"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, len(self.columns))
        if np.isnan(self.rows).any():
            raise ValueError(f"{self.name}: NaN in table")

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


def _gt_grid(t_end, samples):
    return np.linspace(0.0, t_end, samples)


def run_fig1(config: ScenarioConfig) -> CsvTable:
    """Driven and undriven mean exciton number; includes a dense short-time segment."""
    p = config.system
    alpha = config.alpha
    r = config.run
    gt = np.union1d(_gt_grid(r.t_end, r.samples), _gt_grid(min(r.inset_t_end, r.t_end), r.inset_samples))
    t = p.time_fs(gt)
    driven = ob.mean_number(p, alpha, t, n0=config.n0)
    undriven = ob.mean_number(p.with_(xi=0.0), alpha, t, n0=config.n0)
    return CsvTable(
        ["t_over_gamma_inv", "mean_n_driven", "mean_n_undriven"],
        np.column_stack([gt, driven, undriven]),
        name="fig1",
        meta={"inset_t_end": min(r.inset_t_end, r.t_end), "ylabel": "mean exciton number"},
    )


def fig2_params(config: ScenarioConfig, delta: float, xi: float) -> SystemParams:
    return FIG2.with_(omega0=config.system.omega0, delta=delta, xi=xi)


def run_fig2(config: ScenarioConfig, variant: str) -> CsvTable:
    """Phase of the decoherence factor for the odd/even cat, variants a, b, c.

    Base values Gamma = M = 20 meV and n0 = 10 are fixed for this figure; the
    config contributes ``omega0`` and the time grid.
    """
    if variant not in FIG2_VARIANTS:
        raise ValueError(f"fig2 variant must be one of a, b, c (got {variant!r})")
    alpha = math.sqrt(10.0)
    gt = _gt_grid(config.run.t_end, config.run.samples)
    cols, data = ["t_over_gamma_inv"], [gt]
    for delta, xi in FIG2_VARIANTS[variant]:
        p = fig2_params(config, delta, xi)
        cols.append(f"phi_xi{xi:g}" if variant == "a" else "phi")
        data.append(ob.phase_phi(p, alpha, p.time_fs(gt)))
    return CsvTable(cols, np.column_stack(data), name=f"fig2{variant}", meta={"ylabel": "phase of F (rad)"})


def run_coeffs(config: ScenarioConfig) -> CsvTable:
    p = config.system
    gt = _gt_grid(config.run.t_end, config.run.samples)
    t = p.time_fs(gt)
    cols, data = ["t_over_gamma_inv"], [gt]
    for name, fn in (("u", co.coeff_u), ("w", co.coeff_w), ("a", co.coeff_a), ("b", co.coeff_b)):
        v = fn(p, t)
        cols += [f"{name}_re", f"{name}_im"]
        data += [v.real, v.imag]
    return CsvTable(cols, np.column_stack(data), name="coeffs", meta={"ylabel": "coefficient"})


def _grid_for(config: ScenarioConfig, params: SystemParams | None = None):
    p = params or config.system
    return orc.build_bath_grid(p, config.grid.j, config.grid.w_mult * p.gamma)


def run_validate(config: ScenarioConfig, *, backend=None):
    """Cross-check every closed form against the oracles; returns (reports, error table)."""
    p, alpha, tol, run = config.system, config.alpha, config.tolerances, config.run
    reports = []

    vr = orc.solve_volterra_u(p, p.time_fs(10.0), n_samples=201, rule=run.dt_rule, backend=backend)
    reports.append(orc.compare_runs(
        lambda t: {"u": co.coeff_u(p, t), "w": co.coeff_w(p, t), "a": co.coeff_a(p, t), "b": co.coeff_b(p, t)},
        vr, {k: tol.volterra for k in "uwab"}, name="volterra",
        metadata={"step_fs": vr.step_size, "t_end_over_gamma_inv": 10.0},
    ))

    grid = _grid_for(config)
    dt = orc.max_step(p, grid, rule=run.dt_rule)
    t_end = p.time_fs(run.validate_t_end)
    c = grid.center
    gr = orc.integrate_coefficient_odes(p, grid, t_end, dt, n_samples=101, backend=backend)
    kernel_deficit = 1.0 - float(np.sum(grid.couplings**2)) / (p.m_coupling * p.gamma) if p.m_coupling > 0 else 0.0
    meta = {"j_count": grid.j_count, "window_meV": grid.window, "step_fs": gr.step_size,
            "kernel_weight_deficit": kernel_deficit}

    def analytic(t):
        uj = co.coeff_u_j(p, grid.mode_energies, grid.couplings, t)
        vj = co.coeff_v_j(p, grid.mode_energies, grid.couplings, t)
        return {"u": co.coeff_u(p, t), "w": co.coeff_w(p, t), "a": co.coeff_a(p, t), "b": co.coeff_b(p, t),
                "uj": uj, "vj": vj, "uj_res": uj[:, c], "vj_res": vj[:, c]}

    ref = analytic(gr.times)
    ref["times"] = gr.times
    oracle_paths = {"times": gr.times, "u": gr.u_path, "w": gr.w_path, "a": gr.a_path, "b": gr.b_path,
                    "uj_res": gr.uj_path[:, c], "vj_res": gr.vj_path[:, c]}
    reports.append(orc.compare_runs(ref, oracle_paths, {k: tol.grid for k in ("u", "w", "a", "b", "uj_res", "vj_res")},
                                    name="grid_coefficients", metadata=meta))

    mu = orc.integrate_mode_equations(p, grid, "coefficient_u", t_end, dt, n_samples=101, record_modes=[c], backend=backend)
    mw = orc.integrate_mode_equations(p, grid, "coefficient_w", t_end, dt, n_samples=101, record_modes=[c], backend=backend)
    reports.append(orc.compare_runs(
        ref, {"times": mu.times, "u": mu.u_path, "w": mw.w_path}, {"u": tol.grid, "w": tol.grid},
        name="grid_mode_equations", metadata=meta,
    ))

    cat = ob.CatSpec.phase_shifted(alpha, config.initial.dphi, config.initial.c1, config.initial.c2)
    tf, f_or = orc.oracle_decoherence_path(p, grid, cat, p.time_fs(min(2.0, run.validate_t_end)), dt,
                                           n_samples=41, backend=backend)
    f_an = ob.decoherence_factor(p, cat.alpha1, cat.alpha2, tf)
    reports.append(orc.compare_runs({"times": tf, "F": f_an}, {"times": tf, "F": f_or}, {"F": tol.decoherence},
                                    name="decoherence_factor", metadata={**meta, "dphi": config.initial.dphi}))

    n0 = abs(alpha) ** 2
    scale = max(n0, 1.0)
    path_res = orc.sum_rule_path(gr, alpha)
    floor_res = ob.sum_rule_residual(p, alpha, grid, gr.times)
    reports.append(orc.compare_runs(
        {"times": gr.times, "path": np.zeros_like(path_res), "grid_floor": np.zeros_like(floor_res)},
        {"times": gr.times, "path": path_res / scale, "grid_floor": floor_res / scale},
        {"path": tol.sum_rule, "grid_floor": tol.sum_rule}, name="sum_rule",
        metadata={**meta, "normalized_by": scale},
    ))

    cols = ["t_over_gamma_inv", "err_u", "err_w", "err_a", "err_b", "err_uj_res", "err_vj_res",
            "sum_rule_path", "sum_rule_grid_floor"]
    data = [gr.times / p.tau_p] + [np.abs(ref[k] - oracle_paths[k]) for k in ("u", "w", "a", "b", "uj_res", "vj_res")]
    data += [path_res, floor_res]
    table = CsvTable(cols, np.column_stack(data), name="validate", meta={"ylabel": "abs error", "logy": True})
    return reports, table


def _sweep_point(config: ScenarioConfig, axis: str, value: float):
    p = config.system
    alpha = config.alpha
    dphi = config.initial.dphi
    if axis in ("xi", "delta", "gamma", "m_coupling"):
        p = p.with_(**{axis: value})
    elif axis == "n0":
        alpha = math.sqrt(value) * (alpha / abs(alpha) if abs(alpha) > 0 else 1.0)
    elif axis == "dphi":
        dphi = value
    d = ob.cat_distance(alpha, alpha * complex(math.cos(dphi), math.sin(dphi)))
    try:
        tau_d = ob.decoherence_time(alpha, dphi, p.gamma)
    except ValueError:
        tau_d = math.inf
    try:
        n_inf = abs(co.steady_state_w(p)) ** 2
    except ValueError:
        n_inf = math.inf
    t_probe = p.time_fs(config.run.probe_t)
    return [
        value,
        tau_d,
        0.0 if math.isinf(tau_d) else 1.0,
        math.exp(-0.5 * d * d),
        n_inf,
        ob.phase_phi(p, alpha, t_probe),
        ob.decoherence_norm(p, alpha, dphi, t_probe),
    ]


def run_sweep(config: ScenarioConfig, axis: str, values) -> CsvTable:
    """One row of summary observables per value of ``axis``.

    ``tau_d_fs`` is ``inf`` (with ``tau_d_defined = 0``) when the branches
    coincide.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")
    values = [float(v) for v in values]
    if len(values) > MAX_SWEEP_POINTS:
        raise ValueError(f"at most {MAX_SWEEP_POINTS} sweep points")
    cols = [axis, "tau_d_fs", "tau_d_defined", "f_norm_inf", "steady_n", "phi_probe", "f_norm_probe"]
    rows = [_sweep_point(config, axis, v) for v in values]
    return CsvTable(cols, np.array(rows, dtype=float).reshape(-1, len(cols)), name=f"sweep_{axis}", meta={"xcol": axis})


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def emit_csv(table: CsvTable, path) -> str:
    path = os.fspath(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(table.columns) + "\n")
            for row in table.rows:
                fh.write(",".join(_fmt(float(x)) for x in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def emit_plot_script(table: CsvTable, path, csv_name: str | None = None) -> str:
    """gnuplot command file plotting every column against the first one."""
    path = os.fspath(path)
    csv_name = csv_name or f"{table.name}.csv"
    xcol = table.meta.get("xcol", table.columns[0])
    xi = table.columns.index(xcol) + 1
    lines = [
        f"# {table.name}: generated plot commands for gnuplot",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{xcol}'",
        f"set ylabel '{table.meta.get('ylabel', '')}'",
        "set terminal pngcairo size 900,600",
        f"set output '{table.name}.png'",
    ]
    if table.meta.get("logy"):
        lines.append("set logscale y")
    series = [f"'{csv_name}' using {xi}:{k + 1} with lines" for k, c in enumerate(table.columns) if k + 1 != xi]
    lines.append("plot " + ", \\\n     ".join(series))
    if "inset_t_end" in table.meta:
        lines += [
            f"set output '{table.name}_inset.png'",
            f"set xrange [0:{table.meta['inset_t_end']:.12g}]",
            "replot",
        ]
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def emit_reports_jsonl(reports, path) -> str:
    path = os.fspath(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
    return path


def write_table(table: CsvTable, out_dir, formats=("csv", "gnuplot")) -> list:
    os.makedirs(out_dir, exist_ok=True)
    written = [emit_csv(table, os.path.join(out_dir, f"{table.name}.csv"))]
    if "gnuplot" in formats:
        written.append(emit_plot_script(table, os.path.join(out_dir, f"{table.name}.gp")))
    return written
