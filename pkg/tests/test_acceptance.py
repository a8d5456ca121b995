"""Acceptance suite: one PASS/FAIL line per criterion, printed in the pytest summary.

Run alone with ``pytest tests/test_acceptance.py -v``.  The narrow-linewidth
grid case of criterion 2 is expected to fail (bath truncation, see README).
"""
import math
import time

import numpy as np
import pytest

from exciton_decoherence import (
    FIG1,
    FIG2,
    CatSpec,
    SystemParams,
    build_bath_grid,
    coeff_a,
    coeff_b,
    coeff_u,
    coeff_u_j,
    coeff_v_j,
    coeff_w,
    decoherence_factor,
    decoherence_norm,
    decoherence_report,
    decoherence_time,
    integrate_coefficient_odes,
    integrate_mode_equations,
    oracle_decoherence_path,
    phase_phi,
    solve_volterra_u,
    steady_state_w,
)
from exciton_decoherence.config import ScenarioConfig
from exciton_decoherence.harness import run_fig1, run_fig2, run_sweep
from exciton_decoherence.oracle import max_step, sum_rule_path

pytestmark = pytest.mark.filterwarnings("ignore::exciton_decoherence.params.ParameterWarning")

ALPHA = math.sqrt(10.0)
FIG2B = FIG2.with_(delta=0.5)


def test_c01_volterra_cross_validation(criterion):
    p = FIG2
    t0 = time.perf_counter()
    run = solve_volterra_u(p, p.time_fs(10.0), n_samples=1001)
    elapsed = time.perf_counter() - t0
    err = float(np.max(np.abs(run.u_path - coeff_u(p, run.times))))
    criterion("C1 u vs Volterra, G=M=20, t<=10/G", err < 1e-6 and elapsed < 10,
              f"max|err|={err:.2e} (<1e-6), {elapsed:.2f}s (<10s)")


def _grid_errors(p, t_gamma=5.0):
    grid = build_bath_grid(p, 4001, 50 * p.gamma)
    run = integrate_coefficient_odes(p, grid, p.time_fs(t_gamma), n_samples=101)
    t, c = run.times, grid.center
    om, g = grid.mode_energies, grid.couplings
    ref = {
        "u": coeff_u(p, t), "w": coeff_w(p, t), "A": coeff_a(p, t), "B": coeff_b(p, t),
        "u_j": coeff_u_j(p, om[c], g[c], t), "v_j": coeff_v_j(p, om, g, t),
    }
    got = {"u": run.u_path, "w": run.w_path, "A": run.a_path, "B": run.b_path,
           "u_j": run.uj_path[:, c], "v_j": run.vj_path}
    return {k: float(np.max(np.abs(ref[k] - got[k]))) for k in ref}


_C2_CLOCK = {}


@pytest.mark.parametrize("label,params", [("G=M=20", FIG2), ("G=0.05 M=20", FIG1)])
def test_c02_grid_oracle(criterion, label, params):
    t0 = time.perf_counter()
    errs = _grid_errors(params)
    _C2_CLOCK[label] = time.perf_counter() - t0
    total = sum(_C2_CLOCK.values())
    worst = max(errs, key=errs.get)
    detail = ", ".join(f"{k}={v:.2e}" for k, v in errs.items())
    criterion(f"C2 grid oracle J=4001 W=50G, {label}, t<=5/G",
              errs[worst] < 5e-3 and total < 60,
              f"{detail} (each <5e-3); cumulative {total:.1f}s (<60s)")


def test_c03_norm_conservation(criterion):
    p, alpha = FIG1, ALPHA
    res = []
    for j, w in ((101, 20), (1001, 30), (4001, 50)):
        grid = build_bath_grid(p, j, w * p.gamma)
        run = integrate_coefficient_odes(p, grid, p.time_fs(5.0), n_samples=101)
        res.append(float(np.max(np.abs(sum_rule_path(run, alpha)))) / alpha**2)
    ok = res[-1] < 1e-3 and res[0] > res[1] > res[2]
    criterion("C3 sum rule along oracle path, default grid + refinement", ok,
              "residual/|a|^2 over (101,20G)->(1001,30G)->(4001,50G): "
              + " > ".join(f"{r:.2e}" for r in res) + " (last <1e-3, monotone)")


@pytest.mark.parametrize("dphi_label,dphi", [("pi/4", math.pi / 4), ("pi/2", math.pi / 2), ("pi", math.pi)])
@pytest.mark.parametrize("delta", [0.0, 0.5])
def test_c04_decoherence_factor(criterion, dphi_label, dphi, delta):
    p = FIG2.with_(delta=delta)
    grid = build_bath_grid(p, 4001, 50 * p.gamma)
    cat = CatSpec.phase_shifted(ALPHA, dphi)
    t, f_or = oracle_decoherence_path(p, grid, cat, p.time_fs(2.0), n_samples=41)
    err = float(np.max(np.abs(f_or - decoherence_factor(p, cat.alpha1, cat.alpha2, t))))
    criterion(f"C4 F vs overlap oracle, G=M=20 delta={delta}, dphi={dphi_label}, t<=2/G",
              err < 1e-3, f"max|dF|={err:.2e} (<1e-3)")


def test_c05_exact_norm_identity(criterion):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        p = SystemParams(gamma=float(rng.uniform(0.02, 40)), m_coupling=float(rng.uniform(0, 40)),
                         xi=float(rng.uniform(0, 20)), delta=float(rng.uniform(-2, 2)))
        a1, a2 = complex(*rng.normal(0, 2, 2)), complex(*rng.normal(0, 2, 2))
        t = p.time_fs(float(rng.uniform(0, 10)))
        f = decoherence_factor(p, a1, a2, t)
        worst = max(worst, abs(abs(f) - math.exp(-0.5 * abs(a1 - a2) ** 2 * (1 - abs(coeff_u(p, t)) ** 2))))
    late = 0.0
    for dphi in (math.pi / 4, math.pi / 2, math.pi):
        for p in (FIG1, FIG2):
            d = 2 * ALPHA * math.sin(dphi / 2)
            late = max(late, abs(decoherence_norm(p, ALPHA, dphi, p.time_fs(50.0)) - math.exp(-d * d / 2)))
    criterion("C5 |F| = exp[-D^2(1-|u|^2)/2], 100 samples; |F| at 50/G", worst < 1e-12 and late < 1e-6,
              f"identity {worst:.1e} (<1e-12), late-time {late:.1e} (<1e-6)")


def test_c06_drive_independence(criterion):
    t = FIG1.time_fs(np.linspace(0, 10, 201))
    same = all(
        decoherence_report(FIG1.with_(xi=0.0), CatSpec.phase_shifted(ALPHA, dphi), tk).f_norm
        == decoherence_report(FIG1.with_(xi=10.0), CatSpec.phase_shifted(ALPHA, dphi), tk).f_norm
        for dphi in (math.pi / 3, math.pi) for tk in t
    )
    same = same and np.array_equal(decoherence_norm(FIG1.with_(xi=0.0), ALPHA, 1.0, t),
                                   decoherence_norm(FIG1.with_(xi=10.0), ALPHA, 1.0, t))
    tau = run_sweep(ScenarioConfig(), "xi", [0.0, 2.5, 5.0, 10.0]).column("tau_d_fs")
    flat = bool(np.all(tau == tau[0]))
    criterion("C6 |F| byte-identical xi=0 vs xi=10; tau_d flat over xi sweep", same and flat,
              f"norms identical={same}, tau_d constant={flat} ({tau[0]:.6g} fs)")


def test_c07_phase_control(criterion):
    cfg = ScenarioConfig()
    a, b, c = run_fig2(cfg, "a"), run_fig2(cfg, "b"), run_fig2(cfg, "c")
    doubling = bool(np.array_equal(a.column("phi_xi10"), 2 * a.column("phi_xi5")))
    start = all(tab.rows[0, k] == 0 for tab in (a, b, c) for k in range(1, tab.rows.shape[1]))
    t_probe = FIG2.time_fs(1.0)
    pb = FIG2.with_(delta=0.5)
    pc = FIG2.with_(delta=1.0)
    gap = abs(phase_phi(pb, ALPHA, t_probe) - phase_phi(pc, ALPHA, t_probe))
    criterion("C7 phi(2xi)=2phi(xi) exactly, phi(0)=0, delta 0.5 vs 1 differ", doubling and start and gap > 1e-6,
              f"doubling exact={doubling}, phi(0)=0 {start}, |phi_b-phi_c| at 1/G = {gap:.3e}")


def test_c08_tau_scalings(criterion):
    cfg = ScenarioConfig()
    tn = run_sweep(cfg, "n0", [1.0, 4.0, 16.0]).column("tau_d_fs")
    tg = run_sweep(cfg, "gamma", [0.05, 0.1, 0.2]).column("tau_d_fs")
    dphis = [math.pi / 3, math.pi / 2, math.pi]
    td = run_sweep(cfg, "dphi", dphis).column("tau_d_fs")
    rel = max(
        abs(tn[0] / tn[1] - 4), abs(tn[1] / tn[2] - 4),
        abs(tg[0] / tg[1] - 2), abs(tg[1] / tg[2] - 2),
        *(abs(td[k] * math.sin(dphis[k] / 2) ** 2 / (td[-1]) - 1) for k in range(3)),
    )
    direct = abs(decoherence_time(ALPHA, math.pi, 0.05) - 658.2119569 / 0.05 / 20) / decoherence_time(ALPHA, math.pi, 0.05)
    criterion("C8 tau_d ~ 1/n0, 1/G, 1/sin^2(dphi/2)", rel < 1e-13 and direct < 1e-15,
              f"worst ratio deviation {rel:.1e} (rounding only, <1e-13)")


def test_c09_fig1_shape(criterion):
    tab = run_fig1(ScenarioConfig())
    gt = tab.column("t_over_gamma_inv")
    und, drv = tab.column("mean_n_undriven"), tab.column("mean_n_driven")
    target = abs(steady_state_w(FIG1)) ** 2
    decays = und[-1] < 1e-2
    plateau = abs(drv[-1] - target) / target
    start = drv[0] == 10.0 and und[0] == 10.0
    criterion("C9 fig1 table: undriven decays, driven plateau |w_inf|^2, n(0)=10",
              decays and plateau < 0.01 and start and gt[-1] == 50,
              f"undriven(50/G)={und[-1]:.2e} (<1e-2), plateau dev {plateau:.2e} (<1%), n(0)={float(drv[0])!r}")


def _order(solve, dt0):
    sols = [solve(dt0 / 2**k) for k in range(4)]
    diffs = [np.max(np.abs(sols[k] - sols[k + 1])) for k in range(3)]
    return float(np.polyfit(np.log([1.0, 0.5, 0.25]), np.log(diffs), 1)[0])


def test_c10_numerical_hygiene(criterion):
    p = FIG1
    grid = build_bath_grid(p, 101, 20 * p.gamma)
    t_end = p.time_fs(1.0)

    def modes(dt):
        r = integrate_mode_equations(p, grid, "coefficient_w", t_end, dt, n_samples=11, record_modes=[grid.center])
        return np.concatenate([r.w_path, r.a_path, r.field_path[:, 0]])

    def volterra(dt):
        r = solve_volterra_u(p, t_end, dt, n_samples=11)
        return np.concatenate([r.u_path, r.w_path])

    k_modes = _order(modes, max_step(p, grid))
    k_vol = _order(volterra, max_step(p))
    g = 20.0
    lo, hi = SystemParams(gamma=g, m_coupling=g / 4 - 1e-8 / g), SystemParams(gamma=g, m_coupling=g / 4 + 1e-8 / g)
    tt = lo.time_fs(np.linspace(0, 10, 2001))
    jump = float(np.max(np.abs(np.abs(coeff_u(lo, tt)) - np.abs(coeff_u(hi, tt)))))
    criterion("C10 step-halving order >= 3.5; critical continuity", k_modes >= 3.5 and k_vol >= 3.5 and jump < 1e-6,
              f"order modes={k_modes:.2f}, volterra={k_vol:.2f}; |u| jump at MG=G^2/4+-1e-8: {jump:.1e} (<1e-6)")
