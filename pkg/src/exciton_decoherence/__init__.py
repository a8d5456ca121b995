"""Driven exciton in a leaky cavity: closed-form dynamics, cat-state decoherence, and numerical oracles."""
from .coefficients import (
    EvolutionCoefficients,
    coeff_a,
    coeff_b,
    coeff_u,
    coeff_u_j,
    coeff_v_j,
    coeff_w,
    coupling_g,
    evolution_coefficients,
    kernel_k,
    steady_state_w,
)
from .observables import (
    BranchState,
    CatSpec,
    DecoherenceReport,
    cat_distance,
    decoherence_factor,
    decoherence_norm,
    decoherence_report,
    decoherence_time,
    evolve_cat_state,
    evolve_product_state,
    mean_number,
    phase_phi,
    sum_rule_residual,
)
from .oracle import (
    BathGrid,
    ComparisonReport,
    OracleRun,
    build_bath_grid,
    compare_runs,
    integrate_coefficient_odes,
    integrate_mode_equations,
    oracle_decoherence_factor,
    oracle_decoherence_path,
    solve_volterra_u,
)
from .params import FIG1, FIG2, HBAR_MEV_FS, UNITS, ComplexRate, SystemParams, UnitSystem, theta

__version__ = "0.1.0"
