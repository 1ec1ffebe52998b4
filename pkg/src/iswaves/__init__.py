"""Pseudo-spectral workbench for solitary waves of two-layer internal wave
models: admissibility arithmetic, Fourier-multiplier operators, variational
functionals, solitary-wave solvers, decay-kernel oracles, and time evolution.
"""

from .params import (
    AdmissibilityReport,
    DecayRates,
    DegenerateParameterError,
    InadmissibleParameterError,
    ModelParams,
    admissibility_report,
    compute_decay_rates,
    compute_f_min,
    compute_M,
    compute_mu2_threshold,
    compute_speed_window,
    validate_bfd_params,
)
from .spectral import (
    Grid,
    GridMismatchError,
    Multiplier,
    RealField,
    SingularOperatorError,
    WavePair,
    apply_multiplier,
    invert_multiplier,
    make_grid,
    make_multiplier,
    symbol_J,
    symbol_L,
    symbol_bo_ops,
    symbol_ilw_ops,
)
from .functionals import (
    constraint_F,
    energy_E,
    estimate_I_lambda,
    hamiltonian_H,
    quadratic_form_check,
)
from .solvers import (
    ConvergenceError,
    SolitaryBranch,
    SolverConfig,
    assemble_bo_pair,
    constrained_minimize,
    continue_in_c,
    continue_in_mu2,
    load_branch,
    newton_solve,
    petviashvili_ground_state,
    residual_norm,
    save_branch,
    solve_bfd_reduced,
    system_residual,
)
from .kernels import (
    DecayReport,
    fit_algebraic_tail,
    fit_exponential_tail,
    kernel_fft_oracle,
    kernel_K1,
    kernel_K2_quadrature,
    kernel_K3_series,
    kernel_K_quadrature,
)
from .evolution import (
    BlowUpError,
    EvolutionState,
    check_global_criterion,
    make_stepper,
    rhs,
    run,
    step,
    suggest_dt,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "BlowUpError",
    "ConvergenceError",
    "DecayRates",
    "DecayReport",
    "DegenerateParameterError",
    "EvolutionState",
    "Grid",
    "GridMismatchError",
    "InadmissibleParameterError",
    "ModelParams",
    "Multiplier",
    "RealField",
    "SingularOperatorError",
    "SolitaryBranch",
    "SolverConfig",
    "WavePair",
    "admissibility_report",
    "apply_multiplier",
    "assemble_bo_pair",
    "check_global_criterion",
    "compute_M",
    "compute_decay_rates",
    "compute_f_min",
    "compute_mu2_threshold",
    "compute_speed_window",
    "constrained_minimize",
    "constraint_F",
    "continue_in_c",
    "continue_in_mu2",
    "energy_E",
    "estimate_I_lambda",
    "fit_algebraic_tail",
    "fit_exponential_tail",
    "hamiltonian_H",
    "invert_multiplier",
    "kernel_K1",
    "kernel_K2_quadrature",
    "kernel_K3_series",
    "kernel_K_quadrature",
    "kernel_fft_oracle",
    "load_branch",
    "make_grid",
    "make_multiplier",
    "make_stepper",
    "newton_solve",
    "petviashvili_ground_state",
    "quadratic_form_check",
    "residual_norm",
    "rhs",
    "run",
    "save_branch",
    "solve_bfd_reduced",
    "step",
    "suggest_dt",
    "symbol_J",
    "symbol_L",
    "symbol_bo_ops",
    "symbol_ilw_ops",
    "system_residual",
    "validate_bfd_params",
]
