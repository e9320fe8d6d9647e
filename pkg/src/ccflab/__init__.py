"""Pseudospectral laboratory for the 1D nonlocal transport equation with
fractional dissipation: operators with dual spectral/quadrature routes,
explicit regularity-time formulas, an integrating-factor RK4 solver with
blow-up detectors, and a resumable parameter-sweep harness."""

from .experiments import (
    InitialDatum,
    SweepPlan,
    cosine_positive,
    custom_datum,
    li_rodrigo_type,
    make_datum,
    parse_datum,
    sweep,
    von_mises_bump,
)
from .operators import (
    CalibrationError,
    CgammaCalibration,
    QuadratureConfig,
    calibrate_cgamma,
    commutator,
    cordoba_identity_residual,
    dgamma,
    frac_laplacian_quadrature,
    frac_laplacian_spectral,
    hilbert,
)
from .records import Outcome, RunRecord, append_record, config_hash, load_records
from .regularity import (
    DiagnosticsSample,
    ProbeReport,
    RegularityConstants,
    RegularitySchedule,
    alpha_policy,
    energy_inequality_probe,
    gamma_one,
    h32_barrier,
    holder_seminorm,
    make_schedule,
    sobolev_norm,
    t_local,
    t_local_exponents,
    t_star,
    v_field,
    xi_of_t,
)
from .report import ReportBundle, build_summary, emit_csv, norm_chart_svg, parse_csv, report
from .solver import (
    DiagnosticPlan,
    ModelParams,
    SolverState,
    StepControl,
    nonlinear_term,
    resolution_monitor,
    run,
    step,
)
from .torus import RealField, SpectralField, TorusGrid, dealias, derivative, forward, inverse
from .verify import VerifyRow, verify_suite

__version__ = "0.1.0"

__all__ = [
    "CalibrationError",
    "CgammaCalibration",
    "DiagnosticPlan",
    "DiagnosticsSample",
    "InitialDatum",
    "ModelParams",
    "Outcome",
    "ProbeReport",
    "QuadratureConfig",
    "RealField",
    "RegularityConstants",
    "RegularitySchedule",
    "ReportBundle",
    "RunRecord",
    "SolverState",
    "SpectralField",
    "StepControl",
    "SweepPlan",
    "TorusGrid",
    "VerifyRow",
    "alpha_policy",
    "append_record",
    "build_summary",
    "calibrate_cgamma",
    "commutator",
    "config_hash",
    "cordoba_identity_residual",
    "cosine_positive",
    "custom_datum",
    "dealias",
    "derivative",
    "dgamma",
    "emit_csv",
    "energy_inequality_probe",
    "forward",
    "frac_laplacian_quadrature",
    "frac_laplacian_spectral",
    "gamma_one",
    "h32_barrier",
    "hilbert",
    "holder_seminorm",
    "inverse",
    "li_rodrigo_type",
    "load_records",
    "make_datum",
    "make_schedule",
    "nonlinear_term",
    "norm_chart_svg",
    "parse_csv",
    "parse_datum",
    "report",
    "resolution_monitor",
    "run",
    "sobolev_norm",
    "step",
    "sweep",
    "t_local",
    "t_local_exponents",
    "t_star",
    "v_field",
    "verify_suite",
    "von_mises_bump",
    "xi_of_t",
]
