//! Configuration, runs, studies and report emission.

mod config;
mod pipeline;
mod study;

pub use config::{parse_config, AnalysisConfig, RunConfig};
pub use pipeline::{execute, GronwallFit, Norms, RunResult, WindowStats};
pub use study::{
    bootstrap_constant, config_hash, convergence_checks, emit_plots, energy_at, epsilon_checks, final_energy, fit_line,
    fit_loglog, geometry_checks, late_windows, linear_quantities, parse_study, quadratic_quantities, run_checks, run_study,
    sign_checks, study_root, summed_residual, time_slopes, write_windows_csv, yring_max, yring_variation, Check, Manifest,
    RunRecord, RunStatus, SlopeFit, StudyKind, StudyReport, StudySpec, RESIDUALS, YRING_TIMES,
};
