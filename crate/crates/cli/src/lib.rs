//! Front end for `fraccos`: configs, solves, verification suites and their output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod suites;

use std::path::Path;

use fraccos_core::fracalc::TimeGrid;
use fraccos_core::solver::{picard_solve, PicardOptions, SolveResult, SolverError};

pub use config::{parse_config, ConfigError, ConfigFile};
pub use suites::{run_suite, Suite, SuiteParams};

/// Success.
pub const EXIT_OK: i32 = 0;
/// Runtime, config or I/O error.
pub const EXIT_ERROR: i32 = 1;
/// The solve ran but Picard iteration did not converge, or a check failed.
pub const EXIT_NOT_CONVERGED: i32 = 2;
/// Command-line usage error.
pub const EXIT_USAGE: i32 = 64;

/// Runs the configured solve; a run that does not converge returns its last iterate.
pub fn solve(cfg: &ConfigFile) -> Result<SolveResult, SolverError> {
    let grid = TimeGrid::new(cfg.t, cfg.n_steps)?;
    let opts = PicardOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        damping: cfg.damping,
    };
    match picard_solve(&cfg.problem(), &grid, &opts) {
        Err(SolverError::NonConvergence { result, .. }) => Ok(*result),
        other => other,
    }
}

pub fn summary(r: &SolveResult) -> String {
    format!(
        "iterations={} fixed_point_residual={:.6e} volterra_residual={:.6e} max_beta_excursion={:.6e} converged={}",
        r.iterations, r.fixed_point_residual, r.volterra_residual, r.max_beta_excursion, r.converged
    )
}

/// Solves, writes the CSV and prints the summary line. Returns the exit code.
pub fn run_solve(cfg: &ConfigFile, out: &Path, nodal: bool) -> i32 {
    let result = match solve(cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let points = nodal.then_some(cfg.m_collocation);
    if let Err(e) = output::write_csv(&result, points, out) {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    println!("{}", summary(&result));
    if result.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

/// Runs a suite, prints the table, writes the CSV report. Returns the exit code.
pub fn run_verify(suite: Suite, params: &SuiteParams, out: &Path) -> i32 {
    let report = match run_suite(suite, params) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    print!("{}", output::render_table(&report));
    if let Err(e) = output::write_report(&report, out) {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}
