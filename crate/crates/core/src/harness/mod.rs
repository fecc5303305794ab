//! Reproducible Monte Carlo experiments with machine-readable reports.
//!
//! Replica `r` of an experiment with master seed `s` always draws from
//! `SeedSpec::new(s, r)`, and every reduction runs in replica order, so the
//! thread count never changes a reported number.

mod checks;
pub mod config;
mod deviation;
mod gaussian;
pub mod report;

use std::time::Instant;

pub use checks::gaussian_products;
pub use config::{BoundSpec, Experiment, ExperimentConfig};
pub use deviation::{induction_step_check, mc_deviation, verify_bound};
pub use gaussian::{
    brownian_sheet_sim, fdd_compare, holder_norm_of_wn, sheet_cov, spike_field, SheetSample,
    KS_COEFF, KS_DISCRETE, MEDIAN_DRIFT, SHEET_SE,
};
pub use report::{Report, Row, RunInfo, Verdict};

use crate::bounds::constants::MAX_DIM;
use crate::bounds::recurse_constants;
use crate::error::{Error, Result};

fn dispatch(config: &ExperimentConfig) -> Result<Report> {
    match &config.experiment {
        Experiment::Deviation(p) => mc_deviation(config, p),
        Experiment::VerifyBound(p) => verify_bound(config, p),
        Experiment::InductionCheck(p) => induction_step_check(config, p),
        Experiment::Tightness(p) => checks::tightness(config, p),
        Experiment::Fdd(p) => fdd_compare(config, p),
        Experiment::SheetCov(p) => sheet_cov(config, p),
        Experiment::HolderNorm(p) => holder_norm_of_wn(config, p),
        Experiment::Constants(p) => checks::constants(config, p),
        Experiment::LemmaChecks(p) => checks::lemma_checks(config, p),
        Experiment::ExponentFit(p) => checks::exponent(config, p),
    }
}

/// Runs an experiment on a dedicated pool of `threads` workers (the rayon
/// default when `None`).
pub fn run(config: &ExperimentConfig, threads: Option<usize>) -> Result<Report> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidInput("threads must be >= 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let mut report = pool.install(|| dispatch(config))?;
    if report.constants.is_none() {
        if let Some(d) = config.experiment.dimension().filter(|d| (1..=MAX_DIM).contains(d)) {
            report.constants = Some(recurse_constants(d)?);
        }
    }
    report.run_info = Some(RunInfo {
        timestamp: chrono::Utc::now().to_rfc3339(),
        wall_clock_ms: start.elapsed().as_millis() as u64,
        threads: pool.current_num_threads(),
    });
    Ok(report)
}
