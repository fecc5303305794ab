//! Tightness sums, constants, the summation lemmas, and the tail-exponent
//! fit.

use rayon::prelude::*;
use serde_json::json;

use super::config::{
    ConstantsParams, ExperimentConfig, Expect, ExponentParams, LemmaParams, TightnessParams,
};
use super::report::{Report, Verdict};
use crate::bounds::constants::STABILITY_TOL;
use crate::bounds::{
    cond_wip_check, exponent_fit, lemma3_moment_sum, lemma_svarying_partial_sum,
    recurse_constants,
};
use crate::error::Result;
use crate::holder::tightness_sum_estimate;
use crate::rng::{CounterRng, SeedSpec};

pub fn tightness(config: &ExperimentConfig, p: &TightnessParams) -> Result<Report> {
    let mut report = Report::new(config, config.replicas);
    let mut estimates = Vec::new();
    for &j in &p.levels {
        estimates.push(tightness_sum_estimate(
            &p.generator,
            &p.modulus,
            p.eps,
            p.axis,
            j,
            &p.exponents,
            config.replicas,
            config.seed,
        )?);
    }
    let sums: Vec<f64> = estimates.iter().map(|e| e.sum).collect();
    let nonincreasing = sums.windows(2).all(|w| w[1] <= w[0]);
    let strict = sums.windows(2).all(|w| w[1] < w[0]);
    report.results = json!({
        "levels": p.levels,
        "sums": sums,
        "strictly_decreasing": strict,
        "estimates": estimates,
    });
    report.verdict(Verdict::new(
        "sum_nonincreasing_in_j",
        nonincreasing,
        format!("sums {sums:?}"),
    ));
    Ok(report)
}

pub fn constants(config: &ExperimentConfig, p: &ConstantsParams) -> Result<Report> {
    let mut report = Report::new(config, 0);
    report.tolerance("stability", STABILITY_TOL);
    let mut all = Vec::new();
    for d in 1..=p.d_max {
        all.push(recurse_constants(d)?);
    }
    let top = all.last().expect("d_max >= 1").clone();
    for lvl in &top.k_levels {
        report.verdict(Verdict::new(
            format!("k_{}_stabilized", lvl.d),
            lvl.last_decade_variation < STABILITY_TOL,
            format!("last decade variation {:.3e}", lvl.last_decade_variation),
        ));
    }
    let absorbed: Vec<bool> = all.iter().map(|c| c.a_prime <= 9f64.exp()).collect();
    report.results = json!({ "by_dimension": all, "a_prime_absorbed": absorbed });
    report.constants = Some(top);
    Ok(report)
}

pub fn lemma_checks(config: &ExperimentConfig, p: &LemmaParams) -> Result<Report> {
    let mut report = Report::new(config, 0);
    let mut sv = Vec::new();
    for case in &p.svarying {
        let r = lemma_svarying_partial_sum(&case.l, case.k_max)?;
        report.verdict(Verdict::new(
            format!("svarying_bounded_{:?}", case.l),
            r.bounded,
            format!("C_L ≈ {:.6}, trend tau {:.3}", r.c_l, r.trend_tau),
        ));
        sv.push(json!({ "case": case, "check": r }));
    }
    let mut series = Vec::new();
    for case in &p.series {
        let wip = cond_wip_check(&case.l, &case.tail, case.scale, case.j_max)?;
        let moment = lemma3_moment_sum(&case.l, &case.tail, case.scale, case.j_max);
        let moment_converged = matches!(&moment, Ok(m) if m.series.converged);
        let want = case.expect == Expect::Converge;
        let label = format!("{:?}/{:?}", case.l, case.tail);
        report.verdict(Verdict::new(
            format!("cond_wip_{label}"),
            wip.converged == want,
            format!("converged = {}, expected {:?}", wip.converged, case.expect),
        ));
        report.verdict(Verdict::new(
            format!("lemma3_{label}"),
            moment_converged == want,
            format!("converged = {moment_converged}, expected {:?}", case.expect),
        ));
        let moment = match moment {
            Ok(m) => json!(m),
            Err(e) => json!({ "error": e.to_string() }),
        };
        series.push(json!({ "case": case, "cond_wip": wip, "lemma3": moment }));
    }
    report.results = json!({ "svarying": sv, "series": series });
    Ok(report)
}

/// Samples of `∏_{q ≤ d} |N_q|`; sample `i` reads sites `(i)` of streams
/// `1..=d`.
pub fn gaussian_products(d: usize, samples: u64, seed: u64) -> Vec<f64> {
    let rng = CounterRng::new(SeedSpec::new(seed, 0));
    (0..samples)
        .into_par_iter()
        .map(|i| {
            (1..=d as u64)
                .map(|q| rng.normal(q, &[i as i64]).abs())
                .product()
        })
        .collect()
}

pub fn exponent(config: &ExperimentConfig, p: &ExponentParams) -> Result<Report> {
    let xs = gaussian_products(p.d, config.replicas, config.seed);
    let fit = exponent_fit(&xs, p.window)?;
    let mut report = Report::new(config, config.replicas);
    report.tolerance("window_lo", p.window.0);
    report.tolerance("window_hi", p.window.1);
    if let Some((lo, hi)) = p.accept {
        report.verdict(Verdict::new(
            "gamma_in_range",
            (lo..=hi).contains(&fit.gamma_hat),
            format!("gamma_hat {:.4} vs [{lo}, {hi}]", fit.gamma_hat),
        ));
    }
    report.results = json!({ "fit": fit, "reference": 2.0 / p.d as f64 });
    Ok(report)
}
