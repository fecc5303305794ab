//! Monte Carlo estimates of deviation probabilities and their comparison
//! with the bounds.

use rayon::prelude::*;
use serde_json::json;

use super::config::{shape_of, BoundSpec, DeviationParams, ExperimentConfig, VerifyParams};
use super::report::{Report, Row, Verdict};
use crate::bounds::{bounded_rhs, recurse_constants, thm1_rhs, thm2_rhs, TailModel};
use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorSpec};
use crate::lattice::{max_abs, prefix_sum, MultiIndex};
use crate::rng::SeedSpec;
use crate::stats::{mean_se, wilson, Proportion, Z95};

/// Per-replica maxima of one field.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Maxima {
    /// `max_{1≼i≼n} |S_i|`.
    pub all: f64,
    /// `|S_n|`.
    pub endpoint: f64,
    /// `max |S_i|` over `i` with `i_d = n_d`.
    pub last_face: f64,
}

pub(crate) fn replica_maxima(
    spec: &GeneratorSpec,
    shape: &MultiIndex,
    seed: u64,
    replicas: u64,
) -> Result<Vec<Maxima>> {
    let nd = *shape.coords().last().expect("d >= 1");
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let f = generate(spec, shape, SeedSpec::new(seed, r))?;
            let s = prefix_sum(&f.values);
            let v = s.values();
            Ok(Maxima {
                all: max_abs(&s),
                endpoint: v[v.len() - 1].abs(),
                last_face: v[nd - 1..]
                    .iter()
                    .step_by(nd)
                    .fold(0.0f64, |m, x| m.max(x.abs())),
            })
        })
        .collect()
}

fn exceed(values: &[f64], level: f64) -> u64 {
    values.iter().filter(|&&v| v > level).count() as u64
}

fn estimates(values: &[f64], x_grid: &[f64], norm: f64) -> Vec<Proportion> {
    let n = values.len() as u64;
    x_grid
        .iter()
        .map(|&x| wilson(exceed(values, x * norm), n, Z95))
        .collect()
}

/// `P{max_{1≼i≼n} |S_i| > x √|n|}` for every `x` in the grid.
pub fn mc_deviation(config: &ExperimentConfig, p: &DeviationParams) -> Result<Report> {
    let shape = shape_of(&p.generator, &p.shape)?;
    let m = replica_maxima(&p.generator, &shape, config.seed, config.replicas)?;
    let all: Vec<f64> = m.iter().map(|r| r.all).collect();
    let norm = (shape.volume() as f64).sqrt();
    let est = estimates(&all, &p.x_grid, norm);

    let mut report = Report::new(config, config.replicas);
    report.tolerance("z", Z95);
    for (&x, e) in p.x_grid.iter().zip(&est) {
        report.table.push(Row {
            x,
            estimate: e.estimate,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            bound: None,
            verdict: "n/a".into(),
        });
    }
    let monotone = est.windows(2).all(|w| w[1].successes <= w[0].successes);
    report.results = json!({
        "event": "max |S_i| > x sqrt|n|",
        "estimates": est,
    });
    report.verdict(Verdict::new(
        "nonincreasing_in_x",
        monotone,
        "exceedance counts over common replicas",
    ));
    Ok(report)
}

/// Overlays the Monte Carlo estimates with a bound. A grid point counts
/// toward the verdict only where the bound is below 1.
pub fn verify_bound(config: &ExperimentConfig, p: &VerifyParams) -> Result<Report> {
    let gen = &p.generator;
    let shape = shape_of(gen, &p.shape)?;
    let d = gen.d;
    let c = recurse_constants(d)?;
    let volume = shape.volume() as f64;
    let m = replica_maxima(gen, &shape, config.seed, config.replicas)?;

    let (values, norm, event): (Vec<f64>, f64, &str) = match p.bound {
        BoundSpec::Thm2 { .. } => (
            m.iter().map(|r| r.endpoint).collect(),
            volume,
            "|S_n| > x |n|",
        ),
        _ => (
            m.iter().map(|r| r.all).collect(),
            volume.sqrt(),
            "max |S_i| > x sqrt|n|",
        ),
    };
    let est = estimates(&values, &p.x_grid, norm);

    let mut bounds = Vec::with_capacity(p.x_grid.len());
    let mut extra = serde_json::Map::new();
    match &p.bound {
        BoundSpec::Bounded => {
            let k = gen.bound().ok_or_else(|| {
                Error::InvalidInput("the bounded form needs an a.s. bounded generator".into())
            })?;
            let mut threshold = f64::NAN;
            for &x in &p.x_grid {
                let b = bounded_rhs(x, k, &c)?;
                threshold = b.threshold;
                bounds.push(if b.valid { b.value } else { 1.0 });
            }
            extra.insert("k".into(), json!(k));
            extra.insert("threshold".into(), json!(threshold));
        }
        BoundSpec::Thm1 { y, tail } => {
            let tail = match tail {
                Some(t) => t.clone(),
                None => TailModel::for_generator(gen).ok_or_else(|| {
                    Error::InvalidInput("generator has no closed-form tail; give one".into())
                })?,
            };
            let y = match (y, gen.bound()) {
                (Some(y), _) => *y,
                (None, Some(k)) if k > 0.0 => k / c.c,
                _ => return Err(Error::InvalidInput("y is required for this generator".into())),
            };
            for &x in &p.x_grid {
                bounds.push(thm1_rhs(x, y, &tail, &c)?);
            }
            extra.insert("y".into(), json!(y));
            extra.insert("tail".into(), serde_json::to_value(&tail).expect("tail serialises"));
        }
        BoundSpec::Thm2 { gamma } => {
            let mut details = Vec::new();
            for &x in &p.x_grid {
                let r = thm2_rhs(x, &shape, *gamma, d)?;
                bounds.push(r.value);
                details.push(r);
            }
            extra.insert("thm2".into(), serde_json::to_value(&details).expect("serialises"));
        }
    }

    let mut report = Report::new(config, config.replicas);
    report.constants = Some(c);
    report.tolerance("z", Z95);
    report.tolerance("quad_rel", crate::bounds::rhs::RHS_QUAD.rel_tol);
    let mut informative = Vec::new();
    let mut violations = Vec::new();
    for ((&x, e), &b) in p.x_grid.iter().zip(&est).zip(&bounds) {
        let verdict = if b >= 1.0 {
            "vacuous"
        } else if e.ci_hi <= b {
            informative.push(x);
            "pass"
        } else {
            informative.push(x);
            violations.push(x);
            "fail"
        };
        report.table.push(Row {
            x,
            estimate: e.estimate,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            bound: Some(b),
            verdict: verdict.into(),
        });
    }
    extra.insert("event".into(), json!(event));
    extra.insert("estimates".into(), json!(est));
    extra.insert("bounds".into(), json!(bounds));
    extra.insert("informative_x".into(), json!(informative));
    report.results = serde_json::Value::Object(extra);
    report.verdict(Verdict::new(
        "upper_ci_below_bound",
        violations.is_empty(),
        format!(
            "{} informative grid points, violations at {violations:?}",
            informative.len()
        ),
    ));
    Ok(report)
}

/// `P{M > x√|n|}` against `∫_1^∞ P{M' > x√|n| u/2} du`, where `M'` is the
/// maximum over the face `i_d = n_d`.
///
/// The right side equals `E max(0, 2M'/(x√|n|) - 1)` and is estimated by a
/// sample mean. A grid point passes when the lower Wilson limit of the left
/// side is at most the mean plus `z` standard errors.
pub fn induction_step_check(config: &ExperimentConfig, p: &DeviationParams) -> Result<Report> {
    if p.generator.d < 2 {
        return Err(Error::InvalidInput("the induction step needs d >= 2".into()));
    }
    let shape = shape_of(&p.generator, &p.shape)?;
    let m = replica_maxima(&p.generator, &shape, config.seed, config.replicas)?;
    let norm = (shape.volume() as f64).sqrt();
    let all: Vec<f64> = m.iter().map(|r| r.all).collect();
    let lhs = estimates(&all, &p.x_grid, norm);

    let mut report = Report::new(config, config.replicas);
    report.tolerance("z", Z95);
    let mut rhs_out = Vec::new();
    let mut failures = Vec::new();
    for (&x, e) in p.x_grid.iter().zip(&lhs) {
        let level = x * norm;
        let terms: Vec<f64> = m
            .iter()
            .map(|r| (2.0 * r.last_face / level - 1.0).max(0.0))
            .collect();
        let (mean, se) = mean_se(&terms);
        let upper = mean + Z95 * se;
        let ok = e.ci_lo <= upper;
        if !ok {
            failures.push(x);
        }
        rhs_out.push(json!({"x": x, "mean": mean, "std_err": se, "upper": upper}));
        report.table.push(Row {
            x,
            estimate: e.estimate,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            bound: Some(mean),
            verdict: if ok { "pass" } else { "fail" }.into(),
        });
    }
    report.results = json!({"lhs": lhs, "rhs": rhs_out});
    report.verdict(Verdict::new(
        "doob_step",
        failures.is_empty(),
        format!("failures at {failures:?}"),
    ));
    Ok(report)
}
