//! Experiments around the Gaussian limit: the Brownian sheet, finite
//! dimensional distributions of `W_n`, and Hölder norms of `W_n`.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::{shape_of, ExperimentConfig, FddParams, HolderParams, SheetParams};
use super::report::{Report, Row, Verdict};
use crate::error::{Error, Result};
use crate::generators::{generate, BaseDist, GeneratorSpec};
use crate::holder::seq_norm;
use crate::lattice::{prefix_sum, LatticeArray, MultiIndex};
use crate::rng::SeedSpec;
use crate::stats::{ks_statistic, mean_se, normal_cdf, quantile};
use crate::sum_process::PartialSumProcess;

/// Largest distance of `n t` from an integer still treated as a node.
const NODE_TOL: f64 = 1e-9;
/// Standard errors allowed between a sheet covariance and `∏ min`.
pub const SHEET_SE: f64 = 3.0;
/// Asymptotic 95% Kolmogorov–Smirnov coefficient.
pub const KS_COEFF: f64 = 1.36;
/// Allowance for the lattice law of `W_n(t)`.
pub const KS_DISCRETE: f64 = 0.015;
/// Relative drift tolerated between the first and last median norm.
pub const MEDIAN_DRIFT: f64 = 0.2;

/// A Brownian sheet sampled at the nodes `k / r` of a grid.
#[derive(Clone, Debug)]
pub struct SheetSample {
    /// `values[k] = W(k/r)` for `1 ≼ k ≼ r`.
    pub values: LatticeArray,
}

fn node_index(resolution: &[usize], t: &[f64]) -> Result<Vec<usize>> {
    if t.len() != resolution.len() {
        return Err(Error::InvalidInput(format!(
            "point {t:?} has dimension {}, expected {}",
            t.len(),
            resolution.len()
        )));
    }
    t.iter()
        .zip(resolution)
        .map(|(&tq, &r)| {
            let s = tq * r as f64;
            let k = s.round();
            if !(0.0..=1.0).contains(&tq) || (s - k).abs() > NODE_TOL {
                Err(Error::InvalidInput(format!("{t:?} is not a grid node for {resolution:?}")))
            } else {
                Ok(k as usize)
            }
        })
        .collect()
}

impl SheetSample {
    /// `W(t)` at a grid node; zero when some `t_q = 0`.
    pub fn at(&self, t: &[f64]) -> Result<f64> {
        let k = node_index(self.values.shape().coords(), t)?;
        Ok(self.values.get_or_zero(&k))
    }
}

/// Brownian sheet at grid resolution `r`: i.i.d. centered Gaussian cell
/// increments with variance equal to the cell volume, prefix-summed.
pub fn brownian_sheet_sim(resolution: &[usize], seed: SeedSpec) -> Result<SheetSample> {
    if resolution.is_empty() || resolution.iter().any(|&r| r < 2) {
        return Err(Error::InvalidInput(format!(
            "resolution must be >= 2 per axis, got {resolution:?}"
        )));
    }
    let shape = MultiIndex::new(resolution.to_vec())?;
    let sigma = (1.0 / shape.volume() as f64).sqrt();
    let spec = GeneratorSpec::iid(BaseDist::Gaussian { sigma }, resolution.len())?;
    let cells = generate(&spec, &shape, seed)?;
    Ok(SheetSample {
        values: prefix_sum(&cells.values),
    })
}

#[derive(Serialize)]
struct PairCov {
    t: Vec<f64>,
    t_prime: Vec<f64>,
    expected: f64,
    estimate: f64,
    std_err: f64,
    z: f64,
}

/// Empirical `E[W(t) W(t')]` against `∏ min(t_q, t'_q)` over replicas.
pub fn sheet_cov(config: &ExperimentConfig, p: &SheetParams) -> Result<Report> {
    let res = &p.resolution;
    for (t, u) in &p.pairs {
        node_index(res, t)?;
        node_index(res, u)?;
    }
    let products: Vec<Vec<f64>> = (0..config.replicas)
        .into_par_iter()
        .map(|r| {
            let w = brownian_sheet_sim(res, SeedSpec::new(config.seed, r))?;
            p.pairs
                .iter()
                .map(|(t, u)| Ok(w.at(t)? * w.at(u)?))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new(config, config.replicas);
    report.tolerance("max_std_errors", SHEET_SE);
    let mut out = Vec::new();
    let mut bad = Vec::new();
    for (i, (t, u)) in p.pairs.iter().enumerate() {
        let xs: Vec<f64> = products.iter().map(|v| v[i]).collect();
        let (estimate, std_err) = mean_se(&xs);
        let expected: f64 = t.iter().zip(u).map(|(a, b)| a.min(*b)).product();
        let z = if std_err > 0.0 {
            (estimate - expected) / std_err
        } else if estimate == expected {
            0.0
        } else {
            f64::INFINITY
        };
        if !(z.abs() <= SHEET_SE) {
            bad.push(i);
        }
        out.push(PairCov {
            t: t.clone(),
            t_prime: u.clone(),
            expected,
            estimate,
            std_err,
            z,
        });
    }
    report.results = json!({ "pairs": out });
    report.verdict(Verdict::new(
        "covariance_within_se",
        bad.is_empty(),
        format!("pairs outside {SHEET_SE} SE: {bad:?}"),
    ));
    Ok(report)
}

#[derive(Serialize)]
struct FddPoint {
    t: Vec<f64>,
    variance: f64,
    ks: f64,
    threshold: f64,
    pass: bool,
}

/// Kolmogorov–Smirnov distance between replicas of `W_n(t)` and
/// `N(0, σ² ∏ t_q)` at grid points `t`.
pub fn fdd_compare(config: &ExperimentConfig, p: &FddParams) -> Result<Report> {
    let shape = shape_of(&p.generator, &p.shape)?;
    for t in &p.points {
        let k = node_index(shape.coords(), t)?;
        if k.contains(&0) {
            return Err(Error::InvalidInput(format!("{t:?} has a zero coordinate")));
        }
    }
    let values: Vec<Vec<f64>> = (0..config.replicas)
        .into_par_iter()
        .map(|r| {
            let f = generate(&p.generator, &shape, SeedSpec::new(config.seed, r))?;
            let w = PartialSumProcess::new(f.values);
            p.points.iter().map(|t| w.eval(t)).collect()
        })
        .collect::<Result<_>>()?;

    let threshold = KS_COEFF / (config.replicas as f64).sqrt() + KS_DISCRETE;
    let sigma2 = p.generator.site_variance();
    let mut report = Report::new(config, config.replicas);
    report.tolerance("ks_coeff", KS_COEFF);
    report.tolerance("ks_discrete", KS_DISCRETE);
    let mut out = Vec::new();
    for (i, t) in p.points.iter().enumerate() {
        let xs: Vec<f64> = values.iter().map(|v| v[i]).collect();
        let variance = sigma2 * t.iter().product::<f64>();
        let sd = variance.sqrt();
        let ks = ks_statistic(&xs, |x| normal_cdf(x / sd));
        let pass = ks <= threshold;
        report.table.push(Row {
            x: t.iter().product(),
            estimate: ks,
            ci_lo: ks,
            ci_hi: ks,
            bound: Some(threshold),
            verdict: if pass { "pass" } else { "fail" }.into(),
        });
        report.verdict(Verdict::new(
            format!("ks_at_{t:?}"),
            pass,
            format!("KS {ks:.5} vs {threshold:.5}"),
        ));
        out.push(FddPoint {
            t: t.clone(),
            variance,
            ks,
            threshold,
            pass,
        });
    }
    report.results = json!({ "points": out });
    Ok(report)
}

/// Field with a single nonzero site `X_i = max_q n_q` at the centre cell.
pub fn spike_field(shape: &MultiIndex) -> Result<LatticeArray> {
    let n = shape.coords();
    let centre: Vec<usize> = n.iter().map(|&k| k.div_ceil(2)).collect();
    let height = *n.iter().max().expect("d >= 1") as f64;
    LatticeArray::from_fn(shape.clone(), |i| if i == centre.as_slice() { height } else { 0.0 })
}

#[derive(Serialize)]
struct NormSummary {
    shape: Vec<usize>,
    j_max: u32,
    median: f64,
    q10: f64,
    q90: f64,
    max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    spike: Option<f64>,
}

fn j_max_for(shape: &[usize]) -> u32 {
    let n = *shape.iter().max().expect("d >= 1");
    usize::BITS - (n - 1).leading_zeros()
}

/// Distribution of `‖W_n‖_ρ^seq` over replicas for each shape.
pub fn holder_norm_of_wn(config: &ExperimentConfig, p: &HolderParams) -> Result<Report> {
    let rho = &p.modulus;
    if rho.d != p.generator.d {
        return Err(Error::InvalidInput(format!(
            "modulus dimension {} differs from generator dimension {}",
            rho.d, p.generator.d
        )));
    }
    let mut report = Report::new(config, config.replicas);
    report.tolerance("median_drift", MEDIAN_DRIFT);
    let mut summaries = Vec::new();
    for s in &p.shapes {
        let shape = shape_of(&p.generator, s)?;
        let j_max = p.j_max.unwrap_or_else(|| j_max_for(s));
        let mut norms: Vec<f64> = (0..config.replicas)
            .into_par_iter()
            .map(|r| {
                let f = generate(&p.generator, &shape, SeedSpec::new(config.seed, r))?;
                let w = PartialSumProcess::new(f.values);
                Ok(seq_norm(|t| w.eval(t), rho, j_max)?.value)
            })
            .collect::<Result<_>>()?;
        norms.sort_by(f64::total_cmp);
        let spike = if p.spike_control {
            let w = PartialSumProcess::new(spike_field(&shape)?);
            Some(seq_norm(|t| w.eval(t), rho, j_max)?.value)
        } else {
            None
        };
        summaries.push(NormSummary {
            shape: s.clone(),
            j_max,
            median: quantile(&norms, 0.5),
            q10: quantile(&norms, 0.1),
            q90: quantile(&norms, 0.9),
            max: *norms.last().expect("replicas >= 1"),
            spike,
        });
    }
    let first = summaries.first().expect("validated").median;
    let last = summaries.last().expect("validated").median;
    let drift = if first > 0.0 { last / first - 1.0 } else { 0.0 };
    report.verdict(Verdict::new(
        "median_stable",
        drift.abs() <= MEDIAN_DRIFT,
        format!("median drift {drift:+.4}"),
    ));
    if p.spike_control {
        let spikes: Vec<f64> = summaries.iter().filter_map(|s| s.spike).collect();
        let grows = spikes.windows(2).all(|w| w[1] > w[0]);
        report.verdict(Verdict::new(
            "spike_norm_grows",
            grows,
            format!("spike norms {spikes:?}"),
        ));
    }
    report.results = json!({ "shapes": summaries });
    Ok(report)
}
