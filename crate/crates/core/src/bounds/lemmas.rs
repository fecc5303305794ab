//! Numerical checks of the slowly-varying summation lemmas, the tail
//! condition of the invariance principle, and the tail-exponent fit.

use serde::{Deserialize, Serialize};

use super::tail::TailModel;
use crate::error::{Error, Result};
use crate::holder::SlowlyVarying;
use crate::quad::integrate_to_infinity;
use crate::stats::kendall_tau_trend;

use super::rhs::RHS_QUAD;

/// A series reported through its partial sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesCheck {
    /// `partial_sums[J-1] = Σ_{j ≤ J} term_j`.
    pub partial_sums: Vec<f64>,
    /// The last ten partial sums moved the total by less than `1e-12` of it.
    pub converged: bool,
}

const CONVERGENCE_REL: f64 = 1e-12;
const LAST_DECADE: usize = 10;

fn series(terms: impl IntoIterator<Item = f64>) -> SeriesCheck {
    let mut partial_sums = Vec::new();
    let mut s = 0.0;
    for t in terms {
        s += t;
        partial_sums.push(s);
    }
    let n = partial_sums.len();
    let converged = if n <= LAST_DECADE {
        false
    } else {
        let total = partial_sums[n - 1];
        let before = partial_sums[n - 1 - LAST_DECADE];
        total.is_finite() && (total - before).abs() <= CONVERGENCE_REL * total.abs()
    };
    SeriesCheck {
        partial_sums,
        converged,
    }
}

/// Partial sums of `Σ_{j ≥ 1} 2^j P{|X_1| > L(2^j) A}`, `j ≤ j_max`.
pub fn cond_wip_check(l: &SlowlyVarying, tail: &TailModel, a: f64, j_max: u32) -> Result<SeriesCheck> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput(format!("A must be positive, got {a}")));
    }
    l.validate()?;
    tail.validate()?;
    Ok(series((1..=j_max).map(|j| {
        let w = (j as f64).exp2();
        w * tail.eval(l.eval(w) * a)
    })))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvaryingCheck {
    /// `r_k = Σ_{j=1}^k (2^j / L(2^j)) / (2^k / L(2^k))`, `k = 1..=k_max`.
    pub ratios: Vec<f64>,
    /// `max_k r_k`.
    pub c_l: f64,
    /// Kendall tau of `r_k` against `k` for `k ∈ [k_max - 10, k_max]`.
    pub trend_tau: f64,
    /// `trend_tau ≤ 0`.
    pub bounded: bool,
}

/// Empirical constant in `Σ_{j ≤ k} 2^j/L(2^j) ≤ C_L 2^k/L(2^k)`.
pub fn lemma_svarying_partial_sum(l: &SlowlyVarying, k_max: u32) -> Result<SvaryingCheck> {
    if k_max < 2 {
        return Err(Error::InvalidInput(format!("k_max must be ≥ 2, got {k_max}")));
    }
    l.validate()?;
    let mut ratios = Vec::with_capacity(k_max as usize);
    // Σ_{j ≤ k} 2^{j-k} L(2^k)/L(2^j), accumulated as s_k = s_{k-1}/2 + 1/L(2^k)
    let mut scaled = 0.0;
    for k in 1..=k_max {
        let lk = l.eval((k as f64).exp2());
        scaled = scaled / 2.0 + 1.0 / lk;
        ratios.push(scaled * lk);
    }
    let c_l = ratios.iter().copied().fold(0.0f64, f64::max);
    let tail = &ratios[ratios.len().saturating_sub(LAST_DECADE + 1)..];
    let trend_tau = kendall_tau_trend(tail);
    Ok(SvaryingCheck {
        ratios,
        c_l,
        trend_tau,
        bounded: trend_tau <= 0.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Check {
    #[serde(flatten)]
    pub series: SeriesCheck,
    /// The tail condition converged at `A ∈ {C/2, C, 2C}`.
    pub hypothesis_holds: bool,
}

/// Partial sums of `Σ_j 2^j ∫_1^∞ P{|X_1| > L(2^j) u C} u² du`.
///
/// A term whose inner integral diverges is reported as an error naming `j`.
pub fn lemma3_moment_sum(
    l: &SlowlyVarying,
    tail: &TailModel,
    c: f64,
    j_max: u32,
) -> Result<Lemma3Check> {
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("C must be positive, got {c}")));
    }
    let mut hypothesis_holds = true;
    for a in [c / 2.0, c, 2.0 * c] {
        hypothesis_holds &= cond_wip_check(l, tail, a, j_max)?.converged;
    }
    let mut terms = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        let w = (j as f64).exp2();
        let scale = l.eval(w) * c;
        let inner = integrate_to_infinity(
            |u| tail.eval(scale * u) * u * u,
            1.0,
            RHS_QUAD,
            CONVERGENCE_REL,
            120,
        )
        .map_err(|e| Error::NumericFailure(format!("term j = {j}: {e}")))?;
        terms.push(w * inner.value);
    }
    Ok(Lemma3Check {
        series: series(terms),
        hypothesis_holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// Slope of `log(-log P̂{X > x})` against `log x`.
    pub gamma_hat: f64,
    pub intercept: f64,
    /// Order statistics used in the regression.
    pub points: usize,
    pub window: (f64, f64),
}

pub const DEFAULT_WINDOW: (f64, f64) = (0.90, 0.999);

/// Least-squares tail exponent over the order statistics whose empirical
/// quantile lies in `window`.
pub fn exponent_fit(samples: &[f64], window: (f64, f64)) -> Result<ExponentFit> {
    let (lo, hi) = window;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::InvalidInput(format!("bad quantile window {window:?}")));
    }
    if samples.len() < 10_000 {
        return Err(Error::InsufficientData(format!(
            "need ≥ 10^4 samples, got {}",
            samples.len()
        )));
    }
    let mut xs = samples.to_vec();
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let first = (lo * n as f64).ceil() as usize;
    let last = ((hi * n as f64).floor() as usize).min(n - 1);
    let mut pts = Vec::new();
    let mut i = first.max(1);
    while i <= last {
        // ties share one point at the largest rank
        let mut k = i;
        while k + 1 < n && xs[k + 1] == xs[i] {
            k += 1;
        }
        let p = (n - 1 - k) as f64 / n as f64;
        if xs[i] > 0.0 && p > 0.0 && k <= last {
            pts.push((xs[i].ln(), (-p.ln()).ln()));
        }
        i = k + 1;
    }
    if pts.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "only {} distinct tail points in the window",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("degenerate tail".into()));
    }
    let gamma_hat = sxy / sxx;
    Ok(ExponentFit {
        gamma_hat,
        intercept: my - gamma_hat * mx,
        points: pts.len(),
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_tail_series_terminates() {
        let r = cond_wip_check(
            &SlowlyVarying::LogPower { beta: 1.0 },
            &TailModel::BoundedBy { k: 3.0 },
            1.0,
            40,
        )
        .unwrap();
        assert!(r.converged);
        // L(2^j) ≥ 3 from j = 3 on: (1 + ln 9) > 3
        assert_eq!(r.partial_sums[2], r.partial_sums[39]);
    }

    #[test]
    fn degenerate_tail_diverges() {
        let r = cond_wip_check(&SlowlyVarying::IterLog, &TailModel::Degenerate, 1.0, 40).unwrap();
        assert!(!r.converged);
        assert_eq!(r.partial_sums[1], 6.0);
        let e = lemma3_moment_sum(&SlowlyVarying::IterLog, &TailModel::Degenerate, 1.0, 20);
        assert!(matches!(e, Err(Error::NumericFailure(m)) if m.contains("j = 1")));
    }

    #[test]
    fn constant_l_ratios_are_geometric() {
        let r = lemma_svarying_partial_sum(&SlowlyVarying::Const { c0: 1.0 }, 20).unwrap();
        for (i, &x) in r.ratios.iter().enumerate() {
            let k = i as i32 + 1;
            assert!((x - (2.0 - 2f64.powi(1 - k))).abs() < 1e-14);
            assert!(x >= 1.0);
        }
        assert!(r.c_l < 2.0);
    }

    #[test]
    fn ratios_match_direct_sum() {
        let l = SlowlyVarying::LogPower { beta: 1.0 };
        let r = lemma_svarying_partial_sum(&l, 30).unwrap();
        let k = 30;
        let direct: f64 = (1..=k)
            .map(|j| (j as f64).exp2() / l.eval((j as f64).exp2()))
            .sum::<f64>()
            / ((k as f64).exp2() / l.eval((k as f64).exp2()));
        assert!((r.ratios[29] - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn exponent_fit_of_exponential_law() {
        // P{X > x} = e^{-x}: log(-log P) = log x, slope 1
        let n = 100_000;
        let xs: Vec<f64> = (0..n)
            .map(|i| -(1.0 - (i as f64 + 0.5) / n as f64).ln())
            .collect();
        let f = exponent_fit(&xs, DEFAULT_WINDOW).unwrap();
        assert!((f.gamma_hat - 1.0).abs() < 0.02, "{}", f.gamma_hat);
    }

    #[test]
    fn exponent_fit_rejects_degenerate_input() {
        assert!(matches!(
            exponent_fit(&vec![1.0; 20_000], DEFAULT_WINDOW),
            Err(Error::InsufficientData(_))
        ));
        assert!(exponent_fit(&[1.0; 10], DEFAULT_WINDOW).is_err());
    }
}
