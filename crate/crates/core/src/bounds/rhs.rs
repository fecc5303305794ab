//! Right-hand sides of the deviation inequalities.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::constants::{recurse_constants, BoundConstants};
use super::tail::TailModel;
use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};

/// Tolerances of every bound quadrature.
pub const RHS_QUAD: QuadOptions = QuadOptions {
    rel_tol: 1e-6,
    abs_tol: 1e-16,
    max_intervals: 2000,
};

/// A panel of the tail integral is negligible below this fraction of the total.
const TAIL_REL: f64 = 1e-12;
const MAX_PANELS: usize = 120;

/// `∫_1^∞ P{|X| > y u C} u log(1+u)^p du`.
pub fn tail_integral(tail: &TailModel, y: f64, c: f64, p: u32) -> Result<f64> {
    let scale = y * c;
    let p = p as i32;
    let integrand = |u: f64| tail.eval(scale * u) * u * u.ln_1p().powi(p);
    if let Some(end) = tail.support_end() {
        let u_end = end / scale;
        // y = K/C lands on u_end = 1 up to rounding
        if u_end <= 1.0 + 4.0 * f64::EPSILON {
            return Ok(0.0);
        }
        let breaks: Vec<f64> = match tail {
            TailModel::Empirical { sorted_abs } => {
                // piecewise constant: split at every distinct jump inside range
                let lo = sorted_abs.partition_point(|&x| x <= scale);
                let mut b: Vec<f64> = sorted_abs[lo..].iter().map(|&x| x / scale).collect();
                b.dedup();
                b
            }
            _ => Vec::new(),
        };
        return Ok(integrate(integrand, 1.0, u_end, &breaks, RHS_QUAD)?.value);
    }
    let kinks: Vec<f64> = tail
        .breakpoints()
        .into_iter()
        .map(|s| s / scale)
        .filter(|&u| u > 1.0)
        .collect();
    // integrate up to the last kink, then hand the smooth remainder to the
    // panel integrator
    let start = kinks.iter().copied().fold(1.0f64, f64::max);
    let head = if start > 1.0 {
        integrate(integrand, 1.0, start, &kinks, RHS_QUAD)?.value
    } else {
        0.0
    };
    let rest = integrate_to_infinity(integrand, start, RHS_QUAD, TAIL_REL, MAX_PANELS)?.value;
    Ok(head + rest)
}

/// `A exp(-(x/y)^{2/d}) + B ∫_1^∞ P{|X_1| > y u C} u log(1+u)^p du`, unclamped.
pub fn thm1_rhs(x: f64, y: f64, tail: &TailModel, c: &BoundConstants) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::InvalidInput(format!("need x, y > 0, got x={x}, y={y}")));
    }
    tail.validate()?;
    let first = c.a * (-(x / y).powf(2.0 / c.d as f64)).exp();
    let integral = tail_integral(tail, y, c.c, c.p)?;
    Ok(first + c.b * integral)
}

/// The bounded-field form of the bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedRhs {
    pub value: f64,
    /// `3^{d/2} K / C`.
    pub threshold: f64,
    /// `x` is at or beyond the threshold, so `value` is the formula.
    pub valid: bool,
    /// `value < 1`.
    pub informative: bool,
}

/// `A exp(-(C x/K)^{2/d})` for `x ≥ 3^{d/2} K/C`, else the trivial bound 1.
pub fn bounded_rhs(x: f64, k: f64, c: &BoundConstants) -> Result<BoundedRhs> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("K must be positive, got {k}")));
    }
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!("x must be positive, got {x}")));
    }
    let d = c.d as f64;
    let threshold = 3f64.powf(d / 2.0) * k / c.c;
    if x < threshold {
        return Ok(BoundedRhs {
            value: 1.0,
            threshold,
            valid: false,
            informative: false,
        });
    }
    let value = c.a * (-(c.c * x / k).powf(2.0 / d)).exp();
    Ok(BoundedRhs {
        value,
        threshold,
        valid: true,
        informative: value < 1.0,
    })
}

/// Exponents of `|N|` and `x` in the large-deviation rate, `γ/(2+dγ)` and
/// `2γ/(2+dγ)`.
pub fn thm2_exponents(d: usize, gamma: f64) -> (f64, f64) {
    let den = 2.0 + d as f64 * gamma;
    (gamma / den, 2.0 * gamma / den)
}

/// `y* = |N|^{1/(2+dγ)} x^{2/(2+dγ)}`.
pub fn thm2_y_star(x: f64, volume: f64, d: usize, gamma: f64) -> f64 {
    let den = 2.0 + d as f64 * gamma;
    volume.powf(1.0 / den) * x.powf(2.0 / den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm2Rhs {
    /// Bound on `P{|S_N|/|N| > x}`.
    pub value: f64,
    pub y_star: f64,
    /// `|N|^{γ/(2+dγ)} x^{2γ/(2+dγ)}`.
    pub rate: f64,
    /// `(C₁, C₂)` with `value ≤ C₁ exp(-C₂ · rate)` on the calibration grid.
    pub c1: f64,
    pub c2: f64,
}

fn thm2_value(x: f64, volume: f64, gamma: f64, c: &BoundConstants) -> Result<f64> {
    let y = thm2_y_star(x, volume, c.d, gamma);
    thm1_rhs(x * volume.sqrt(), y, &TailModel::WeibullEnvelope { gamma }, c)
}

/// Calibration grid for `(C₁, C₂)`: `|N| = 4^k`, `k = 2..=8`, and
/// `x = 2^i`, `i = -3..=2`.
type CalibrationCache = Mutex<BTreeMap<(usize, u64), (f64, f64)>>;

fn calibration(d: usize, gamma: f64) -> Result<(f64, f64)> {
    static CACHE: OnceLock<CalibrationCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let key = (d, gamma.to_bits());
    if let Some(&v) = cache.lock().expect("cache lock").get(&key) {
        return Ok(v);
    }
    let c = recurse_constants(d)?;
    let (en, ex) = thm2_exponents(d, gamma);
    let mut pts = Vec::new();
    for k in 2..=8 {
        let vol = 4f64.powi(k);
        for i in -3..=2 {
            let x = 2f64.powi(i);
            let v = thm2_value(x, vol, gamma, &c)?;
            if v > 0.0 {
                pts.push((vol.powf(en) * x.powf(ex), v.ln()));
            }
        }
    }
    if pts.len() < 2 {
        return Err(Error::NumericFailure("calibration grid produced no bound values".into()));
    }
    let n = pts.len() as f64;
    let mz = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mz) * (p.1 - ml)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mz).powi(2)).sum();
    let c2 = (-sxy / sxx).max(0.0);
    let ln_c1 = pts
        .iter()
        .map(|p| p.1 + c2 * p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let fit = (ln_c1.exp(), c2);
    cache.lock().expect("cache lock").insert(key, fit);
    Ok(fit)
}

/// Bound on `P{|S_N|/|N| > x}` for a field with `sup_s e^{s^γ} P{|X_1| > s} ≤ 2`:
/// the general bound at deviation `x|N|^{1/2}` and `y = y*`.
pub fn thm2_rhs(x: f64, n: &MultiIndex, gamma: f64, d: usize) -> Result<Thm2Rhs> {
    if !(x > 0.0 && gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidInput(format!("need x, γ > 0, got x={x}, γ={gamma}")));
    }
    if n.dim() != d {
        return Err(Error::InvalidInput(format!("N has dimension {}, expected {d}", n.dim())));
    }
    let c = recurse_constants(d)?;
    let volume = n.volume() as f64;
    let value = thm2_value(x, volume, gamma, &c)?;
    let (en, ex) = thm2_exponents(d, gamma);
    let (c1, c2) = calibration(d, gamma)?;
    Ok(Thm2Rhs {
        value,
        y_star: thm2_y_star(x, volume, d, gamma),
        rate: volume.powf(en) * x.powf(ex),
        c1,
        c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::constants::base_constants;

    fn fake(d: usize) -> BoundConstants {
        let mut c = base_constants();
        c.d = d;
        c.a = 9f64.exp();
        c.c = super::super::constants::c_for_dim(d);
        c.p = 2 * d as u32;
        c
    }

    #[test]
    fn zero_tail_leaves_exponential_term() {
        let c = fake(2);
        let v = thm1_rhs(3.0, 1.5, &TailModel::BoundedBy { k: 0.0 }, &c).unwrap();
        assert_eq!(v, c.a * (-2f64).exp());
    }

    #[test]
    fn bounded_tail_below_threshold_vanishes() {
        let c = fake(2);
        let k = 1.0;
        let y = k / c.c;
        let v = thm1_rhs(100.0, y, &TailModel::BoundedBy { k }, &c).unwrap();
        assert_eq!(v, c.a * (-(100.0 / y)).exp());
        let w = thm1_rhs(100.0, y / 2.0, &TailModel::BoundedBy { k }, &c).unwrap();
        assert!(w > c.a * (-(200.0 / y)).exp());
    }

    #[test]
    fn bounded_tail_integral_closed_form() {
        // ∫_1^2 u log(1+u)^0 du = 3/2
        let v = tail_integral(&TailModel::BoundedBy { k: 2.0 }, 1.0, 1.0, 0).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_tail_is_reported() {
        let c = fake(1);
        let r = thm1_rhs(1.0, 1.0, &TailModel::Degenerate, &c);
        assert!(matches!(r, Err(Error::NumericFailure(_))));
    }

    #[test]
    fn bounded_threshold_and_example() {
        let c = fake(2);
        let at = bounded_rhs(48.0, 1.0, &c).unwrap();
        assert!(at.valid && !at.informative);
        assert!((at.value - c.a * (-3f64).exp()).abs() < 1e-9);
        let v = bounded_rhs(64.0, 1.0, &c).unwrap();
        assert!((v.value - 5f64.exp()).abs() < 1e-9);
        let below = bounded_rhs(40.0, 1.0, &c).unwrap();
        assert_eq!((below.value, below.valid), (1.0, false));
        assert!(bounded_rhs(40.0, 0.0, &c).is_err());
    }

    #[test]
    fn exponent_algebra() {
        assert_eq!(thm2_exponents(2, 1.0), (0.25, 0.5));
        // (x√|N| / y*)^{2/d} = |N|^{γ/(2+dγ)} x^{2γ/(2+dγ)}
        for (d, g) in [(1usize, 0.5), (2, 1.0), (3, 2.0)] {
            let (vol, x) = (4096.0f64, 0.7f64);
            let y = thm2_y_star(x, vol, d, g);
            let lhs = (x * vol.sqrt() / y).powf(2.0 / d as f64);
            let (en, ex) = thm2_exponents(d, g);
            let rhs = vol.powf(en) * x.powf(ex);
            assert!((lhs - rhs).abs() < 1e-12 * rhs);
            assert!((y.powf(g) - rhs).abs() < 1e-12 * rhs);
        }
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn weibull_rhs_matches_fixed_grid_simpson() {
        let c = recurse_constants(2).unwrap();
        let (x, y) = (8.0, 1.0);
        let tail = |s: f64| (2.0 * (-s * s).exp()).min(1.0);
        let f = |u: f64| tail(y * u * c.c) * u * u.ln_1p().powi(c.p as i32);
        // tail kink at y u C = √ln 2; e^{-s²} is below 1e-300 past s = 27
        let kink = std::f64::consts::LN_2.sqrt() / (y * c.c);
        let far = 27.0 / (y * c.c);
        let integral = simpson(f, 1.0, kink, 200_000) + simpson(f, kink, far, 400_000);
        let oracle = c.a * (-(x / y)).exp() + c.b * integral;
        let v = thm1_rhs(x, y, &TailModel::WeibullEnvelope { gamma: 2.0 }, &c).unwrap();
        assert!((v - oracle).abs() <= 1e-6 * oracle, "{v} vs {oracle}");
    }

    #[test]
    fn thm1_monotone_in_x_and_tail() {
        let c = fake(2);
        let t1 = TailModel::WeibullEnvelope { gamma: 2.0 };
        let small = TailModel::BoundedBy { k: 0.1 };
        let large = TailModel::BoundedBy { k: 0.3 };
        let mut prev = f64::INFINITY;
        for x in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let v = thm1_rhs(x, 1.0, &t1, &c).unwrap();
            assert!(v <= prev);
            prev = v;
            assert!(
                thm1_rhs(x, 1.0, &large, &c).unwrap() >= thm1_rhs(x, 1.0, &small, &c).unwrap()
            );
        }
    }
}
