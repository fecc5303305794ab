//! The constants `(A_d, B_d, C_d, p_d)` of the deviation inequality, built
//! level by level from the induction.
//!
//! Level `d` takes `A'_d = A_{d-1}/5 + 2 B_{d-1}`, `A_d = max(e^9, A'_d)`,
//! `C_d = C_{d-1}/(4√2)`, `p_d = p_{d-1} + 2` and `B_d = 4 B_{d-1} K_d M_d`.
//! `K_d` bounds `I(t) / log(1+t)^{p_d}` for `t ≥ 1` and `M_d` majorizes the
//! change of variables `t = w f_{d/2}(u) f_{1/2}(v)`; both are computed
//! numerically and recorded with the constants.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

/// Largest dimension for which constants are computed.
pub const MAX_DIM: usize = 6;

/// Coefficient of the integral term in the one-dimensional martingale bound.
pub const BASE_TAIL_COEFF: f64 = 4.0;

/// Headroom applied to the numerically realized sup defining `K_d`.
pub const K_SAFETY: f64 = 1.05;

/// `t`-grid for `K_d`: `10^{k/10}`, `k = 0..=80`.
const GRID_STEPS_PER_DECADE: usize = 10;
const GRID_DECADES: usize = 8;

/// Stabilization tolerance: the sup over the last decade may move it by at
/// most this fraction.
pub const STABILITY_TOL: f64 = 0.01;

const I_OPTS: QuadOptions = QuadOptions {
    rel_tol: 1e-9,
    abs_tol: 1e-300,
    max_intervals: 4000,
};

/// Numerically certified sub-constants of one induction level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelConstants {
    pub d: usize,
    /// `K_d = 1.05 · sup_t I(t)/log(1+t)^{p_d}` over the grid.
    #[serde(rename = "K")]
    pub k: f64,
    /// Change-of-variables majorant.
    #[serde(rename = "M")]
    pub m: f64,
    /// `min_{u,v ≥ 1} f_{d/2}(u) f_{1/2}(v)`; `I(t) = 0` for `t ≤ f_min`.
    pub f_min: f64,
    /// Grid point attaining the sup defining `K_d`.
    pub argmax_t: f64,
    /// Relative change of the sup contributed by the last grid decade.
    pub last_decade_variation: f64,
    /// Grid point attaining the sup defining `M_d`, when it exceeds 1.
    pub m_argmax_t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub d: usize,
    #[serde(rename = "A")]
    pub a: f64,
    /// `A'_d` before absorption into `max(e^9, ·)`; equal to `A` at `d = 1`.
    #[serde(rename = "A_prime")]
    pub a_prime: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub p: u32,
    #[serde(rename = "K_levels")]
    pub k_levels: Vec<LevelConstants>,
}

/// Constants at `d = 1`.
///
/// The martingale bound reads `2 exp(-½(x/y)²) + 4 ∫_1^∞ w P{|X| > yw/2} dw`.
/// Replacing `y` by `y/√2` gives `A = 2` and `C = 1/(2√2)`; the missing factor
/// `log(1+u)^2 ≥ (ln 2)^2` on `u ≥ 1` is absorbed into `B = 4/(ln 2)^2`.
pub fn base_constants() -> BoundConstants {
    BoundConstants {
        d: 1,
        a: 2.0,
        a_prime: 2.0,
        b: BASE_TAIL_COEFF / std::f64::consts::LN_2.powi(2),
        c: c_for_dim(1),
        p: 2,
        k_levels: Vec::new(),
    }
}

/// `C_d = 2^{-(5d-2)/2}`, the closed form of `C_1 = 1/(2√2)`, `C_d = C_{d-1}/(4√2)`.
pub fn c_for_dim(d: usize) -> f64 {
    (-(5.0 * d as f64 - 2.0) / 2.0).exp2()
}

/// `f_q(t) = t (1 + 2 ln t)^{-q}`.
pub fn f_q(q: f64, t: f64) -> f64 {
    t * (1.0 + 2.0 * t.ln()).powf(-q)
}

/// `ln f_q(e^z)`.
#[inline]
fn log_f(q: f64, z: f64) -> f64 {
    z - q * (2.0 * z).ln_1p()
}

/// `min_{u ≥ 1} f_q(u)`, attained at `u = e^{q - 1/2}` when `q ≥ 1/2`.
pub fn f_q_min(q: f64) -> f64 {
    if q <= 0.5 {
        1.0
    } else {
        log_f(q, q - 0.5).exp()
    }
}

/// `min_{u,v ≥ 1} f_{d/2}(u) f_{1/2}(v)`.
pub fn product_min(d: usize) -> f64 {
    f_q_min(d as f64 / 2.0)
}

/// Solves `g(z) = target` for increasing `g` on `[lo, hi]`, growing `hi` if
/// needed.
fn solve_increasing(g: impl Fn(f64) -> f64, target: f64, lo: f64, mut hi: f64) -> f64 {
    while g(hi) < target {
        hi *= 2.0;
    }
    let mut lo = lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `g(z) = target` for decreasing `g` on `[lo, hi]`.
fn solve_decreasing(g: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Antiderivative of `(1+2z)^d e^{-z}`.
fn poly_exp_antiderivative(d: usize, z: f64) -> f64 {
    let base = 1.0 + 2.0 * z;
    let mut coeff = 1.0;
    let mut sum = 0.0;
    for k in 0..=d {
        sum += coeff * base.powi((d - k) as i32);
        coeff *= 2.0 * (d - k) as f64;
    }
    -(-z).exp() * sum
}

/// `∫_{u ≥ 1, f_{d/2}(u) < s} f_{d/2}(u)^{-2} du`.
///
/// With `u = e^z` the integrand is `(1+2z)^d e^{-z}`, integrated in closed form
/// between the roots of `f_{d/2}(e^z) = s`.
fn inner_u_integral(d: usize, s: f64) -> f64 {
    let q = d as f64 / 2.0;
    let zmin = (q - 0.5).max(0.0);
    let ls = s.ln();
    if ls <= log_f(q, zmin) {
        return 0.0;
    }
    let g = |z: f64| log_f(q, z);
    let z_hi = solve_increasing(g, ls, zmin, zmin + 1.0);
    let z_lo = if ls >= 0.0 { 0.0 } else { solve_decreasing(g, ls, 0.0, zmin) };
    (poly_exp_antiderivative(d, z_hi) - poly_exp_antiderivative(d, z_lo)).max(0.0)
}

/// `I(t) = ∫∫_{u,v ≥ 1} v log(1+v)^{p_{d-1}} / (f_{d/2}(u) f_{1/2}(v))^2 · 1{t > f_{d/2}(u) f_{1/2}(v)} du dv`
/// at level `d ≥ 2`.
///
/// The `u`-integral is exact; the `v`-integral runs over `z = ln v` with
/// integrand `log(1+v)^{p_{d-1}} (1+2z) J(t / f_{1/2}(v))`, split where
/// `f_{1/2}(v) = t` and truncated where `f_{1/2}(v) = t / f_min`.
pub fn i_integral(t: f64, d: usize) -> Result<f64> {
    if !(2..=MAX_DIM).contains(&d) {
        return Err(Error::Unsupported(format!("I(t) is defined for 2 ≤ d ≤ {MAX_DIM}, got {d}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("I(t) needs t > 0, got {t}")));
    }
    let fmin = product_min(d);
    if t <= fmin {
        return Ok(0.0);
    }
    let p = 2 * (d as i32 - 1);
    let g = |z: f64| log_f(0.5, z);
    let z_max = solve_increasing(g, (t / fmin).ln(), 0.0, 1.0);
    let z_kink = if t > 1.0 { solve_increasing(g, t.ln(), 0.0, 1.0) } else { 0.0 };
    let integrand = |z: f64| {
        let v = z.exp();
        v.ln_1p().powi(p) * (1.0 + 2.0 * z) * inner_u_integral(d, t / f_q(0.5, v))
    };
    let r = integrate(integrand, 0.0, z_max, &[z_kink], I_OPTS).map_err(|e| {
        Error::NumericFailure(format!("I({t}) at d = {d}: {e}"))
    })?;
    Ok(r.value)
}

fn grid() -> Vec<f64> {
    (0..=GRID_STEPS_PER_DECADE * GRID_DECADES)
        .map(|k| 10f64.powf(k as f64 / GRID_STEPS_PER_DECADE as f64))
        .collect()
}

const CUMULATIVE_OPTS: QuadOptions = QuadOptions {
    rel_tol: 1e-7,
    abs_tol: 1e-300,
    max_intervals: 500,
};

/// `∫_a^b s h(s) ds` over `ln s`.
fn moment_integral(h: impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    let mut err = None;
    let r = integrate(
        |z| {
            let s = z.exp();
            match h(s) {
                Ok(v) => s * s * v,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        a.ln(),
        b.ln(),
        &[],
        CUMULATIVE_OPTS,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(r?.value)
}

/// Computes `K_d` and `M_d` for one level.
///
/// `M_d = max(1, sup_T ∫_{f_min}^T s I(s) ds / (K_d ∫_1^T s log(1+s)^{p_d} ds))`
/// over grid points `T ≥ 2`: for any nonincreasing `g` whose level sets are
/// `[0, T)` with `T ≥ 2`, `∫ g(t) t I(t) dt ≤ K_d M_d ∫_1^∞ g(t) t log(1+t)^{p_d} dt`.
pub fn level_constants(d: usize) -> Result<LevelConstants> {
    if !(2..=MAX_DIM).contains(&d) {
        return Err(Error::Unsupported(format!("levels run over 2..={MAX_DIM}, got {d}")));
    }
    let p = 2 * d as i32;
    let ts = grid();
    let ratios: Vec<f64> = ts
        .iter()
        .map(|&t| Ok(i_integral(t, d)? / t.ln_1p().powi(p)))
        .collect::<Result<_>>()?;
    let head = ts.len() - GRID_STEPS_PER_DECADE;
    let sup_head = ratios[..head].iter().copied().fold(0.0f64, f64::max);
    let (arg, sup_all) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let variation = (sup_all - sup_head) / sup_all;
    if !(variation < STABILITY_TOL) {
        return Err(Error::NumericFailure(format!(
            "K_{d} grid sup not stabilized: last decade moves it by {:.3}%",
            100.0 * variation
        )));
    }
    let k = K_SAFETY * sup_all;

    let fmin = product_min(d);
    let mut lhs = moment_integral(|s| i_integral(s, d), fmin, 1.0)?;
    let mut rhs = 0.0;
    let mut m = 1.0f64;
    let mut m_arg = None;
    for w in ts.windows(2) {
        lhs += moment_integral(|s| i_integral(s, d), w[0], w[1])?;
        rhs += moment_integral(|s| Ok(s.ln_1p().powi(p)), w[0], w[1])?;
        if w[1] >= 2.0 {
            let ratio = lhs / (k * rhs);
            if ratio > m {
                m = ratio;
                m_arg = Some(w[1]);
            }
        }
    }
    Ok(LevelConstants {
        d,
        k,
        m,
        f_min: fmin,
        argmax_t: ts[arg],
        last_decade_variation: variation,
        m_argmax_t: m_arg,
    })
}

fn level_cache() -> &'static Mutex<BTreeMap<usize, LevelConstants>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, LevelConstants>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

fn cached_level(d: usize) -> Result<LevelConstants> {
    if let Some(l) = level_cache().lock().expect("cache lock").get(&d) {
        return Ok(l.clone());
    }
    let l = level_constants(d)?;
    level_cache()
        .lock()
        .expect("cache lock")
        .insert(d, l.clone());
    Ok(l)
}

/// One induction step from `prev` (level `d - 1`) using `level` (level `d`).
pub fn step(prev: &BoundConstants, level: LevelConstants) -> BoundConstants {
    let a_prime = prev.a / 5.0 + 2.0 * prev.b;
    let mut k_levels = prev.k_levels.clone();
    let b = 4.0 * prev.b * level.k * level.m;
    k_levels.push(level);
    BoundConstants {
        d: prev.d + 1,
        a: 9f64.exp().max(a_prime),
        a_prime,
        b,
        c: c_for_dim(prev.d + 1),
        p: prev.p + 2,
        k_levels,
    }
}

/// Constants for dimension `d`, `1 ≤ d ≤ 6`. Per-level quadrature results are
/// cached for the lifetime of the process.
pub fn recurse_constants(d: usize) -> Result<BoundConstants> {
    if !(1..=MAX_DIM).contains(&d) {
        return Err(Error::Unsupported(format!(
            "constants are available for 1 ≤ d ≤ {MAX_DIM}, got {d}"
        )));
    }
    let mut c = base_constants();
    for level in 2..=d {
        c = step(&c, cached_level(level)?);
    }
    Ok(c)
}
