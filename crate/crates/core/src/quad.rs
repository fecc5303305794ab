//! Adaptive Gauss–Kronrod quadrature (7-point Gauss, 15-point Kronrod) with
//! global bisection of the worst interval.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-6,
            abs_tol: 1e-16,
            max_intervals: 2000,
        }
    }
}

/// Integral estimate with its error bound and evaluation count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub evals: usize,
}

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]`.
///
/// `breaks` are interior points where the integrand has kinks or jumps; the
/// initial partition is split there.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NumericFailure(format!(
            "quadrature bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
            evals: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi && x.is_finite())
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(hi);

    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::new();
    let mut evals = 0;
    for w in pts.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1]);
        evals += 15;
        intervals.push((w[0], w[1], v, e));
    }
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !value.is_finite() || !err.is_finite() {
            return Err(Error::NumericFailure(format!(
                "non-finite integrand on [{lo}, {hi}]"
            )));
        }
        if err <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value: sign * value,
                abs_err: err,
                evals,
            });
        }
        if intervals.len() >= opts.max_intervals {
            return Err(Error::NumericFailure(format!(
                "quadrature on [{lo}, {hi}] did not converge: value {value:e}, error {err:e} \
                 after {} intervals and {evals} evaluations",
                intervals.len()
            )));
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (a0, b0, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (a0 + b0);
        if mid <= a0 || mid >= b0 {
            return Err(Error::NumericFailure(format!(
                "interval [{a0}, {b0}] cannot be bisected further"
            )));
        }
        let (v1, e1) = gk15(&mut f, a0, mid);
        let (v2, e2) = gk15(&mut f, mid, b0);
        evals += 30;
        intervals.push((a0, mid, v1, e1));
        intervals.push((mid, b0, v2, e2));
    }
}

/// Integrates a nonnegative, eventually decreasing integrand over `[a, ∞)` by
/// summing dyadic panels `[a·2^k, a·2^{k+1}]` (or unit panels from 0) until a
/// panel contributes below `tail_rel` of the running total.
///
/// Gives up after `max_panels`, reporting divergence.
pub fn integrate_to_infinity(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    opts: QuadOptions,
    tail_rel: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    let mut lo = a;
    let mut width = a.abs().max(1.0);
    let mut small_run = 0;
    for _ in 0..max_panels {
        let hi = lo + width;
        let r = integrate(&mut f, lo, hi, &[], opts)?;
        total += r.value;
        err += r.abs_err;
        evals += r.evals;
        if r.value.abs() <= tail_rel * total.abs() || r.value.abs() <= opts.abs_tol {
            small_run += 1;
            if small_run >= 2 {
                return Ok(QuadResult {
                    value: total,
                    abs_err: err,
                    evals,
                });
            }
        } else {
            small_run = 0;
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::NumericFailure(format!(
        "integral from {a} to infinity did not settle after {max_panels} dyadic panels \
         (partial value {total:e}); the integrand is not integrable or decays too slowly"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, &[], QuadOptions::default()).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
        let r = integrate(|x| x.powi(6), -1.0, 1.0, &[], QuadOptions::default()).unwrap();
        assert!((r.value - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let r = integrate(|x| x, 1.0, 0.0, &[], QuadOptions::default()).unwrap();
        assert!((r.value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn kink_with_breakpoint() {
        let r = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], QuadOptions::default())
            .unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-13);
    }

    #[test]
    fn jump_without_breakpoint_still_converges() {
        let r = integrate(
            |x| if x < 0.3 { 1.0 } else { 0.0 },
            0.0,
            1.0,
            &[],
            QuadOptions {
                rel_tol: 1e-8,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r.value - 0.3).abs() < 1e-7);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_to_infinity(|x| (-x).exp(), 1.0, QuadOptions::default(), 1e-14, 80)
            .unwrap();
        assert!((r.value - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn divergent_tail_is_reported() {
        let r = integrate_to_infinity(|x| x * x, 1.0, QuadOptions::default(), 1e-12, 40);
        assert!(matches!(r, Err(Error::NumericFailure(_))));
    }
}
