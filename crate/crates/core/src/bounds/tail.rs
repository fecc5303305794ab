//! Tail functions `s ↦ P{|X_1| > s}`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::generators::{BaseDist, GeneratorSpec, Variant};
use crate::quad::{integrate, QuadOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TailModel {
    /// `1{s < K}`: the envelope of any field bounded by `K`.
    BoundedBy { k: f64 },
    /// `min(1, 2 exp(-s^γ))`.
    WeibullEnvelope { gamma: f64 },
    /// Tail of `scale · ∏_{q ≤ d} |N_q|` for independent standard normals.
    GaussianProduct {
        d: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Empirical tail of the absolute values of a sample.
    Empirical { sorted_abs: Vec<f64> },
    /// `≡ 1`, a non-integrable control.
    Degenerate,
}

fn one() -> f64 {
    1.0
}

const GAUSS_OPTS: QuadOptions = QuadOptions {
    rel_tol: 1e-10,
    abs_tol: 1e-300,
    max_intervals: 4000,
};

/// `P{|N_1 ⋯ N_d| > s}`.
fn gaussian_product_tail(d: usize, s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if d == 1 {
        return erfc(s / std::f64::consts::SQRT_2);
    }
    // P{∏ > s} = ∫_0^∞ 2φ(x) P{∏_{d-1} > s/x} dx
    let density = |x: f64| {
        (2.0 / std::f64::consts::PI).sqrt() * (-0.5 * x * x).exp()
            * gaussian_product_tail(d - 1, s / x)
    };
    integrate(density, 0.0, 40.0, &[s.min(1.0), 1.0, 4.0], GAUSS_OPTS)
        .map(|r| r.value.clamp(0.0, 1.0))
        .unwrap_or(f64::NAN)
}

impl TailModel {
    pub fn empirical(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientData("empty sample".into()));
        }
        let mut sorted_abs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
        if sorted_abs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        sorted_abs.sort_by(f64::total_cmp);
        Ok(TailModel::Empirical { sorted_abs })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TailModel::BoundedBy { k } if !(*k >= 0.0 && k.is_finite()) => {
                Err(Error::InvalidInput(format!("bound K must be ≥ 0, got {k}")))
            }
            TailModel::WeibullEnvelope { gamma } if !(*gamma > 0.0 && gamma.is_finite()) => {
                Err(Error::InvalidInput(format!("γ must be positive, got {gamma}")))
            }
            TailModel::GaussianProduct { d, scale } if *d == 0 || !(*scale > 0.0) => {
                Err(Error::InvalidInput("GaussianProduct needs d ≥ 1 and scale > 0".into()))
            }
            TailModel::Empirical { sorted_abs } if sorted_abs.is_empty() => {
                Err(Error::InsufficientData("empty sample".into()))
            }
            _ => Ok(()),
        }
    }

    /// `P{|X_1| > s}`.
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            TailModel::BoundedBy { k } => {
                if s < *k {
                    1.0
                } else {
                    0.0
                }
            }
            TailModel::WeibullEnvelope { gamma } => {
                if s <= 0.0 {
                    1.0
                } else {
                    (2.0 * (-s.powf(*gamma)).exp()).min(1.0)
                }
            }
            TailModel::GaussianProduct { d, scale } => gaussian_product_tail(*d, s / scale),
            TailModel::Empirical { sorted_abs } => {
                let above = sorted_abs.len() - sorted_abs.partition_point(|&x| x <= s);
                above as f64 / sorted_abs.len() as f64
            }
            TailModel::Degenerate => 1.0,
        }
    }

    /// A point beyond which the tail vanishes, when there is one.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            TailModel::BoundedBy { k } => Some(*k),
            TailModel::Empirical { sorted_abs } => sorted_abs.last().copied(),
            _ => None,
        }
    }

    /// Points where the tail has a kink or a jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TailModel::BoundedBy { k } => vec![*k],
            TailModel::WeibullEnvelope { gamma } => vec![std::f64::consts::LN_2.powf(1.0 / gamma)],
            _ => Vec::new(),
        }
    }

    /// The tail model matching a built-in generator's site law, if one is
    /// available in closed form.
    pub fn for_generator(spec: &GeneratorSpec) -> Option<TailModel> {
        if let Some(k) = spec.bound() {
            return Some(TailModel::BoundedBy { k });
        }
        match &spec.variant {
            Variant::IidSymmetric(BaseDist::Weibull { gamma }) => {
                Some(TailModel::WeibullEnvelope { gamma: *gamma })
            }
            Variant::IidSymmetric(BaseDist::Gaussian { sigma }) => Some(TailModel::GaussianProduct {
                d: 1,
                scale: *sigma,
            }),
            Variant::DecoupledProduct(BaseDist::Gaussian { sigma }) => {
                Some(TailModel::GaussianProduct {
                    d: spec.d,
                    scale: sigma.powi(spec.d as i32),
                })
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_envelope() {
        let t = TailModel::BoundedBy { k: 2.0 };
        assert_eq!(t.eval(1.999), 1.0);
        assert_eq!(t.eval(2.0), 0.0);
        assert_eq!(t.eval(7.0), 0.0);
    }

    #[test]
    fn weibull_envelope_values() {
        let t = TailModel::WeibullEnvelope { gamma: 1.0 };
        assert_eq!(t.eval(0.0), 1.0);
        assert!((t.eval(4f64.ln()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gaussian_product_against_closed_forms() {
        let t1 = TailModel::GaussianProduct { d: 1, scale: 1.0 };
        let v = t1.eval(1.959_963_984_540_054);
        assert!((v - 0.05).abs() < 1e-10, "{v}");
        // E|N_1 N_2| = 2/π is the integral of the tail
        let t2 = TailModel::GaussianProduct { d: 2, scale: 1.0 };
        assert_eq!(t2.eval(0.0), 1.0);
        let mean = integrate(|s| t2.eval(s), 0.0, 60.0, &[1.0, 5.0], QuadOptions::default())
            .unwrap()
            .value;
        assert!((mean - 2.0 / std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn gaussian_product_is_nonincreasing() {
        let t = TailModel::GaussianProduct { d: 3, scale: 1.0 };
        let mut prev = 1.0;
        for i in 0..40 {
            let v = t.eval(i as f64 * 0.25);
            assert!(v <= prev + 1e-12 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn empirical_tail_counts_strictly_above() {
        let t = TailModel::empirical(&[1.0, -2.0, 3.0, 2.0]).unwrap();
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(2.0), 0.25);
        assert_eq!(t.eval(3.0), 0.0);
        assert!(TailModel::empirical(&[]).is_err());
    }

    #[test]
    fn json_tags() {
        let v = serde_json::to_value(TailModel::WeibullEnvelope { gamma: 2.0 }).unwrap();
        assert_eq!(v, serde_json::json!({"model": "weibull_envelope", "gamma": 2.0}));
        let g: TailModel =
            serde_json::from_value(serde_json::json!({"model": "gaussian_product", "d": 2}))
                .unwrap();
        assert_eq!(g, TailModel::GaussianProduct { d: 2, scale: 1.0 });
    }
}
