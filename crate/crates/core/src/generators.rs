//! Samplers for orthomartingale difference random fields.
//!
//! Every built-in field is a deterministic function of counter-based draws
//! addressed by lattice site, so the value at site `j` does not depend on the
//! sampled rectangle. Translating a field is therefore just reading the same
//! streams at shifted sites.
//!
//! Filtrations are never materialised. The i.i.d. field is adapted to
//! `σ(ε_i, i ≼ j)` and the product fields to `σ(ε^{(q)}_{k_q}, k_q ≤ j_q)`;
//! [`orthomartingale_check`] tests the martingale-difference property
//! statistically against finite pasts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, check_cells, LatticeArray, MultiIndex};
use crate::rng::{CounterRng, SeedSpec};
use crate::stats;

/// Distribution of the centered base variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum BaseDist {
    Rademacher,
    Gaussian { sigma: f64 },
    /// Symmetric law with `P{|X| > s} = min(1, 2 exp(-s^γ))`.
    Weibull { gamma: f64 },
}

impl BaseDist {
    fn validate(&self) -> Result<()> {
        match *self {
            BaseDist::Rademacher => Ok(()),
            BaseDist::Gaussian { sigma } if sigma > 0.0 && sigma.is_finite() => Ok(()),
            BaseDist::Gaussian { sigma } => {
                Err(Error::InvalidInput(format!("gaussian sigma must be > 0, got {sigma}")))
            }
            BaseDist::Weibull { gamma } if gamma > 0.0 && gamma.is_finite() => Ok(()),
            BaseDist::Weibull { gamma } => {
                Err(Error::InvalidInput(format!("weibull gamma must be > 0, got {gamma}")))
            }
        }
    }

    #[inline]
    fn draw(&self, rng: &CounterRng, stream: u64, site: &[i64]) -> f64 {
        match *self {
            BaseDist::Rademacher => rng.sign(stream, site),
            BaseDist::Gaussian { sigma } => sigma * rng.normal(stream, site),
            BaseDist::Weibull { gamma } => {
                weibull_from_uniform(gamma, rng.uniform(stream, site, 0))
            }
        }
    }

    /// Variance of one draw.
    pub fn variance(&self) -> f64 {
        match *self {
            BaseDist::Rademacher => 1.0,
            BaseDist::Gaussian { sigma } => sigma * sigma,
            BaseDist::Weibull { gamma } => {
                // E X² = ∫ 2s P{|X|>s} ds = a² + 4 ∫_a^∞ s e^{-s^γ} ds, a = (ln 2)^{1/γ}
                let a = std::f64::consts::LN_2.powf(1.0 / gamma);
                let g = 2.0 / gamma;
                let upper = statrs::function::gamma::gamma_ur(g, std::f64::consts::LN_2)
                    * statrs::function::gamma::gamma(g);
                a * a + 4.0 * upper / gamma
            }
        }
    }
}

/// Which field to draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "params", rename_all = "snake_case")]
pub enum Variant {
    /// `X_i` i.i.d. from the base law.
    IidSymmetric(BaseDist),
    /// `X_i = ∏_q ε^{(q)}_{i_q}` with independent Rademacher sequences.
    ProductRademacher {},
    /// `X_i = h(ξ^{(1)}_{i_1}, …, ξ^{(d)}_{i_d})` for the degenerate product
    /// kernel `h` and independent copies `ξ^{(q)}` of a base sequence.
    DecoupledProduct(BaseDist),
    /// Test hook: `X_i = ε_i + ε_{i-e_axis}` with Rademacher `ε`. Not an
    /// orthomartingale difference field along `axis`.
    MovingAverage { axis: usize },
    /// Test hook: the zero field.
    Zero {},
}

/// A generator together with its dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub variant: Variant,
    pub d: usize,
}

impl GeneratorSpec {
    pub fn new(variant: Variant, d: usize) -> Result<Self> {
        let spec = GeneratorSpec { variant, d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn iid(dist: BaseDist, d: usize) -> Result<Self> {
        Self::new(Variant::IidSymmetric(dist), d)
    }

    pub fn product_rademacher(d: usize) -> Result<Self> {
        Self::new(Variant::ProductRademacher {}, d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInput("generator dimension must be >= 1".into()));
        }
        match &self.variant {
            Variant::IidSymmetric(b) | Variant::DecoupledProduct(b) => b.validate(),
            Variant::MovingAverage { axis } if (1..=self.d).contains(axis) => Ok(()),
            Variant::MovingAverage { axis } => Err(Error::InvalidInput(format!(
                "moving-average axis {axis} outside 1..={}",
                self.d
            ))),
            Variant::ProductRademacher {} | Variant::Zero {} => Ok(()),
        }
    }

    /// Almost-sure bound `|X_i| ≤ K`, when one exists.
    pub fn bound(&self) -> Option<f64> {
        match &self.variant {
            Variant::IidSymmetric(BaseDist::Rademacher)
            | Variant::DecoupledProduct(BaseDist::Rademacher)
            | Variant::ProductRademacher {} => Some(1.0),
            Variant::MovingAverage { .. } => Some(2.0),
            Variant::Zero {} => Some(0.0),
            _ => None,
        }
    }

    /// Variance of a single site.
    pub fn site_variance(&self) -> f64 {
        match &self.variant {
            Variant::IidSymmetric(b) => b.variance(),
            Variant::DecoupledProduct(b) => b.variance().powi(self.d as i32),
            Variant::ProductRademacher {} => 1.0,
            Variant::MovingAverage { .. } => 2.0,
            Variant::Zero {} => 0.0,
        }
    }
}

/// A realisation `{X_i : 1 ≼ i ≼ n}` with its provenance.
#[derive(Clone, Debug)]
pub struct FieldSample {
    pub values: LatticeArray,
    pub spec: GeneratorSpec,
    pub seed: SeedSpec,
    /// Lattice translation `k`: the sample holds `X_{i+k}`.
    pub offset: Vec<i64>,
}

/// Symmetric variate with `P{|X| > s} = min(1, 2 exp(-s^γ))` by inversion.
///
/// `u < ½` gives a negative sign, and `v = 2 min(u, 1-u)` is inverted through
/// `|X| = (ln(2/v))^{1/γ}`.
pub fn weibull_tail_sample(gamma: f64, u: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidInput(format!("gamma must be > 0, got {gamma}")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidInput(format!("u must lie in (0,1), got {u}")));
    }
    Ok(weibull_from_uniform(gamma, u))
}

#[inline]
fn weibull_from_uniform(gamma: f64, u: f64) -> f64 {
    let (sign, v) = if u < 0.5 {
        (-1.0, 2.0 * u)
    } else {
        (1.0, 2.0 * (1.0 - u))
    };
    sign * (2.0 / v).ln().powf(1.0 / gamma)
}

/// Degenerate product kernel `h(x_1, …, x_r) = ∏ x_q`.
pub fn decoupled_product_kernel(values: &[f64]) -> f64 {
    values.iter().product()
}

fn check_shape(spec: &GeneratorSpec, shape: &MultiIndex) -> Result<()> {
    spec.validate()?;
    if shape.dim() != spec.d {
        return Err(Error::InvalidInput(format!(
            "shape {shape:?} has dimension {} but generator has d = {}",
            shape.dim(),
            spec.d
        )));
    }
    check_cells(shape.volume())
}

/// Draws `{X_i}_{1≼i≼shape}`.
pub fn generate(spec: &GeneratorSpec, shape: &MultiIndex, seed: SeedSpec) -> Result<FieldSample> {
    shift_field(spec, shape, seed, &vec![0; shape.dim()])
}

/// Draws `{X_{i+k}}_{1≼i≼shape}` from the same underlying streams as
/// [`generate`].
pub fn shift_field(
    spec: &GeneratorSpec,
    shape: &MultiIndex,
    seed: SeedSpec,
    k: &[i64],
) -> Result<FieldSample> {
    check_shape(spec, shape)?;
    if k.len() != spec.d {
        return Err(Error::InvalidInput(format!(
            "offset has {} coordinates, expected {}",
            k.len(),
            spec.d
        )));
    }
    let rng = CounterRng::new(seed);
    let values = fill(spec, shape.coords(), &rng, k);
    Ok(FieldSample {
        values: LatticeArray::from_parts(shape.clone(), values),
        spec: spec.clone(),
        seed,
        offset: k.to_vec(),
    })
}

fn fill(spec: &GeneratorSpec, shape: &[usize], rng: &CounterRng, k: &[i64]) -> Vec<f64> {
    let len: usize = shape.iter().product();
    match &spec.variant {
        Variant::Zero {} => vec![0.0; len],
        Variant::ProductRademacher {} => {
            product_fill(shape, k, |q, i| rng.sign(q as u64 + 1, &[i]))
        }
        Variant::DecoupledProduct(base) => {
            product_fill(shape, k, |q, i| base.draw(rng, q as u64 + 1, &[i]))
        }
        Variant::IidSymmetric(base) => {
            let mut out = Vec::with_capacity(len);
            let mut site = vec![0i64; shape.len()];
            lattice::for_each_index(shape, |idx| {
                for (s, (&i, &o)) in site.iter_mut().zip(idx.iter().zip(k)) {
                    *s = i as i64 + o;
                }
                out.push(base.draw(rng, 0, &site));
            });
            out
        }
        Variant::MovingAverage { axis } => {
            let a = axis - 1;
            let mut out = Vec::with_capacity(len);
            let mut site = vec![0i64; shape.len()];
            lattice::for_each_index(shape, |idx| {
                for (s, (&i, &o)) in site.iter_mut().zip(idx.iter().zip(k)) {
                    *s = i as i64 + o;
                }
                let here = rng.sign(0, &site);
                site[a] -= 1;
                out.push(here + rng.sign(0, &site));
            });
            out
        }
    }
}

/// Outer product of per-axis sequences, `X_i = ∏_q h_q(i_q + k_q)`.
fn product_fill(shape: &[usize], k: &[i64], draw: impl Fn(usize, i64) -> f64) -> Vec<f64> {
    let factors: Vec<Vec<f64>> = shape
        .iter()
        .enumerate()
        .map(|(q, &n)| (1..=n as i64).map(|i| draw(q, i + k[q])).collect())
        .collect();
    let mut out = vec![1.0];
    for f in &factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for &a in &out {
            next.extend(f.iter().map(|&b| decoupled_product_kernel(&[a, b])));
        }
        out = next;
    }
    out
}

/// One test statistic of the orthomartingale checker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckStat {
    pub site: Vec<usize>,
    pub test_fn: String,
    pub mean: f64,
    pub std_err: f64,
}

impl CheckStat {
    pub fn within(&self, z: f64) -> bool {
        if self.std_err == 0.0 {
            self.mean == 0.0
        } else {
            self.mean.abs() <= z * self.std_err
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub axis: usize,
    pub replicas: usize,
    pub z_threshold: f64,
    pub stats: Vec<CheckStat>,
    pub pass: bool,
}

/// Number of standard errors tolerated by [`orthomartingale_check`].
pub const CHECK_Z: f64 = 4.0;

const TEST_FUNCTIONS: [&str; 4] = ["sign_past_sum", "clipped_past_sum", "sign_last_past", "one"];

/// Monte Carlo check of `E[X_i | F_{i-e_q}] = 0` along axis `q` (1-based).
///
/// For a few interior sites `i`, estimates `E[X_i g(past)]` where the past is
/// the rectangle `1 ≼ j ≼ i - e_q` and `g` ranges over: sign of the past sum,
/// the past sum normalised by its cell count and clipped to [-1, 1], the sign
/// of `X_{i-e_q}`, and the constant 1. Passes iff every estimate lies within
/// [`CHECK_Z`] standard errors of zero.
pub fn orthomartingale_check(
    spec: &GeneratorSpec,
    shape: &MultiIndex,
    q: usize,
    replicas: usize,
    seed: u64,
) -> Result<CheckReport> {
    check_shape(spec, shape)?;
    if q == 0 || q > spec.d {
        return Err(Error::InvalidInput(format!("axis {q} outside 1..={}", spec.d)));
    }
    if replicas < 1000 {
        return Err(Error::InvalidInput(format!(
            "orthomartingale check needs at least 1000 replicas, got {replicas}"
        )));
    }
    let a = q - 1;
    if shape.coords()[a] < 2 {
        return Err(Error::InvalidInput(format!(
            "shape {shape:?} leaves no past along axis {q}"
        )));
    }
    let corner = shape.coords().to_vec();
    let mut mid: Vec<usize> = corner.iter().map(|&n| n.div_ceil(2)).collect();
    mid[a] = mid[a].max(2);
    let mut sites = vec![corner];
    if !sites.contains(&mid) {
        sites.push(mid);
    }

    let per_replica: Vec<Vec<f64>> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let field = generate(spec, shape, SeedSpec::new(seed, r)).expect("validated");
            let prefix = lattice::prefix_sum(&field.values);
            let mut out = Vec::with_capacity(sites.len() * TEST_FUNCTIONS.len());
            for site in &sites {
                let x = field.values.get(site);
                let mut past = site.clone();
                past[a] -= 1;
                let p = prefix.get(&past);
                let count: usize = past.iter().product();
                let last = field.values.get(&past);
                out.push(x * sign(p));
                out.push(x * (p / (count as f64).sqrt()).clamp(-1.0, 1.0));
                out.push(x * sign(last));
                out.push(x);
            }
            out
        })
        .collect();

    let mut stats_out = Vec::new();
    for (s, site) in sites.iter().enumerate() {
        for (t, name) in TEST_FUNCTIONS.iter().enumerate() {
            let col: Vec<f64> = per_replica
                .iter()
                .map(|row| row[s * TEST_FUNCTIONS.len() + t])
                .collect();
            let (mean, std_err) = stats::mean_se(&col);
            stats_out.push(CheckStat {
                site: site.clone(),
                test_fn: name.to_string(),
                mean,
                std_err,
            });
        }
    }
    let pass = stats_out.iter().all(|s| s.within(CHECK_Z));
    Ok(CheckReport {
        axis: q,
        replicas,
        z_threshold: CHECK_Z,
        stats: stats_out,
        pass,
    })
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(c: &[usize]) -> MultiIndex {
        MultiIndex::new(c.to_vec()).unwrap()
    }

    #[test]
    fn product_rademacher_is_rank_one_sign_matrix() {
        let spec = GeneratorSpec::product_rademacher(2).unwrap();
        let f = generate(&spec, &shape(&[3, 3]), SeedSpec::new(5, 0)).unwrap();
        let v = f.values.values();
        assert!(v.iter().all(|&x| x == 1.0 || x == -1.0));
        // every 2x2 minor vanishes
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let m = v[i * 3 + k] * v[j * 3 + l] - v[i * 3 + l] * v[j * 3 + k];
                        assert_eq!(m, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for spec in [
            GeneratorSpec::iid(BaseDist::Gaussian { sigma: 1.0 }, 3).unwrap(),
            GeneratorSpec::iid(BaseDist::Weibull { gamma: 0.7 }, 3).unwrap(),
            GeneratorSpec::new(Variant::DecoupledProduct(BaseDist::Rademacher), 3).unwrap(),
        ] {
            let a = generate(&spec, &shape(&[4, 3, 5]), SeedSpec::new(1, 2)).unwrap();
            let b = generate(&spec, &shape(&[4, 3, 5]), SeedSpec::new(1, 2)).unwrap();
            assert_eq!(a.values, b.values);
            let c = generate(&spec, &shape(&[4, 3, 5]), SeedSpec::new(1, 3)).unwrap();
            assert_ne!(a.values, c.values);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let spec = GeneratorSpec::product_rademacher(2).unwrap();
        assert!(matches!(
            generate(&spec, &shape(&[3]), SeedSpec::new(0, 0)),
            Err(Error::InvalidInput(_))
        ));
        assert!(GeneratorSpec::iid(BaseDist::Weibull { gamma: 0.0 }, 1).is_err());
        assert!(GeneratorSpec::iid(BaseDist::Gaussian { sigma: -1.0 }, 1).is_err());
        assert!(GeneratorSpec::new(Variant::MovingAverage { axis: 3 }, 2).is_err());
    }

    #[test]
    fn zero_shift_is_generate() {
        let spec = GeneratorSpec::iid(BaseDist::Rademacher, 2).unwrap();
        let s = shape(&[5, 4]);
        let a = generate(&spec, &s, SeedSpec::new(9, 0)).unwrap();
        let b = shift_field(&spec, &s, SeedSpec::new(9, 0), &[0, 0]).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn shift_reads_the_same_streams() {
        // X_{i+k} of a shifted field equals X_{i+k} of a larger unshifted one.
        let spec = GeneratorSpec::iid(BaseDist::Gaussian { sigma: 2.0 }, 2).unwrap();
        let big = generate(&spec, &shape(&[6, 6]), SeedSpec::new(3, 1)).unwrap();
        let shifted = shift_field(&spec, &shape(&[3, 4]), SeedSpec::new(3, 1), &[2, 1]).unwrap();
        for i in 1..=3 {
            for j in 1..=4 {
                assert_eq!(shifted.values.get(&[i, j]), big.values.get(&[i + 2, j + 1]));
            }
        }
    }

    #[test]
    fn weibull_tail_formula() {
        assert!(weibull_tail_sample(0.0, 0.5).is_err());
        assert!(weibull_tail_sample(1.0, 0.0).is_err());
        // u = 1/2 - tiny gives |X| = (ln 2)^{1/γ}, the clamp point of the tail
        let x = weibull_tail_sample(1.0, 0.5).unwrap();
        assert!((x - std::f64::consts::LN_2).abs() < 1e-12);
        // P{|X| > ln 4} = 1/2 at γ = 1: v = 1/2 maps to exactly ln 4
        let x = weibull_tail_sample(1.0, 0.25).unwrap();
        assert!((x + 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn weibull_empirical_tail_at_two() {
        let rng = CounterRng::new(SeedSpec::new(42, 0));
        let n = 1_000_000u64;
        let hits = (0..n as i64)
            .filter(|&i| weibull_from_uniform(2.0, rng.uniform(0, &[i], 0)).abs() > 2.0)
            .count() as f64;
        let p = 2.0 * (-4.0f64).exp();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits / n as f64 - p).abs() < 3.0 * se, "{} vs {p}", hits / n as f64);
    }

    #[test]
    fn weibull_variance_matches_simulation() {
        let b = BaseDist::Weibull { gamma: 1.0 };
        // closed form at γ=1: (ln2)² + 2(1 + ln 2)
        let l = std::f64::consts::LN_2;
        assert!((b.variance() - (l * l + 2.0 * (1.0 + l))).abs() < 1e-10);
    }

    #[test]
    fn rademacher_mean_within_clt_band() {
        let spec = GeneratorSpec::iid(BaseDist::Rademacher, 1).unwrap();
        let n = 400;
        let s = shape(&[n]);
        let bad = (0..10_000u64)
            .filter(|&r| {
                let f = generate(&spec, &s, SeedSpec::new(77, r)).unwrap();
                let mean = f.values.values().iter().sum::<f64>() / n as f64;
                mean.abs() >= 4.0 / (n as f64).sqrt()
            })
            .count();
        // P{|N| ≥ 4} ≈ 6e-5, so at most one offender among 10^4 seeds is expected
        assert!(bad <= 2, "{bad} seeds outside the 4/sqrt(n) band");
    }

    #[test]
    fn builtins_are_centered() {
        let s = shape(&[100_000]);
        for (i, spec) in [
            GeneratorSpec::iid(BaseDist::Rademacher, 1).unwrap(),
            GeneratorSpec::iid(BaseDist::Gaussian { sigma: 1.5 }, 1).unwrap(),
            GeneratorSpec::iid(BaseDist::Weibull { gamma: 1.0 }, 1).unwrap(),
            GeneratorSpec::iid(BaseDist::Weibull { gamma: 0.5 }, 1).unwrap(),
        ]
        .iter()
        .enumerate()
        {
            let f = generate(spec, &s, SeedSpec::new(1000 + i as u64, 0)).unwrap();
            let (m, se) = stats::mean_se(f.values.values());
            assert!(m.abs() < 5.0 * se, "{spec:?}: mean {m} se {se}");
        }
    }

    #[test]
    fn kernel_products() {
        assert_eq!(decoupled_product_kernel(&[1.0, -1.0, 1.0]), -1.0);
        assert_eq!(decoupled_product_kernel(&[3.0, 0.0, 2.0]), 0.0);
    }

    #[test]
    fn kernel_is_degenerate() {
        // E[h(x1, x2, x3) | x2, x3] = x2 x3 E[x1] = 0 for fixed (x2, x3)
        let rng = CounterRng::new(SeedSpec::new(8, 0));
        let fixed = [0.7, -1.3];
        let xs: Vec<f64> = (0..100_000i64)
            .map(|i| decoupled_product_kernel(&[rng.normal(0, &[i]), fixed[0], fixed[1]]))
            .collect();
        let (m, se) = stats::mean_se(&xs);
        assert!(m.abs() < 4.0 * se);
    }

    #[test]
    fn orthomartingale_check_accepts_martingale_fields() {
        let s = shape(&[4, 4]);
        for spec in [
            GeneratorSpec::iid(BaseDist::Gaussian { sigma: 1.0 }, 2).unwrap(),
            GeneratorSpec::product_rademacher(2).unwrap(),
        ] {
            for q in 1..=2 {
                let rep = orthomartingale_check(&spec, &s, q, 4000, 17).unwrap();
                assert!(rep.pass, "{spec:?} axis {q}: {:?}", rep.stats);
            }
        }
    }

    #[test]
    fn orthomartingale_check_rejects_moving_average_on_its_axis() {
        let spec = GeneratorSpec::new(Variant::MovingAverage { axis: 1 }, 2).unwrap();
        let s = shape(&[4, 4]);
        let rep = orthomartingale_check(&spec, &s, 1, 4000, 17).unwrap();
        assert!(!rep.pass);
        // orthogonal axis does not see the dependence
        let rep = orthomartingale_check(&spec, &s, 2, 4000, 17).unwrap();
        assert!(rep.pass, "{:?}", rep.stats);
    }

    #[test]
    fn orthomartingale_check_input_errors() {
        let spec = GeneratorSpec::product_rademacher(2).unwrap();
        assert!(orthomartingale_check(&spec, &shape(&[1, 4]), 1, 1000, 0).is_err());
        assert!(orthomartingale_check(&spec, &shape(&[4, 4]), 3, 1000, 0).is_err());
        assert!(orthomartingale_check(&spec, &shape(&[4, 4]), 1, 10, 0).is_err());
    }

    #[test]
    fn spec_json_shape() {
        let spec = GeneratorSpec::iid(BaseDist::Gaussian { sigma: 1.0 }, 2).unwrap();
        let v = serde_json::to_value(&spec).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"variant": "iid_symmetric", "d": 2,
                               "params": {"dist": "gaussian", "sigma": 1.0}})
        );
        let back: GeneratorSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, spec);
        let p: GeneratorSpec =
            serde_json::from_str(r#"{"variant":"product_rademacher","d":3,"params":{}}"#).unwrap();
        assert_eq!(p, GeneratorSpec::product_rademacher(3).unwrap());
    }
}
